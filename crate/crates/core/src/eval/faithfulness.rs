//! Value-level hallucination checks: numbers and place names in a text
//! must come from the document it verbalizes.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::tokenize::tokenize;
use crate::format::{format_number, parse_date};
use crate::ir::{IntentDocument, BRAZILIAN_STATES};
use crate::report::SlotRef;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    UnsupportedNumber {
        value: String,
    },
    UnsupportedName {
        value: String,
    },
    /// A realized slot's number is missing from the text.
    Omitted {
        intent: String,
        key: String,
        value: String,
    },
    /// A number sits next to the keyword of an attribute other than its own.
    Mispaired {
        key: String,
        found: String,
        expected: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Verdict {
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Place and entity names the proper-noun check knows about.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gazetteer {
    pub cities: Vec<String>,
    pub ufs: Vec<String>,
    pub entities: Vec<String>,
}

const COASTAL_CITIES: &[&str] = &[
    "Aracaju",
    "Arapiraca",
    "Angra dos Reis",
    "Belém",
    "Cabo Frio",
    "Camboriú",
    "Balneário Camboriú",
    "Florianópolis",
    "Fortaleza",
    "Guarujá",
    "Ilhabela",
    "Ilhéus",
    "Itajaí",
    "Joinville",
    "João Pessoa",
    "Macaé",
    "Maceió",
    "Natal",
    "Niterói",
    "Paranaguá",
    "Porto Alegre",
    "Porto Seguro",
    "Recife",
    "Rio Grande",
    "Rio de Janeiro",
    "Salvador",
    "Santos",
    "São Luís",
    "São Sebastião",
    "São Paulo",
    "Ubatuba",
    "Vitória",
    "Vila Velha",
];

const ENTITIES: &[&str] = &[
    "Centro de Sismologia da USP",
    "Seismology Center at the University of São Paulo",
    "Seismological Center at the University of São Paulo",
    "Petrobras",
    "Agência Nacional do Petróleo",
];

impl Default for Gazetteer {
    fn default() -> Self {
        Gazetteer {
            cities: COASTAL_CITIES.iter().map(|s| s.to_string()).collect(),
            ufs: BRAZILIAN_STATES.iter().map(|s| s.to_string()).collect(),
            entities: ENTITIES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FaithfulnessOptions {
    pub gazetteer: Gazetteer,
    /// Flag numbers that follow another attribute's keyword.
    pub pairing: bool,
}

impl Default for FaithfulnessOptions {
    fn default() -> Self {
        FaithfulnessOptions {
            gazetteer: Gazetteer::default(),
            pairing: true,
        }
    }
}

fn number_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\d+(?:[.,:]\d+)*").unwrap())
}

/// `0,8` and `0.80` both become `0.8`; times keep their digits.
pub fn normalize_number(raw: &str) -> String {
    if raw.contains(':') {
        return raw.to_owned();
    }
    let s = if raw.contains('.') && raw.contains(',') {
        raw.replace('.', "").replace(',', ".")
    } else {
        raw.replace(',', ".")
    };
    match s.parse::<f64>() {
        Ok(v) => format_number(v, false),
        Err(_) => raw.to_owned(),
    }
}

pub fn numbers_in(text: &str) -> Vec<String> {
    number_re()
        .find_iter(text)
        .map(|m| normalize_number(m.as_str()))
        .collect()
}

fn value_numbers(raw: &str) -> Vec<String> {
    let mut out = numbers_in(raw);
    if let Some(d) = parse_date(raw) {
        use chrono::Datelike;
        out.extend([d.day().to_string(), d.year().to_string()]);
    }
    out
}

fn contains_name(haystack: &str, name: &str) -> bool {
    let mut from = 0;
    while let Some(i) = haystack[from..].find(name) {
        let start = from + i;
        let end = start + name.len();
        let before = haystack[..start].chars().next_back();
        let after = haystack[end..].chars().next();
        if !before.is_some_and(char::is_alphanumeric) && !after.is_some_and(char::is_alphanumeric) {
            return true;
        }
        from = end;
    }
    false
}

/// Attribute keys and the words a text uses to introduce their values.
const KEYWORDS: &[(&str, &[&str])] = &[
    ("humidity", &["umidade", "humidity"]),
    ("wind", &["vento", "ventos", "wind"]),
    ("temperature", &["temperatura", "temperature", "termômetros"]),
    ("cloudiness", &["nebulosidade", "cloudiness"]),
    ("quantity", &["navios", "vessels", "embarcações"]),
    ("magnitude", &["magnitude"]),
    ("depth", &["profundidade", "depth"]),
    ("water_temperature", &["água", "water"]),
];

const LOOKAHEAD: usize = 6;
const SPANS: &[&str] = &["dias", "days", "meses", "months", "horas", "hours", "anos", "years"];

fn pairing(doc: &IntentDocument, text: &str, out: &mut Vec<Violation>) {
    let tokens = tokenize(text);
    let key_of = |tok: &str| KEYWORDS.iter().find(|(_, words)| words.contains(&tok)).map(|(k, _)| *k);
    for (i, tok) in tokens.iter().enumerate() {
        let Some(key) = key_of(tok) else { continue };
        let expected: BTreeSet<String> = doc
            .intents()
            .iter()
            .filter_map(|intent| intent.get(key))
            .flat_map(numbers_in)
            .collect();
        if expected.is_empty() {
            continue;
        }
        let found = tokens[i + 1..]
            .iter()
            .enumerate()
            .take(LOOKAHEAD)
            .take_while(|(_, t)| !matches!(t.as_str(), "." | "!" | "?" | ";") && key_of(t).is_none())
            .find(|(_, t)| t.starts_with(|c: char| c.is_ascii_digit()))
            // "há 12 dias" counts days, it is not a reading
            .filter(|(j, _)| !tokens.get(i + j + 2).is_some_and(|u| SPANS.contains(&u.as_str())))
            .map(|(_, t)| t);
        if let Some(found) = found {
            let n = normalize_number(found);
            let elsewhere = KEYWORDS
                .iter()
                .filter(|(k, _)| *k != key)
                .flat_map(|(k, _)| doc.intents().iter().filter_map(|intent| intent.get(k)))
                .flat_map(numbers_in)
                .any(|m| m == n);
            if !expected.contains(&n) && elsewhere {
                out.push(Violation::Mispaired {
                    key: key.to_owned(),
                    found: n,
                    expected: expected.into_iter().collect::<Vec<_>>().join(", "),
                });
            }
        }
    }
}

/// Checks `text` against `doc`: every number must occur among the
/// document's attribute values, and every known city, state or entity
/// named must be one of the document's city, uf or entity values.
pub fn check_faithfulness(doc: &IntentDocument, text: &str) -> Verdict {
    check_with(doc, text, None, &FaithfulnessOptions::default())
}

/// As [`check_faithfulness`], also requiring the numbers of `slots` to be
/// present and, when enabled, keyword/number pairings to agree.
pub fn check_with(
    doc: &IntentDocument,
    text: &str,
    slots: Option<&[SlotRef]>,
    options: &FaithfulnessOptions,
) -> Verdict {
    let mut violations = Vec::new();
    let supported: BTreeSet<String> = doc
        .intents()
        .iter()
        .flat_map(|i| i.attrs())
        .flat_map(|(_, v)| value_numbers(v.raw()))
        .collect();
    let mut reported = BTreeSet::new();
    for n in numbers_in(text) {
        if !supported.contains(&n) && reported.insert(n.clone()) {
            violations.push(Violation::UnsupportedNumber { value: n });
        }
    }

    let named: BTreeSet<&str> = doc
        .intents()
        .iter()
        .flat_map(|i| ["city", "uf", "entity"].into_iter().filter_map(|k| i.get(k)))
        .collect();
    let g = &options.gazetteer;
    let known = g.cities.iter().chain(&g.ufs).chain(&g.entities);
    for name in known {
        let inside_named = named.iter().any(|n| contains_name(n, name));
        if !inside_named && contains_name(text, name) {
            violations.push(Violation::UnsupportedName { value: name.clone() });
        }
    }

    if let Some(slots) = slots {
        let present: BTreeSet<String> = numbers_in(text).into_iter().collect();
        for slot in slots {
            let Some(intent) = doc.intent(slot.intent_id) else {
                continue;
            };
            let Some(raw) = intent.get(&slot.key) else {
                continue;
            };
            let wanted = value_numbers(raw);
            if wanted.iter().any(|n| !present.contains(n)) {
                violations.push(Violation::Omitted {
                    intent: intent.name().to_owned(),
                    key: slot.key.clone(),
                    value: raw.to_owned(),
                });
            }
        }
    }

    if options.pairing {
        pairing(doc, text, &mut violations);
    }
    Verdict { violations }
}
