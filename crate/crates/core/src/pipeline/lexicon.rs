//! Lexicon data: phrase entries keyed by the facts they cover, place
//! agreement features, value translations and referring expressions.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::predicate::{AttrPath, Op, Predicate};

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read lexicon {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("lexicon file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("lexicon entry `{entry}`: {message}")]
    Entry { entry: String, message: String },
    #[error("entity {0} needs a full description and at least one alternative")]
    Entity(String),
    #[error("duplicate lexicon entry `{0}`")]
    DuplicateId(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueFormat {
    #[default]
    Identity,
    Translate,
    DatePt,
    NumberPt,
    /// Day count rendered as whole months.
    Months,
    Lower,
}

impl ValueFormat {
    fn parse(s: &str) -> Option<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_owned())).ok()
    }
}

/// One piece of a parsed phrase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Segment {
    Text(String),
    /// `[INTENT.key]` or `[INTENT.key|format]`; realized as a single token.
    Value(AttrPath, ValueFormat),
    /// `[ENTITY:NAME]`, resolved by the referring-expression stage.
    Entity(String),
    /// `{art:PATH}`: definite article of the place named by the value.
    Article(AttrPath),
    /// `{num:sg|pl:PATH}`: singular when the value is 1.
    Number {
        singular: String,
        plural: String,
        attr: AttrPath,
    },
    /// `{gen:m|f:PATH}`: by the grammatical gender of the place.
    Gender {
        masculine: String,
        feminine: String,
        attr: AttrPath,
    },
}

fn parse_path(s: &str) -> Result<AttrPath, String> {
    AttrPath::try_from(s.trim().to_owned())
}

fn parse_pair(body: &str) -> Result<(String, String, AttrPath), String> {
    let (forms, path) = body.rsplit_once(':').ok_or_else(|| format!("`{body}` lacks a path"))?;
    let (a, b) = forms
        .split_once('|')
        .ok_or_else(|| format!("`{body}` needs two forms separated by `|`"))?;
    Ok((a.to_owned(), b.to_owned(), parse_path(path)?))
}

/// Parses the phrase syntax used by lexicon variants.
pub fn parse_phrase(phrase: &str) -> Result<Vec<Segment>, String> {
    let mut out = Vec::new();
    let mut text = String::new();
    let mut rest = phrase;
    while let Some(i) = rest.find(['[', '{']) {
        text.push_str(&rest[..i]);
        let open = rest.as_bytes()[i] as char;
        let close = if open == '[' { ']' } else { '}' };
        let after = &rest[i + 1..];
        let j = after
            .find(close)
            .ok_or_else(|| format!("unclosed `{open}` in `{phrase}`"))?;
        let body = &after[..j];
        if !text.is_empty() {
            out.push(Segment::Text(std::mem::take(&mut text)));
        }
        out.push(if open == '[' {
            if let Some(name) = body.strip_prefix("ENTITY:") {
                Segment::Entity(name.trim().to_owned())
            } else {
                let (path, fmt) = match body.split_once('|') {
                    Some((p, f)) => (
                        p,
                        ValueFormat::parse(f.trim()).ok_or_else(|| format!("unknown format `{f}`"))?,
                    ),
                    None => (body, ValueFormat::Identity),
                };
                Segment::Value(parse_path(path)?, fmt)
            }
        } else {
            match body.split_once(':') {
                Some(("art", path)) => Segment::Article(parse_path(path)?),
                Some(("num", rest)) => {
                    let (singular, plural, attr) = parse_pair(rest)?;
                    Segment::Number { singular, plural, attr }
                }
                Some(("gen", rest)) => {
                    let (masculine, feminine, attr) = parse_pair(rest)?;
                    Segment::Gender {
                        masculine,
                        feminine,
                        attr,
                    }
                }
                _ => return Err(format!("unknown marker `{{{body}}}`")),
            }
        });
        rest = &after[j + 1..];
    }
    text.push_str(rest);
    if !text.is_empty() {
        out.push(Segment::Text(text));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    #[default]
    M,
    F,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Place {
    #[serde(default)]
    pub gender: Gender,
    /// Definite article used before the name, if any (`o Rio de Janeiro`).
    #[serde(default)]
    pub article: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityForms {
    /// First mention.
    pub full: String,
    /// Later mentions, chosen among uniformly.
    #[serde(default)]
    pub alternatives: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexEntry {
    pub id: String,
    pub covers: Vec<AttrPath>,
    pub variants: Vec<String>,
    #[serde(default)]
    pub when: Vec<Predicate>,
    /// Verbalizes the cause of a causal chain; only used inside one.
    #[serde(default)]
    pub causal: bool,
    #[serde(skip)]
    pub(crate) parsed: Vec<Vec<Segment>>,
}

impl LexEntry {
    pub fn intents(&self) -> BTreeSet<&str> {
        self.covers.iter().map(|p| p.intent.as_str()).collect()
    }

    pub fn segments(&self, variant: usize) -> &[Segment] {
        &self.parsed[variant]
    }

    fn prepare(&mut self, entities: &HashMap<String, EntityForms>) -> Result<(), LexiconError> {
        let fail = |message: String| LexiconError::Entry {
            entry: self.id.clone(),
            message,
        };
        if self.covers.is_empty() {
            return Err(fail("covers nothing".into()));
        }
        if self.variants.is_empty() {
            return Err(fail("has no variants".into()));
        }
        let covers: BTreeSet<&AttrPath> = self.covers.iter().collect();
        if covers.len() != self.covers.len() {
            return Err(fail("covers a fact twice".into()));
        }
        if self.intents().len() > 2 {
            return Err(fail("spans more than two intents".into()));
        }
        let pinned: BTreeSet<&AttrPath> = self
            .when
            .iter()
            .filter(|p| p.op == Op::Eq && p.value.is_some())
            .map(|p| &p.attr)
            .collect();
        let mut parsed = Vec::new();
        for v in &self.variants {
            let segs = parse_phrase(v).map_err(fail)?;
            let mut realized = BTreeSet::new();
            for seg in &segs {
                let path = match seg {
                    Segment::Value(p, _) => {
                        realized.insert(p);
                        p
                    }
                    Segment::Article(p) | Segment::Number { attr: p, .. } | Segment::Gender { attr: p, .. } => p,
                    Segment::Entity(name) => {
                        if !entities.contains_key(name) {
                            return Err(fail(format!("unknown entity {name}")));
                        }
                        continue;
                    }
                    Segment::Text(_) => continue,
                };
                if !covers.contains(path) {
                    return Err(fail(format!("variant `{v}` reads uncovered {path}")));
                }
            }
            for c in &covers {
                if !realized.contains(c) && !pinned.contains(c) {
                    return Err(fail(format!("variant `{v}` drops {c}")));
                }
            }
            parsed.push(segs);
        }
        self.parsed = parsed;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    #[default]
    Pt,
    En,
}

fn two() -> usize {
    2
}

fn and() -> String {
    "e".into()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lexicon {
    #[serde(default)]
    pub language: Language,
    /// Upper bound on clauses joined into one sentence.
    #[serde(default = "two")]
    pub clauses_per_sentence: usize,
    /// Conjunction before the last joined clause.
    #[serde(default = "and")]
    pub conjunction: String,
    #[serde(default)]
    pub salutation: Option<String>,
    #[serde(default)]
    pub closing: Option<String>,
    #[serde(default)]
    pub places: HashMap<String, Place>,
    #[serde(default)]
    pub values: HashMap<String, HashMap<String, String>>,
    #[serde(default)]
    pub entities: HashMap<String, EntityForms>,
    #[serde(rename = "entry")]
    pub entries: Vec<LexEntry>,
}

const DEFAULT_PT: &str = include_str!("../../data/lexicon.toml");
const DEFAULT_EN: &str = include_str!("../../data/lexicon.en.toml");

impl Lexicon {
    pub fn from_toml(text: &str) -> Result<Self, LexiconError> {
        let mut lex: Lexicon = toml::from_str(text)?;
        let mut seen = BTreeSet::new();
        for e in &lex.entries {
            if !seen.insert(e.id.clone()) {
                return Err(LexiconError::DuplicateId(e.id.clone()));
            }
        }
        for (name, forms) in &lex.entities {
            if forms.full.trim().is_empty() || forms.alternatives.is_empty() {
                return Err(LexiconError::Entity(name.clone()));
            }
        }
        let entities = lex.entities.clone();
        for e in &mut lex.entries {
            e.prepare(&entities)?;
        }
        lex.clauses_per_sentence = lex.clauses_per_sentence.max(1);
        // keys are matched case-insensitively
        for table in lex.values.values_mut() {
            *table = table.drain().map(|(k, v)| (k.to_lowercase(), v)).collect();
        }
        Ok(lex)
    }

    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    /// Shipped Brazilian Portuguese lexicon.
    pub fn default_pt() -> Self {
        Self::from_toml(DEFAULT_PT).expect("shipped lexicon loads")
    }

    /// Shipped English demo lexicon.
    pub fn default_en() -> Self {
        Self::from_toml(DEFAULT_EN).expect("shipped lexicon loads")
    }

    pub fn entry(&self, id: &str) -> Option<&LexEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn place(&self, name: &str) -> Option<&Place> {
        self.places.get(name)
    }

    pub fn translate<'a>(&'a self, key: &str, value: &'a str) -> &'a str {
        self.values
            .get(key)
            .and_then(|t| t.get(&value.to_lowercase()))
            .map_or(value, String::as_str)
    }

    /// Facts each entry covers, grouped by intent name; handy for coverage
    /// audits.
    pub fn coverage(&self) -> BTreeMap<&str, BTreeSet<&str>> {
        let mut out: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for e in &self.entries {
            for p in &e.covers {
                out.entry(p.intent.as_str()).or_default().insert(p.key.as_str());
            }
        }
        out
    }
}
