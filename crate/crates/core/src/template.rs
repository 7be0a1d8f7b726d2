//! Rule-selected templates with slot filling.
//!
//! A template owns a trigger (the intents it needs plus attribute
//! predicates) and a body with `[slot]` markers. Each slot is bound to one
//! or more `INTENT.key` paths and rendered by a named formatter.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::Architecture;
use crate::format::{date_pt, decimal_comma, parse_date};
use crate::ir::{default_registry, IntentDocument, IntentSchema};
use crate::predicate::{AttrPath, Predicate};
use crate::report::{ReportText, SlotRef};

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("cannot read template file {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("template file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("template `{id}`: {message}")]
    Format { id: String, message: String },
    #[error("duplicate template id `{0}`")]
    DuplicateId(String),
    #[error("no template applies to the document")]
    NoMatch,
    #[error("template `{template}` binds {attr} which the document lacks")]
    MissingAttribute { template: String, attr: AttrPath },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formatter {
    #[default]
    Identity,
    /// Keeps number and unit as written; same output as identity.
    Unit,
    DatePt,
    NumberPt,
    /// `city (uf)` from a two-path binding.
    Location,
    /// Looks the value up in the file's `[values.<key>]` table.
    Translate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Binding {
    One(AttrPath),
    Many(Vec<AttrPath>),
}

impl Binding {
    pub fn paths(&self) -> &[AttrPath] {
        match self {
            Binding::One(p) => std::slice::from_ref(p),
            Binding::Many(ps) => ps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Template {
    pub id: String,
    pub trigger: Vec<String>,
    #[serde(default)]
    pub predicates: Vec<Predicate>,
    #[serde(default)]
    pub priority: i32,
    pub body: String,
    #[serde(default)]
    pub bindings: BTreeMap<String, Binding>,
    #[serde(default)]
    pub formatters: BTreeMap<String, Formatter>,
}

fn slot_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\[([a-z_][a-z0-9_]*)\]").unwrap())
}

impl Template {
    pub fn slots(&self) -> BTreeSet<&str> {
        slot_re()
            .captures_iter(&self.body)
            .map(|c| c.get(1).unwrap().as_str())
            .collect()
    }

    fn check(&self, registry: &[IntentSchema]) -> Result<(), TemplateError> {
        let fail = |message: String| TemplateError::Format {
            id: self.id.clone(),
            message,
        };
        if self.trigger.is_empty() {
            return Err(fail("empty trigger".into()));
        }
        for name in &self.trigger {
            if !registry.iter().any(|s| &s.name == name) {
                return Err(fail(format!("trigger intent {name} is not in the schema registry")));
            }
        }
        let slots = self.slots();
        for slot in &slots {
            if !self.bindings.contains_key(*slot) {
                return Err(fail(format!("slot `{slot}` has no binding")));
            }
        }
        for (slot, binding) in &self.bindings {
            if !slots.contains(slot.as_str()) {
                return Err(fail(format!("binding `{slot}` does not appear in the body")));
            }
            if binding.paths().is_empty() {
                return Err(fail(format!("binding `{slot}` is empty")));
            }
            for path in binding.paths() {
                if !self.trigger.contains(&path.intent) {
                    return Err(fail(format!(
                        "binding `{slot}` reads {path} outside the trigger intents"
                    )));
                }
            }
            let fmt = self.formatters.get(slot).copied().unwrap_or_default();
            let n = binding.paths().len();
            if (fmt == Formatter::Location && n > 2) || (fmt != Formatter::Location && n != 1) {
                return Err(fail(format!("binding `{slot}` has {n} paths for formatter {fmt:?}")));
            }
        }
        for slot in self.formatters.keys() {
            if !self.bindings.contains_key(slot) {
                return Err(fail(format!("formatter for unbound slot `{slot}`")));
            }
        }
        Ok(())
    }

    fn applies(&self, names: &BTreeSet<&str>, doc: &IntentDocument) -> bool {
        self.trigger.iter().all(|n| names.contains(n.as_str())) && self.predicates.iter().all(|p| p.holds(doc))
    }
}

#[derive(Debug, Deserialize)]
struct TemplateFile {
    #[serde(default)]
    values: HashMap<String, HashMap<String, String>>,
    #[serde(rename = "template")]
    templates: Vec<Template>,
}

#[derive(Debug, Clone)]
pub struct TemplateRegistry {
    templates: Vec<Template>,
    by_trigger: BTreeMap<Vec<String>, Vec<usize>>,
    values: HashMap<String, HashMap<String, String>>,
}

const DEFAULT_PT: &str = include_str!("../data/templates.toml");
const DEFAULT_EN: &str = include_str!("../data/templates.en.toml");

impl TemplateRegistry {
    pub fn from_toml(text: &str, registry: &[IntentSchema]) -> Result<Self, TemplateError> {
        let file: TemplateFile = toml::from_str(text)?;
        let mut seen = BTreeSet::new();
        let mut by_trigger: BTreeMap<Vec<String>, Vec<usize>> = BTreeMap::new();
        for (i, t) in file.templates.iter().enumerate() {
            if !seen.insert(t.id.clone()) {
                return Err(TemplateError::DuplicateId(t.id.clone()));
            }
            t.check(registry)?;
            let mut key = t.trigger.clone();
            key.sort();
            by_trigger.entry(key).or_default().push(i);
        }
        Ok(TemplateRegistry {
            templates: file.templates,
            by_trigger,
            values: file.values,
        })
    }

    /// Shipped Portuguese templates.
    pub fn default_pt() -> Self {
        Self::from_toml(DEFAULT_PT, &default_registry()).expect("shipped templates load")
    }

    /// Shipped English demo templates.
    pub fn default_en() -> Self {
        Self::from_toml(DEFAULT_EN, &default_registry()).expect("shipped templates load")
    }

    pub fn templates(&self) -> &[Template] {
        &self.templates
    }

    pub fn get(&self, id: &str) -> Option<&Template> {
        self.templates.iter().find(|t| t.id == id)
    }

    pub fn with_trigger(&self, names: &[&str]) -> Vec<&Template> {
        let mut key: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        key.sort();
        self.by_trigger
            .get(&key)
            .map(|ids| ids.iter().map(|&i| &self.templates[i]).collect())
            .unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    fn translate<'a>(&'a self, key: &str, value: &'a str) -> &'a str {
        self.values
            .get(key)
            .and_then(|table| table.get(&value.to_lowercase()))
            .map_or(value, String::as_str)
    }
}

pub fn load_templates(path: &Path) -> Result<TemplateRegistry, TemplateError> {
    let text = std::fs::read_to_string(path).map_err(|source| TemplateError::Io {
        path: path.display().to_string(),
        source,
    })?;
    TemplateRegistry::from_toml(&text, &default_registry())
}

/// Most specific applicable template: largest trigger set, then highest
/// priority, then smallest id.
pub fn match_template<'r>(doc: &IntentDocument, registry: &'r TemplateRegistry) -> Result<&'r Template, TemplateError> {
    let names: BTreeSet<&str> = doc.intents().iter().map(|i| i.name()).collect();
    registry
        .templates
        .iter()
        .filter(|t| t.applies(&names, doc))
        .min_by(|a, b| {
            b.trigger
                .len()
                .cmp(&a.trigger.len())
                .then(b.priority.cmp(&a.priority))
                .then(a.id.cmp(&b.id))
        })
        .ok_or(TemplateError::NoMatch)
}

/// Fills every slot of `template` from `doc`. Fails without emitting text
/// when a bound attribute is missing.
pub fn fill(
    template: &Template,
    doc: &IntentDocument,
    registry: &TemplateRegistry,
) -> Result<ReportText, TemplateError> {
    let mut rendered = HashMap::new();
    let mut slots = Vec::new();
    for (slot, binding) in &template.bindings {
        let mut values = Vec::new();
        for path in binding.paths() {
            let (intent, value) = path.lookup(doc).ok_or_else(|| TemplateError::MissingAttribute {
                template: template.id.clone(),
                attr: path.clone(),
            })?;
            slots.push(SlotRef {
                intent_id: intent.id,
                key: path.key.clone(),
            });
            values.push((path, value));
        }
        let fmt = template.formatters.get(slot).copied().unwrap_or_default();
        let text = match fmt {
            Formatter::Identity | Formatter::Unit => values[0].1.to_owned(),
            Formatter::NumberPt => decimal_comma(values[0].1),
            Formatter::DatePt => parse_date(values[0].1)
                .map(date_pt)
                .unwrap_or_else(|| values[0].1.to_owned()),
            Formatter::Translate => registry.translate(&values[0].0.key, values[0].1).to_owned(),
            Formatter::Location => match values.as_slice() {
                [(_, city), (_, uf)] => format!("{city} ({uf})"),
                [(_, city)] => city.to_string(),
                _ => unreachable!("checked at load"),
            },
        };
        rendered.insert(slot.as_str(), text);
    }
    let text = slot_re()
        .replace_all(&template.body, |c: &regex::Captures<'_>| {
            rendered[c.get(1).unwrap().as_str()].clone()
        })
        .into_owned();
    slots.sort();
    slots.dedup();
    Ok(ReportText {
        text,
        architecture: Architecture::Template,
        slots,
        template_id: Some(template.id.clone()),
        trace: None,
        seed: None,
    })
}

/// `match_template` followed by `fill`.
pub fn generate(doc: &IntentDocument, registry: &TemplateRegistry) -> Result<ReportText, TemplateError> {
    fill(match_template(doc, registry)?, doc, registry)
}
