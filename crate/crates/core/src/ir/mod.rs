//! Intent-attribute-value intermediate representation.
//!
//! Every generator in the crate consumes an [`IntentDocument`]. A document
//! is an ordered list of intents such as
//! `WEATHER(condition="sunny",temperature="32ºC")`. The textual form is
//! parsed by [`parse_ir`] and written back by [`serialize_ir`]; values stay
//! strings until [`validate`] interprets them against a schema registry.

mod canon;
mod parse;
mod schema;

use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

pub use canon::{canonical_key, canonical_name, fold_diacritics};
pub use parse::parse_ir;
pub use schema::{
    default_registry, parse_quantity, validate, Diagnostic, IntentSchema, Severity, TypedValue, ValueKind,
    BRAZILIAN_STATES,
};

pub const LOCATION: &str = "LOCATION";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IrError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate attribute `{key}` in intent {intent} at {line}:{column}")]
    DuplicateKey {
        intent: String,
        key: String,
        line: usize,
        column: usize,
    },
    #[error("document contains no intent")]
    EmptyDocument,
    #[error("document contains more than one LOCATION intent")]
    DuplicateLocation,
    #[error("invalid intent name `{0}`")]
    InvalidName(String),
    #[error("invalid attribute key `{0}`")]
    InvalidKey(String),
    #[error("empty value for attribute `{key}` of intent {intent}")]
    EmptyValue { intent: String, key: String },
}

/// Raw attribute value. Interpretation is deferred to schema validation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AttrValue(String);

impl AttrValue {
    pub fn new(raw: impl Into<String>) -> Self {
        AttrValue(raw.into())
    }

    pub fn raw(&self) -> &str {
        &self.0
    }

    pub fn interpret(&self, kind: &ValueKind) -> Result<TypedValue, String> {
        kind.interpret(&self.0)
    }
}

impl fmt::Display for AttrValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Intent {
    pub id: usize,
    name: String,
    attrs: IndexMap<String, AttrValue>,
}

impl Intent {
    /// Builds an intent from already-canonical parts.
    pub fn new<K, V, I>(name: impl Into<String>, attrs: I) -> Result<Self, IrError>
    where
        K: Into<String>,
        V: Into<String>,
        I: IntoIterator<Item = (K, V)>,
    {
        let name = name.into();
        if !is_canonical_name(&name) {
            return Err(IrError::InvalidName(name));
        }
        let mut map = IndexMap::new();
        for (k, v) in attrs {
            let key = k.into();
            let value = v.into();
            if !is_canonical_key(&key) {
                return Err(IrError::InvalidKey(key));
            }
            if value.is_empty() {
                return Err(IrError::EmptyValue { intent: name, key });
            }
            if map.contains_key(&key) {
                return Err(IrError::DuplicateKey {
                    intent: name,
                    key,
                    line: 0,
                    column: 0,
                });
            }
            map.insert(key, AttrValue(value));
        }
        if map.is_empty() {
            return Err(IrError::Syntax {
                line: 0,
                column: 0,
                message: format!("intent {name} has no attributes"),
            });
        }
        Ok(Intent {
            id: 0,
            name,
            attrs: map,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn attrs(&self) -> impl Iterator<Item = (&str, &AttrValue)> {
        self.attrs.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.attrs.get(key).map(AttrValue::raw)
    }

    pub fn has(&self, key: &str) -> bool {
        self.attrs.contains_key(key)
    }

    pub fn len(&self) -> usize {
        self.attrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attrs.is_empty()
    }
}

/// `(city, uf, date)` taken from the LOCATION intent.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub city: Option<String>,
    pub uf: Option<String>,
    pub date: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Intent>", into = "Vec<Intent>")]
pub struct IntentDocument {
    intents: Vec<Intent>,
    provenance: Option<Provenance>,
}

impl TryFrom<Vec<Intent>> for IntentDocument {
    type Error = IrError;

    fn try_from(intents: Vec<Intent>) -> Result<Self, IrError> {
        IntentDocument::new(intents)
    }
}

impl From<IntentDocument> for Vec<Intent> {
    fn from(doc: IntentDocument) -> Self {
        doc.intents
    }
}

impl IntentDocument {
    /// Assigns ids `0..n` in order and extracts the provenance header.
    pub fn new(mut intents: Vec<Intent>) -> Result<Self, IrError> {
        if intents.is_empty() {
            return Err(IrError::EmptyDocument);
        }
        let mut provenance = None;
        for (i, intent) in intents.iter_mut().enumerate() {
            intent.id = i;
            if intent.name == LOCATION {
                if provenance.is_some() {
                    return Err(IrError::DuplicateLocation);
                }
                provenance = Some(Provenance {
                    city: intent.get("city").map(str::to_owned),
                    uf: intent.get("uf").map(str::to_owned),
                    date: intent.get("timestamp").map(str::to_owned),
                });
            }
        }
        Ok(IntentDocument { intents, provenance })
    }

    pub fn intents(&self) -> &[Intent] {
        &self.intents
    }

    pub fn intent(&self, id: usize) -> Option<&Intent> {
        self.intents.get(id)
    }

    pub fn find(&self, name: &str) -> Option<&Intent> {
        self.intents.iter().find(|i| i.name == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.find(name).is_some()
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn len(&self) -> usize {
        self.intents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intents.is_empty()
    }

    /// Raw value of `INTENT.key`, first matching intent.
    pub fn value(&self, intent: &str, key: &str) -> Option<&str> {
        self.find(intent).and_then(|i| i.get(key))
    }
}

impl fmt::Display for IntentDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_ir(self))
    }
}

pub(crate) fn is_canonical_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some('A'..='Z'))
        && chars.all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
        && canon::canonical_name(s) == s
}

pub(crate) fn is_canonical_key(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some('a'..='z'))
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
        && canon::canonical_key(s) == s
}

fn escape_value(raw: &str, out: &mut String) {
    for c in raw.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
}

/// Canonical text form: `NAME(key="value",key="value"); NAME(...)`.
pub fn serialize_ir(doc: &IntentDocument) -> String {
    let mut out = String::new();
    for (i, intent) in doc.intents.iter().enumerate() {
        if i > 0 {
            out.push_str("; ");
        }
        out.push_str(&intent.name);
        out.push('(');
        for (j, (key, value)) in intent.attrs.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(key);
            out.push_str("=\"");
            escape_value(value.raw(), &mut out);
            out.push('"');
        }
        out.push(')');
    }
    out
}

/// Single-line, NFC-normalized form fed to the neural generator.
pub fn linearize(doc: &IntentDocument) -> String {
    serialize_ir(doc).nfc().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serialize_location_weather_pair() {
        let doc = parse_ir(
            r#"LOCATION(city="Santos",uf="SP",timestamp="Jan 15, 2022");
               WEATHER(condition="sunny",temperature="32ºC");"#,
        )
        .unwrap();
        assert_eq!(
            serialize_ir(&doc),
            r#"LOCATION(city="Santos",uf="SP",timestamp="Jan 15, 2022"); WEATHER(condition="sunny",temperature="32ºC")"#
        );
    }

    #[test]
    fn linearize_folds_aliases_to_canonical_keys() {
        let doc =
            parse_ir(r#"Location(city= "Rio de Janeiro", state="RJ"); Weather(climate="sunny", temperature="32ºC")"#)
                .unwrap();
        assert_eq!(
            linearize(&doc),
            r#"LOCATION(city="Rio de Janeiro",uf="RJ"); WEATHER(condition="sunny",temperature="32ºC")"#
        );
    }

    #[test]
    fn linearize_single_intent_equals_serialize() {
        let doc = parse_ir(r#"OIL(level="40")"#).unwrap();
        assert_eq!(linearize(&doc), serialize_ir(&doc));
    }

    #[test]
    fn linearize_escapes_newlines() {
        let doc = IntentDocument::new(vec![Intent::new("NOTE", [("text", "a\nb")]).unwrap()]).unwrap();
        let line = linearize(&doc);
        assert!(!line.contains('\n'));
        assert_eq!(line, r#"NOTE(text="a\nb")"#);
        assert_eq!(parse_ir(&line).unwrap(), doc);
    }

    #[test]
    fn linearize_normalizes_to_nfc() {
        // "ç" as c + combining cedilla
        let doc = IntentDocument::new(vec![Intent::new("NOTE", [("text", "c\u{327}")]).unwrap()]).unwrap();
        assert_eq!(linearize(&doc), "NOTE(text=\"\u{e7}\")");
    }

    #[test]
    fn ids_follow_document_order() {
        let doc = parse_ir(r#"A(x="1"); B(y="2"); C(z="3")"#).unwrap();
        let ids: Vec<usize> = doc.intents().iter().map(|i| i.id).collect();
        assert_eq!(ids, vec![0, 1, 2]);
    }

    #[test]
    fn provenance_comes_from_location() {
        let doc = parse_ir(r#"WEATHER(condition="x"); LOCATION(city="Santos",uf="SP")"#).unwrap();
        let p = doc.provenance().unwrap();
        assert_eq!(p.city.as_deref(), Some("Santos"));
        assert_eq!(p.uf.as_deref(), Some("SP"));
        assert_eq!(p.date, None);
    }

    #[test]
    fn intent_rejects_non_canonical_parts() {
        assert!(matches!(
            Intent::new("weather", [("a", "1")]),
            Err(IrError::InvalidName(_))
        ));
        assert!(matches!(Intent::new("W", [("A", "1")]), Err(IrError::InvalidKey(_))));
        assert!(matches!(Intent::new("W", [("a", "")]), Err(IrError::EmptyValue { .. })));
        assert!(Intent::new("W", Vec::<(String, String)>::new()).is_err());
    }

    #[test]
    fn serde_round_trip_preserves_document() {
        let doc = parse_ir(r#"LOCATION(city="Santos"); WEATHER(condition="sunny")"#).unwrap();
        let json = serde_json::to_string(&doc).unwrap();
        let back: IntentDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(back, doc);
    }
}
