use std::sync::OnceLock;

use chrono::NaiveDate;
use regex::Regex;
use serde::{Deserialize, Serialize};

use super::IntentDocument;
use crate::format::parse_date;

pub const BRAZILIAN_STATES: [&str; 27] = [
    "AC", "AL", "AP", "AM", "BA", "CE", "DF", "ES", "GO", "MA", "MT", "MS", "MG", "PA", "PB", "PR", "PE", "PI", "RJ",
    "RN", "RS", "RO", "RR", "SC", "SP", "SE", "TO",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueKind {
    Text,
    /// A number followed by an optional unit: `1.4 mR`, `0,8m`, `76%`.
    Quantity,
    Date,
    Enum(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TypedValue {
    Text(String),
    Quantity { value: f64, unit: String },
    Date(NaiveDate),
    Enum(String),
}

fn quantity_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\s*(-?\d+(?:[.,]\d+)?)\s*([^\d\s:;,.][^\d]*?)?\s*$").unwrap())
}

/// Splits `"0,8m"` into `(0.8, "m")`.
pub fn parse_quantity(raw: &str) -> Option<(f64, String)> {
    let caps = quantity_re().captures(raw)?;
    let value = caps[1].replace(',', ".").parse().ok()?;
    let unit = caps.get(2).map_or("", |m| m.as_str()).to_owned();
    Some((value, unit))
}

impl ValueKind {
    pub fn interpret(&self, raw: &str) -> Result<TypedValue, String> {
        match self {
            ValueKind::Text => Ok(TypedValue::Text(raw.to_owned())),
            ValueKind::Quantity => parse_quantity(raw)
                .map(|(value, unit)| TypedValue::Quantity { value, unit })
                .ok_or_else(|| format!("`{raw}` is not a number with optional unit")),
            ValueKind::Date => parse_date(raw)
                .map(TypedValue::Date)
                .ok_or_else(|| format!("`{raw}` is not a recognized date")),
            ValueKind::Enum(allowed) => allowed
                .iter()
                .find(|a| a.eq_ignore_ascii_case(raw.trim()))
                .map(|a| TypedValue::Enum(a.clone()))
                .ok_or_else(|| format!("`{raw}` is not one of {}", allowed.join("|"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntentSchema {
    pub name: String,
    pub required: Vec<(String, ValueKind)>,
    pub optional: Vec<(String, ValueKind)>,
}

impl IntentSchema {
    pub fn new(name: &str) -> Self {
        IntentSchema {
            name: name.to_owned(),
            required: Vec::new(),
            optional: Vec::new(),
        }
    }

    pub fn require(mut self, key: &str, kind: ValueKind) -> Self {
        assert!(self.kind_of(key).is_none(), "{key} declared twice");
        self.required.push((key.to_owned(), kind));
        self
    }

    pub fn allow(mut self, key: &str, kind: ValueKind) -> Self {
        assert!(self.kind_of(key).is_none(), "{key} declared twice");
        self.optional.push((key.to_owned(), kind));
        self
    }

    pub fn kind_of(&self, key: &str) -> Option<&ValueKind> {
        self.required
            .iter()
            .chain(&self.optional)
            .find(|(k, _)| k == key)
            .map(|(_, kind)| kind)
    }
}

fn states() -> ValueKind {
    ValueKind::Enum(BRAZILIAN_STATES.iter().map(|s| s.to_string()).collect())
}

/// Schemas for the intents the crate knows how to generate and verbalize.
pub fn default_registry() -> Vec<IntentSchema> {
    use ValueKind::*;
    vec![
        IntentSchema::new("LOCATION")
            .require("city", Text)
            .allow("uf", states())
            .allow("timestamp", Date),
        IntentSchema::new("WEATHER")
            .require("condition", Text)
            .allow("temperature", Quantity)
            .allow("wind", Quantity)
            .allow("humidity", Quantity)
            .allow("cloudiness", Quantity)
            .allow("sea_height", Quantity)
            .allow("sunscreen", Text)
            .allow("max_since_days", Quantity),
        IntentSchema::new("OCEAN")
            .allow("fishing_condition", Text)
            .allow("sea_height", Quantity)
            .allow("water_temperature", Quantity),
        IntentSchema::new("TIDES")
            .allow("high_tide", Quantity)
            .allow("low_tide", Quantity)
            .allow("high_tide_time", Text)
            .allow("low_tide_time", Text),
        IntentSchema::new("VESSELS_IN_PORT")
            .require("quantity", Quantity)
            .allow("trend", Enum(vec!["high".into(), "low".into(), "none".into()]))
            .allow("days_max", Quantity),
        IntentSchema::new("EARTHQUAKE")
            .require("magnitude", Quantity)
            .require("depth", Quantity)
            .allow("city", Text)
            .allow("uf", states())
            .allow("entity", Text)
            .allow("timestamp", Date),
        IntentSchema::new("OIL")
            .require("level", Quantity)
            .allow("production", Quantity)
            .allow("field", Text),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub intent_id: Option<usize>,
    pub message: String,
}

/// Checks a document against a registry. Attributes the schema does not
/// declare are allowed and not reported.
pub fn validate(doc: &IntentDocument, registry: &[IntentSchema]) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let error = |id: usize, message: String| Diagnostic {
        severity: Severity::Error,
        intent_id: Some(id),
        message,
    };
    for intent in doc.intents() {
        let Some(schema) = registry.iter().find(|s| s.name == intent.name()) else {
            out.push(error(intent.id, format!("unknown intent {}", intent.name())));
            continue;
        };
        for (key, _) in &schema.required {
            if !intent.has(key) {
                out.push(error(
                    intent.id,
                    format!("{} is missing required attribute `{key}`", intent.name()),
                ));
            }
        }
        for (key, value) in intent.attrs() {
            if let Some(kind) = schema.kind_of(key) {
                if let Err(why) = value.interpret(kind) {
                    out.push(error(intent.id, format!("{}.{key}: {why}", intent.name())));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::parse_ir;

    #[test]
    fn required_sets_are_disjoint_from_optional() {
        for schema in default_registry() {
            for (key, _) in &schema.required {
                assert!(!schema.optional.iter().any(|(k, _)| k == key));
            }
        }
    }

    #[test]
    fn missing_required_condition() {
        let doc = parse_ir(r#"WEATHER(temperature="30ºC")"#).unwrap();
        let diags = validate(&doc, &default_registry());
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].severity, Severity::Error);
        assert!(diags[0].message.contains("condition"));
    }

    #[test]
    fn kind_violation_on_magnitude() {
        let doc = parse_ir(r#"EARTHQUAKE(magnitude="abc mR",depth="10km")"#).unwrap();
        let diags = validate(&doc, &default_registry());
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("magnitude"));
    }

    #[test]
    fn unknown_intent_is_reported() {
        let doc = parse_ir(r#"SHARKS(count="3")"#).unwrap();
        assert_eq!(validate(&doc, &default_registry()).len(), 1);
    }

    #[test]
    fn quantity_forms() {
        assert_eq!(parse_quantity("1.4 mR"), Some((1.4, "mR".into())));
        assert_eq!(parse_quantity("0,8m"), Some((0.8, "m".into())));
        assert_eq!(parse_quantity("76%"), Some((76.0, "%".into())));
        assert_eq!(parse_quantity("350"), Some((350.0, String::new())));
        assert_eq!(parse_quantity("1.8 meters"), Some((1.8, "meters".into())));
        assert_eq!(parse_quantity("abc mR"), None);
        assert_eq!(parse_quantity("05:12"), None);
    }

    #[test]
    fn enum_matching_ignores_case() {
        let kind = ValueKind::Enum(vec!["high".into()]);
        assert_eq!(kind.interpret("HIGH"), Ok(TypedValue::Enum("high".into())));
        assert!(kind.interpret("up").is_err());
    }
}
