//! Attribute predicates shared by template triggers and lexicon entries.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ir::{parse_quantity, Intent, IntentDocument};

/// `INTENT.key` path into a document.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AttrPath {
    pub intent: String,
    pub key: String,
}

impl AttrPath {
    pub fn new(intent: &str, key: &str) -> Self {
        AttrPath {
            intent: intent.to_owned(),
            key: key.to_owned(),
        }
    }

    pub fn lookup<'d>(&self, doc: &'d IntentDocument) -> Option<(&'d Intent, &'d str)> {
        doc.intents()
            .iter()
            .filter(|i| i.name() == self.intent)
            .find_map(|i| i.get(&self.key).map(|v| (i, v)))
    }
}

impl TryFrom<String> for AttrPath {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        match s.split_once('.') {
            Some((intent, key)) if !intent.is_empty() && !key.is_empty() => Ok(AttrPath::new(intent, key)),
            _ => Err(format!("`{s}` is not an INTENT.key path")),
        }
    }
}

impl From<AttrPath> for String {
    fn from(p: AttrPath) -> String {
        p.to_string()
    }
}

impl fmt::Display for AttrPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.intent, self.key)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Op {
    Exists,
    Absent,
    Eq,
    Ne,
    Gt,
    Ge,
    Lt,
    Le,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Predicate {
    pub attr: AttrPath,
    #[serde(default = "default_op")]
    pub op: Op,
    #[serde(default)]
    pub value: Option<String>,
}

fn default_op() -> Op {
    Op::Exists
}

impl Predicate {
    pub fn holds(&self, doc: &IntentDocument) -> bool {
        self.holds_with(|path| path.lookup(doc).map(|(_, v)| v))
    }

    /// Evaluates against an arbitrary attribute lookup.
    pub fn holds_with<'a>(&self, lookup: impl Fn(&AttrPath) -> Option<&'a str>) -> bool {
        let found = lookup(&self.attr);
        match (self.op, found) {
            (Op::Exists, found) => found.is_some(),
            (Op::Absent, found) => found.is_none(),
            (_, None) => false,
            (op, Some(actual)) => {
                let Some(expected) = self.value.as_deref() else {
                    return false;
                };
                let numeric = parse_quantity(actual)
                    .zip(parse_quantity(expected))
                    .map(|((a, _), (e, _))| (a, e));
                match (op, numeric) {
                    (Op::Eq, Some((a, e))) => a == e,
                    (Op::Ne, Some((a, e))) => a != e,
                    (Op::Eq, None) => actual.trim().eq_ignore_ascii_case(expected.trim()),
                    (Op::Ne, None) => !actual.trim().eq_ignore_ascii_case(expected.trim()),
                    (Op::Gt, Some((a, e))) => a > e,
                    (Op::Ge, Some((a, e))) => a >= e,
                    (Op::Lt, Some((a, e))) => a < e,
                    (Op::Le, Some((a, e))) => a <= e,
                    _ => false,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::parse_ir;

    fn pred(attr: &str, op: Op, value: Option<&str>) -> Predicate {
        Predicate {
            attr: AttrPath::try_from(attr.to_owned()).unwrap(),
            op,
            value: value.map(str::to_owned),
        }
    }

    #[test]
    fn predicates_over_document() {
        let doc = parse_ir(r#"VESSELS_IN_PORT(quantity="350",trend="high")"#).unwrap();
        assert!(pred("VESSELS_IN_PORT.trend", Op::Exists, None).holds(&doc));
        assert!(pred("VESSELS_IN_PORT.days_max", Op::Absent, None).holds(&doc));
        assert!(pred("VESSELS_IN_PORT.trend", Op::Eq, Some("HIGH")).holds(&doc));
        assert!(pred("VESSELS_IN_PORT.quantity", Op::Gt, Some("300")).holds(&doc));
        assert!(!pred("VESSELS_IN_PORT.quantity", Op::Lt, Some("300")).holds(&doc));
        assert!(pred("VESSELS_IN_PORT.quantity", Op::Eq, Some("350.0")).holds(&doc));
        assert!(!pred("OIL.level", Op::Ge, Some("1")).holds(&doc));
        assert!(!pred("VESSELS_IN_PORT.trend", Op::Gt, Some("1")).holds(&doc));
    }

    #[test]
    fn attr_path_parsing() {
        assert!(AttrPath::try_from("WEATHER".to_owned()).is_err());
        assert_eq!(
            AttrPath::try_from("WEATHER.wind".to_owned()).unwrap(),
            AttrPath::new("WEATHER", "wind")
        );
    }
}
