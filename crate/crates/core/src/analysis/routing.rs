use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ir::{parse_quantity, IntentDocument};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criticality {
    Critical,
    Routine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Architecture {
    Template,
    Pipeline,
    Neural,
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Architecture::Template => "template",
            Architecture::Pipeline => "pipeline",
            Architecture::Neural => "neural",
        })
    }
}

impl FromStr for Architecture {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "template" => Ok(Architecture::Template),
            "pipeline" => Ok(Architecture::Pipeline),
            "neural" => Ok(Architecture::Neural),
            other => Err(format!("unknown architecture `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparator {
    Exists,
    Eq,
    Gt,
    Ge,
    Lt,
    Le,
}

/// One row of the rules file. Without an `attribute` the rule fires on the
/// presence of the intent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalityRule {
    pub name: String,
    pub intent: String,
    #[serde(default)]
    pub attribute: Option<String>,
    #[serde(default = "exists")]
    pub comparator: Comparator,
    #[serde(default)]
    pub threshold: Option<f64>,
    #[serde(default = "critical")]
    pub criticality: Criticality,
}

fn exists() -> Comparator {
    Comparator::Exists
}

fn critical() -> Criticality {
    Criticality::Critical
}

impl CriticalityRule {
    fn fires(&self, doc: &IntentDocument) -> bool {
        doc.intents().iter().filter(|i| i.name() == self.intent).any(|intent| {
            let Some(key) = &self.attribute else {
                return true;
            };
            let Some(raw) = intent.get(key) else {
                return false;
            };
            if self.comparator == Comparator::Exists {
                return true;
            }
            let (Some((value, _)), Some(t)) = (parse_quantity(raw), self.threshold) else {
                return false;
            };
            match self.comparator {
                Comparator::Exists => true,
                Comparator::Eq => value == t,
                Comparator::Gt => value > t,
                Comparator::Ge => value >= t,
                Comparator::Lt => value < t,
                Comparator::Le => value <= t,
            }
        })
    }
}

#[derive(Debug, Error)]
pub enum RulesError {
    #[error("cannot read rules file {0}: {1}")]
    Io(String, std::io::Error),
    #[error("bad rules file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("rule `{0}` compares against no threshold")]
    MissingThreshold(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalityRules {
    #[serde(rename = "rule")]
    pub rules: Vec<CriticalityRule>,
}

const DEFAULT_RULES: &str = include_str!("../../data/criticality.toml");

impl CriticalityRules {
    pub fn from_toml(text: &str) -> Result<Self, RulesError> {
        let rules: CriticalityRules = toml::from_str(text)?;
        for r in &rules.rules {
            if r.comparator != Comparator::Exists && r.threshold.is_none() {
                return Err(RulesError::MissingThreshold(r.name.clone()));
            }
        }
        Ok(rules)
    }

    pub fn load(path: &Path) -> Result<Self, RulesError> {
        let text = std::fs::read_to_string(path).map_err(|e| RulesError::Io(path.display().to_string(), e))?;
        Self::from_toml(&text)
    }

    pub fn with_oil_threshold(mut self, threshold: f64) -> Self {
        for r in &mut self.rules {
            if r.intent == "OIL" && r.attribute.as_deref() == Some("level") {
                r.threshold = Some(threshold);
            }
        }
        self
    }
}

impl Default for CriticalityRules {
    /// Earthquake presence, or oil extraction level at or above 95.
    fn default() -> Self {
        Self::from_toml(DEFAULT_RULES).expect("shipped rules parse")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub criticality: Criticality,
    /// Names of the critical rules that fired, in rule order.
    pub fired: Vec<String>,
}

pub fn classify_criticality(doc: &IntentDocument, rules: &CriticalityRules) -> Classification {
    let fired: Vec<String> = rules
        .rules
        .iter()
        .filter(|r| r.criticality == Criticality::Critical && r.fires(doc))
        .map(|r| r.name.clone())
        .collect();
    Classification {
        criticality: if fired.is_empty() {
            Criticality::Routine
        } else {
            Criticality::Critical
        },
        fired,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutingDecision {
    pub criticality: Criticality,
    pub architecture: Architecture,
    pub reason: String,
}

/// Critical content always goes to templates; otherwise the override flag
/// picks between the pipeline and the neural generator.
pub fn route(classification: &Classification, neural_override: bool) -> RoutingDecision {
    let (architecture, reason) = match (classification.criticality, neural_override) {
        (Criticality::Critical, _) => (
            Architecture::Template,
            format!("critical: rule {} fired", classification.fired.join(", ")),
        ),
        (Criticality::Routine, false) => (Architecture::Pipeline, "routine: no critical rule fired".to_owned()),
        (Criticality::Routine, true) => (
            Architecture::Neural,
            "routine: no critical rule fired; neural override set".to_owned(),
        ),
    };
    RoutingDecision {
        criticality: classification.criticality,
        architecture,
        reason,
    }
}
