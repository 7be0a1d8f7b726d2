use serde::{Deserialize, Serialize};

use crate::analysis::Architecture;
use crate::pipeline::PipelineTrace;

/// Reference to one attribute of one intent in a document.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SlotRef {
    pub intent_id: usize,
    pub key: String,
}

/// A generated report with enough context to audit it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportText {
    pub text: String,
    pub architecture: Architecture,
    /// Attributes whose values were realized in the text.
    pub slots: Vec<SlotRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<PipelineTrace>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}
