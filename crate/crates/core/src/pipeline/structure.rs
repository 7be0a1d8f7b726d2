use serde::{Deserialize, Serialize};

use super::order::DiscoursePlan;
use crate::ir::IntentDocument;

/// Intents verbalized together in one sentence group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentencePlan {
    pub intents: Vec<usize>,
    /// Holds a cause and its effect.
    #[serde(default)]
    pub causal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParagraphPlan {
    pub sentences: Vec<SentencePlan>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TextPlan {
    pub paragraphs: Vec<ParagraphPlan>,
}

impl TextPlan {
    /// Intent ids in the order they are verbalized.
    pub fn intent_order(&self) -> Vec<usize> {
        self.paragraphs
            .iter()
            .flat_map(|p| &p.sentences)
            .flat_map(|s| s.intents.iter().copied())
            .collect()
    }
}

/// Groups the ordered intents into paragraphs and sentence groups.
///
/// LOCATION and WEATHER open the report together, every causal chain gets
/// a paragraph of its own, and every other intent is a paragraph by itself.
/// No sentence group holds more than two intents.
pub fn structure_text(doc: &IntentDocument, plan: &DiscoursePlan) -> TextPlan {
    let name = |id: usize| doc.intent(id).map(|i| i.name()).unwrap_or_default();
    let mut paragraphs = Vec::new();
    let mut i = 0;
    while i < plan.order.len() {
        let id = plan.order[i];
        let next = plan.order.get(i + 1).copied();
        let chain = next.filter(|&n| plan.causal.contains(&(id, n)));
        let opening = next.filter(|&n| name(id) == "LOCATION" && name(n) == "WEATHER" && i == 0);
        let sentence = match (chain, opening) {
            (Some(n), _) => SentencePlan {
                intents: vec![id, n],
                causal: true,
            },
            (None, Some(n)) => SentencePlan {
                intents: vec![id, n],
                causal: false,
            },
            (None, None) => SentencePlan {
                intents: vec![id],
                causal: false,
            },
        };
        i += sentence.intents.len();
        paragraphs.push(ParagraphPlan {
            sentences: vec![sentence],
        });
    }
    TextPlan { paragraphs }
}
