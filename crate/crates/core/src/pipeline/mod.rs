//! Six-stage generation: discourse ordering, text structuring,
//! lexicalization, referring expressions, and surface realization, each
//! exposed on its own, plus [`run_pipeline`] chaining them.

pub mod lexicalize;
pub mod lexicon;
pub mod order;
pub mod realize;
pub mod structure;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::Architecture;
use crate::ir::IntentDocument;
use crate::report::{ReportText, SlotRef};

pub use lexicalize::{lexicalize, tokenize_text, Clause, LexParagraph, LexSentence, Lexicalized, Token};
pub use lexicon::{EntityForms, Language, LexEntry, Lexicon, LexiconError, Place, Segment, ValueFormat};
pub use order::{default_causal_rules, intent_priority, order_discourse, CausalRule, DiscoursePlan};
pub use realize::{contract_tokens, realize, realize_tokens, refer, Mention, Paragraphs};
pub use structure::{structure_text, ParagraphPlan, SentencePlan, TextPlan};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PipelineError {
    #[error("lexicon has no entry for {intent}.{attr}")]
    LexiconGap { intent: String, attr: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantMode {
    /// First variant of every entry, first alternative of every entity.
    #[default]
    Canonical,
    /// Seeded uniform choice.
    Seeded(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub mode: VariantMode,
    pub causal_rules: Vec<CausalRule>,
    /// Overrides the lexicon's salutation when set.
    pub salutation: Option<String>,
    pub closing: Option<String>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            mode: VariantMode::Canonical,
            causal_rules: default_causal_rules(),
            salutation: None,
            closing: None,
        }
    }
}

impl PipelineConfig {
    pub fn seeded(seed: u64) -> Self {
        PipelineConfig {
            mode: VariantMode::Seeded(seed),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineTrace {
    pub discourse: DiscoursePlan,
    pub text_plan: TextPlan,
    pub lexicalization: Lexicalized,
    pub mentions: Vec<Mention>,
}

/// Runs all stages. Identical inputs and modes always give identical text.
pub fn run_pipeline(doc: &IntentDocument, lex: &Lexicon, config: &PipelineConfig) -> Result<ReportText, PipelineError> {
    let discourse = order_discourse(doc, &config.causal_rules);
    let text_plan = structure_text(doc, &discourse);

    let (mut variant_rng, mut ref_rng) = match config.mode {
        VariantMode::Canonical => (None, None),
        VariantMode::Seeded(seed) => {
            let mut a = ChaCha8Rng::seed_from_u64(seed);
            a.set_stream(1);
            let mut b = ChaCha8Rng::seed_from_u64(seed);
            b.set_stream(2);
            (Some(a), Some(b))
        }
    };
    let mut chooser = match variant_rng.as_mut() {
        Some(rng) => lexicalize::Chooser::Seeded(rng),
        None => lexicalize::Chooser::Canonical,
    };
    let lexicalization = lexicalize::lexicalize_with(doc, &text_plan, lex, &mut chooser)?;
    let (paragraphs, mentions) = refer(&lexicalization, lex, ref_rng.as_mut());

    let salutation = config.salutation.as_deref().or(lex.salutation.as_deref());
    let closing = config.closing.as_deref().or(lex.closing.as_deref());
    let text = realize(&paragraphs, lex.language, salutation, closing);

    let mut slots: Vec<SlotRef> = lexicalization.clauses().flat_map(|c| c.facts.iter().cloned()).collect();
    slots.sort();
    Ok(ReportText {
        text,
        architecture: Architecture::Pipeline,
        slots,
        template_id: None,
        trace: Some(PipelineTrace {
            discourse,
            text_plan,
            lexicalization,
            mentions,
        }),
        seed: match config.mode {
            VariantMode::Seeded(s) => Some(s),
            VariantMode::Canonical => None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::parse_ir;

    fn squash(s: &str) -> String {
        s.split_whitespace().collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn portuguese_rio_report() {
        let doc = parse_ir(
            r#"LOCATION(city="Rio de Janeiro",uf="RJ",timestamp="Jan 15, 2022"); WEATHER(condition="cloudy",temperature="28ºC",max_since_days="10")"#,
        )
        .unwrap();
        let out = run_pipeline(&doc, &Lexicon::default_pt(), &PipelineConfig::default()).unwrap();
        assert_eq!(
            out.text,
            "Hoje, dia 15 de Janeiro de 2022, o clima é nublado no Rio de Janeiro (RJ). A temperatura média esperada é de 28ºC, e esta é a maior temperatura dos últimos 10 dias."
        );
        assert_eq!(out.slots.len(), 6);
    }

    #[test]
    fn english_causal_report() {
        let doc = parse_ir(
            r#"LOCATION(city="Rio de Janeiro",uf="RJ"); WEATHER(condition="sunny",temperature="32°C"); VESSELS_IN_PORT(quantity="280",trend="high",days_max="180"); OCEAN(fishing_condition="excellent")"#,
        )
        .unwrap();
        let out = run_pipeline(&doc, &Lexicon::default_en(), &PipelineConfig::default()).unwrap();
        assert_eq!(
            squash(&out.text),
            "Good Morning! Today in Rio de Janeiro (RJ) the weather is sunny, and the average temperature expected during the day is 32°C. Currently, 280 fishing vessels are in port, and this is the highest number of vessels reported in the last 6 months. According to the Marine Traffic website, this phenomenon may have been caused due to the excellent conditions for fishing today."
        );
        let trace = out.trace.unwrap();
        assert_eq!(trace.discourse.causal.len(), 1);
        assert!(trace.mentions[0].first);
    }

    #[test]
    fn seeded_runs_repeat() {
        let doc = parse_ir(
            r#"LOCATION(city="Santos",uf="SP",timestamp="Jan 15, 2022"); WEATHER(condition="sunny",temperature="32ºC",wind="12km/h"); VESSELS_IN_PORT(quantity="350",trend="high",days_max="30")"#,
        )
        .unwrap();
        let lex = Lexicon::default_pt();
        let a = run_pipeline(&doc, &lex, &PipelineConfig::seeded(7)).unwrap();
        let b = run_pipeline(&doc, &lex, &PipelineConfig::seeded(7)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.seed, Some(7));
        let texts: std::collections::BTreeSet<String> = (0..20)
            .map(|s| run_pipeline(&doc, &lex, &PipelineConfig::seeded(s)).unwrap().text)
            .collect();
        assert!(texts.len() > 1, "seeds never change the wording");
    }

    #[test]
    fn trace_serializes() {
        let doc = parse_ir(r#"LOCATION(city="Santos",uf="SP"); OIL(level="40")"#).unwrap();
        let out = run_pipeline(&doc, &Lexicon::default_pt(), &PipelineConfig::default()).unwrap();
        let json = serde_json::to_string(&out.trace).unwrap();
        assert!(json.contains("lexicalization"));
    }
}
