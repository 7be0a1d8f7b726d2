use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::faithfulness::check_faithfulness;
use super::metrics::{bleu, distinct_n, gleu, meteor_lite, rouge_l, MeteorParams, METEOR_PARAMS};
use super::tokenize::tokenize;
use super::MetricError;
use crate::ir::IntentDocument;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemScores {
    pub system: String,
    pub bleu: f64,
    pub gleu: f64,
    pub rouge_l_f1: f64,
    pub meteor: f64,
    pub faithfulness: f64,
    pub distinct_2: f64,
    pub pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub systems: Vec<SystemScores>,
    pub meteor_params: MeteorParams,
}

/// Outputs of one system, aligned with the references and documents.
pub struct SystemRun<'a> {
    pub name: &'a str,
    pub outputs: &'a [String],
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Scores each system against `references[i]` for output `i`. Sentence
/// metrics use the first reference and are averaged over pairs; an empty
/// output scores 0 on them.
pub fn evaluate_systems(
    systems: &[SystemRun<'_>],
    references: &[Vec<String>],
    docs: &[IntentDocument],
) -> Result<MetricReport, MetricError> {
    let refs: Vec<Vec<Vec<String>>> = references
        .iter()
        .map(|rs| rs.iter().map(|r| tokenize(r)).collect())
        .collect();
    let mut rows = Vec::new();
    for sys in systems {
        if sys.outputs.len() != refs.len() || docs.len() != refs.len() {
            return Err(MetricError::LengthMismatch {
                hypotheses: sys.outputs.len(),
                references: refs.len(),
            });
        }
        let hyps: Vec<Vec<String>> = sys.outputs.iter().map(|o| tokenize(o)).collect();
        let sentence = |f: fn(&[String], &[String]) -> Result<f64, MetricError>| {
            mean(hyps.iter().zip(&refs).map(|(h, r)| f(h, &r[0]).unwrap_or(0.0)))
        };
        rows.push(SystemScores {
            system: sys.name.to_owned(),
            bleu: bleu(&hyps, &refs, 4)?,
            gleu: sentence(gleu),
            rouge_l_f1: sentence(|h, r| rouge_l(h, r).map(|p| p.f1)),
            meteor: sentence(meteor_lite),
            faithfulness: mean(
                sys.outputs
                    .iter()
                    .zip(docs)
                    .map(|(o, d)| f64::from(u8::from(check_faithfulness(d, o).passed()))),
            ),
            distinct_2: distinct_n(&hyps, 2),
            pairs: hyps.len(),
        });
    }
    Ok(MetricReport {
        systems: rows,
        meteor_params: METEOR_PARAMS,
    })
}

impl MetricReport {
    /// Plain-text table, scores in percent.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<12} {:>6} {:>6} {:>8} {:>7} {:>7} {:>10} {:>6}",
            "system", "BLEU", "GLEU", "ROUGE-L", "METEOR", "faith.", "distinct-2", "pairs"
        );
        for s in &self.systems {
            let _ = writeln!(
                out,
                "{:<12} {:>6.1} {:>6.1} {:>8.1} {:>7.1} {:>7.1} {:>10.1} {:>6}",
                s.system,
                100.0 * s.bleu,
                100.0 * s.gleu,
                100.0 * s.rouge_l_f1,
                100.0 * s.meteor,
                100.0 * s.faithfulness,
                100.0 * s.distinct_2,
                s.pairs
            );
        }
        let p = self.meteor_params;
        let _ = writeln!(
            out,
            "METEOR-lite: Fmean = 10PR/(R+{}P), penalty = {}*(chunks/matches)^{}",
            p.recall_weight, p.penalty_gamma, p.penalty_beta
        );
        out
    }
}
