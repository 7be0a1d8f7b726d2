//! Automatic metrics, faithfulness checking, corpus splitting and
//! human-evaluation bundles.

pub mod bundle;
pub mod corpus;
pub mod faithfulness;
pub mod metrics;
pub mod report;
pub mod synth;
pub mod tokenize;

use thiserror::Error;

pub use bundle::{make_human_eval_bundle, LikertBundle};
pub use corpus::{read_jsonl, split_corpus, split_sizes, write_jsonl, CorpusRow, Split, SystemOutput};
pub use faithfulness::{check_faithfulness, check_with, FaithfulnessOptions, Gazetteer, Verdict, Violation};
pub use metrics::{
    bleu, distinct_n, gleu, lcs_len, light_stem, meteor_lite, rouge_l, sentence_bleu, Prf, METEOR_PARAMS,
};
pub use report::{evaluate_systems, MetricReport, SystemRun, SystemScores};
pub use synth::{synthesize_corpus, CORPUS_ROWS, CORPUS_SEED};
pub use tokenize::tokenize;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("metric input is empty")]
    EmptyInput,
    #[error("{hypotheses} hypotheses but {references} references")]
    LengthMismatch { hypotheses: usize, references: usize },
    #[error("sample of {requested} requested from {available} pairs")]
    SampleTooLarge { requested: usize, available: usize },
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error("{path}:{line}: {message}")]
    Row { path: String, line: usize, message: String },
    #[error("csv: {0}")]
    Csv(String),
}
