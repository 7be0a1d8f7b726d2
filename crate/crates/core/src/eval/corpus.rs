use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::MetricError;

/// One annotated corpus example.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRow {
    pub id: String,
    pub date: String,
    pub city: String,
    pub uf: String,
    /// Canonical serialized IR.
    pub input_ir: String,
    /// Intent names in discourse order.
    pub discourse_order: Vec<String>,
    /// Paragraphs of sentence groups of intent names.
    pub text_structure: Vec<Vec<Vec<String>>>,
    /// Lexicon entry ids per realized sentence.
    pub lexicalization: Vec<Vec<String>>,
    pub references: Vec<String>,
    pub reference_text: String,
}

/// A generated output keyed by corpus row id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemOutput {
    pub id: String,
    pub text: String,
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, MetricError> {
    let io = |e| MetricError::Io(path.display().to_string(), e);
    let file = std::fs::File::open(path).map_err(io)?;
    let mut rows = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io)?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push(serde_json::from_str(&line).map_err(|e| MetricError::Row {
            path: path.display().to_string(),
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(rows)
}

pub fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), MetricError> {
    let io = |e| MetricError::Io(path.display().to_string(), e);
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    for row in rows {
        let line = serde_json::to_string(row).expect("rows serialize");
        writeln!(out, "{line}").map_err(io)?;
    }
    out.flush().map_err(io)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split<T> {
    pub train: Vec<T>,
    pub validation: Vec<T>,
    pub test: Vec<T>,
}

/// Sizes for `n` rows: validation and test get `floor(n/5)` each and the
/// remainder goes to training.
pub fn split_sizes(n: usize) -> (usize, usize, usize) {
    let v = n / 5;
    (n - 2 * v, v, v)
}

/// Seeded shuffle, then a 60/20/20 cut.
pub fn split_corpus<T: Clone>(rows: &[T], seed: u64) -> Split<T> {
    let mut idx: Vec<usize> = (0..rows.len()).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (train, val, _) = split_sizes(rows.len());
    let pick = |ids: &[usize]| ids.iter().map(|&i| rows[i].clone()).collect();
    Split {
        train: pick(&idx[..train]),
        validation: pick(&idx[train..train + val]),
        test: pick(&idx[train + val..]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(split_sizes(100), (60, 20, 20));
        assert_eq!(split_sizes(10), (6, 2, 2));
        assert_eq!(split_sizes(101), (61, 20, 20));
        assert_eq!(split_sizes(0), (0, 0, 0));
    }

    #[test]
    fn partition_and_determinism() {
        let rows: Vec<u32> = (0..57).collect();
        let a = split_corpus(&rows, 3);
        assert_eq!(a, split_corpus(&rows, 3));
        assert_ne!(a, split_corpus(&rows, 4));
        let mut all: Vec<u32> = a.train.iter().chain(&a.validation).chain(&a.test).copied().collect();
        all.sort();
        assert_eq!(all, rows);
    }

    #[test]
    fn jsonl_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x/out.jsonl");
        let rows = vec![SystemOutput {
            id: "a".into(),
            text: "Olá".into(),
        }];
        write_jsonl(&path, &rows).unwrap();
        assert_eq!(read_jsonl::<SystemOutput>(&path).unwrap(), rows);
    }
}
