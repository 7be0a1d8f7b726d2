use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::MetricError;

type Ngrams<'a> = HashMap<&'a [String], usize>;

fn ngrams(tokens: &[String], n: usize) -> Ngrams<'_> {
    let mut out = HashMap::new();
    if n > 0 && tokens.len() >= n {
        for w in tokens.windows(n) {
            *out.entry(w).or_insert(0) += 1;
        }
    }
    out
}

/// Clipped matches and hypothesis total for one order, clipping against the
/// per-n-gram maximum over references.
fn clipped(hyp: &[String], refs: &[Vec<String>], n: usize) -> (usize, usize) {
    let h = ngrams(hyp, n);
    let mut max_ref: HashMap<&[String], usize> = HashMap::new();
    for r in refs {
        for (g, c) in ngrams(r, n) {
            let e = max_ref.entry(g).or_insert(0);
            *e = (*e).max(c);
        }
    }
    let matches = h
        .iter()
        .map(|(g, c)| (*c).min(max_ref.get(g).copied().unwrap_or(0)))
        .sum();
    (matches, h.values().sum())
}

/// Reference length closest to `c`, shorter on ties.
fn closest_ref_len(c: usize, refs: &[Vec<String>]) -> usize {
    refs.iter()
        .map(Vec::len)
        .min_by_key(|&r| (r.abs_diff(c), r))
        .unwrap_or(0)
}

fn brevity_penalty(c: usize, r: usize) -> f64 {
    if c == 0 {
        0.0
    } else if c > r {
        1.0
    } else {
        (1.0 - r as f64 / c as f64).exp()
    }
}

fn check_corpus(hyps: usize, refs: &[Vec<Vec<String>>], max_n: usize) -> Result<(), MetricError> {
    if hyps == 0 || max_n == 0 || refs.iter().any(Vec::is_empty) {
        return Err(MetricError::EmptyInput);
    }
    if hyps != refs.len() {
        return Err(MetricError::LengthMismatch {
            hypotheses: hyps,
            references: refs.len(),
        });
    }
    Ok(())
}

/// Corpus BLEU without smoothing: geometric mean of the modified n-gram
/// precisions for n = 1..=max_n, times the brevity penalty. Orders for
/// which the hypotheses contain no n-grams at all are left out of the mean.
pub fn bleu(hypotheses: &[Vec<String>], references: &[Vec<Vec<String>>], max_n: usize) -> Result<f64, MetricError> {
    check_corpus(hypotheses.len(), references, max_n)?;
    let mut matches = vec![0usize; max_n];
    let mut totals = vec![0usize; max_n];
    let (mut c, mut r) = (0, 0);
    for (hyp, refs) in hypotheses.iter().zip(references) {
        for n in 1..=max_n {
            let (m, t) = clipped(hyp, refs, n);
            matches[n - 1] += m;
            totals[n - 1] += t;
        }
        c += hyp.len();
        r += closest_ref_len(hyp.len(), refs);
    }
    let mut log_sum = 0.0;
    let mut orders = 0;
    for (m, t) in matches.iter().zip(&totals) {
        if *t == 0 {
            continue;
        }
        if *m == 0 {
            return Ok(0.0);
        }
        log_sum += (*m as f64 / *t as f64).ln();
        orders += 1;
    }
    if orders == 0 {
        return Ok(0.0);
    }
    Ok(brevity_penalty(c, r) * (log_sum / orders as f64).exp())
}

/// Sentence BLEU with add-one smoothing on orders 2 and up.
pub fn sentence_bleu(hypothesis: &[String], references: &[Vec<String>], max_n: usize) -> Result<f64, MetricError> {
    if hypothesis.is_empty() || references.is_empty() || max_n == 0 {
        return Err(MetricError::EmptyInput);
    }
    let mut log_sum = 0.0;
    for n in 1..=max_n {
        let (m, t) = clipped(hypothesis, references, n);
        let p = if n == 1 {
            m as f64 / t as f64
        } else {
            (m as f64 + 1.0) / (t as f64 + 1.0)
        };
        if p == 0.0 {
            return Ok(0.0);
        }
        log_sum += p.ln();
    }
    let bp = brevity_penalty(hypothesis.len(), closest_ref_len(hypothesis.len(), references));
    Ok(bp * (log_sum / max_n as f64).exp())
}

/// Sentence GLEU: n-grams of orders 1..=4 pooled; min of precision and recall.
pub fn gleu(hypothesis: &[String], reference: &[String]) -> Result<f64, MetricError> {
    if hypothesis.is_empty() || reference.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    let (mut m, mut th, mut tr) = (0, 0, 0);
    for n in 1..=4 {
        let h = ngrams(hypothesis, n);
        let r = ngrams(reference, n);
        m += h
            .iter()
            .map(|(g, c)| (*c).min(r.get(g).copied().unwrap_or(0)))
            .sum::<usize>();
        th += h.values().sum::<usize>();
        tr += r.values().sum::<usize>();
    }
    Ok((m as f64 / th as f64).min(m as f64 / tr as f64))
}

pub fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        let mut diag = 0;
        for (j, y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[b.len()]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

pub fn rouge_l(hypothesis: &[String], reference: &[String]) -> Result<Prf, MetricError> {
    if hypothesis.is_empty() || reference.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    let l = lcs_len(hypothesis, reference) as f64;
    let precision = l / hypothesis.len() as f64;
    let recall = l / reference.len() as f64;
    let f1 = if l == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(Prf { precision, recall, f1 })
}

/// Weights of the simplified METEOR score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeteorParams {
    /// Recall weight in `Fmean = 10PR / (R + 9P)`.
    pub recall_weight: f64,
    pub penalty_gamma: f64,
    pub penalty_beta: f64,
}

pub const METEOR_PARAMS: MeteorParams = MeteorParams {
    recall_weight: 9.0,
    penalty_gamma: 0.5,
    penalty_beta: 3.0,
};

/// Light Portuguese stem: plural `-es`/`-s`, then gender `-o`/`-a`.
pub fn light_stem(word: &str) -> &str {
    let n = word.chars().count();
    let mut w = word;
    if n > 4 && w.ends_with("es") {
        w = &w[..w.len() - 2];
    } else if n > 3 && w.ends_with('s') {
        w = &w[..w.len() - 1];
    }
    if w.chars().count() > 3 && (w.ends_with('o') || w.ends_with('a')) {
        w = &w[..w.len() - 1];
    }
    w
}

/// METEOR with exact then light-stem unigram matching and no synonyms.
pub fn meteor_lite(hypothesis: &[String], reference: &[String]) -> Result<f64, MetricError> {
    if hypothesis.is_empty() || reference.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    let mut ref_used = vec![false; reference.len()];
    let mut align: Vec<Option<usize>> = vec![None; hypothesis.len()];
    let stages: [fn(&str, &str) -> bool; 2] = [|a, b| a == b, |a, b| light_stem(a) == light_stem(b)];
    for same in stages {
        for (i, h) in hypothesis.iter().enumerate() {
            if align[i].is_some() {
                continue;
            }
            if let Some(j) = (0..reference.len()).find(|&j| !ref_used[j] && same(h, &reference[j])) {
                ref_used[j] = true;
                align[i] = Some(j);
            }
        }
    }
    let pairs: Vec<(usize, usize)> = align
        .iter()
        .enumerate()
        .filter_map(|(i, j)| j.map(|j| (i, j)))
        .collect();
    let m = pairs.len();
    if m == 0 {
        return Ok(0.0);
    }
    let chunks = 1 + pairs
        .windows(2)
        .filter(|w| !(w[1].0 == w[0].0 + 1 && w[1].1 == w[0].1 + 1))
        .count();
    let p = m as f64 / hypothesis.len() as f64;
    let r = m as f64 / reference.len() as f64;
    let MeteorParams {
        recall_weight,
        penalty_gamma,
        penalty_beta,
    } = METEOR_PARAMS;
    let fmean = (1.0 + recall_weight) * p * r / (r + recall_weight * p);
    let penalty = penalty_gamma * (chunks as f64 / m as f64).powf(penalty_beta);
    Ok(fmean * (1.0 - penalty))
}

/// Unique over total n-grams across all outputs; 0 when there are none.
pub fn distinct_n(outputs: &[Vec<String>], n: usize) -> f64 {
    let mut seen = HashSet::new();
    let mut total = 0;
    for o in outputs {
        if n > 0 && o.len() >= n {
            for w in o.windows(n) {
                seen.insert(w);
                total += 1;
            }
        }
    }
    if total == 0 {
        0.0
    } else {
        seen.len() as f64 / total as f64
    }
}
