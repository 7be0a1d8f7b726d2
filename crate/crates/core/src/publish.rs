//! Thread composition and delivery.

use std::path::PathBuf;
use std::str::FromStr;
use std::time::Duration;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_LIMIT: usize = 280;
pub const MIN_LIMIT: usize = 40;
/// Separates chunks in dry-run files.
pub const RECORD_SEPARATOR: &str = "\n\u{1e}\n";
pub const DEFAULT_TOKEN_ENV: &str = "AZUL_WEBHOOK_TOKEN";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComposeError {
    #[error("limit {0} is below the minimum of {MIN_LIMIT}")]
    LimitTooSmall(usize),
    #[error("nothing to publish")]
    EmptyText,
    #[error("word of {length} characters exceeds the limit of {limit}")]
    UnsplittableToken { length: usize, limit: usize },
}

/// A report split for a length-limited platform.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thread {
    pub report_id: String,
    /// Exact slices of the original text; concatenated they reproduce it.
    pub bodies: Vec<String>,
    /// What gets posted: each body without trailing whitespace, plus
    /// ` (i/n)` when there is more than one.
    pub chunks: Vec<String>,
}

impl Thread {
    pub fn original(&self) -> String {
        self.bodies.concat()
    }

    pub fn len(&self) -> usize {
        self.chunks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chunks.is_empty()
    }
}

pub fn marker(i: usize, n: usize) -> String {
    format!(" ({i}/{n})")
}

fn count(s: &str) -> usize {
    s.chars().count()
}

/// A place where a chunk may end: the byte and code-point offsets of the
/// next word, the code-point offset just past the previous word, and
/// whether that word closes a sentence.
struct Cut {
    byte: usize,
    chr: usize,
    word_end: usize,
    sentence: bool,
}

fn cuts(text: &str) -> (Vec<Cut>, usize) {
    let mut out = Vec::new();
    let mut last_non_space = None;
    let mut word_end = 0;
    let mut prev_space = false;
    for (ci, (i, c)) in text.char_indices().enumerate() {
        if c.is_whitespace() {
            prev_space = true;
            continue;
        }
        if prev_space && last_non_space.is_some() {
            out.push(Cut {
                byte: i,
                chr: ci,
                word_end,
                sentence: matches!(last_non_space, Some('.' | '!' | '?')),
            });
        }
        prev_space = false;
        last_non_space = Some(c);
        word_end = ci + 1;
    }
    (out, word_end)
}

fn split(text: &str, budget: usize) -> Result<Vec<&str>, ComposeError> {
    let (cuts, text_end) = cuts(text);
    let mut pieces = Vec::new();
    let (mut start, mut start_char) = (0, 0);
    let mut k = 0;
    while start < text.len() {
        if text_end - start_char <= budget {
            pieces.push(&text[start..]);
            break;
        }
        let (mut any, mut sentence) = (None, None);
        while k < cuts.len() && cuts[k].word_end - start_char <= budget {
            any = Some(k);
            if cuts[k].sentence {
                sentence = Some(k);
            }
            k += 1;
        }
        let Some(end) = sentence.or(any) else {
            let word = text[start..].split_whitespace().next().unwrap_or_default();
            return Err(ComposeError::UnsplittableToken {
                length: count(word),
                limit: budget,
            });
        };
        pieces.push(&text[start..cuts[end].byte]);
        start = cuts[end].byte;
        start_char = cuts[end].chr;
        k = end + 1;
    }
    Ok(pieces)
}

/// Splits `text` into chunks of at most `limit` code points, markers
/// included. Cuts fall after a sentence when one fits, otherwise between
/// words.
pub fn compose_thread(report_id: &str, text: &str, limit: usize) -> Result<Thread, ComposeError> {
    if limit < MIN_LIMIT {
        return Err(ComposeError::LimitTooSmall(limit));
    }
    if text.trim().is_empty() {
        return Err(ComposeError::EmptyText);
    }
    if count(text.trim_end()) <= limit {
        return Ok(Thread {
            report_id: report_id.to_owned(),
            bodies: vec![text.to_owned()],
            chunks: vec![text.trim_end().to_owned()],
        });
    }
    // the marker width depends on the chunk count; widen until stable
    let mut digits = 1;
    loop {
        let budget = limit - (4 + 2 * digits);
        let pieces = match split(text, budget) {
            Err(ComposeError::UnsplittableToken { length, .. }) => {
                return Err(ComposeError::UnsplittableToken { length, limit })
            }
            other => other?,
        };
        let n = pieces.len();
        if n.to_string().len() <= digits {
            return Ok(Thread {
                report_id: report_id.to_owned(),
                bodies: pieces.iter().map(|p| p.to_string()).collect(),
                chunks: pieces
                    .iter()
                    .enumerate()
                    .map(|(i, p)| format!("{}{}", p.trim_end(), marker(i + 1, n)))
                    .collect(),
            });
        }
        digits = n.to_string().len();
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Sink {
    DryRun { dir: PathBuf },
    Webhook { url: String, token: Option<String> },
}

impl Sink {
    /// Parses `dry-run:<dir>` or `webhook:<url>`; the webhook token is read
    /// from `token_env`.
    pub fn from_target(target: &str, token_env: &str) -> Result<Self, PublishError> {
        if let Some(dir) = target.strip_prefix("dry-run:") {
            return Ok(Sink::DryRun { dir: dir.into() });
        }
        if let Some(url) = target.strip_prefix("webhook:") {
            return Ok(Sink::Webhook {
                url: url.to_owned(),
                token: std::env::var(token_env).ok(),
            });
        }
        Err(PublishError::BadSink(target.to_owned()))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Sink::DryRun { .. } => "dry-run",
            Sink::Webhook { .. } => "webhook",
        }
    }
}

impl FromStr for Sink {
    type Err = PublishError;

    fn from_str(s: &str) -> Result<Self, PublishError> {
        Sink::from_target(s, DEFAULT_TOKEN_ENV)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChunkStatus {
    Ok,
    Failed,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SinkError {
    /// 1-based chunk index.
    pub index: usize,
    pub retryable: bool,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublishReceipt {
    pub sink: String,
    pub report_id: String,
    pub statuses: Vec<ChunkStatus>,
    pub timestamp: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<SinkError>,
}

impl PublishReceipt {
    pub fn delivered(&self) -> bool {
        self.statuses.iter().all(|s| *s == ChunkStatus::Ok)
    }
}

#[derive(Debug, Error)]
pub enum PublishError {
    #[error("unknown sink `{0}`; use dry-run:<dir> or webhook:<url>")]
    BadSink(String),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetryPolicy {
    pub attempts: u32,
    pub backoff_ms: u64,
    pub timeout_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            attempts: 3,
            backoff_ms: 500,
            timeout_ms: 10_000,
        }
    }
}

#[derive(Serialize)]
struct WebhookBody<'a> {
    report_id: &'a str,
    index: usize,
    total: usize,
    text: &'a str,
    date: String,
}

fn post_once(agent: &ureq::Agent, url: &str, token: Option<&str>, body: &str) -> Result<(), (bool, String)> {
    let mut req = agent.post(url).header("Content-Type", "application/json");
    if let Some(t) = token {
        req = req.header("Authorization", format!("Bearer {t}"));
    }
    match req.send(body) {
        Ok(resp) => {
            let status = resp.status().as_u16();
            match status {
                200..=299 => Ok(()),
                408 | 429 | 500..=599 => Err((true, format!("HTTP {status}"))),
                _ => Err((false, format!("HTTP {status}"))),
            }
        }
        Err(e) => Err((true, e.to_string())),
    }
}

/// Delivers `thread` to `sink`, one chunk at a time in order. Webhook
/// delivery stops at the first chunk that still fails after retries; the
/// receipt marks it failed and the rest skipped.
pub fn publish(
    thread: &Thread,
    sink: &Sink,
    date: NaiveDate,
    retry: &RetryPolicy,
) -> Result<PublishReceipt, PublishError> {
    let mut receipt = PublishReceipt {
        sink: sink.kind().to_owned(),
        report_id: thread.report_id.clone(),
        statuses: vec![ChunkStatus::Skipped; thread.len()],
        timestamp: Utc::now(),
        location: None,
        error: None,
    };
    match sink {
        Sink::DryRun { dir } => {
            let path = dir.join(format!("{date}_{}.txt", thread.report_id));
            let io = |source| PublishError::Io {
                path: path.display().to_string(),
                source,
            };
            std::fs::create_dir_all(dir).map_err(io)?;
            std::fs::write(&path, thread.chunks.join(RECORD_SEPARATOR)).map_err(io)?;
            receipt.statuses.fill(ChunkStatus::Ok);
            receipt.location = Some(path.display().to_string());
        }
        Sink::Webhook { url, token } => {
            let config = ureq::Agent::config_builder()
                .http_status_as_error(false)
                .timeout_global(Some(Duration::from_millis(retry.timeout_ms)))
                .build();
            let agent = ureq::Agent::new_with_config(config);
            receipt.location = Some(url.clone());
            for (i, text) in thread.chunks.iter().enumerate() {
                let body = serde_json::to_string(&WebhookBody {
                    report_id: &thread.report_id,
                    index: i + 1,
                    total: thread.len(),
                    text,
                    date: date.to_string(),
                })
                .expect("body serializes");
                let mut outcome = Ok(());
                for attempt in 0..retry.attempts.max(1) {
                    if attempt > 0 {
                        std::thread::sleep(Duration::from_millis(retry.backoff_ms << (attempt - 1)));
                    }
                    outcome = post_once(&agent, url, token.as_deref(), &body);
                    match &outcome {
                        Ok(()) | Err((false, _)) => break,
                        Err((true, msg)) => log::warn!("chunk {} attempt {}: {msg}", i + 1, attempt + 1),
                    }
                }
                match outcome {
                    Ok(()) => receipt.statuses[i] = ChunkStatus::Ok,
                    Err((retryable, message)) => {
                        receipt.statuses[i] = ChunkStatus::Failed;
                        receipt.error = Some(SinkError {
                            index: i + 1,
                            retryable,
                            message,
                        });
                        break;
                    }
                }
            }
        }
    }
    Ok(receipt)
}
