//! File-backed document store for normalized source observations.
//!
//! Each source is one collection file `<data-dir>/<source>.jsonl` holding
//! one canonical JSON record per line, sorted by `(city, date)`. Files are
//! rewritten whole through a temporary file and a rename, so a collection
//! on disk is always either the old or the new version. The in-memory index
//! is rebuilt on open.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::{DateTime, Duration, NaiveDate, Utc};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::ir::{parse_quantity, BRAZILIAN_STATES};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {malformed} of {total} lines malformed; wrong feed?")]
    Format {
        path: PathBuf,
        malformed: usize,
        total: usize,
    },
    #[error("corrupt collection {path} line {line}: {message}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("unknown city `{0}`")]
    UnknownCity(String),
    #[error("window must cover at least one day")]
    EmptyWindow,
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_owned(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Weather,
    Tides,
    Vessels,
    Earthquake,
    Oil,
}

impl Source {
    pub const ALL: [Source; 5] = [
        Source::Weather,
        Source::Tides,
        Source::Vessels,
        Source::Earthquake,
        Source::Oil,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Source::Weather => "weather",
            Source::Tides => "tides",
            Source::Vessels => "vessels",
            Source::Earthquake => "earthquake",
            Source::Oil => "oil",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Source {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Source::ALL
            .into_iter()
            .find(|src| src.as_str() == s.trim().to_lowercase())
            .ok_or_else(|| format!("unknown source `{s}`"))
    }
}

/// Two-letter Brazilian state code.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Uf(String);

impl Uf {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Uf {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        let up = s.trim().to_uppercase();
        if BRAZILIAN_STATES.contains(&up.as_str()) {
            Ok(Uf(up))
        } else {
            Err(format!("`{s}` is not a Brazilian state code"))
        }
    }
}

impl From<Uf> for String {
    fn from(uf: Uf) -> String {
        uf.0
    }
}

impl fmt::Display for Uf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PayloadValue {
    Number { value: f64, unit: String },
    Text(String),
}

impl PayloadValue {
    pub fn number(&self) -> Option<f64> {
        match self {
            PayloadValue::Number { value, .. } => Some(*value),
            PayloadValue::Text(_) => None,
        }
    }

    pub fn unit(&self) -> Option<&str> {
        match self {
            PayloadValue::Number { unit, .. } => Some(unit),
            PayloadValue::Text(_) => None,
        }
    }

    pub fn text(&self) -> Option<&str> {
        match self {
            PayloadValue::Text(t) => Some(t),
            PayloadValue::Number { .. } => None,
        }
    }

    fn from_json(v: &Value) -> Option<Self> {
        match v {
            Value::Number(n) => Some(PayloadValue::Number {
                value: n.as_f64()?,
                unit: String::new(),
            }),
            Value::String(s) if s.trim().is_empty() => None,
            Value::String(s) => Some(match parse_quantity(s) {
                Some((value, unit)) => PayloadValue::Number { value, unit },
                None => PayloadValue::Text(s.trim().to_owned()),
            }),
            Value::Bool(b) => Some(PayloadValue::Text(b.to_string())),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceRecord {
    pub source: Source,
    pub city: String,
    pub uf: Uf,
    pub date: NaiveDate,
    pub payload: IndexMap<String, PayloadValue>,
    pub fetched_at: DateTime<Utc>,
}

impl SourceRecord {
    pub fn key(&self) -> RecordKey {
        RecordKey {
            source: self.source,
            city: self.city.clone(),
            date: self.date,
        }
    }

    pub fn get(&self, metric: &str) -> Option<&PayloadValue> {
        self.payload.get(metric)
    }

    fn canonical_line(&self) -> String {
        serde_json::to_string(self).expect("records always serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RecordKey {
    pub source: Source,
    pub city: String,
    pub date: NaiveDate,
}

const RESERVED: [&str; 5] = ["source", "city", "uf", "date", "fetched_at"];

fn parse_feed_line(line: &str, source: Source) -> Result<SourceRecord, String> {
    let value: Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let obj = value.as_object().ok_or("line is not an object")?;
    let text = |key: &str| -> Result<&str, String> {
        obj.get(key)
            .and_then(Value::as_str)
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| format!("missing `{key}`"))
    };
    if let Some(declared) = obj.get("source") {
        let declared: Source = declared.as_str().ok_or("`source` is not a string")?.parse()?;
        if declared != source {
            return Err(format!("record for {declared} in a {source} feed"));
        }
    }
    let city = text("city")?.to_owned();
    let uf = Uf::try_from(text("uf")?.to_owned())?;
    let date = NaiveDate::parse_from_str(text("date")?, "%Y-%m-%d").map_err(|e| e.to_string())?;
    let fetched_at = match obj.get("fetched_at") {
        Some(v) => v
            .as_str()
            .and_then(|s| DateTime::parse_from_rfc3339(s).ok())
            .map(|d| d.with_timezone(&Utc))
            .ok_or("bad `fetched_at`")?,
        None => Utc::now(),
    };
    let mut payload = IndexMap::new();
    for (key, v) in obj {
        if RESERVED.contains(&key.as_str()) {
            continue;
        }
        let pv = PayloadValue::from_json(v).ok_or_else(|| format!("bad value for `{key}`"))?;
        payload.insert(key.clone(), pv);
    }
    if payload.is_empty() {
        return Err("record has no payload".into());
    }
    Ok(SourceRecord {
        source,
        city,
        uf,
        date,
        payload,
        fetched_at,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestReport {
    pub records: Vec<SourceRecord>,
    pub skipped: usize,
}

/// Reads a line-delimited feed, skipping and counting malformed lines.
pub fn ingest_feed(path: &Path, source: Source) -> Result<IngestReport, StoreError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut records = Vec::new();
    let mut skipped = 0;
    let mut total = 0;
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        total += 1;
        match parse_feed_line(&line, source) {
            Ok(r) => records.push(r),
            Err(why) => {
                log::debug!("{}:{}: skipped: {why}", path.display(), n + 1);
                skipped += 1;
            }
        }
    }
    if skipped * 2 > total {
        return Err(StoreError::Format {
            path: path.to_owned(),
            malformed: skipped,
            total,
        });
    }
    Ok(IngestReport { records, skipped })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct UpsertReceipt {
    pub inserted: usize,
    pub replaced: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub city: String,
    pub metric: String,
    pub points: Vec<(NaiveDate, f64)>,
    pub window: u32,
}

impl TimeSeries {
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|(_, v)| *v)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Single-writer store handle. `&Store` can be shared across reader threads.
#[derive(Debug)]
pub struct Store {
    dir: PathBuf,
    records: BTreeMap<RecordKey, SourceRecord>,
}

impl Store {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, StoreError> {
        let dir = dir.as_ref().to_owned();
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        let mut records = BTreeMap::new();
        for source in Source::ALL {
            let path = collection_path(&dir, source);
            if !path.exists() {
                continue;
            }
            let file = fs::File::open(&path).map_err(io_err(&path))?;
            for (n, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(io_err(&path))?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec: SourceRecord = serde_json::from_str(&line).map_err(|e| StoreError::Corrupt {
                    path: path.clone(),
                    line: n + 1,
                    message: e.to_string(),
                })?;
                // later lines win, so appended duplicates compact on open
                records.insert(rec.key(), rec);
            }
        }
        Ok(Store { dir, records })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn upsert(&mut self, batch: impl IntoIterator<Item = SourceRecord>) -> Result<UpsertReceipt, StoreError> {
        let mut next = self.records.clone();
        let mut receipt = UpsertReceipt::default();
        let mut touched = BTreeSet::new();
        for rec in batch {
            touched.insert(rec.source);
            match next.insert(rec.key(), rec) {
                Some(_) => receipt.replaced += 1,
                None => receipt.inserted += 1,
            }
        }
        for source in touched {
            write_collection(&self.dir, source, &next)?;
        }
        self.records = next;
        Ok(receipt)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> impl Iterator<Item = &SourceRecord> {
        self.records.values()
    }

    pub fn get(&self, source: Source, city: &str, date: NaiveDate) -> Option<&SourceRecord> {
        self.records.get(&RecordKey {
            source,
            city: city.to_owned(),
            date,
        })
    }

    pub fn cities(&self) -> BTreeSet<&str> {
        self.records.values().map(|r| r.city.as_str()).collect()
    }

    pub fn knows_city(&self, city: &str) -> bool {
        self.records.values().any(|r| r.city == city)
    }

    pub fn uf_of(&self, city: &str) -> Option<&Uf> {
        self.records.values().find(|r| r.city == city).map(|r| &r.uf)
    }

    /// Up to `days` points of `metric` for `city`, ending at `end_date`
    /// inclusive. Days without a numeric reading are absent.
    pub fn query_window(
        &self,
        city: &str,
        metric: &str,
        end_date: NaiveDate,
        days: u32,
    ) -> Result<TimeSeries, StoreError> {
        if days == 0 {
            return Err(StoreError::EmptyWindow);
        }
        if !self.knows_city(city) {
            return Err(StoreError::UnknownCity(city.to_owned()));
        }
        let start = end_date - Duration::days(i64::from(days) - 1);
        let mut by_date = BTreeMap::new();
        for source in Source::ALL {
            let lo = RecordKey {
                source,
                city: city.to_owned(),
                date: start,
            };
            let hi = RecordKey {
                source,
                city: city.to_owned(),
                date: end_date,
            };
            for rec in self.records.range(lo..=hi).map(|(_, r)| r) {
                if let Some(v) = rec.get(metric).and_then(PayloadValue::number) {
                    by_date.entry(rec.date).or_insert(v);
                }
            }
        }
        Ok(TimeSeries {
            city: city.to_owned(),
            metric: metric.to_owned(),
            points: by_date.into_iter().collect(),
            window: days,
        })
    }
}

fn collection_path(dir: &Path, source: Source) -> PathBuf {
    dir.join(format!("{source}.jsonl"))
}

fn write_collection(dir: &Path, source: Source, records: &BTreeMap<RecordKey, SourceRecord>) -> Result<(), StoreError> {
    let path = collection_path(dir, source);
    let tmp = dir.join(format!(".{source}.jsonl.tmp"));
    let mut out = io::BufWriter::new(fs::File::create(&tmp).map_err(io_err(&tmp))?);
    for rec in records.values().filter(|r| r.source == source) {
        writeln!(out, "{}", rec.canonical_line()).map_err(io_err(&tmp))?;
    }
    out.into_inner()
        .map_err(|e| io_err(&tmp)(e.into_error()))?
        .sync_all()
        .map_err(io_err(&tmp))?;
    fs::rename(&tmp, &path).map_err(io_err(&path))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(city: &str, date: &str, quantity: f64) -> SourceRecord {
        SourceRecord {
            source: Source::Vessels,
            city: city.into(),
            uf: Uf::try_from("SP".to_owned()).unwrap(),
            date: date.parse().unwrap(),
            payload: [(
                "quantity".to_owned(),
                PayloadValue::Number {
                    value: quantity,
                    unit: String::new(),
                },
            )]
            .into_iter()
            .collect(),
            fetched_at: "2022-01-16T00:00:00Z".parse().unwrap(),
        }
    }

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn vessels_feed_line() {
        let tmp = tempfile::tempdir().unwrap();
        let p = write(
            tmp.path(),
            "v.jsonl",
            r#"{"city":"Santos","uf":"SP","date":"2022-01-15","quantity":185}"#,
        );
        let report = ingest_feed(&p, Source::Vessels).unwrap();
        assert_eq!(report.skipped, 0);
        let r = &report.records[0];
        assert_eq!(r.source, Source::Vessels);
        assert_eq!(r.city, "Santos");
        assert_eq!(r.uf.as_str(), "SP");
        assert_eq!(r.date, NaiveDate::from_ymd_opt(2022, 1, 15).unwrap());
        assert_eq!(r.get("quantity").and_then(PayloadValue::number), Some(185.0));
    }

    #[test]
    fn empty_feed() {
        let tmp = tempfile::tempdir().unwrap();
        let p = write(tmp.path(), "e.jsonl", "");
        let report = ingest_feed(&p, Source::Weather).unwrap();
        assert!(report.records.is_empty());
        assert_eq!(report.skipped, 0);
    }

    #[test]
    fn malformed_lines_are_counted() {
        let tmp = tempfile::tempdir().unwrap();
        let mut body = String::new();
        for d in 1..=7 {
            body += &format!(
                "{{\"source\":\"weather\",\"city\":\"Recife\",\"uf\":\"PE\",\"date\":\"2022-01-{d:02}\",\"temperature\":\"29,5ºC\"}}\n"
            );
        }
        body += "not json\n";
        body += r#"{"city":"Recife","uf":"XX","date":"2022-01-09","temperature":"29ºC"}"#;
        body += "\n";
        body += r#"{"source":"oil","city":"Recife","uf":"PE","date":"2022-01-10","level":3}"#;
        body += "\n";
        let p = write(tmp.path(), "w.jsonl", &body);
        let report = ingest_feed(&p, Source::Weather).unwrap();
        assert_eq!(report.records.len(), 7);
        assert_eq!(report.skipped, 3);
        let t = report.records[0].get("temperature").unwrap();
        assert_eq!(t.number(), Some(29.5));
        assert_eq!(t.unit(), Some("ºC"));
    }

    #[test]
    fn mostly_malformed_feed_is_rejected() {
        let tmp = tempfile::tempdir().unwrap();
        let p = write(
            tmp.path(),
            "bad.jsonl",
            "x\ny\n{\"city\":\"Recife\",\"uf\":\"PE\",\"date\":\"2022-01-01\",\"a\":1}\n",
        );
        assert!(matches!(
            ingest_feed(&p, Source::Tides),
            Err(StoreError::Format {
                malformed: 2,
                total: 3,
                ..
            })
        ));
    }

    #[test]
    fn upsert_counts_and_last_writer_wins() {
        let tmp = tempfile::tempdir().unwrap();
        let mut store = Store::open(tmp.path()).unwrap();
        let batch: Vec<_> = (1..=50)
            .map(|i| {
                let d = NaiveDate::from_ymd_opt(2022, 1, 1).unwrap() + Duration::days(i);
                rec("Santos", &d.to_string(), i as f64)
            })
            .collect();
        assert_eq!(
            store.upsert(batch.clone()).unwrap(),
            UpsertReceipt {
                inserted: 50,
                replaced: 0
            }
        );
        assert_eq!(
            store.upsert(batch.clone()).unwrap(),
            UpsertReceipt {
                inserted: 0,
                replaced: 50
            }
        );
        let mut changed = batch[10].clone();
        changed.payload.insert(
            "quantity".into(),
            PayloadValue::Number {
                value: 999.0,
                unit: String::new(),
            },
        );
        store.upsert([changed.clone()]).unwrap();
        assert_eq!(store.len(), 50);
        assert_eq!(store.get(Source::Vessels, "Santos", changed.date), Some(&changed));
    }

    #[test]
    fn reopen_is_byte_identical() {
        let tmp = tempfile::tempdir().unwrap();
        let mut store = Store::open(tmp.path()).unwrap();
        store
            .upsert([rec("Santos", "2022-01-02", 1.5), rec("Ilhéus", "2022-01-01", 3.0)])
            .unwrap();
        let before: Vec<String> = store.records().map(SourceRecord::canonical_line).collect();
        let reopened = Store::open(tmp.path()).unwrap();
        let after: Vec<String> = reopened.records().map(SourceRecord::canonical_line).collect();
        assert_eq!(before, after);
    }

    #[test]
    fn window_queries() {
        let tmp = tempfile::tempdir().unwrap();
        let mut store = Store::open(tmp.path()).unwrap();
        let start = NaiveDate::from_ymd_opt(2021, 10, 18).unwrap();
        let batch: Vec<_> = (0..90)
            .map(|i| rec("Santos", &(start + Duration::days(i)).to_string(), i as f64))
            .collect();
        store.upsert(batch).unwrap();
        let end = start + Duration::days(89);
        assert_eq!(store.query_window("Santos", "quantity", end, 30).unwrap().len(), 30);
        let one = store.query_window("Santos", "quantity", end, 1).unwrap();
        assert_eq!(one.points, vec![(end, 89.0)]);
        assert!(matches!(
            store.query_window("Nowhere", "quantity", end, 5),
            Err(StoreError::UnknownCity(_))
        ));
        assert!(matches!(
            store.query_window("Santos", "quantity", end, 0),
            Err(StoreError::EmptyWindow)
        ));
    }

    #[test]
    fn gapped_window_keeps_present_days_in_order() {
        let tmp = tempfile::tempdir().unwrap();
        let mut store = Store::open(tmp.path()).unwrap();
        let start = NaiveDate::from_ymd_opt(2021, 10, 18).unwrap();
        // every third day missing: 60 of 90 present
        let batch: Vec<_> = (0..90)
            .filter(|i| i % 3 != 2)
            .map(|i| rec("Santos", &(start + Duration::days(i)).to_string(), i as f64))
            .collect();
        store.upsert(batch).unwrap();
        let s = store
            .query_window("Santos", "quantity", start + Duration::days(89), 90)
            .unwrap();
        assert_eq!(s.len(), 60);
        assert!(s.points.windows(2).all(|w| w[0].0 < w[1].0));
    }
}
