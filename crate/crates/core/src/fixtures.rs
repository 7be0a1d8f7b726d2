//! Deterministic feeds for five coastal cities, 2021-10-18 to 2022-01-15.
//!
//! On the last day Santos has an earthquake and a record vessel count, and
//! Recife's oil level crosses the critical threshold. Rio de Janeiro, Cabo
//! Frio and Itajaí are routine.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::{Duration, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::store::{ingest_feed, Source, Store, StoreError};

pub const FIXTURE_CITIES: [(&str, &str); 5] = [
    ("Santos", "SP"),
    ("Rio de Janeiro", "RJ"),
    ("Cabo Frio", "RJ"),
    ("Itajaí", "SC"),
    ("Recife", "PE"),
];

pub const FIXTURE_DAYS: i64 = 90;

pub fn fixture_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2021, 10, 18).expect("valid date")
}

pub fn fixture_end() -> NaiveDate {
    fixture_start() + Duration::days(FIXTURE_DAYS - 1)
}

const CONDITIONS: [&str; 5] = ["sunny", "cloudy", "partly cloudy", "rainy", "clear"];
const FISHING: [&str; 4] = ["excellent", "good", "regular", "bad"];

fn time(rng: &mut ChaCha8Rng) -> String {
    format!("{:02}:{:02}", rng.gen_range(0..24), rng.gen_range(0..60))
}

fn tenth(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo..hi) * 10.0).round() / 10.0
}

/// Feed lines per source, in date order.
pub fn fixture_lines(seed: u64) -> BTreeMap<Source, Vec<String>> {
    let mut feeds: BTreeMap<Source, Vec<String>> = BTreeMap::new();
    let last = fixture_end();
    for (stream, (city, uf)) in FIXTURE_CITIES.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream as u64);
        for d in 0..FIXTURE_DAYS {
            let date = fixture_start() + Duration::days(d);
            let mut emit = |source: Source, payload: Value| {
                let mut obj = Map::new();
                obj.insert("city".into(), json!(city));
                obj.insert("uf".into(), json!(uf));
                obj.insert("date".into(), json!(date.to_string()));
                obj.insert(
                    "fetched_at".into(),
                    json!(format!("{}T06:00:00Z", date + Duration::days(1))),
                );
                obj.extend(payload.as_object().expect("payload object").clone());
                feeds.entry(source).or_default().push(Value::Object(obj).to_string());
            };
            emit(
                Source::Weather,
                json!({
                    "condition": CONDITIONS.choose(&mut rng).unwrap(),
                    "temperature": rng.gen_range(20..34),
                    "wind": rng.gen_range(5..31),
                    "humidity": rng.gen_range(50..96),
                }),
            );
            emit(
                Source::Tides,
                json!({
                    "fishing_condition": FISHING.choose(&mut rng).unwrap(),
                    "sea_height": tenth(&mut rng, 0.5, 2.0),
                    "water_temperature": rng.gen_range(18..28),
                    "high_tide": tenth(&mut rng, 1.0, 1.6),
                    "high_tide_time": time(&mut rng),
                    "low_tide": tenth(&mut rng, 0.1, 0.4),
                    "low_tide_time": time(&mut rng),
                }),
            );
            let vessels = if *city == "Santos" && date == last {
                300
            } else {
                rng.gen_range(150..250)
            };
            emit(Source::Vessels, json!({ "quantity": vessels }));
            if *city == "Santos" && date == last {
                emit(
                    Source::Earthquake,
                    json!({ "magnitude": 1.3, "depth": 10, "entity": "Centro de Sismologia da USP" }),
                );
            }
            if *city == "Recife" {
                let level = if date == last { 97 } else { rng.gen_range(80..93) };
                emit(Source::Oil, json!({ "level": level }));
            }
        }
    }
    feeds
}

/// Writes `<dir>/<source>.jsonl` for each source.
pub fn write_fixture_feeds(dir: &Path, seed: u64) -> Result<Vec<(Source, PathBuf)>, StoreError> {
    let io = |path: &Path| {
        let path = path.to_owned();
        move |source| StoreError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let mut out = Vec::new();
    for (source, lines) in fixture_lines(seed) {
        let path = dir.join(format!("{source}.jsonl"));
        std::fs::write(&path, lines.join("\n") + "\n").map_err(io(&path))?;
        out.push((source, path));
    }
    Ok(out)
}

/// Writes the feeds under `<root>/feeds` and ingests them into a store at
/// `<root>/store`.
pub fn build_fixture_store(root: &Path, seed: u64) -> Result<Store, StoreError> {
    let mut store = Store::open(root.join("store"))?;
    for (source, path) in write_fixture_feeds(&root.join("feeds"), seed)? {
        store.upsert(ingest_feed(&path, source)?.records)?;
    }
    Ok(store)
}
