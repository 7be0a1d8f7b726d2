use chrono::{Duration, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::trend::{detect_trend, TrendDirection};
use crate::format::{date_en_short, format_number};
use crate::ir::{Intent, IntentDocument, IrError};
use crate::store::{PayloadValue, Source, SourceRecord, Store, StoreError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ContentConfig {
    /// Days covered by the vessel trend window, report day included.
    pub trend_window_days: u32,
    /// Earthquakes older than this many days are not reported.
    pub earthquake_recency_days: u32,
}

impl Default for ContentConfig {
    fn default() -> Self {
        ContentConfig {
            trend_window_days: 30,
            earthquake_recency_days: 1,
        }
    }
}

#[derive(Debug, Error)]
pub enum ContentError {
    #[error("no record of any source for {city} on {date}")]
    NoData { city: String, date: NaiveDate },
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Ir(#[from] IrError),
}

const WEATHER_KEYS: [&str; 7] = [
    "condition",
    "temperature",
    "wind",
    "humidity",
    "cloudiness",
    "sea_height",
    "sunscreen",
];
const OCEAN_KEYS: [&str; 3] = ["fishing_condition", "sea_height", "water_temperature"];
const TIDES_KEYS: [&str; 4] = ["high_tide", "high_tide_time", "low_tide", "low_tide_time"];
const EARTHQUAKE_KEYS: [&str; 3] = ["magnitude", "depth", "entity"];
const OIL_KEYS: [&str; 3] = ["level", "production", "field"];

/// Renders a payload value the way report texts write it: `32ºC`, `0,8m`,
/// `1.4 mR`, `15km`.
pub fn format_payload_value(key: &str, value: &PayloadValue) -> String {
    let (v, unit) = match value {
        PayloadValue::Text(t) => return t.clone(),
        PayloadValue::Number { value, unit } => (*value, unit.as_str()),
    };
    let or = |default: &'static str| if unit.is_empty() { default } else { unit };
    match key {
        "temperature" | "water_temperature" => {
            let unit = match unit {
                "" | "C" | "°C" | "ºc" | "°c" => "ºC",
                u => u,
            };
            format!("{}{unit}", format_number(v, true))
        }
        "wind" => format!("{}{}", format_number(v, true), or("km/h")),
        "humidity" | "cloudiness" => format!("{}{}", format_number(v, true), or("%")),
        "sea_height" | "high_tide" | "low_tide" => {
            format!("{}{}", format_number(v, true), or("m"))
        }
        "magnitude" => format!("{} {}", format_number(v, false), or("mR")),
        "depth" => format!("{}{}", format_number(v, false), or("km")),
        _ => format!("{}{unit}", format_number(v, true)),
    }
}

fn intent_from(name: &str, rec: &SourceRecord, keys: &[&str]) -> Result<Option<Intent>, IrError> {
    let attrs: Vec<(String, String)> = keys
        .iter()
        .filter_map(|k| rec.get(k).map(|v| (k.to_string(), format_payload_value(k, v))))
        .collect();
    if attrs.is_empty() {
        return Ok(None);
    }
    Intent::new(name, attrs).map(Some)
}

/// Builds the intent document for one city and day.
///
/// Intents are emitted in a fixed order: LOCATION, WEATHER, OCEAN, TIDES,
/// EARTHQUAKE, VESSELS_IN_PORT, OIL. Vessel trend attributes appear only when
/// the day's count is a strict extreme of the trend window.
pub fn select_content(
    store: &Store,
    city: &str,
    date: NaiveDate,
    config: &ContentConfig,
) -> Result<IntentDocument, ContentError> {
    let uf = store
        .uf_of(city)
        .ok_or_else(|| StoreError::UnknownCity(city.to_owned()))?
        .clone();
    let day = |source| store.get(source, city, date);

    let recency = i64::from(config.earthquake_recency_days.max(1));
    let quake = (0..recency)
        .map(|back| date - Duration::days(back))
        .find_map(|d| store.get(Source::Earthquake, city, d));

    let any = Source::ALL.iter().any(|s| day(*s).is_some()) || quake.is_some();
    if !any {
        return Err(ContentError::NoData {
            city: city.to_owned(),
            date,
        });
    }

    let mut intents = vec![Intent::new(
        "LOCATION",
        [
            ("city", city.to_owned()),
            ("uf", uf.to_string()),
            ("timestamp", date_en_short(date)),
        ],
    )?];

    if let Some(rec) = day(Source::Weather).filter(|r| r.get("condition").is_some()) {
        intents.extend(intent_from("WEATHER", rec, &WEATHER_KEYS)?);
    }
    if let Some(rec) = day(Source::Tides) {
        intents.extend(intent_from("OCEAN", rec, &OCEAN_KEYS)?);
        intents.extend(intent_from("TIDES", rec, &TIDES_KEYS)?);
    }
    if let Some(rec) = quake.filter(|r| r.get("magnitude").is_some() && r.get("depth").is_some()) {
        intents.extend(intent_from("EARTHQUAKE", rec, &EARTHQUAKE_KEYS)?);
    }
    if let Some((rec, quantity)) =
        day(Source::Vessels).and_then(|r| r.get("quantity").and_then(PayloadValue::number).map(|q| (r, q)))
    {
        let mut attrs = vec![(
            "quantity".to_owned(),
            format_payload_value("quantity", rec.get("quantity").unwrap()),
        )];
        let window = config.trend_window_days;
        if window >= 2 {
            let prior = store.query_window(city, "quantity", date - Duration::days(1), window - 1)?;
            if let Ok(trend) = detect_trend(&prior, quantity, window) {
                if trend.direction != TrendDirection::None {
                    attrs.push(("trend".into(), trend.direction.as_str().into()));
                    attrs.push(("days_max".into(), window.to_string()));
                }
            }
        }
        intents.push(Intent::new("VESSELS_IN_PORT", attrs)?);
    }
    if let Some(rec) = day(Source::Oil).filter(|r| r.get("level").is_some()) {
        intents.extend(intent_from("OIL", rec, &OIL_KEYS)?);
    }

    Ok(IntentDocument::new(intents)?)
}
