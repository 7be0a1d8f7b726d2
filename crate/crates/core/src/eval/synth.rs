//! Synthetic annotated corpus built from random intent documents verbalized
//! by the pipeline.

use chrono::{Duration, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::corpus::CorpusRow;
use crate::analysis::format_payload_value;
use crate::format::date_en_short;
use crate::ir::{serialize_ir, Intent, IntentDocument};
use crate::pipeline::{run_pipeline, Lexicon, PipelineConfig, PipelineError};
use crate::store::PayloadValue;

pub const CORPUS_SEED: u64 = 2022;
pub const CORPUS_ROWS: usize = 500;

const CITIES: [(&str, &str); 12] = [
    ("Santos", "SP"),
    ("Rio de Janeiro", "RJ"),
    ("Cabo Frio", "RJ"),
    ("Itajaí", "SC"),
    ("Recife", "PE"),
    ("Salvador", "BA"),
    ("Fortaleza", "CE"),
    ("Natal", "RN"),
    ("Florianópolis", "SC"),
    ("Vitória", "ES"),
    ("Maceió", "AL"),
    ("Ubatuba", "SP"),
];
const CONDITIONS: [&str; 6] = ["sunny", "cloudy", "partly cloudy", "rainy", "clear", "foggy"];
const FISHING: [&str; 4] = ["excellent", "good", "regular", "bad"];

fn quantity(key: &str, value: f64) -> String {
    format_payload_value(
        key,
        &PayloadValue::Number {
            value,
            unit: String::new(),
        },
    )
}

fn tenth(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo..hi) * 10.0).round() / 10.0
}

/// A random document for `city` on `date`. Always has LOCATION and WEATHER.
pub fn random_document(rng: &mut ChaCha8Rng, city: &str, uf: &str, date: NaiveDate) -> IntentDocument {
    let mut intents = vec![Intent::new(
        "LOCATION",
        [
            ("city", city.to_owned()),
            ("uf", uf.to_owned()),
            ("timestamp", date_en_short(date)),
        ],
    )
    .expect("non-empty")];

    let mut weather = vec![("condition".to_owned(), CONDITIONS.choose(rng).unwrap().to_string())];
    if rng.gen_bool(0.8) {
        weather.push((
            "temperature".into(),
            quantity("temperature", f64::from(rng.gen_range(18..36))),
        ));
        if rng.gen_bool(0.15) {
            weather.push(("max_since_days".into(), rng.gen_range(5..60).to_string()));
        }
    }
    if rng.gen_bool(0.5) {
        weather.push(("wind".into(), quantity("wind", f64::from(rng.gen_range(3..40)))));
    }
    if rng.gen_bool(0.4) {
        weather.push((
            "humidity".into(),
            quantity("humidity", f64::from(rng.gen_range(40..99))),
        ));
    }
    intents.push(Intent::new("WEATHER", weather).expect("non-empty"));

    if rng.gen_bool(0.6) {
        let mut ocean = vec![("fishing_condition".to_owned(), FISHING.choose(rng).unwrap().to_string())];
        if rng.gen_bool(0.5) {
            ocean.push(("sea_height".into(), quantity("sea_height", tenth(rng, 0.3, 2.5))));
        }
        if rng.gen_bool(0.4) {
            ocean.push((
                "water_temperature".into(),
                quantity("water_temperature", f64::from(rng.gen_range(17..29))),
            ));
        }
        intents.push(Intent::new("OCEAN", ocean).expect("non-empty"));
    }
    if rng.gen_bool(0.3) {
        let time = |rng: &mut ChaCha8Rng| format!("{:02}:{:02}", rng.gen_range(0..24), rng.gen_range(0..60));
        let tides = vec![
            ("high_tide".to_owned(), quantity("high_tide", tenth(rng, 1.0, 1.8))),
            ("high_tide_time".to_owned(), time(rng)),
            ("low_tide".to_owned(), quantity("low_tide", tenth(rng, 0.1, 0.5))),
            ("low_tide_time".to_owned(), time(rng)),
        ];
        intents.push(Intent::new("TIDES", tides).expect("non-empty"));
    }
    if rng.gen_bool(0.1) {
        let quake = vec![
            ("magnitude".to_owned(), quantity("magnitude", tenth(rng, 0.8, 4.0))),
            ("depth".to_owned(), quantity("depth", f64::from(rng.gen_range(1..30)))),
            ("entity".to_owned(), "Centro de Sismologia da USP".to_owned()),
        ];
        intents.push(Intent::new("EARTHQUAKE", quake).expect("non-empty"));
    }
    if rng.gen_bool(0.6) {
        let mut vessels = vec![("quantity".to_owned(), rng.gen_range(20..400).to_string())];
        if rng.gen_bool(0.3) {
            vessels.push(("trend".into(), ["high", "low"].choose(rng).unwrap().to_string()));
            vessels.push(("days_max".into(), "30".into()));
        }
        intents.push(Intent::new("VESSELS_IN_PORT", vessels).expect("non-empty"));
    }
    if rng.gen_bool(0.15) {
        intents.push(Intent::new("OIL", [("level", rng.gen_range(40..100).to_string())]).expect("non-empty"));
    }
    IntentDocument::new(intents).expect("distinct intents")
}

/// `n` rows; the reference is the pipeline output under a per-row seed and
/// a second seeded paraphrase is kept as an extra reference.
pub fn synthesize_corpus(n: usize, seed: u64, lex: &Lexicon) -> Result<Vec<CorpusRow>, PipelineError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = NaiveDate::from_ymd_opt(2021, 10, 18).expect("valid date");
    (0..n)
        .map(|i| {
            let (city, uf) = *CITIES.choose(&mut rng).unwrap();
            let date = start + Duration::days(rng.gen_range(0..90));
            let doc = random_document(&mut rng, city, uf, date);
            let row_seed: u64 = rng.gen();
            let first = run_pipeline(&doc, lex, &PipelineConfig::seeded(row_seed))?;
            let second = run_pipeline(&doc, lex, &PipelineConfig::seeded(row_seed ^ 1))?;
            let trace = first.trace.expect("pipeline output carries a trace");
            let name = |id: usize| doc.intent(id).expect("plan ids are valid").name().to_owned();
            Ok(CorpusRow {
                id: format!("syn-{i:04}"),
                date: date.to_string(),
                city: city.to_owned(),
                uf: uf.to_owned(),
                input_ir: serialize_ir(&doc),
                discourse_order: trace.discourse.order.iter().map(|&id| name(id)).collect(),
                text_structure: trace
                    .text_plan
                    .paragraphs
                    .iter()
                    .map(|p| {
                        p.sentences
                            .iter()
                            .map(|s| s.intents.iter().map(|&id| name(id)).collect())
                            .collect()
                    })
                    .collect(),
                lexicalization: trace
                    .lexicalization
                    .paragraphs
                    .iter()
                    .flat_map(|p| &p.sentences)
                    .map(|s| s.clauses.iter().map(|c| c.entry.clone()).collect())
                    .collect(),
                references: vec![first.text.clone(), second.text],
                reference_text: first.text,
            })
        })
        .collect()
}
