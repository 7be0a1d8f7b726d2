mod common;

use std::collections::BTreeSet;

use azul::analysis::{detect_trend, select_content, ContentConfig, TrendDirection};
use azul::eval::{bleu, check_faithfulness, gleu, meteor_lite, rouge_l, sentence_bleu, split_corpus, split_sizes};
use azul::fixtures::{build_fixture_store, fixture_end, fixture_start, FIXTURE_CITIES};
use azul::ir::{default_registry, validate};
use azul::pipeline::{default_causal_rules, order_discourse, run_pipeline, structure_text, Lexicon, PipelineConfig};
use azul::publish::{compose_thread, ComposeError};
use azul::store::{PayloadValue, Source, SourceRecord, Store, TimeSeries, Uf};
use azul::template::{generate, TemplateRegistry};
use azul::{parse_ir, serialize_ir};
use chrono::{Duration, NaiveDate};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn lexicon() -> &'static Lexicon {
    static LEX: std::sync::OnceLock<Lexicon> = std::sync::OnceLock::new();
    LEX.get_or_init(Lexicon::default_pt)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ir_round_trips(seed in any::<u64>()) {
        let doc = common::random_ir_doc(&mut rng(seed));
        let text = serialize_ir(&doc);
        prop_assert_eq!(parse_ir(&text).unwrap(), doc);
    }

    #[test]
    fn ir_ids_are_dense(seed in any::<u64>()) {
        let doc = common::random_ir_doc(&mut rng(seed));
        let ids: Vec<usize> = doc.intents().iter().map(|i| i.id).collect();
        prop_assert_eq!(ids, (0..doc.intents().len()).collect::<Vec<_>>());
    }

    #[test]
    fn parse_never_panics(input in "\\PC{0,200}") {
        let _ = parse_ir(&input);
    }

    #[test]
    fn parse_never_panics_on_ir_like_input(input in "[A-Za-zÇã_ ]{0,8}\\((\\s*[a-zç ]{1,6}\\s*=\\s*\"([^\"\\\\]|\\\\.){0,6}\"?[,;)]?){0,4}[;)\\n ]{0,3}") {
        if let Ok(doc) = parse_ir(&input) {
            let once = serialize_ir(&doc);
            prop_assert_eq!(serialize_ir(&parse_ir(&once).unwrap()), once);
        }
    }

    #[test]
    fn canonicalization_is_idempotent(seed in any::<u64>(), spaces in 0usize..3) {
        let doc = common::random_ir_doc(&mut rng(seed));
        let loose = serialize_ir(&doc).replace("; ", &format!(";{}\n", " ".repeat(spaces)));
        let once = serialize_ir(&parse_ir(&loose).unwrap());
        prop_assert_eq!(serialize_ir(&parse_ir(&once).unwrap()), once);
    }

    #[test]
    fn trend_matches_brute_force(prior in prop::collection::vec(0u8..20, 1..40), current in 0u8..20) {
        let start = NaiveDate::from_ymd_opt(2022, 1, 1).unwrap();
        let series = TimeSeries {
            city: "Santos".into(),
            metric: "quantity".into(),
            points: prior.iter().enumerate().map(|(i, v)| (start + Duration::days(i as i64), f64::from(*v))).collect(),
            window: prior.len() as u32 + 1,
        };
        let t = detect_trend(&series, f64::from(current), 30).unwrap();
        let max = *prior.iter().max().unwrap();
        let min = *prior.iter().min().unwrap();
        let expected = if current > max {
            TrendDirection::High
        } else if current < min {
            TrendDirection::Low
        } else {
            TrendDirection::None
        };
        prop_assert_eq!(t.direction, expected);
    }

    #[test]
    fn templates_are_faithful_pure_and_filled(seed in any::<u64>()) {
        let doc = common::random_domain_doc(&mut rng(seed));
        let reg = TemplateRegistry::default_pt();
        let a = generate(&doc, &reg).unwrap();
        prop_assert_eq!(&a, &generate(&doc, &reg).unwrap());
        prop_assert!(check_faithfulness(&doc, &a.text).passed(), "{}", a.text);
        prop_assert!(!regex::Regex::new(r"\[[A-Za-z_.]+\]").unwrap().is_match(&a.text));
    }

    #[test]
    fn faithfulness_rejects_foreign_numbers(seed in any::<u64>(), n in 1000u32..100_000) {
        let doc = common::random_domain_doc(&mut rng(seed));
        let text = generate(&doc, &TemplateRegistry::default_pt()).unwrap().text;
        let tampered = format!("{text} Foram registrados {n} casos.");
        prop_assert!(!check_faithfulness(&doc, &tampered).passed());
    }

    #[test]
    fn split_partitions(n in 0usize..300, seed in any::<u64>()) {
        let rows: Vec<usize> = (0..n).collect();
        let s = split_corpus(&rows, seed);
        prop_assert_eq!((s.train.len(), s.validation.len(), s.test.len()), split_sizes(n));
        let all: BTreeSet<usize> = s.train.iter().chain(&s.validation).chain(&s.test).copied().collect();
        prop_assert_eq!(all.len(), n);
        prop_assert_eq!(split_corpus(&rows, seed), s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn pipeline_plans_partition_and_ignore_input_order(seed in any::<u64>()) {
        let mut r = rng(seed);
        let doc = common::random_domain_doc(&mut r);
        let perm = common::shuffled(&doc, &mut r);
        let lex = lexicon();
        let rules = default_causal_rules();

        let plan = order_discourse(&doc, &rules);
        let mut sorted = plan.order.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..doc.intents().len()).collect::<Vec<_>>());
        let text_plan = structure_text(&doc, &plan);
        prop_assert_eq!(text_plan.intent_order(), plan.order.clone());
        for s in text_plan.paragraphs.iter().flat_map(|p| &p.sentences) {
            prop_assert!(!s.intents.is_empty() && s.intents.len() <= 2);
        }

        let names = |d: &azul::IntentDocument, order: &[usize]| {
            order.iter().map(|&i| d.intent(i).unwrap().name().to_owned()).collect::<Vec<_>>()
        };
        prop_assert_eq!(names(&doc, &plan.order), names(&perm, &order_discourse(&perm, &rules).order));

        let config = PipelineConfig::seeded(seed);
        let a = run_pipeline(&doc, lex, &config).unwrap();
        prop_assert_eq!(&a.text, &run_pipeline(&perm, lex, &config).unwrap().text);
        prop_assert_eq!(&a, &run_pipeline(&doc, lex, &config).unwrap());
        prop_assert!(check_faithfulness(&doc, &a.text).passed(), "{}", a.text);

        let canon = run_pipeline(&doc, lex, &PipelineConfig::default()).unwrap().text;
        let other = PipelineConfig { mode: azul::pipeline::VariantMode::Canonical, ..PipelineConfig::seeded(seed ^ 7) };
        prop_assert_eq!(canon, run_pipeline(&doc, lex, &other).unwrap().text);
    }

    #[test]
    fn thread_chunks_fit_and_reconstruct(seed in any::<u64>(), limit in 40usize..300) {
        let text = common::random_text(&mut rng(seed), 10_000);
        if text.trim().is_empty() {
            return Ok(());
        }
        match compose_thread("r", &text, limit) {
            Ok(t) => {
                prop_assert!(t.chunks.iter().all(|c| c.chars().count() <= limit));
                prop_assert_eq!(t.original(), text);
                if t.len() > 1 {
                    for (i, c) in t.chunks.iter().enumerate() {
                        let marker = format!(" ({}/{})", i + 1, t.len());
                        prop_assert!(c.ends_with(&marker));
                    }
                }
            }
            Err(ComposeError::UnsplittableToken { length, .. }) => prop_assert!(length > limit - 12),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn rouge_agrees_with_lcs_oracle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (h, rf) = (common::random_sentence(&mut r, 25), common::random_sentence(&mut r, 25));
        let l = common::lcs_oracle(&h, &rf) as f64;
        let (p, rc) = (l / h.len() as f64, l / rf.len() as f64);
        let f = if l == 0.0 { 0.0 } else { 2.0 * p * rc / (p + rc) };
        let got = rouge_l(&h, &rf).unwrap();
        prop_assert!((got.precision - p).abs() < 1e-12 && (got.recall - rc).abs() < 1e-12 && (got.f1 - f).abs() < 1e-12);
    }

    #[test]
    fn metrics_are_bounded_and_maximal_on_identity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (h, rf) = (common::random_sentence(&mut r, 20), common::random_sentence(&mut r, 20));
        for s in [
            sentence_bleu(&h, &[rf.clone()], 4).unwrap(),
            gleu(&h, &rf).unwrap(),
            rouge_l(&h, &rf).unwrap().f1,
            meteor_lite(&h, &rf).unwrap(),
        ] {
            prop_assert!((0.0..=1.0).contains(&s));
        }
        prop_assert_eq!(bleu(&[h.clone()], &[vec![h.clone()]], 4).unwrap(), 1.0);
        prop_assert_eq!(gleu(&h, &h).unwrap(), 1.0);
        prop_assert_eq!(rouge_l(&h, &h).unwrap().f1, 1.0);
        prop_assert!(meteor_lite(&h, &h).unwrap() >= meteor_lite(&h, &rf).unwrap());
    }
}

fn record(city: &str, date: NaiveDate, quantity: f64) -> SourceRecord {
    SourceRecord {
        source: Source::Vessels,
        city: city.into(),
        uf: Uf::try_from("SP".to_owned()).unwrap(),
        date,
        payload: [(
            "quantity".to_owned(),
            PayloadValue::Number {
                value: quantity,
                unit: String::new(),
            },
        )]
        .into_iter()
        .collect(),
        fetched_at: "2022-01-16T06:00:00Z".parse().unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn store_keys_stay_unique_and_survive_reopen(
        batches in prop::collection::vec(prop::collection::vec((0usize..3, 0i64..20, 0u16..500), 1..15), 1..5),
        end in 0i64..25,
        days in 1u32..30,
    ) {
        let dir = tempfile::tempdir().unwrap();
        let mut store = Store::open(dir.path()).unwrap();
        let cities = ["Santos", "Ubatuba", "Guarujá"];
        let base = NaiveDate::from_ymd_opt(2022, 1, 1).unwrap();
        let mut expected = std::collections::BTreeMap::new();
        for batch in &batches {
            let recs: Vec<_> = batch
                .iter()
                .map(|&(c, d, q)| record(cities[c], base + Duration::days(d), f64::from(q)))
                .collect();
            for r in &recs {
                expected.insert((r.city.clone(), r.date), r.get("quantity").unwrap().number().unwrap());
            }
            store.upsert(recs).unwrap();
        }
        prop_assert_eq!(store.len(), expected.len());

        let end = base + Duration::days(end);
        let w = store.query_window("Santos", "quantity", end, days);
        if let Ok(w) = w {
            let dates: Vec<NaiveDate> = w.points.iter().map(|p| p.0).collect();
            prop_assert!(dates.windows(2).all(|p| p[0] < p[1]));
            prop_assert!(dates.iter().all(|d| *d <= end && *d > end - Duration::days(i64::from(days))));
            for (d, v) in &w.points {
                prop_assert_eq!(expected.get(&("Santos".to_owned(), *d)), Some(v));
            }
        }

        let reopened = Store::open(dir.path()).unwrap();
        let lines = |s: &Store| s.records().map(|r| serde_json::to_string(r).unwrap()).collect::<Vec<_>>();
        prop_assert_eq!(lines(&reopened), lines(&store));
    }
}

#[test]
fn selected_content_always_validates() {
    let dir = tempfile::tempdir().unwrap();
    let store = build_fixture_store(dir.path(), 3).unwrap();
    let registry = default_registry();
    let mut date = fixture_start();
    while date <= fixture_end() {
        for (city, _) in FIXTURE_CITIES {
            let doc = select_content(&store, city, date, &ContentConfig::default()).unwrap();
            assert!(
                validate(&doc, &registry).is_empty(),
                "{city} {date}: {:?}",
                validate(&doc, &registry)
            );
        }
        date += Duration::days(7);
    }
}

#[test]
fn parse_survives_a_mebibyte_of_noise() {
    use rand::Rng;
    let mut r = rng(1);
    let bytes: Vec<u8> = (0..1 << 20).map(|_| r.gen()).collect();
    let _ = parse_ir(&String::from_utf8_lossy(&bytes));
    let ir_ish: String = (0..1 << 20)
        .map(|_| {
            *['A', 'b', '(', ')', '=', '"', ';', ',', '\\', ' ', '\n']
                .get(r.gen_range(0..11))
                .unwrap()
        })
        .collect();
    let _ = parse_ir(&ir_ish);
}
