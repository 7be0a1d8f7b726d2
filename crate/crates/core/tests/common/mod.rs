#![allow(dead_code)]

use azul::eval::synth::random_document;
use azul::{Intent, IntentDocument};
use chrono::{Duration, NaiveDate};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const VALUE_CHARS: &[char] = &[
    'a', 'b', 'z', 'A', 'Q', '0', '7', '9', ' ', ',', '.', ';', '(', ')', '=', '"', '\\', '\n', 'º', 'ç', 'ã', 'é',
    'Í', '%', '/', ':', '-', '_', '\'', '\t',
];

fn ident(rng: &mut ChaCha8Rng, upper: bool) -> String {
    let first: Vec<char> = if upper {
        ('A'..='Z').collect()
    } else {
        ('a'..='z').collect()
    };
    let mut rest = first.clone();
    rest.extend('0'..='9');
    rest.push('_');
    let mut s = String::new();
    s.push(*first.choose(rng).unwrap());
    for _ in 0..rng.gen_range(0..10) {
        s.push(*rest.choose(rng).unwrap());
    }
    s
}

/// Any document the constructors accept: arbitrary names, keys and values
/// including quotes, backslashes and newlines.
pub fn random_ir_doc(rng: &mut ChaCha8Rng) -> IntentDocument {
    loop {
        let mut intents = Vec::new();
        let mut names = Vec::new();
        for _ in 0..rng.gen_range(1..6) {
            let name = ident(rng, true);
            if names.contains(&name) {
                continue;
            }
            let mut attrs: Vec<(String, String)> = Vec::new();
            for _ in 0..rng.gen_range(1..5) {
                let key = ident(rng, false);
                if attrs.iter().any(|(k, _)| *k == key) {
                    continue;
                }
                let value: String = (0..rng.gen_range(1..12))
                    .map(|_| *VALUE_CHARS.choose(rng).unwrap())
                    .collect();
                attrs.push((key, value));
            }
            if let Ok(intent) = Intent::new(name.clone(), attrs) {
                names.push(name);
                intents.push(intent);
            }
        }
        if let Ok(doc) = IntentDocument::new(intents) {
            if !doc.intents().is_empty() {
                return doc;
            }
        }
    }
}

pub const CITIES: [(&str, &str); 6] = [
    ("Santos", "SP"),
    ("Rio de Janeiro", "RJ"),
    ("Cabo Frio", "RJ"),
    ("Itajaí", "SC"),
    ("Recife", "PE"),
    ("Salvador", "BA"),
];

/// A domain document: LOCATION and WEATHER plus random other intents.
pub fn random_domain_doc(rng: &mut ChaCha8Rng) -> IntentDocument {
    let (city, uf) = *CITIES.choose(rng).unwrap();
    let date = NaiveDate::from_ymd_opt(2021, 10, 18).unwrap() + Duration::days(rng.gen_range(0..90));
    random_document(rng, city, uf, date)
}

pub fn shuffled(doc: &IntentDocument, rng: &mut ChaCha8Rng) -> IntentDocument {
    let mut intents = doc.intents().to_vec();
    intents.shuffle(rng);
    IntentDocument::new(intents).unwrap()
}

/// Textbook full-table LCS.
pub fn lcs_oracle(a: &[String], b: &[String]) -> usize {
    let mut t = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            t[i][j] = if a[i - 1] == b[j - 1] {
                t[i - 1][j - 1] + 1
            } else {
                t[i - 1][j].max(t[i][j - 1])
            };
        }
    }
    t[a.len()][b.len()]
}

const WORDS: &[&str] = &[
    "o",
    "a",
    "mar",
    "está",
    "calmo",
    "hoje",
    "em",
    "Santos",
    "temperatura",
    "de",
    "26ºC",
    "vento",
    "18km/h",
    "navios",
    "no",
    "porto",
    "pesca",
    "boas",
    "condições",
    "0,8m",
    "previsão",
    "chuva",
];

pub fn random_sentence(rng: &mut ChaCha8Rng, max_words: usize) -> Vec<String> {
    (0..rng.gen_range(1..=max_words))
        .map(|_| WORDS.choose(rng).unwrap().to_string())
        .collect()
}

/// Prose of up to `max_chars` code points with short words, sentence ends
/// and occasional multi-space and newline gaps.
pub fn random_text(rng: &mut ChaCha8Rng, max_chars: usize) -> String {
    let target = rng.gen_range(1..=max_chars);
    let mut s = String::new();
    while s.chars().count() < target {
        let len = rng.gen_range(1..15);
        for _ in 0..len {
            s.push(*['a', 'e', 'ç', 'ã', 'x', '9', 'º', 'Õ'].choose(rng).unwrap());
        }
        match rng.gen_range(0..12) {
            0 => s.push_str(". "),
            1 => s.push_str("! "),
            2 => s.push_str("  "),
            3 => s.push('\n'),
            _ => s.push(' '),
        }
    }
    s.chars().take(target).collect::<String>()
}
