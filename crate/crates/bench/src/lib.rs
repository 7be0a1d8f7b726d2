//! Inputs shared by the benchmarks.

use azul::IntentDocument;

pub const SANTOS_IR: &str = r#"LOCATION(city="Santos",uf="SP",timestamp="Jan 15, 2022"); WEATHER(condition="sunny",temperature="32ºC",wind="12km/h"); TIDES(high_tide="1,2m",high_tide_time="09:14",low_tide="0,3m",low_tide_time="15:40"); VESSELS_IN_PORT(quantity="350",trend="high",days_max="30"); OCEAN(fishing_condition="excellent",sea_height="1,8m")"#;

pub fn santos() -> IntentDocument {
    azul::parse_ir(SANTOS_IR).expect("bench input parses")
}

/// A report long enough to need several chunks.
pub fn long_report() -> String {
    "Hoje em Santos (SP) faz sol e a temperatura média esperada é de 32ºC. Há 350 navios no porto, o maior número dos últimos 30 dias. "
        .repeat(8)
}

/// Hypothesis and reference token lists of `n` words.
pub fn sentence_pair(n: usize) -> (Vec<String>, Vec<String>) {
    let words = [
        "o", "mar", "está", "calmo", "hoje", "em", "Santos", "e", "a", "pesca", "rende", "bem",
    ];
    let hyp = (0..n).map(|i| words[i % words.len()].to_owned()).collect();
    let reference = (0..n).map(|i| words[(i * 7 + 3) % words.len()].to_owned()).collect();
    (hyp, reference)
}
