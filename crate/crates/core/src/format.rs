//! Date and number formatting shared by content selection, templates and
//! the pipeline.

use chrono::{Datelike, NaiveDate};

pub const MONTHS_PT: [&str; 12] = [
    "Janeiro",
    "Fevereiro",
    "Março",
    "Abril",
    "Maio",
    "Junho",
    "Julho",
    "Agosto",
    "Setembro",
    "Outubro",
    "Novembro",
    "Dezembro",
];

pub const MONTHS_EN: [&str; 12] = [
    "January",
    "February",
    "March",
    "April",
    "May",
    "June",
    "July",
    "August",
    "September",
    "October",
    "November",
    "December",
];

/// Accepts `Jan 15, 2022`, `January 15, 2022`, `2022-01-15`, `15/01/2022`
/// and `15 de Janeiro de 2022`.
pub fn parse_date(raw: &str) -> Option<NaiveDate> {
    let raw = raw.trim();
    for fmt in ["%b %d, %Y", "%B %d, %Y", "%Y-%m-%d", "%d/%m/%Y"] {
        if let Ok(d) = NaiveDate::parse_from_str(raw, fmt) {
            return Some(d);
        }
    }
    let parts: Vec<&str> = raw.split_whitespace().collect();
    if let [day, "de", month, "de", year] = parts.as_slice() {
        let month = MONTHS_PT
            .iter()
            .position(|m| m.to_lowercase() == month.to_lowercase())?;
        return NaiveDate::from_ymd_opt(year.parse().ok()?, month as u32 + 1, day.parse().ok()?);
    }
    None
}

/// `15 de Janeiro de 2022`
pub fn date_pt(date: NaiveDate) -> String {
    format!(
        "{} de {} de {}",
        date.day(),
        MONTHS_PT[date.month0() as usize],
        date.year()
    )
}

/// `Jan 15, 2022`, the form LOCATION timestamps are written in.
pub fn date_en_short(date: NaiveDate) -> String {
    format!(
        "{} {}, {}",
        &MONTHS_EN[date.month0() as usize][..3],
        date.day(),
        date.year()
    )
}

/// Shortest decimal rendering; integral values print without a fraction.
pub fn format_number(value: f64, decimal_comma: bool) -> String {
    let s = if value.fract() == 0.0 && value.abs() < 1e15 {
        format!("{value:.0}")
    } else {
        format!("{value}")
    };
    if decimal_comma {
        s.replace('.', ",")
    } else {
        s
    }
}

/// Rewrites the decimal point of every number in `raw` as a comma: `1.8 m` → `1,8 m`.
pub fn decimal_comma(raw: &str) -> String {
    let chars: Vec<char> = raw.chars().collect();
    chars
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let between_digits =
                i > 0 && chars[i - 1].is_ascii_digit() && chars.get(i + 1).is_some_and(char::is_ascii_digit);
            if c == '.' && between_digits {
                ','
            } else {
                c
            }
        })
        .collect()
}
