use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Portuguese and variant intent names, keyed by their folded UPPER_SNAKE form.
const NAME_ALIASES: &[(&str, &str)] = &[
    ("LOCALIZACAO", "LOCATION"),
    ("LOCAL", "LOCATION"),
    ("CLIMA", "WEATHER"),
    ("TEMPO", "WEATHER"),
    ("NAVIOS", "VESSELS_IN_PORT"),
    ("NAVIOS_NO_PORTO", "VESSELS_IN_PORT"),
    ("EMBARCACOES", "VESSELS_IN_PORT"),
    ("TERREMOTO", "EARTHQUAKE"),
    ("SISMO", "EARTHQUAKE"),
    ("OCEANO", "OCEAN"),
    ("MAR", "OCEAN"),
    ("MARE", "TIDES"),
    ("MARES", "TIDES"),
    ("TIDE", "TIDES"),
    ("PETROLEO", "OIL"),
    ("OIL_EXTRACTION", "OIL"),
    ("EXTRACAO_DE_PETROLEO", "OIL"),
];

/// Attribute key aliases, keyed by their folded lower_snake form.
const KEY_ALIASES: &[(&str, &str)] = &[
    ("cidade", "city"),
    ("estado", "uf"),
    ("state", "uf"),
    ("data", "timestamp"),
    ("date", "timestamp"),
    ("condicao", "condition"),
    ("climate", "condition"),
    ("temperatura", "temperature"),
    ("vento", "wind"),
    ("velocidade_do_vento", "wind"),
    ("umidade", "humidity"),
    ("nebulosidade", "cloudiness"),
    ("mar", "sea_height"),
    ("altura_do_mar", "sea_height"),
    ("height_of_the_sea", "sea_height"),
    ("protetor", "sunscreen"),
    ("protetor_solar", "sunscreen"),
    ("quantidade", "quantity"),
    ("tendencia", "trend"),
    ("dias_max", "days_max"),
    ("profundidade", "depth"),
    ("entidade", "entity"),
    ("condicao_de_pesca", "fishing_condition"),
    ("temperatura_da_agua", "water_temperature"),
    ("nivel", "level"),
    ("producao", "production"),
    ("campo", "field"),
];

/// NFD-decomposes and drops combining marks: "CONDIÇÃO" → "CONDICAO".
pub fn fold_diacritics(s: &str) -> String {
    s.nfd().filter(|c| !is_combining_mark(*c)).collect()
}

fn snake(raw: &str) -> String {
    let folded = fold_diacritics(raw);
    let mut out = String::with_capacity(folded.len());
    let mut pending_sep = false;
    for c in folded.trim().chars() {
        if c.is_whitespace() || c == '-' {
            pending_sep = true;
            continue;
        }
        if pending_sep && !out.is_empty() {
            out.push('_');
        }
        pending_sep = false;
        out.push(c);
    }
    out
}

fn alias<'a>(table: &'a [(&'a str, &'a str)], s: &str) -> Option<&'a str> {
    table.iter().find(|(from, _)| *from == s).map(|(_, to)| *to)
}

/// Canonical UPPER_SNAKE intent name with the alias table applied.
pub fn canonical_name(raw: &str) -> String {
    let s = snake(raw).to_uppercase();
    alias(NAME_ALIASES, &s).map(str::to_owned).unwrap_or(s)
}

/// Canonical lower_snake attribute key with the alias table applied.
pub fn canonical_key(raw: &str) -> String {
    let s = snake(raw).to_lowercase();
    alias(KEY_ALIASES, &s).map(str::to_owned).unwrap_or(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_fold_case_spaces_and_accents() {
        assert_eq!(canonical_name("VESSELS IN PORT"), "VESSELS_IN_PORT");
        assert_eq!(canonical_name("Weather"), "WEATHER");
        assert_eq!(canonical_name("LOCALIZAÇÃO"), "LOCATION");
        assert_eq!(canonical_name("oil-extraction"), "OIL");
        assert_eq!(canonical_name("  A   B "), "A_B");
    }

    #[test]
    fn keys_fold_and_alias() {
        assert_eq!(canonical_key("days max"), "days_max");
        assert_eq!(canonical_key("condição"), "condition");
        assert_eq!(canonical_key("protetor solar"), "sunscreen");
        assert_eq!(canonical_key("height of the sea"), "sea_height");
        assert_eq!(canonical_key("Fishing Condition"), "fishing_condition");
    }

    #[test]
    fn aliases_are_idempotent() {
        for (_, to) in NAME_ALIASES {
            assert_eq!(canonical_name(to), *to);
        }
        for (_, to) in KEY_ALIASES {
            assert_eq!(canonical_key(to), *to);
        }
    }
}
