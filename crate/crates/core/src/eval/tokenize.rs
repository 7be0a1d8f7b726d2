use unicode_normalization::UnicodeNormalization;

fn is_punct(c: char) -> bool {
    (c.is_ascii_punctuation() && c != '/')
        || matches!(c, '“' | '”' | '‘' | '’' | '«' | '»' | '—' | '–' | '…' | '¡' | '¿')
}

#[derive(PartialEq, Clone, Copy)]
enum Class {
    Digit,
    Word,
}

/// Metric tokenization: NFC, lowercase, punctuation as separate tokens,
/// decimals kept whole (`0,8`), units split from numbers (`28ºc` → `28`, `ºc`).
pub fn tokenize(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.nfc().flat_map(char::to_lowercase).collect();
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut class = Class::Word;
    let flush = |cur: &mut String, out: &mut Vec<String>| {
        if !cur.is_empty() {
            out.push(std::mem::take(cur));
        }
    };
    for (i, &c) in chars.iter().enumerate() {
        let prev_digit = i > 0 && chars[i - 1].is_ascii_digit();
        let next_digit = chars.get(i + 1).is_some_and(char::is_ascii_digit);
        let next_alnum = chars.get(i + 1).is_some_and(|c| c.is_alphanumeric());
        if c.is_whitespace() {
            flush(&mut cur, &mut out);
        } else if matches!(c, '.' | ',' | ':') && prev_digit && next_digit && class == Class::Digit {
            cur.push(c);
        } else if c == '-' && !cur.is_empty() && class == Class::Word && next_alnum {
            cur.push(c);
        } else if is_punct(c) {
            flush(&mut cur, &mut out);
            out.push(c.to_string());
        } else {
            let here = if c.is_ascii_digit() { Class::Digit } else { Class::Word };
            if !cur.is_empty() && here != class {
                flush(&mut cur, &mut out);
            }
            class = here;
            cur.push(c);
        }
    }
    flush(&mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stated_rules() {
        assert_eq!(tokenize("Olá, mundo."), ["olá", ",", "mundo", "."]);
        assert_eq!(tokenize("28ºC"), ["28", "ºc"]);
        assert_eq!(tokenize("0,8m"), ["0,8", "m"]);
        assert_eq!(
            tokenize("1.4 mR, 29km/h às 05:12"),
            ["1.4", "mr", ",", "29", "km/h", "às", "05:12"]
        );
        assert_eq!(tokenize("76%."), ["76", "%", "."]);
        assert_eq!(tokenize("em 2022, 3 navios"), ["em", "2022", ",", "3", "navios"]);
    }

    #[test]
    fn nfc_and_no_empty_tokens() {
        let decomposed = "Ita\u{0301}jai";
        assert_eq!(tokenize(decomposed), ["itájai"]);
        assert!(tokenize("  ,, . ").iter().all(|t| !t.is_empty()));
    }
}
