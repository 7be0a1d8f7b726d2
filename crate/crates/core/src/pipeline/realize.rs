use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::lexicalize::{tokenize_text, Lexicalized, Token};
use super::lexicon::{Language, Lexicon};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mention {
    pub entity: String,
    pub form: String,
    pub first: bool,
}

/// Reading-order token stream: paragraphs of sentences.
pub type Paragraphs = Vec<Vec<Vec<Token>>>;

/// Joins clauses into sentence token lists and replaces entity
/// placeholders. First mentions use the full description; later ones draw
/// uniformly from the alternatives, or take the first when `rng` is `None`.
pub fn refer(lexed: &Lexicalized, lex: &Lexicon, mut rng: Option<&mut ChaCha8Rng>) -> (Paragraphs, Vec<Mention>) {
    let mut mentions: Vec<Mention> = Vec::new();
    let mut paragraphs = Vec::new();
    for para in &lexed.paragraphs {
        let mut sentences = Vec::new();
        for sentence in &para.sentences {
            let n = sentence.clauses.len();
            let mut tokens = Vec::new();
            for (i, clause) in sentence.clauses.iter().enumerate() {
                if i > 0 {
                    tokens.push(Token::Punct(",".into()));
                    if i == n - 1 {
                        tokens.push(Token::Word(lex.conjunction.clone()));
                    }
                }
                for tok in &clause.tokens {
                    let Token::Entity(name) = tok else {
                        tokens.push(tok.clone());
                        continue;
                    };
                    let forms = &lex.entities[name];
                    let first = !mentions.iter().any(|m| &m.entity == name);
                    let form = if first || forms.alternatives.is_empty() {
                        forms.full.clone()
                    } else {
                        let k = match rng.as_deref_mut() {
                            Some(r) => r.gen_range(0..forms.alternatives.len()),
                            None => 0,
                        };
                        forms.alternatives[k].clone()
                    };
                    tokenize_text(&form, &mut tokens);
                    mentions.push(Mention {
                        entity: name.clone(),
                        form,
                        first,
                    });
                }
            }
            sentences.push(tokens);
        }
        paragraphs.push(sentences);
    }
    (paragraphs, mentions)
}

fn contract(prep: &str, article: &str) -> Option<&'static str> {
    Some(match (prep, article) {
        ("de", "o") => "do",
        ("de", "a") => "da",
        ("de", "os") => "dos",
        ("de", "as") => "das",
        ("em", "o") => "no",
        ("em", "a") => "na",
        ("em", "os") => "nos",
        ("em", "as") => "nas",
        ("a", "o") => "ao",
        ("a", "a") => "à",
        ("a", "os") => "aos",
        ("a", "as") => "às",
        ("por", "o") => "pelo",
        ("por", "a") => "pela",
        ("por", "os") => "pelos",
        ("por", "as") => "pelas",
        _ => return None,
    })
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Applies Portuguese preposition and article contractions between
/// adjacent word tokens. Values are left alone.
pub fn contract_tokens(tokens: &[Token]) -> Vec<Token> {
    let mut out: Vec<Token> = Vec::with_capacity(tokens.len());
    for tok in tokens {
        if let (Token::Word(article), Some(Token::Word(prep))) = (tok, out.last()) {
            if let Some(joined) = contract(&prep.to_lowercase(), article) {
                let upper = prep.chars().next().is_some_and(char::is_uppercase);
                let joined = if upper { capitalize(joined) } else { joined.to_owned() };
                *out.last_mut().unwrap() = Token::Word(joined);
                continue;
            }
        }
        out.push(tok.clone());
    }
    out
}

fn ends_sentence(tok: &Token) -> bool {
    matches!(tok, Token::Punct(p) if matches!(p.as_str(), "." | "!" | "?"))
}

/// Renders one sentence: contractions (Portuguese only), capitalization
/// after sentence boundaries, a closing period when missing, and spacing
/// around punctuation.
pub fn realize_tokens(tokens: &[Token], language: Language) -> String {
    let mut tokens = if language == Language::Pt {
        contract_tokens(tokens)
    } else {
        tokens.to_vec()
    };
    while matches!(tokens.last(), Some(Token::Punct(p)) if p == ",") {
        tokens.pop();
    }
    if !tokens.is_empty() && !tokens.last().is_some_and(ends_sentence) {
        tokens.push(Token::Punct(".".into()));
    }
    let mut out = String::new();
    let mut boundary = true;
    let mut prev: Option<&Token> = None;
    for tok in &tokens {
        let (text, is_punct) = match tok {
            Token::Word(w) if boundary => (capitalize(w), false),
            Token::Word(w) | Token::Value(w) | Token::Entity(w) => (w.clone(), false),
            Token::Punct(p) => (p.clone(), true),
        };
        let closing = is_punct && [",", ".", "!", "?", ";", ":", ")"].contains(&text.as_str());
        let after_open = matches!(prev, Some(Token::Punct(p)) if p == "(");
        if prev.is_some() && !closing && !after_open {
            out.push(' ');
        }
        out.push_str(&text);
        if !is_punct {
            boundary = false;
        }
        if ends_sentence(tok) {
            boundary = true;
        }
        prev = Some(tok);
    }
    out
}

/// Sentences joined by spaces, paragraphs by a blank line.
pub fn realize(paragraphs: &Paragraphs, language: Language, salutation: Option<&str>, closing: Option<&str>) -> String {
    let mut blocks: Vec<String> = Vec::new();
    blocks.extend(salutation.map(str::to_owned));
    for para in paragraphs {
        let text: Vec<String> = para
            .iter()
            .filter(|s| !s.is_empty())
            .map(|s| realize_tokens(s, language))
            .collect();
        if !text.is_empty() {
            blocks.push(text.join(" "));
        }
    }
    blocks.extend(closing.map(str::to_owned));
    blocks.join("\n\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(s: &str) -> Vec<Token> {
        let mut t = Vec::new();
        tokenize_text(s, &mut t);
        t
    }

    #[test]
    fn contractions() {
        let r = |s| realize_tokens(&words(s), Language::Pt);
        assert_eq!(r("o clima em o Rio"), "O clima no Rio.");
        assert_eq!(
            r("Em a cidade de os navios por a manhã a a tarde"),
            "Na cidade dos navios pela manhã à tarde."
        );
        assert_eq!(realize_tokens(&words("em o"), Language::En), "Em o.");
    }

    #[test]
    fn values_do_not_contract() {
        let mut t = words("chegou a");
        t.push(Token::Value("o".into()));
        assert_eq!(realize_tokens(&t, Language::Pt), "Chegou a o.");
    }

    #[test]
    fn spacing_and_capitals() {
        let mut t = words("hoje em");
        t.push(Token::Value("Santos".into()));
        t.extend(words("("));
        t.push(Token::Value("SP".into()));
        t.extend(words(") faz sol. mais tarde chove!"));
        assert_eq!(
            realize_tokens(&t, Language::Pt),
            "Hoje em Santos (SP) faz sol. Mais tarde chove!"
        );
    }

    #[test]
    fn value_first_keeps_case() {
        let t = vec![Token::Value("iPorto".into()), Token::Word("abre".into())];
        assert_eq!(realize_tokens(&t, Language::Pt), "iPorto abre.");
    }

    #[test]
    fn paragraphs_and_framing() {
        let p: Paragraphs = vec![vec![words("um"), words("dois")], vec![words("três")]];
        assert_eq!(
            realize(&p, Language::Pt, Some("Bom dia!"), None),
            "Bom dia!\n\nUm. Dois.\n\nTrês."
        );
    }
}
