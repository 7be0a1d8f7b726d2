use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::lexicon::{Gender, LexEntry, Lexicon, Segment, ValueFormat};
use super::structure::{SentencePlan, TextPlan};
use super::PipelineError;
use crate::format::{date_pt, decimal_comma, format_number, parse_date};
use crate::ir::{parse_quantity, Intent, IntentDocument};
use crate::predicate::AttrPath;
use crate::report::SlotRef;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Token {
    Word(String),
    Punct(String),
    /// A realized attribute value; never split, never contracted.
    Value(String),
    /// Placeholder resolved by the referring-expression stage.
    Entity(String),
}

const PUNCT: &[char] = &[',', '.', '!', '?', ';', ':', '(', ')'];

/// Splits lexicon text into word and punctuation tokens.
pub fn tokenize_text(text: &str, out: &mut Vec<Token>) {
    let mut word = String::new();
    let flush = |word: &mut String, out: &mut Vec<Token>| {
        if !word.is_empty() {
            out.push(Token::Word(std::mem::take(word)));
        }
    };
    for c in text.chars() {
        if c.is_whitespace() {
            flush(&mut word, out);
        } else if PUNCT.contains(&c) {
            flush(&mut word, out);
            out.push(Token::Punct(c.to_string()));
        } else {
            word.push(c);
        }
    }
    flush(&mut word, out);
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clause {
    pub entry: String,
    pub variant: usize,
    pub facts: Vec<SlotRef>,
    #[serde(default)]
    pub causal: bool,
    #[serde(skip)]
    pub tokens: Vec<Token>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LexSentence {
    pub clauses: Vec<Clause>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LexParagraph {
    pub sentences: Vec<LexSentence>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Lexicalized {
    pub paragraphs: Vec<LexParagraph>,
}

impl Lexicalized {
    pub fn clauses(&self) -> impl Iterator<Item = &Clause> {
        self.paragraphs
            .iter()
            .flat_map(|p| &p.sentences)
            .flat_map(|s| &s.clauses)
    }
}

struct Group<'d> {
    intents: Vec<&'d Intent>,
    causal: bool,
}

impl<'d> Group<'d> {
    fn intent(&self, name: &str) -> Option<&'d Intent> {
        self.intents.iter().copied().find(|i| i.name() == name)
    }

    fn value(&self, path: &AttrPath) -> Option<&'d str> {
        self.intent(&path.intent).and_then(|i| i.get(&path.key))
    }
}

fn format_value(lex: &Lexicon, key: &str, raw: &str, fmt: ValueFormat) -> String {
    match fmt {
        ValueFormat::Identity => raw.to_owned(),
        ValueFormat::Translate => lex.translate(key, raw).to_owned(),
        ValueFormat::DatePt => parse_date(raw).map(date_pt).unwrap_or_else(|| raw.to_owned()),
        ValueFormat::NumberPt => decimal_comma(raw),
        ValueFormat::Months => parse_quantity(raw)
            .map(|(days, _)| format_number((days / 30.0).round(), false))
            .unwrap_or_else(|| raw.to_owned()),
        ValueFormat::Lower => raw.to_lowercase(),
    }
}

fn resolve(lex: &Lexicon, group: &Group<'_>, segments: &[Segment], tokens: &mut Vec<Token>) {
    let place = |p: &AttrPath| group.value(p).and_then(|v| lex.place(v));
    for seg in segments {
        match seg {
            Segment::Text(t) => tokenize_text(t, tokens),
            Segment::Value(p, fmt) => {
                let raw = group.value(p).expect("covered fact present");
                tokens.push(Token::Value(format_value(lex, &p.key, raw, *fmt)));
            }
            Segment::Entity(name) => tokens.push(Token::Entity(name.clone())),
            Segment::Article(p) => {
                if let Some(article) = place(p).and_then(|pl| pl.article.as_deref()) {
                    tokenize_text(article, tokens);
                }
            }
            Segment::Number { singular, plural, attr } => {
                let one = group
                    .value(attr)
                    .and_then(parse_quantity)
                    .is_some_and(|(v, _)| v == 1.0);
                tokenize_text(if one { singular } else { plural }, tokens);
            }
            Segment::Gender {
                masculine,
                feminine,
                attr,
            } => {
                let f = place(attr).is_some_and(|pl| pl.gender == Gender::F);
                tokenize_text(if f { feminine } else { masculine }, tokens);
            }
        }
    }
}

/// Variant choice: a fixed first variant, or a seeded uniform draw.
pub(crate) enum Chooser<'r> {
    Canonical,
    Seeded(&'r mut ChaCha8Rng),
}

impl Chooser<'_> {
    pub(crate) fn pick(&mut self, n: usize) -> usize {
        match self {
            Chooser::Canonical => 0,
            Chooser::Seeded(rng) => rng.gen_range(0..n),
        }
    }
}

fn applicable(entry: &LexEntry, group: &Group<'_>, uncovered: &BTreeSet<(usize, String)>) -> bool {
    (!entry.causal || group.causal)
        && entry.covers.iter().all(|p| {
            group
                .intent(&p.intent)
                .is_some_and(|i| i.has(&p.key) && uncovered.contains(&(i.id, p.key.clone())))
        })
        && entry.when.iter().all(|pred| pred.holds_with(|p| group.value(p)))
}

fn lexicalize_sentence(
    lex: &Lexicon,
    group: &Group<'_>,
    chooser: &mut Chooser<'_>,
) -> Result<Vec<LexSentence>, PipelineError> {
    // facts in reading order: (position in group, attribute index)
    let mut order = Vec::new();
    for (pos, intent) in group.intents.iter().enumerate() {
        for (a, (key, _)) in intent.attrs().enumerate() {
            order.push(((pos, a), (intent.id, key.to_owned())));
        }
    }
    let rank = |fact: &(usize, String)| order.iter().find(|(_, f)| f == fact).map(|(r, _)| *r);
    let mut uncovered: BTreeSet<(usize, String)> = order.iter().map(|(_, f)| f.clone()).collect();

    let mut clauses = Vec::new();
    while !uncovered.is_empty() {
        let best = lex
            .entries
            .iter()
            .enumerate()
            .filter(|(_, e)| applicable(e, group, &uncovered))
            .max_by_key(|(i, e)| (e.covers.len(), e.causal, std::cmp::Reverse(*i)));
        let Some((_, entry)) = best else {
            let (_, (id, key)) = order
                .iter()
                .find(|(_, f)| uncovered.contains(f))
                .expect("uncovered fact");
            let intent = group.intents.iter().find(|i| i.id == *id).unwrap();
            return Err(PipelineError::LexiconGap {
                intent: intent.name().to_owned(),
                attr: key.clone(),
            });
        };
        let facts: Vec<SlotRef> = entry
            .covers
            .iter()
            .map(|p| SlotRef {
                intent_id: group.intent(&p.intent).unwrap().id,
                key: p.key.clone(),
            })
            .collect();
        for f in &facts {
            uncovered.remove(&(f.intent_id, f.key.clone()));
        }
        let variant = chooser.pick(entry.variants.len());
        let mut tokens = Vec::new();
        resolve(lex, group, entry.segments(variant), &mut tokens);
        clauses.push(Clause {
            entry: entry.id.clone(),
            variant,
            facts,
            causal: entry.causal,
            tokens,
        });
    }

    let first = |c: &Clause| c.facts.iter().filter_map(|f| rank(&(f.intent_id, f.key.clone()))).min();
    clauses.sort_by_key(|c| (c.causal, first(c)));
    let split = clauses.iter().position(|c| c.causal).unwrap_or(clauses.len());
    let causal = clauses.split_off(split);
    let mut sentences: Vec<LexSentence> = Vec::new();
    let mut plain = clauses.into_iter().peekable();
    while plain.peek().is_some() {
        sentences.push(LexSentence {
            clauses: plain.by_ref().take(lex.clauses_per_sentence).collect(),
        });
    }
    sentences.extend(causal.into_iter().map(|c| LexSentence { clauses: vec![c] }));
    Ok(sentences)
}

/// Chooses lexicon entries that cover every attribute of every planned
/// sentence group, preferring the entry that covers the most facts.
pub(crate) fn lexicalize_with(
    doc: &IntentDocument,
    plan: &TextPlan,
    lex: &Lexicon,
    chooser: &mut Chooser<'_>,
) -> Result<Lexicalized, PipelineError> {
    let mut paragraphs = Vec::new();
    for para in &plan.paragraphs {
        let mut sentences = Vec::new();
        for SentencePlan { intents, causal } in &para.sentences {
            let group = Group {
                intents: intents.iter().filter_map(|&id| doc.intent(id)).collect(),
                causal: *causal,
            };
            sentences.extend(lexicalize_sentence(lex, &group, chooser)?);
        }
        paragraphs.push(LexParagraph { sentences });
    }
    Ok(Lexicalized { paragraphs })
}

/// Canonical lexicalization: every entry uses its first variant.
pub fn lexicalize(doc: &IntentDocument, plan: &TextPlan, lex: &Lexicon) -> Result<Lexicalized, PipelineError> {
    lexicalize_with(doc, plan, lex, &mut Chooser::Canonical)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::parse_ir;
    use crate::pipeline::order::{default_causal_rules, order_discourse};
    use crate::pipeline::structure::structure_text;

    #[test]
    fn text_tokens() {
        let mut t = Vec::new();
        tokenize_text("Hoje, em (RJ) dia.", &mut t);
        let show: Vec<String> = t
            .iter()
            .map(|t| match t {
                Token::Word(w) | Token::Punct(w) => w.clone(),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(show, ["Hoje", ",", "em", "(", "RJ", ")", "dia", "."]);
    }

    #[test]
    fn months_format() {
        let lex = Lexicon::default_en();
        assert_eq!(format_value(&lex, "days_max", "180", ValueFormat::Months), "6");
        assert_eq!(
            format_value(&lex, "x", "Jan 15, 2022", ValueFormat::DatePt),
            "15 de Janeiro de 2022"
        );
        assert_eq!(format_value(&lex, "x", "0.8 m", ValueFormat::NumberPt), "0,8 m");
    }

    #[test]
    fn every_fact_is_covered_once() {
        let doc = parse_ir(
            r#"LOCATION(city="Rio de Janeiro",uf="RJ",timestamp="Jan 15, 2022"); WEATHER(condition="cloudy",temperature="28ºC",wind="10km/h",humidity="80%"); TIDES(high_tide="1,2m",high_tide_time="05:12")"#,
        )
        .unwrap();
        let plan = structure_text(&doc, &order_discourse(&doc, &default_causal_rules()));
        let lexed = lexicalize(&doc, &plan, &Lexicon::default_pt()).unwrap();
        let mut facts: Vec<SlotRef> = lexed.clauses().flat_map(|c| c.facts.clone()).collect();
        let n = facts.len();
        facts.sort();
        facts.dedup();
        assert_eq!(facts.len(), n);
        let total: usize = doc.intents().iter().map(Intent::len).sum();
        assert_eq!(n, total);
    }

    #[test]
    fn gap_names_the_attribute() {
        let doc = parse_ir(r#"WEATHER(condition="sunny",pollen="high")"#).unwrap();
        let plan = structure_text(&doc, &order_discourse(&doc, &[]));
        let err = lexicalize(&doc, &plan, &Lexicon::default_pt()).unwrap_err();
        assert!(matches!(err, PipelineError::LexiconGap { intent, attr } if intent == "WEATHER" && attr == "pollen"));
    }
}
