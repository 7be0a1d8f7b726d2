use std::path::PathBuf;

use azul::eval::{
    check_faithfulness, read_jsonl, split_corpus, synthesize_corpus, write_jsonl, CorpusRow, CORPUS_ROWS, CORPUS_SEED,
};
use azul::parse_ir;
use azul::pipeline::{run_pipeline, Lexicon, PipelineConfig};
use azul::template::{generate, TemplateRegistry};

fn corpus_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/corpus.jsonl")
}

/// Set `AZUL_REGEN_CORPUS=1` to rewrite the shipped file.
#[test]
fn shipped_corpus_matches_generator() {
    let rows = synthesize_corpus(CORPUS_ROWS, CORPUS_SEED, &Lexicon::default_pt()).unwrap();
    if std::env::var_os("AZUL_REGEN_CORPUS").is_some() {
        write_jsonl(&corpus_path(), &rows).unwrap();
    }
    let shipped: Vec<CorpusRow> = read_jsonl(&corpus_path()).unwrap();
    assert_eq!(shipped.len(), CORPUS_ROWS);
    assert!(
        shipped == rows,
        "data/corpus.jsonl is stale; rerun with AZUL_REGEN_CORPUS=1"
    );
}

#[test]
fn template_and_pipeline_outputs_are_faithful() {
    let rows: Vec<CorpusRow> = read_jsonl(&corpus_path()).unwrap();
    let lex = Lexicon::default_pt();
    let templates = TemplateRegistry::default_pt();
    let mut failures = Vec::new();
    for row in &rows {
        let doc = parse_ir(&row.input_ir).unwrap();
        let outputs = [
            generate(&doc, &templates).unwrap().text,
            run_pipeline(&doc, &lex, &PipelineConfig::default()).unwrap().text,
            row.reference_text.clone(),
        ];
        for text in outputs {
            let v = check_faithfulness(&doc, &text);
            if !v.passed() {
                failures.push(format!("{}: {:?}\n{text}", row.id, v.violations));
            }
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n\n"));
}

#[test]
fn corpus_splits_sixty_twenty_twenty() {
    let rows: Vec<CorpusRow> = read_jsonl(&corpus_path()).unwrap();
    let split = split_corpus(&rows, 1);
    assert_eq!(
        (split.train.len(), split.validation.len(), split.test.len()),
        (300, 100, 100)
    );
}
