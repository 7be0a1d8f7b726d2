use std::hint::black_box;

use azul::eval::{bleu, meteor_lite, rouge_l};
use azul::pipeline::{run_pipeline, Lexicon, PipelineConfig};
use azul::publish::{compose_thread, DEFAULT_LIMIT};
use azul::{parse_ir, serialize_ir};
use azul_bench::{long_report, santos, sentence_pair, SANTOS_IR};
use criterion::{criterion_group, criterion_main, Criterion};

fn ir(c: &mut Criterion) {
    c.bench_function("parse_ir", |b| b.iter(|| parse_ir(black_box(SANTOS_IR)).unwrap()));
    let doc = santos();
    c.bench_function("serialize_ir", |b| b.iter(|| serialize_ir(black_box(&doc))));
}

fn pipeline(c: &mut Criterion) {
    let doc = santos();
    let lex = Lexicon::default_pt();
    let canonical = PipelineConfig::default();
    let seeded = PipelineConfig::seeded(42);
    c.bench_function("run_pipeline/canonical", |b| {
        b.iter(|| run_pipeline(black_box(&doc), &lex, &canonical).unwrap())
    });
    c.bench_function("run_pipeline/seeded", |b| {
        b.iter(|| run_pipeline(black_box(&doc), &lex, &seeded).unwrap())
    });
}

fn metrics(c: &mut Criterion) {
    let (h, r) = sentence_pair(40);
    let refs = vec![vec![r.clone()]];
    let hyps = vec![h.clone()];
    c.bench_function("bleu/40", |b| b.iter(|| bleu(black_box(&hyps), &refs, 4).unwrap()));
    c.bench_function("rouge_l/40", |b| b.iter(|| rouge_l(black_box(&h), &r).unwrap()));
    c.bench_function("meteor_lite/40", |b| b.iter(|| meteor_lite(black_box(&h), &r).unwrap()));
}

fn threads(c: &mut Criterion) {
    let text = long_report();
    c.bench_function("compose_thread", |b| {
        b.iter(|| compose_thread("santos", black_box(&text), DEFAULT_LIMIT).unwrap())
    });
}

criterion_group!(benches, ir, pipeline, metrics, threads);
criterion_main!(benches);
