//! Parse and convert throughput on deterministic messy HTML corpora.
//!
//! `end_to_end/convert` is the headline number: bytes of raw HTML turned
//! into Markdown per second on one core (criterion reports it as MB/s
//! throughput on the group).

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use htmlsift_core::html::parse_str;
use htmlsift_core::markdown::{convert, ExtractionInstruction};
use htmlsift_core::synthgen::synth_corpus;
use std::hint::black_box;

fn corpus_bytes(docs: &[String]) -> u64 {
    docs.iter().map(|d| d.len() as u64).sum()
}

fn bench_parse(c: &mut Criterion) {
    let docs = synth_corpus(11, 64);
    let mut group = c.benchmark_group("parse");
    group.throughput(Throughput::Bytes(corpus_bytes(&docs)));
    group.bench_function("tag_soup_64_docs", |b| {
        b.iter(|| {
            for doc in &docs {
                black_box(parse_str(doc));
            }
        })
    });
    group.finish();
}

fn bench_convert(c: &mut Criterion) {
    let instruction = ExtractionInstruction::default();
    let mut group = c.benchmark_group("end_to_end");
    for count in [16usize, 64, 256] {
        let docs = synth_corpus(11, count);
        group.throughput(Throughput::Bytes(corpus_bytes(&docs)));
        group.bench_with_input(BenchmarkId::new("convert", count), &docs, |b, docs| {
            b.iter(|| {
                let mut total = 0usize;
                for doc in docs {
                    let root = parse_str(doc);
                    total += convert(&root, &instruction).expect("main content exists").body.len();
                }
                total
            })
        });
    }
    group.finish();
}

fn bench_convert_preparsed(c: &mut Criterion) {
    let instruction = ExtractionInstruction::default();
    let docs = synth_corpus(11, 64);
    let roots: Vec<_> = docs.iter().map(|d| parse_str(d)).collect();
    let mut group = c.benchmark_group("convert_only");
    group.throughput(Throughput::Bytes(corpus_bytes(&docs)));
    group.bench_function("preparsed_64_docs", |b| {
        b.iter(|| {
            let mut total = 0usize;
            for root in &roots {
                total += convert(root, &instruction).expect("main content exists").body.len();
            }
            total
        })
    });
    group.finish();
}

criterion_group!(benches, bench_parse, bench_convert, bench_convert_preparsed);
criterion_main!(benches);
