//! Scoring throughput: the character-level LCS dominates, so it gets the
//! size sweep.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use strux_core::metrics::{bleu, rouge_l, rouge_l_floored};

fn lorem(n: usize, flip: bool) -> String {
    // Deterministic filler with a controllable mismatch pattern.
    let alphabet = if flip { "bcdefghija" } else { "abcdefghij" };
    alphabet.chars().cycle().take(n).collect()
}

fn bench_rouge(c: &mut Criterion) {
    let mut group = c.benchmark_group("rouge_l");
    for n in [32usize, 256, 2_048] {
        let pred = lorem(n, true);
        let gold = lorem(n, false);
        group.bench_function(format!("chars_{n}"), |b| {
            b.iter(|| black_box(rouge_l(&pred, &gold)))
        });
    }
    group.bench_function("floored_short", |b| {
        b.iter(|| black_box(rouge_l_floored("Missing ending curly brace at line 4.", "Missing ending curly brace at line 5.")))
    });
    group.finish();
}

fn bench_bleu(c: &mut Criterion) {
    let pred: String =
        (0..64).map(|i| format!("tok{} ", i * 7 % 23)).collect::<String>();
    let gold: String = (0..64).map(|i| format!("tok{} ", i % 23)).collect();
    c.bench_function("bleu/64_tokens", |b| b.iter(|| black_box(bleu(&pred, &gold))));
}

criterion_group!(benches, bench_rouge, bench_bleu);
criterion_main!(benches);
