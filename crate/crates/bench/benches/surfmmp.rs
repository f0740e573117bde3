use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use surfmmp::scene::builtin;
use surfmmp::{
    enumerate_and_verify, enumerate_chains, run_anticanonical_mmp, zariski_decompose,
    EnumerationMode, PairModel,
};

fn pair(name: &str) -> PairModel {
    builtin(name).unwrap().build().unwrap()
}

fn zariski(c: &mut Criterion) {
    let p = pair("example-4.2");
    let d = p.anticanonical();
    c.bench_function("zariski/affine-e8", |b| {
        b.iter(|| zariski_decompose(p.surface(), black_box(&d)).unwrap())
    });
}

fn mmp(c: &mut Criterion) {
    let mut g = c.benchmark_group("mmp");
    g.sample_size(20);
    for name in ["example-4.1", "example-4.2"] {
        let p = pair(name);
        g.bench_function(name, |b| {
            b.iter(|| run_anticanonical_mmp(black_box(&p)).unwrap())
        });
    }
    g.finish();
}

fn contraction(c: &mut Criterion) {
    let p = pair("example-4.1");
    let lines: Vec<String> = ["A", "B", "C"]
        .iter()
        .flat_map(|f| (0..3).map(move |k| format!("{f}{k}")))
        .collect();
    let names: Vec<&str> = lines.iter().map(String::as_str).collect();
    c.bench_function("contract/hesse-lines", |b| {
        b.iter(|| p.surface().contract(black_box(&names)).unwrap())
    });
}

fn chains(c: &mut Criterion) {
    let p = pair("example-4.2");
    let mut g = c.benchmark_group("chains");
    g.sample_size(10);
    g.bench_function("affine-e8/depth-3", |b| {
        b.iter(|| enumerate_chains(black_box(&p), 3).unwrap().len())
    });
    g.finish();
}

fn dual_graphs(c: &mut Criterion) {
    let mut g = c.benchmark_group("dual-graphs");
    g.sample_size(10);
    g.bench_function("pruned/10/-8", |b| {
        b.iter(|| enumerate_and_verify(10, -8, EnumerationMode::Pruned).ok)
    });
    g.bench_function("exhaustive/5/-4", |b| {
        b.iter(|| enumerate_and_verify(5, -4, EnumerationMode::Exhaustive).ok)
    });
    g.finish();
}

criterion_group!(benches, zariski, mmp, contraction, chains, dual_graphs);
criterion_main!(benches);
