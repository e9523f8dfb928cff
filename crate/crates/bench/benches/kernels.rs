use std::collections::BTreeMap;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use finsler_core::geometry::spray_pq;
use finsler_core::phi_lang::{builtin, eval_jet, parse_expr};
use finsler_core::{classify_metric, GridSpec, PhiSource};

fn source(name: &str) -> PhiSource {
    PhiSource::from_builtin(&builtin(name, &BTreeMap::new()).unwrap()).unwrap()
}

fn jets(c: &mut Criterion) {
    let e = parse_expr("exp(0.4*s*r)*(1 + 0.3*s^2)/sqrt(r^2 - s^2)").unwrap();
    c.bench_function("eval_jet", |b| b.iter(|| eval_jet(black_box(&e), 1.2, 0.3).unwrap()));
}

fn spray(c: &mut Criterion) {
    let e = parse_expr("exp(0.4*s*r)*(1 + 0.3*s^2)").unwrap();
    let phi = eval_jet(&e, 1.2, 0.3).unwrap();
    c.bench_function("spray_pq", |b| b.iter(|| spray_pq(black_box(&phi)).unwrap()));
}

fn classify(c: &mut Criterion) {
    let src = source("zhou2d_r6");
    let grid = GridSpec::new(0.5, 2.0, 4, 9).unwrap();
    c.bench_function("classify_zhou2d_r6_4x9", |b| {
        b.iter(|| classify_metric(black_box(&src), 2, &grid, None).unwrap())
    });
}

fn reconstruct(c: &mut Criterion) {
    let src = source("example1");
    let PhiSource::Reconstructed(m) = &src else {
        panic!("example1 is given by log-derivatives");
    };
    let grid = GridSpec::new(0.5, 2.0, 4, 9).unwrap();
    let mut g = c.benchmark_group("reconstruct");
    g.sample_size(10);
    g.bench_function("example1_4x9", |b| b.iter(|| m.reconstruct(black_box(&grid)).unwrap()));
    g.bench_function("example1_phi_jet", |b| b.iter(|| m.phi_jet(black_box(1.3), 0.4).unwrap()));
    g.finish();
}

criterion_group!(benches, jets, spray, classify, reconstruct);
criterion_main!(benches);
