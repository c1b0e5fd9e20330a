use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gsd_core::classify::classify_all;
use gsd_core::dispersion::k;
use gsd_core::jacobi::{build, eigenvalues_truncated, JacobiFlavor, Which};
use gsd_core::krein::{eigenvalues_secular, explicit_lattice, transfer_oracle, End, RealizationSpec};
use gsd_core::weyl::{weyl_eval, BlockKind, WeylBlock};
use gsd_core::{build_lattice, Count, InteractionKind, Interval, ModelConfig, SequenceRule, StrengthSeq, C64};
use std::hint::black_box;

fn dispersion(c: &mut Criterion) {
    let z = C64::new(0.3, 0.7);
    c.bench_function("k", |b| b.iter(|| k(black_box(z), black_box(1.3))));
}

fn weyl(c: &mut Criterion) {
    let block = WeylBlock::new(BlockKind::DiracInterval { d: 0.8 }, true, 1.3);
    let z = C64::new(0.3, 0.7);
    c.bench_function("weyl_eval interval", |b| b.iter(|| weyl_eval(&block, black_box(z)).unwrap()));
}

fn jacobi(c: &mut Criterion) {
    let l = build_lattice(0.0, SequenceRule::power(1.0, 0.5), Count::Infinite).unwrap();
    let s = StrengthSeq::alpha(SequenceRule::power(2.0, -1.0)).unwrap();
    let op = build(JacobiFlavor::AlphaDirac, &l, &s, 1.0).unwrap();
    let mut g = c.benchmark_group("jacobi sturm");
    for n in [100, 400, 1600] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| eigenvalues_truncated(&op, n, Which::All).unwrap())
        });
    }
    g.finish();
}

fn secular(c: &mut Criterion) {
    let mut g = c.benchmark_group("finite chain");
    g.sample_size(20);
    for n in [2usize, 8, 16] {
        let gaps: Vec<f64> = (0..=n).map(|i| 0.5 + 0.1 * (i % 3) as f64).collect();
        let st: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.5 } else { -0.75 }).collect();
        let spec = RealizationSpec::dirac(
            1.3,
            explicit_lattice(0.0, gaps).unwrap(),
            StrengthSeq::alpha(SequenceRule::explicit(st)).unwrap(),
            End::F2Zero,
            End::F1Zero,
        )
        .unwrap();
        g.bench_with_input(BenchmarkId::new("secular", n), &spec, |b, s| {
            b.iter(|| eigenvalues_secular(s, (-10.0, 10.0), 1e-3).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("transfer", n), &spec, |b, s| {
            b.iter(|| transfer_oracle(s, (-10.0, 10.0), 1e-3).unwrap())
        });
    }
    g.finish();
}

fn classifier(c: &mut Criterion) {
    let cfg = ModelConfig::new(1.0, Interval { left: 0.0, right: 1.0 }, InteractionKind::Delta).unwrap();
    let l = build_lattice(0.0, SequenceRule::geometric(0.5, 0.5), Count::Infinite).unwrap();
    let s = StrengthSeq::alpha(SequenceRule::power(1.0, 2.0)).unwrap();
    c.bench_function("classify_all geometric", |b| b.iter(|| classify_all(&cfg, &l, &s).unwrap()));
}

criterion_group!(benches, dispersion, weyl, jacobi, secular, classifier);
criterion_main!(benches);
