use arf_bench::{table_for, SIZES};
use arf_core::{autocorrelation, order3_quantity, sieve_table, sup_exp_sum, FunctionKind};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn sieve(c: &mut Criterion) {
    let mut g = c.benchmark_group("sieve");
    for kind in [FunctionKind::Mobius, FunctionKind::Mangoldt] {
        for n in [1u64 << 20, 1 << 23] {
            g.bench_with_input(BenchmarkId::new(kind.name(), n), &n, |b, &n| {
                b.iter(|| sieve_table(kind, black_box(n)).unwrap())
            });
        }
    }
    g.finish();
}

fn autocorr(c: &mut Criterion) {
    let mut g = c.benchmark_group("autocorrelation");
    for n in SIZES {
        let t = table_for(FunctionKind::Liouville, n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| autocorrelation(&t, black_box(n), n).unwrap())
        });
    }
    g.finish();
}

fn supremum(c: &mut Criterion) {
    let mut g = c.benchmark_group("sup_exp_sum");
    for n in SIZES {
        let t = table_for(FunctionKind::Mobius, n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| sup_exp_sum(&t, black_box(n), 8 * n).unwrap())
        });
    }
    g.finish();
}

fn order3(c: &mut Criterion) {
    let mut g = c.benchmark_group("order3");
    g.sample_size(10);
    for n in [1u64 << 8, 1 << 10, 1 << 12] {
        let t = table_for(FunctionKind::Liouville, n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| order3_quantity(&t, black_box(n)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, sieve, autocorr, supremum, order3);
criterion_main!(benches);
