use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use eigencoprime_core::coeffs::{coefficient_at, format::TableKind, table_from_form};
use eigencoprime_core::galois::{pair_counts_enumerated, trace_det_histogram, WeightPair};
use eigencoprime_core::qseries::{eisenstein, level1_eigenform, EisensteinKind};
use eigencoprime_core::sieve;
use eigencoprime_core::stats::{self, FormPairDataset};

fn bench_qseries(c: &mut Criterion) {
    let mut group = c.benchmark_group("qseries");
    for prec in [1_000usize, 10_000] {
        let e4 = eisenstein(EisensteinKind::E4, prec).unwrap();
        let e6 = eisenstein(EisensteinKind::E6, prec).unwrap();
        group.bench_function(format!("mul_ntt_{prec}"), |b| {
            b.iter(|| e4.mul(&e6))
        });
        if prec <= 1_000 {
            group.bench_function(format!("mul_naive_{prec}"), |b| {
                b.iter(|| e4.mul_naive(&e6))
            });
        }
    }
    group.bench_function("delta_prec_2000", |b| {
        b.iter(|| level1_eigenform(12, 2_000).unwrap())
    });
    group.finish();
}

fn bench_sieves(c: &mut Criterion) {
    let mut group = c.benchmark_group("sieves");
    group.bench_function("primes_1e6", |b| b.iter(|| sieve::primes(1_000_000).unwrap()));
    group.bench_function("totient_1e5", |b| {
        b.iter(|| sieve::totient_sieve(100_000).unwrap())
    });
    group.finish();
}

fn bench_galois(c: &mut Criterion) {
    let mut group = c.benchmark_group("galois");
    group.bench_function("histogram_m31", |b| {
        b.iter(|| trace_det_histogram(31, 100).unwrap())
    });
    group.bench_function("pair_counts_m45", |b| {
        let w = WeightPair::new(6, 4).unwrap();
        b.iter(|| pair_counts_enumerated(45, &w, 100).unwrap())
    });
    group.finish();
}

fn bench_stats(c: &mut Criterion) {
    let w12 = level1_eigenform(12, 2_001).unwrap();
    let w16 = level1_eigenform(16, 2_001).unwrap();
    let t1 = table_from_form(&w12, TableKind::Ap, "d12")
        .unwrap()
        .into_prime_table()
        .unwrap();
    let t2 = table_from_form(&w16, TableKind::Ap, "d16")
        .unwrap()
        .into_prime_table()
        .unwrap();
    let mut group = c.benchmark_group("stats");
    group.bench_function("dataset_build_2000", |b| {
        b.iter(|| FormPairDataset::new(&t1, &t2).unwrap())
    });
    let ds = FormPairDataset::new(&t1, &t2).unwrap();
    group.bench_function("coprime_count_2000", |b| {
        b.iter(|| stats::coprime_prime_count(&ds, 2_000).unwrap())
    });
    group.bench_function("theorem1_counts_500", |b| {
        b.iter(|| stats::theorem1_counts(&ds, 500, 2).unwrap())
    });
    group.bench_function("coefficient_at_1800", |b| {
        b.iter_batched(
            || (),
            |_| coefficient_at(&t1, 1_800).unwrap(),
            BatchSize::SmallInput,
        )
    });
    group.finish();
}

criterion_group!(benches, bench_qseries, bench_sieves, bench_galois, bench_stats);
criterion_main!(benches);
