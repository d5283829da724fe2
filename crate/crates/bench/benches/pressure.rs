use std::hint::black_box;

use casimir_bench::{gold_models, room_temperature, synthetic_tail, SEPARATIONS};
use casimir_core::{
    evanescent_pressure, kk_transform, pressure_polarized, DielectricModel, Polarization,
    QuadratureConfig,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn matsubara(c: &mut Criterion) {
    let cfg = QuadratureConfig::default();
    let mut group = c.benchmark_group("matsubara");
    for (name, model) in gold_models() {
        for a in SEPARATIONS {
            let g = room_temperature(a);
            group.bench_with_input(BenchmarkId::new(name, a), &g, |b, g| {
                b.iter(|| {
                    pressure_polarized(black_box(&model), Polarization::TM, *g, &cfg).unwrap()
                })
            });
        }
    }
    group.finish();
}

fn evanescent(c: &mut Criterion) {
    let cfg = QuadratureConfig::default();
    let model = DielectricModel::gold_drude();
    let mut group = c.benchmark_group("evanescent");
    group.sample_size(10);
    for pol in Polarization::ALL {
        let g = room_temperature(1e-6);
        group.bench_function(pol.to_string(), |b| {
            b.iter(|| evanescent_pressure(black_box(&model), pol, g, &cfg).unwrap())
        });
    }
    group.finish();
}

fn kramers_kronig(c: &mut Criterion) {
    let (table, tail) = synthetic_tail();
    c.bench_function("kk_transform", |b| {
        b.iter(|| kk_transform(black_box(&table), tail, black_box(2.4683e14)).unwrap())
    });
}

criterion_group!(benches, matsubara, evanescent, kramers_kronig);
criterion_main!(benches);
