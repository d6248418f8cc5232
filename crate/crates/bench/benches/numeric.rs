use criterion::{criterion_group, criterion_main, Criterion};
use rheight::numerics::{bump, knapp_box_probe, LambdaGrid, OscillatoryQuadrature, SumMatrixConfig};
use rheight::exponents::{critical_exponent, report_knapp_certificates};
use rheight_bench::two_edge;
use std::hint::black_box;

fn quadrature(c: &mut Criterion) {
    let q = OscillatoryQuadrature::default();
    let amp = |s: f64| bump(s);
    let mut g = c.benchmark_group("quadrature");
    for lambda in [1e2, 1e4, 1e5] {
        g.bench_function(format!("cubic/{lambda:e}"), |b| {
            b.iter(|| q.integrate(&|s: f64| s * s * s, &amp, black_box(lambda), -1.0, 1.0).unwrap())
        });
    }
    g.finish();
}

fn decay(c: &mut Criterion) {
    let grid = LambdaGrid::new(1e2, 1e5, 8).unwrap();
    let mut g = c.benchmark_group("decay");
    g.sample_size(10);
    g.bench_function("vdc/M=3", |b| b.iter(|| rheight_cli::commands::vdc_record(3, black_box(&grid)).unwrap()));
    g.finish();
}

fn sums(c: &mut Criterion) {
    let mut cfg = SumMatrixConfig::single_reference();
    cfg.trials = 20;
    let mut g = c.benchmark_group("sums");
    g.sample_size(10);
    g.bench_function("single/20 trials", |b| b.iter(|| rheight::numerics::run_sum_matrix(black_box(&cfg)).unwrap()));
    g.finish();
}

fn knapp(c: &mut Criterion) {
    let rep = critical_exponent(&two_edge()).unwrap();
    let certs = report_knapp_certificates(&rep).unwrap();
    let ks: Vec<u32> = (4..=16).collect();
    c.bench_function("knapp_box/two_edge", |b| {
        b.iter(|| {
            for cert in &certs {
                knapp_box_probe(&rep.linear.phi_linear, cert, black_box(&ks)).unwrap();
            }
        })
    });
}

criterion_group!(benches, quadrature, decay, sums, knapp);
criterion_main!(benches);
