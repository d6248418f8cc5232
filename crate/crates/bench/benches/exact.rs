use criterion::{criterion_group, criterion_main, Criterion};
use rheight::exponents::critical_exponent;
use rheight::newton::newton_polyhedron;
use rheight::varchenko::{adapted_coordinates, fine_splitting_trace};
use rheight_bench::{parabola_power, scattered_support, two_edge};
use std::hint::black_box;

fn hull(c: &mut Criterion) {
    let pts = scattered_support(500);
    c.bench_function("hull/500", |b| b.iter(|| newton_polyhedron(black_box(&pts)).unwrap()));
}

fn exponents(c: &mut Criterion) {
    let phi = two_edge();
    c.bench_function("critical_exponent/two_edge", |b| b.iter(|| critical_exponent(black_box(&phi)).unwrap()));
    let phi = parabola_power(8);
    c.bench_function("critical_exponent/parabola^8", |b| b.iter(|| critical_exponent(black_box(&phi)).unwrap()));
    let ac = adapted_coordinates(&two_edge()).unwrap();
    let m = ac.m().unwrap();
    c.bench_function("fine_splitting/two_edge", |b| {
        b.iter(|| fine_splitting_trace(black_box(&ac.phi_a), &ac.psi, &m).unwrap())
    });
}

fn parse(c: &mut Criterion) {
    let src = "(x2 - x1^2 - x1^3)*(x2 - x1^2 - x1^4)^3 + 2/7*x1^(31/2)";
    c.bench_function("parse/two_edge", |b| b.iter(|| rheight_cli::parse_expression(black_box(src)).unwrap()));
}

criterion_group!(benches, hull, exponents, parse);
criterion_main!(benches);
