use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use planar_vcsp_bench::chi_delta;
use planar_vcsp_bench::planar_vcsp::catalog;
use planar_vcsp_bench::planar_vcsp::classify_boolean::classify_boolean;
use planar_vcsp_bench::planar_vcsp::classify_conservative::classify_conservative;
use planar_vcsp_bench::planar_vcsp::closure::{saturate, Budget};
use planar_vcsp_bench::planar_vcsp::express::{pi_v, ExpressibleQuery};
use planar_vcsp_bench::planar_vcsp::plane::{fixtures, solve};

fn plane(c: &mut Criterion) {
    let inst = fixtures::four_vars();
    c.bench_function("solve four vars", |b| b.iter(|| solve(black_box(&inst)).unwrap()));
    let q = ExpressibleQuery { instance: fixtures::star(), v: fixtures::STAR_V.to_vec() };
    c.bench_function("pi_v star", |b| b.iter(|| pi_v(black_box(&q)).unwrap()));
}

fn closure(c: &mut Criterion) {
    let cut = catalog::lang_cut();
    c.bench_function("saturate cut conservative", |b| {
        b.iter(|| saturate(black_box(&cut), Budget::for_language(&cut), true).unwrap())
    });
    let is = catalog::lang_is();
    c.bench_function("saturate is", |b| b.iter(|| saturate(black_box(&is), Budget::for_language(&is), false).unwrap()));
}

fn classify(c: &mut Criterion) {
    let mut g = c.benchmark_group("classify");
    g.sample_size(10);
    let is = catalog::lang_is();
    g.bench_function("boolean is", |b| b.iter(|| classify_boolean(black_box(&is), Budget::for_language(&is)).unwrap()));
    let cd = chi_delta();
    g.bench_function("conservative chi delta", |b| {
        b.iter(|| classify_conservative(black_box(&cd), Budget::for_language(&cd)).unwrap())
    });
    g.finish();
}

criterion_group!(benches, plane, closure, classify);
criterion_main!(benches);
