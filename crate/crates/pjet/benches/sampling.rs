//! Parallel against sequential evaluation of the sampled groupoid check and
//! of the catalog.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::Rng;

use pjet::catalog::{entries, run_entry};
use pjet::expr::Chart;
use pjet::geom::DiffForm;
use pjet::groupoid::{form_matrix, GroupoidChart};
use pjet::par;
use pjet::report::NumericOpts;

fn groupoid() -> (GroupoidChart, DiffForm) {
    let g = GroupoidChart::parse(
        &["x", "y", "u", "v", "w"],
        &["x", "y"],
        &["x", "y"],
        &["x", "y"],
        &["x", "y", "0", "0", "0"],
        &["x", "y", "-u", "-exp(-x*u)*v", "-w + (1 - exp(-x*u))/x*v"],
        &["x_1", "y_1", "u_1 + u_2", "v_1 + exp(x_1*u_1)*v_2", "w_1 + w_2 + (exp(x_1*u_1) - 1)/x_1*v_2"],
    )
    .expect("valid groupoid");
    let c: std::sync::Arc<Chart> = g.arrows().clone();
    let p = |s: &str| c.parse(s).expect("valid expression");
    let omega = DiffForm::from_terms(&c, 2, [(vec![0, 2], p("1")), (vec![1, 3], p("1")), (vec![0, 1], p("w")), (vec![1, 4], p("-x"))])
        .expect("valid form");
    (g, omega)
}

/// One sampled composable pair: product plus the form matrix at it.
fn sample(g: &GroupoidChart, omega: &DiffForm, i: usize) -> f64 {
    let mut rng = par::rng(0, i as u64);
    let a: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut b: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let t = g.t(&a).expect("target");
    b[..2].copy_from_slice(&t);
    let m = g.mul(&b, &a).expect("composable");
    form_matrix(omega, &m).expect("finite").norm()
}

fn bench_groupoid(c: &mut Criterion) {
    let (g, omega) = groupoid();
    let n = 2048;
    let mut group = c.benchmark_group("groupoid_sampling");
    group.bench_function("parallel", |b| b.iter(|| black_box(par::map_indexed(n, |i| sample(&g, &omega, i)))));
    group.bench_function("sequential", |b| b.iter(|| black_box(par::map_indexed_sequential(n, |i| sample(&g, &omega, i)))));
    group.finish();
}

fn bench_catalog(c: &mut Criterion) {
    let all = entries().expect("catalog parses");
    let opts = NumericOpts::default();
    let mut group = c.benchmark_group("catalog");
    group.sample_size(10);
    group.bench_function("parallel", |b| b.iter(|| black_box(par::map_slice(&all, |e| run_entry(e, &opts)))));
    group.bench_function("sequential", |b| {
        b.iter(|| black_box(par::map_indexed_sequential(all.len(), |i| run_entry(&all[i], &opts))))
    });
    group.finish();
}

criterion_group!(benches, bench_groupoid, bench_catalog);
criterion_main!(benches);
