use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use fano_core::cohomology::{build_presentation, degree_anticanonical, degree_via_ring};
use fano_core::equivalence::{classify, Relation};
use fano_core::fixtures;
use fano_core::invariants::{kve_normal_form, mbn_for, sve_integer_bounded};
use fano_core::poly::{default_names, parse_poly, Poly, Q};
use fano_core::ring_iso::find_ring_isos_bounded;
use fano_core::{buchberger, smith_normal_form, IntMatrix, SmoothFanoPolytope, VarOrder};

fn groebner(c: &mut Criterion) {
    let names = default_names(3);
    let gens: Vec<Poly<Q>> = ["x^4", "(x-y)z", "(-2y+z)z", "(-2x+y)y", "x^3y"]
        .iter()
        .map(|s| parse_poly(s, &names).unwrap().to_field())
        .collect();
    c.bench_function("buchberger id 24", |b| {
        b.iter(|| buchberger(black_box(&gens), &VarOrder::natural(3)))
    });

    let pres = build_presentation(fixtures::get(4, 50).unwrap());
    c.bench_function("parametric NF id 50", |b| {
        b.iter(|| kve_normal_form(black_box(&pres), 2))
    });
}

fn lattice(c: &mut Criterion) {
    let m = IntMatrix::from_i64(&[
        &[2, 4, 4, 1],
        &[-6, 6, 12, 3],
        &[10, -4, -16, 5],
        &[1, 0, 3, 7],
    ]);
    c.bench_function("smith 4x4", |b| b.iter(|| smith_normal_form(black_box(&m))));
}

fn invariants(c: &mut Criterion) {
    let pres = build_presentation(fixtures::get(4, 30).unwrap());
    c.bench_function("sve id 30 B=5", |b| {
        b.iter(|| sve_integer_bounded(black_box(&pres), 2, 5))
    });
    c.bench_function("mbn id 30 B=5", |b| b.iter(|| mbn_for(black_box(&pres), 5)));
}

fn degrees(c: &mut Criterion) {
    let p = fixtures::get(4, 100).unwrap();
    c.bench_function("degree dual volume id 100", |b| {
        b.iter(|| degree_anticanonical(black_box(p)))
    });
    let pres = build_presentation(p);
    c.bench_function("degree via ring id 100", |b| {
        b.iter(|| degree_via_ring(black_box(&pres)))
    });
}

fn equivalence(c: &mut Criterion) {
    let ps: Vec<&SmoothFanoPolytope> = fixtures::dim3().iter().collect();
    let mut g = c.benchmark_group("slow");
    g.sample_size(10);
    g.bench_function("classify d=3 sign", |b| {
        b.iter(|| classify(black_box(&ps), Relation::SignEquiv))
    });
    let a = build_presentation(fixtures::get(4, 70).unwrap());
    let t = build_presentation(fixtures::get(4, 141).unwrap());
    g.bench_function("ring iso 70 -> 141 B=2", |b| {
        b.iter(|| find_ring_isos_bounded(black_box(&a), &t, 2))
    });
    g.finish();
}

criterion_group!(benches, groebner, lattice, invariants, degrees, equivalence);
criterion_main!(benches);
