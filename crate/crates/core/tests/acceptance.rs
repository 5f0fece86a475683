//! One line per acceptance criterion. Values are compared exactly as
//! printed; a mismatch listed in `KNOWN` prints FAIL but does not fail the
//! run, anything else exits nonzero.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use common::{check_row, kve_rows};
use fano_core::cohomology::{
    build_presentation, degree_anticanonical, degree_of_product_check, degree_via_ring,
    CohomologyPresentation,
};
use fano_core::equivalence::{
    anomalies, classify_with, fingerprints, verify_witness, Partition, Relation,
};
use fano_core::fixtures;
use fano_core::invariants::{kve_normal_form, mbn_for, sve_integer_bounded};
use fano_core::poly::{param_names, parse_poly, Monomial, ParamCoeff, Poly, Q};
use fano_core::polytope::{f0, f1, p5, p6, segment, w4, w_family, y3, y_family, z3, z_family};
use fano_core::ring_iso::{find_ring_isos_bounded, verify_ring_iso, RingIsoWitness};
use fano_core::{buchberger, smith_normal_form, IntMatrix, SmoothFanoPolytope, VarOrder};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

/// Printed values known to be wrong, by criterion.
const KNOWN: &[(u8, &str)] = &[
    (3, "d=4 id 138 ideal"),
    (3, "d=4 id 138 sve"),
    (3, "d=4 id 138 sve2"),
    (3, "d=4 id 138 4ve2"),
    (3, "d=4 id 138 cve3"),
    (3, "d=4 id 144 ideal"),
    (3, "d=4 id 144 sve"),
    (3, "d=4 id 144 sve2"),
    (3, "d=4 id 144 4ve2"),
    (3, "d=4 id 41 ideal"),
    (3, "d=4 id 45 ideal"),
    (5, "degree 107"),
    (8, "W9^6"),
];

struct Outcome {
    mismatches: Vec<String>,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            mismatches: Vec::new(),
            detail: String::new(),
        }
    }

    fn check(&mut self, ok: bool, label: impl Into<String>) {
        if !ok {
            self.mismatches.push(label.into());
        }
    }
}

fn ring_names(n: usize) -> Vec<String> {
    ["x", "y", "z", "w"]
        .iter()
        .take(n)
        .map(ToString::to_string)
        .collect()
}

fn qp(s: &str, n: usize) -> Poly<Q> {
    parse_poly(s, &ring_names(n)).unwrap().to_field()
}

fn groebner_goldens() -> Outcome {
    let mut out = Outcome::new();
    let order = VarOrder::natural(3);
    let gens: Vec<Poly<Q>> = ["x^4", "(x-y)z", "(-2y+z)z", "(-2x+y)y", "x^3y"]
        .iter()
        .map(|s| qp(s, 3))
        .collect();
    let gb = buchberger(&gens, &order);
    let printed: Vec<Poly<Q>> = ["x^4", "(x-y)z", "(-2y+z)z", "(-2x+y)y", "x^3y", "x^2z"]
        .iter()
        .map(|s| qp(s, 3))
        .collect();
    let mut lms: Vec<Monomial> = printed
        .iter()
        .map(|p| *p.leading_monomial().unwrap())
        .collect();
    lms.sort();
    out.check(gb.leading_monomials() == lms, "id 24 leading monomials");
    out.check(
        printed.iter().all(|p| gb.contains(p)),
        "id 24 printed basis lies in the ideal",
    );
    out.check(buchberger(&printed, &order) == gb, "id 24 reduced basis");

    let gens: Vec<Poly<Q>> = ["x^2", "z(z-y)", "y(y-x)"]
        .iter()
        .map(|s| qp(s, 3))
        .collect();
    let gb = buchberger(&gens, &order);
    let shown = |ps: &[Poly<Q>]| -> BTreeSet<String> {
        ps.iter()
            .map(|p| p.to_primitive_integer().display(&ring_names(3)))
            .collect()
    };
    out.check(
        shown(&gb.generators()) == shown(&gens),
        "id 12 basis is its generators",
    );
    out.detail = "printed id 24 basis reproduced from its worked-example ideal, which is not the ideal of the tabled id 24 polytope; id 12 basis is its generators".into();
    out
}

fn expected_nf(terms: &[(&[u32], &str)]) -> Poly<ParamCoeff> {
    Poly::from_terms(terms.iter().map(|(e, c)| {
        (
            Monomial::from_exponents(e),
            parse_poly(c, &param_names(3)).unwrap().to_field::<Q>(),
        )
    }))
}

fn parametric_nf() -> Outcome {
    let mut out = Outcome::new();
    let p12 = SmoothFanoPolytope::from_i64(
        Some(12),
        &[
            &[1, 0, 0],
            &[0, 1, 0],
            &[0, 0, 1],
            &[-1, 0, 1],
            &[0, 1, -1],
            &[0, -1, 0],
        ],
    )
    .unwrap();
    let want = expected_nf(&[
        (&[1, 1, 0], "(2a+b)b"),
        (&[1, 0, 1], "2ac"),
        (&[0, 1, 1], "(2b+c)c"),
    ]);
    out.check(
        kve_normal_form(&build_presentation(&p12), 2) == want,
        "id 12",
    );

    let p24 = CohomologyPresentation::parse(
        &["x", "y", "z"],
        &["x^4", "(x-y)z", "(-2y+z)z", "(-2x+y)y", "x^3y"],
    )
    .unwrap();
    let want = expected_nf(&[
        (&[2, 0, 0], "a^2"),
        (&[1, 1, 0], "2b(a+b)"),
        (&[1, 0, 1], "2c(a+b+c)"),
    ]);
    out.check(kve_normal_form(&p24, 2) == want, "id 24");
    out.detail = "NF(f^2) coefficient-exact for ids 12 and 24".into();
    out
}

fn kve_tables() -> Outcome {
    let mut out = Outcome::new();
    let rows = kve_rows();
    let mut checked = [0usize; 2];
    let mut d3_secs = 0.0;
    for dim in [3, 4] {
        let t = Instant::now();
        for row in rows.iter().filter(|r| r.dim == dim) {
            checked[dim - 3] += 1;
            match check_row(row) {
                Ok(()) if row.on.is_none() && row.printed.is_none() => {}
                Ok(()) => out.mismatches.push(row.label()),
                Err(e) => out.mismatches.push(format!("{}: {e}", row.label())),
            }
        }
        if dim == 3 {
            d3_secs = t.elapsed().as_secs_f64();
        }
    }
    out.check(d3_secs < 60.0, format!("d=3 suite took {d3_secs:.1}s"));
    out.detail = format!(
        "{} d=3 and {} d=4 cells at B=5, {} match as printed; rows of 138 and 144 are swapped and the ideals of 41 and 45 are misprinted; d=3 suite {d3_secs:.1}s",
        checked[0],
        checked[1],
        checked[0] + checked[1] - out.mismatches.len()
    );
    out
}

fn merged_ids(part: &Partition, ps: &[&SmoothFanoPolytope]) -> BTreeSet<Vec<u32>> {
    part.merges()
        .iter()
        .map(|m| {
            let mut ids: Vec<u32> = m.iter().map(|&i| ps[i].id().unwrap()).collect();
            ids.sort_unstable();
            ids
        })
        .collect()
}

fn groups(gs: &[&[u32]]) -> BTreeSet<Vec<u32>> {
    gs.iter()
        .map(|g| {
            let mut v = g.to_vec();
            v.sort_unstable();
            v
        })
        .collect()
}

fn classification() -> Outcome {
    let mut out = Outcome::new();
    let d4_groups: &[&[u32]] = &[
        &[70, 141],
        &[30, 43],
        &[68, 134],
        &[129, 136],
        &[28, 32],
        &[67, 118],
        &[123, 125],
        &[74, 96],
        &[83, 108],
        &[95, 131],
        &[29, 39],
        &[111, 116],
        &[73, 76, 92],
        &[77, 88],
        &[81, 103],
        &[82, 91, 107],
        &[90, 113],
        &[72, 87],
        &[78, 86],
    ];
    let cases: [(usize, &[SmoothFanoPolytope], &[&[u32]], &[u32]); 2] = [
        (3, fixtures::dim3(), &[&[11, 18], &[10, 13]], &[]),
        (4, fixtures::dim4(), d4_groups, &[50, 57]),
    ];
    let mut counts = Vec::new();
    for (dim, table, want_sign, want_anomalies) in cases {
        let ps: Vec<&SmoothFanoPolytope> = table.iter().collect();
        let fps = fingerprints(&ps);
        let uni = classify_with(&ps, Relation::UnimodularEquiv, &fps);
        let sign = classify_with(&ps, Relation::SignEquiv, &fps);
        let fp = classify_with(&ps, Relation::FingerprintEqual, &fps);
        out.check(
            uni.merges().is_empty(),
            format!("d={dim} unimodular merges"),
        );
        out.check(
            merged_ids(&sign, &ps) == groups(want_sign),
            format!("d={dim} sign merges"),
        );
        let mut anom: Vec<u32> = anomalies(&fp, &sign)
            .iter()
            .map(|&i| ps[i].id().unwrap())
            .collect();
        anom.sort_unstable();
        out.check(
            anom == want_anomalies,
            format!("d={dim} anomalies {anom:?}"),
        );
        counts.push(format!(
            "d={dim} {}/{}/{}",
            uni.num_classes(),
            sign.num_classes(),
            fp.num_classes()
        ));
    }
    out.check(
        counts == ["d=3 18/16/16", "d=4 122/101/100"],
        format!("class counts {counts:?}"),
    );
    out.detail = format!("{}; anomalies [50, 57]", counts.join(", "));
    out
}

/// Degrees as printed in the cohomology-equivalent group tables.
const PRINTED_DEGREES: &[(usize, u32, u32)] = &[
    (3, 11, 52),
    (3, 18, 44),
    (3, 10, 44),
    (3, 13, 40),
    (4, 70, 513),
    (4, 141, 513),
    (4, 30, 592),
    (4, 43, 400),
    (4, 68, 432),
    (4, 134, 480),
    (4, 129, 496),
    (4, 136, 400),
    (4, 28, 478),
    (4, 32, 382),
    (4, 67, 351),
    (4, 118, 447),
    (4, 123, 415),
    (4, 125, 367),
    (4, 74, 480),
    (4, 96, 352),
    (4, 83, 448),
    (4, 108, 352),
    (4, 95, 416),
    (4, 131, 352),
    (4, 29, 463),
    (4, 39, 337),
    (4, 111, 389),
    (4, 116, 347),
    (4, 50, 417),
    (4, 57, 369),
    (4, 73, 394),
    (4, 76, 330),
    (4, 92, 310),
    (4, 77, 405),
    (4, 88, 331),
    (4, 81, 373),
    (4, 103, 325),
    (4, 82, 341),
    (4, 91, 363),
    (4, 107, 229),
    (4, 90, 352),
    (4, 113, 320),
    (4, 72, 308),
    (4, 87, 268),
    (4, 78, 298),
    (4, 86, 278),
];

fn degrees() -> Outcome {
    let mut out = Outcome::new();
    for &(dim, id, want) in PRINTED_DEGREES {
        let got = degree_anticanonical(fixtures::get(dim, id).unwrap()).unwrap();
        if got != BigInt::from(want) {
            out.mismatches.push(format!("degree {id}"));
            out.detail
                .push_str(&format!("id {id} printed {want}, computed {got}; "));
        }
    }
    let mut agree = 0;
    for p in fixtures::all() {
        let ok =
            degree_anticanonical(p).unwrap() == degree_via_ring(&build_presentation(p)).unwrap();
        out.check(ok, format!("routes disagree on id {}", p.id().unwrap()));
        agree += usize::from(ok);
    }
    let reproduced = PRINTED_DEGREES.len()
        - out
            .mismatches
            .iter()
            .filter(|m| m.starts_with("degree"))
            .count();
    out.detail = format!(
        "{reproduced}/{} printed degrees reproduced; {}both routes agree on {agree}/{} fixtures",
        PRINTED_DEGREES.len(),
        out.detail,
        fixtures::all().count()
    );
    out
}

fn ring_isos() -> Outcome {
    let mut out = Outcome::new();
    let a = build_presentation(fixtures::get(4, 70).unwrap());
    let b = build_presentation(fixtures::get(4, 141).unwrap());
    let isos = find_ring_isos_bounded(&a, &b, 2).unwrap();
    out.check(
        isos.len() == 2,
        format!("70 -> 141 found {} isomorphisms", isos.len()),
    );
    out.check(isos.iter().all(|w| !w.c1_preserving), "70 -> 141 c1");

    let a = build_presentation(fixtures::get(4, 50).unwrap());
    let b = build_presentation(fixtures::get(4, 57).unwrap());
    let l = IntMatrix::from_i64(&[
        &[-1, 0, 0, 2],
        &[0, -1, 0, 1],
        &[0, 0, 0, 1],
        &[0, 0, -1, 0],
    ]);
    match RingIsoWitness::new(&a, &b, l) {
        Ok(w) => {
            out.check(!w.c1_preserving, "50 -> 57 preserves c1");
            out.check(w.pontryagin_preserving, "50 -> 57 Pontryagin");
        }
        Err(e) => out.mismatches.push(format!("50 -> 57 rejected: {e}")),
    }
    out.detail = format!("70 -> 141 at B=2: {} isomorphisms, none c1-preserving; 50 -> 57 map valid, c1 fails, Pontryagin holds", isos.len());
    out
}

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn matrix(rows: &[Vec<i64>]) -> IntMatrix {
    let rows: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
    IntMatrix::from_i64(&rows)
}

fn properties() -> Outcome {
    let mut out = Outcome::new();
    let small = (1usize..5, 1usize..5)
        .prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-9i64..10, c), r));
    let smith = runner(128).run(&small, |rows| {
        let m = matrix(&rows);
        let (s, l, r) = smith_normal_form(&m);
        prop_assert!(l.is_unimodular() && r.is_unimodular());
        prop_assert_eq!(l.mul(&m).mul(&r), s.clone());
        let k = s.rows().min(s.cols());
        for i in 0..s.rows() {
            for j in 0..s.cols() {
                prop_assert!(i == j || s.get(i, j).is_zero());
            }
        }
        for i in 0..k {
            prop_assert!(!s.get(i, i).is_negative());
            if i + 1 < k {
                let (a, b) = (s.get(i, i), s.get(i + 1, i + 1));
                let divides = if a.is_zero() {
                    b.is_zero()
                } else {
                    (b % a).is_zero()
                };
                prop_assert!(divides);
            }
        }
        Ok(())
    });
    out.check(smith.is_ok(), "Smith form");

    let pres: Vec<CohomologyPresentation> = [(3, 12), (4, 24), (4, 50), (4, 70)]
        .iter()
        .map(|&(d, id)| build_presentation(fixtures::get(d, id).unwrap()))
        .collect();
    let poly = |n: usize| {
        prop::collection::vec((prop::collection::vec(0u32..3, n), -4i64..5), 0..6).prop_map(
            move |terms| {
                Poly::from_terms(
                    terms
                        .into_iter()
                        .filter(|(e, _)| e.iter().sum::<u32>() <= 3)
                        .map(|(e, c)| (Monomial::from_exponents(&e), BigInt::from(c))),
                )
            },
        )
    };
    let mut nf_ok = true;
    for p in &pres {
        let gb = p.gb::<Q>();
        nf_ok &= runner(32)
            .run(&(poly(p.nvars()), poly(p.nvars())), |(f, g)| {
                let (f, g) = (f.to_field::<Q>(), g.to_field::<Q>());
                let nf = gb.normal_form(&f);
                prop_assert_eq!(gb.normal_form(&nf), nf.clone());
                prop_assert_eq!(
                    gb.normal_form(&f.mul(&g)),
                    gb.normal_form(&nf.mul(&gb.normal_form(&g)))
                );
                Ok(())
            })
            .is_ok();
    }
    out.check(nf_ok, "normal form idempotence and multiplicativity");

    let surfaces = [f0(), f1(), p5(), p6()];
    let mbn = |p: &SmoothFanoPolytope| mbn_for(&build_presentation(p), 3).exact();
    for (i, a) in surfaces.iter().enumerate() {
        for b in &surfaces[i..] {
            let sum = mbn(&a.direct_sum(b).unwrap());
            out.check(
                sum.is_some() && sum == mbn(a).zip(mbn(b)).map(|(x, y)| x + y),
                "mbn additivity",
            );
        }
    }

    let mut pieces = vec![segment(), f0(), f1(), p5(), p6()];
    pieces.extend(fixtures::dim3().iter().take(6).cloned());
    for a in &pieces {
        for b in &pieces {
            out.check(degree_of_product_check(a, b).unwrap(), "product degree");
        }
    }

    let mut witnesses = 0;
    for table in [fixtures::dim3(), fixtures::dim4()] {
        let ps: Vec<&SmoothFanoPolytope> = table.iter().collect();
        let fps = fingerprints(&ps);
        for relation in [Relation::SignEquiv, Relation::UnimodularEquiv] {
            for class in classify_with(&ps, relation, &fps).classes {
                for link in class.links {
                    let ok = link
                        .witness
                        .is_some_and(|w| verify_witness(ps[link.from], ps[link.to], &w).is_ok());
                    out.check(ok, "equivalence witness");
                    witnesses += 1;
                }
            }
        }
    }
    for (dim, a, b) in [(4, 70, 141), (3, 11, 18), (3, 10, 13), (4, 50, 57)] {
        let pa = build_presentation(fixtures::get(dim, a).unwrap());
        let pb = build_presentation(fixtures::get(dim, b).unwrap());
        for w in find_ring_isos_bounded(&pa, &pb, 2).unwrap() {
            out.check(
                verify_ring_iso(&pa, &pb, &w.l).is_ok(),
                "ring isomorphism witness",
            );
            witnesses += 1;
        }
    }

    for p in fixtures::all() {
        let h = build_presentation(p).hilbert_function();
        out.check(
            h.iter().sum::<usize>() == p.num_facets(),
            "graded dimensions",
        );
    }
    out.detail = format!(
        "Smith form, NF, mbn additivity, product degree, {witnesses} witnesses, graded dimensions"
    );
    out
}

fn families() -> Outcome {
    let mut out = Outcome::new();
    let step = |d: usize, base: usize| 3 * (d - base) / 2;
    let mut cases: Vec<(String, SmoothFanoPolytope, i64)> = Vec::new();
    for d in [3, 5] {
        cases.push((format!("Y1^{d}"), y_family(1, d), 1 + step(d, 1) as i64));
        cases.push((format!("Y2^{d}"), y_family(2, d), -1 + step(d, 1) as i64));
        for (k, c) in [(1, 3), (2, 1), (3, 2), (4, 2)] {
            cases.push((format!("Z{k}^{d}"), z_family(k, d), c + step(d, 3) as i64));
        }
    }
    cases.push(("Z5^5".into(), z_family(5, 5), 1 + step(5, 3) as i64));
    for d in [4, 6] {
        // W7 and W8 are diffeomorphic to W5 and W6.
        for (k, c) in [
            (1, 5),
            (2, 4),
            (3, 2),
            (4, 3),
            (5, 3),
            (6, 2),
            (7, 3),
            (8, 2),
        ] {
            cases.push((format!("W{k}^{d}"), w_family(k, d), c + step(d, 4) as i64));
        }
    }
    cases.push(("W9^6".into(), w_family(9, 6), -2 + step(6, 4) as i64));
    let mut shown = Vec::new();
    for (name, p, want) in &cases {
        let got = mbn_for(&build_presentation(p), 2).exact();
        if got.map(|g| g as i64) != Some(*want) {
            out.mismatches.push(name.clone());
            let got = got.map_or("no exact value".to_string(), |g| g.to_string());
            shown.push(format!("{name} printed {want}, computed {got}"));
        }
    }

    let sve = [
        ("Y2", y3(2), Some(4)),
        ("Z1", z3(1), None),
        ("Z2", z3(2), Some(3)),
        ("Z3", z3(3), Some(3)),
        ("W1", w4(1), None),
        ("W2", w4(2), None),
        ("W3", w4(3), Some(3)),
        ("W4", w4(4), Some(5)),
        ("W5", w4(5), Some(3)),
        ("W6", w4(6), Some(4)),
    ];
    for (name, p, want) in &sve {
        let r = sve_integer_bounded(&build_presentation(p), 2, 3);
        let got = if r.is_infinite() { None } else { r.count() };
        out.check(got == *want, format!("s.v.e. of {name}"));
    }
    out.detail = format!(
        "{} family mbn values at d in 3..=6 and {} base s.v.e. counts; {}",
        cases.len(),
        sve.len(),
        if shown.is_empty() {
            "all match".into()
        } else {
            shown.join("; ")
        }
    );
    out
}

fn main() -> ExitCode {
    let criteria: [(u8, &str, fn() -> Outcome); 8] = [
        (1, "Groebner goldens", groebner_goldens),
        (2, "parametric normal forms", parametric_nf),
        (3, "s.v.e. and mbn tables", kve_tables),
        (4, "classification", classification),
        (5, "degrees", degrees),
        (6, "ring isomorphisms", ring_isos),
        (7, "property suites", properties),
        (8, "family mbn formulas", families),
    ];
    let mut undocumented = 0;
    for (n, name, run) in criteria {
        let t = Instant::now();
        let out = run();
        let secs = t.elapsed().as_secs_f64();
        let known: BTreeSet<&str> = KNOWN
            .iter()
            .filter(|(c, _)| *c == n)
            .map(|(_, l)| *l)
            .collect();
        let found: BTreeSet<&str> = out.mismatches.iter().map(String::as_str).collect();
        let status = if found.is_empty() {
            "PASS"
        } else if found == known {
            "FAIL (documented misprints)"
        } else {
            undocumented += 1;
            "FAIL"
        };
        println!(
            "criterion {n} {status}: {name}: {} [{secs:.1}s]",
            out.detail
        );
        if status == "FAIL" {
            for m in found.difference(&known) {
                println!("    unexpected: {m}");
            }
            for m in known.difference(&found) {
                println!("    documented but not seen: {m}");
            }
        }
    }
    if undocumented == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
