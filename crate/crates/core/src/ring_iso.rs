//! Bounded search for graded isomorphisms between cohomology rings, and the
//! first Chern class and Pontryagin class checks.
//!
//! A map is an integer matrix `L`: row `i` is the image of generator `i` of
//! the source, written in the generators of the target. So `(x, y) -> (x, x - y)`
//! is `[[1, 0], [1, -1]]`.

use num_bigint::BigInt;
use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;

use crate::cohomology::{
    chern_c1, degree_anticanonical, pontryagin_total, CohomologyError, CohomologyPresentation,
};
use crate::lattice::IntMatrix;
use crate::poly::{buchberger, Monomial, Poly, VarOrder, Q};
use crate::polytope::SmoothFanoPolytope;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RingIsoError {
    #[error("generator counts differ ({0} vs {1})")]
    GeneratorCount(usize, usize),
    #[error("bound must be at least 1")]
    ZeroBound,
    #[error("matrix is {0}x{1}, expected {2}x{2}")]
    Shape(usize, usize, usize),
    #[error("matrix is not invertible over Z")]
    NotUnimodular,
    #[error("generator {0} of the source does not map into the target ideal")]
    Forward(String),
    #[error("generator {0} of the target does not pull back into the source ideal")]
    Backward(String),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RingIsoWitness {
    pub l: IntMatrix,
    pub c1_preserving: bool,
    pub pontryagin_preserving: bool,
}

impl RingIsoWitness {
    /// Verify `l` and fill in both flags. The flags need polytope data on
    /// both sides; without it they are `false`.
    pub fn new(
        a: &CohomologyPresentation,
        b: &CohomologyPresentation,
        l: IntMatrix,
    ) -> Result<Self, RingIsoError> {
        verify_ring_iso(a, b, &l)?;
        let c1_preserving =
            a.origin().is_some() && b.origin().is_some() && c1_maps(a, b, &l, false);
        let pontryagin_preserving = pontryagin_maps(a, b, &l).unwrap_or(false);
        Ok(RingIsoWitness {
            l,
            c1_preserving,
            pontryagin_preserving,
        })
    }

    /// Images of the source generators as strings in the target names.
    pub fn display(&self, target_names: &[String]) -> Vec<String> {
        images(&self.l)
            .iter()
            .map(|p| p.display(target_names))
            .collect()
    }
}

/// Row `i` of `l` as a linear form.
fn images(l: &IntMatrix) -> Vec<Poly<BigInt>> {
    (0..l.rows()).map(|i| Poly::linear(&l.row(i))).collect()
}

fn apply(l: &IntMatrix, f: &Poly<BigInt>) -> Poly<BigInt> {
    f.substitute(&images(l))
}

/// Independent check: `|det L| = 1`, `L(I_A) ⊆ I_B` and `L^-1(I_B) ⊆ I_A`,
/// with freshly computed bases.
pub fn verify_ring_iso(
    a: &CohomologyPresentation,
    b: &CohomologyPresentation,
    l: &IntMatrix,
) -> Result<(), RingIsoError> {
    let n = a.nvars();
    if b.nvars() != n {
        return Err(RingIsoError::GeneratorCount(n, b.nvars()));
    }
    if l.rows() != n || l.cols() != n {
        return Err(RingIsoError::Shape(l.rows(), l.cols(), n));
    }
    let inv = l.inverse_unimodular().ok_or(RingIsoError::NotUnimodular)?;
    let order = VarOrder::natural(n);
    let gb_of = |p: &CohomologyPresentation| {
        let gens: Vec<Poly<Q>> = p.ideal().iter().map(Poly::to_field::<Q>).collect();
        buchberger(&gens, &order)
    };
    let (gb_a, gb_b) = (gb_of(a), gb_of(b));
    for g in a.ideal() {
        if !gb_b.contains(&apply(l, g).to_field::<Q>()) {
            return Err(RingIsoError::Forward(g.display(a.names())));
        }
    }
    for g in b.ideal() {
        if !gb_a.contains(&apply(&inv, g).to_field::<Q>()) {
            return Err(RingIsoError::Backward(g.display(b.names())));
        }
    }
    Ok(())
}

fn c1_maps(
    a: &CohomologyPresentation,
    b: &CohomologyPresentation,
    l: &IntMatrix,
    up_to_sign: bool,
) -> bool {
    let image = apply(l, &chern_c1(a));
    let target = chern_c1(b);
    image == target || (up_to_sign && image == target.neg())
}

/// `L(c_1(A)) = c_1(B)` exactly.
pub fn check_c1_preserving(
    w: &RingIsoWitness,
    a: &CohomologyPresentation,
    b: &CohomologyPresentation,
) -> bool {
    c1_maps(a, b, &w.l, false)
}

/// `L(c_1(A)) = ±c_1(B)`.
pub fn check_c1_preserving_up_to_sign(
    w: &RingIsoWitness,
    a: &CohomologyPresentation,
    b: &CohomologyPresentation,
) -> bool {
    c1_maps(a, b, &w.l, true)
}

fn pontryagin_maps(
    a: &CohomologyPresentation,
    b: &CohomologyPresentation,
    l: &IntMatrix,
) -> Result<bool, RingIsoError> {
    let pa = pontryagin_total(a)?;
    let pb = pontryagin_total(b)?;
    if pa.polys.len() != pb.polys.len() {
        return Ok(false);
    }
    let gb = b.gb::<Q>();
    Ok(pa.polys.iter().zip(&pb.polys).all(|(x, y)| {
        gb.normal_form(&apply(l, x).to_field::<Q>()) == gb.normal_form(&y.to_field::<Q>())
    }))
}

/// `NF(L(p_k(A))) = NF(p_k(B))` for every `k`.
pub fn check_pontryagin_preserving(
    w: &RingIsoWitness,
    a: &CohomologyPresentation,
    b: &CohomologyPresentation,
) -> Result<bool, RingIsoError> {
    pontryagin_maps(a, b, &w.l)
}

/// Smallest `k` with `f^k = 0`, up to `limit`.
fn nilpotency(pres: &CohomologyPresentation, f: &Poly<BigInt>, limit: u32) -> u32 {
    let gb = pres.gb::<Q>();
    let f = f.to_field::<Q>();
    let mut power = f.clone();
    for k in 1..=limit {
        if gb.normal_form(&power).is_zero() {
            return k;
        }
        power = power.mul(&f);
    }
    limit + 1
}

fn box_vectors(n: usize, bound: i64) -> Vec<Vec<i64>> {
    let side = (2 * bound + 1) as usize;
    (0..side.pow(n as u32))
        .map(|mut idx| {
            (0..n)
                .map(|_| {
                    let v = (idx % side) as i64 - bound;
                    idx /= side;
                    v
                })
                .collect()
        })
        .filter(|v: &Vec<i64>| v.iter().fold(0i64, |g, &x| num_integer::gcd(g, x)) == 1)
        .collect()
}

fn linear(v: &[i64]) -> Poly<BigInt> {
    let c: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
    Poly::linear(&c)
}

struct MapSearch<'a> {
    b: &'a CohomologyPresentation,
    /// Candidate images per source generator.
    candidates: Vec<Vec<Vec<i64>>>,
    /// Source generators to test once generator `i` is placed.
    due: Vec<Vec<&'a Poly<BigInt>>>,
    /// Pairs `(j, zero)` with `j < i`: whether `x_j x_i = 0` in the source.
    pair_zero: Vec<Vec<(usize, bool)>>,
}

impl MapSearch<'_> {
    fn vanishes(&self, f: &Poly<BigInt>) -> bool {
        self.b.gb::<Q>().normal_form(&f.to_field::<Q>()).is_zero()
    }

    fn run(&self, rows: &mut Vec<Vec<i64>>, out: &mut Vec<IntMatrix>) {
        let i = rows.len();
        let n = self.candidates.len();
        if i == n {
            let m = IntMatrix::from_rows(
                &rows
                    .iter()
                    .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                    .collect::<Vec<_>>(),
            );
            if m.det().abs() == BigInt::from(1) {
                out.push(m);
            }
            return;
        }
        for cand in &self.candidates[i] {
            let f = linear(cand);
            let pairs_ok = self.pair_zero[i]
                .iter()
                .all(|&(j, zero)| self.vanishes(&linear(&rows[j]).mul(&f)) == zero);
            if !pairs_ok {
                continue;
            }
            rows.push(cand.clone());
            let imgs: Vec<Poly<BigInt>> = (0..n)
                .map(|k| {
                    if k < rows.len() {
                        linear(&rows[k])
                    } else {
                        Poly::zero()
                    }
                })
                .collect();
            if self.due[i]
                .iter()
                .all(|g| self.vanishes(&g.substitute(&imgs)))
            {
                self.run(rows, out);
            }
            rows.pop();
        }
    }
}

/// Every `L` with entries in `[-bound, bound]` and `|det L| = 1` that maps
/// each generator of `I_A` into `I_B`. Such an `L` is a ring isomorphism,
/// since both quotients have the same finite graded dimensions.
pub fn find_ring_isos_bounded(
    a: &CohomologyPresentation,
    b: &CohomologyPresentation,
    bound: u32,
) -> Result<Vec<RingIsoWitness>, RingIsoError> {
    let n = a.nvars();
    if b.nvars() != n {
        return Err(RingIsoError::GeneratorCount(n, b.nvars()));
    }
    if bound == 0 {
        return Err(RingIsoError::ZeroBound);
    }
    let limit = a.hilbert_function().len() as u32 + 1;
    let boxed = box_vectors(n, i64::from(bound));
    let orders_b: Vec<u32> = boxed
        .iter()
        .map(|v| nilpotency(b, &linear(v), limit))
        .collect();
    let candidates: Vec<Vec<Vec<i64>>> = (0..n)
        .map(|i| {
            let k = nilpotency(a, &Poly::var(i), limit);
            boxed
                .iter()
                .zip(&orders_b)
                .filter(|(_, &o)| o == k)
                .map(|(v, _)| v.clone())
                .collect()
        })
        .collect();
    let mut due: Vec<Vec<&Poly<BigInt>>> = vec![Vec::new(); n];
    for g in a.ideal() {
        let last = (0..n)
            .filter(|&i| g.terms().iter().any(|(m, _)| m.exponent(i) > 0))
            .max()
            .unwrap_or(0);
        due[last].push(g);
    }
    let gb_a = a.gb::<Q>();
    let pair_zero: Vec<Vec<(usize, bool)>> = (0..n)
        .map(|i| {
            (0..i)
                .map(|j| {
                    (
                        j,
                        gb_a.normal_form(&Poly::term(
                            Monomial::var(i).mul(&Monomial::var(j)),
                            Q::from_integer(1.into()),
                        ))
                        .is_zero(),
                    )
                })
                .collect()
        })
        .collect();
    let search = MapSearch {
        b,
        candidates,
        due,
        pair_zero,
    };
    let first = search.candidates.first().cloned().unwrap_or_default();
    let found: Vec<Vec<IntMatrix>> = first
        .par_iter()
        .map(|c| {
            let mut out = Vec::new();
            let mut rows = vec![c.clone()];
            let imgs: Vec<Poly<BigInt>> = (0..n)
                .map(|k| if k == 0 { linear(c) } else { Poly::zero() })
                .collect();
            if search.due[0]
                .iter()
                .all(|g| search.vanishes(&g.substitute(&imgs)))
            {
                search.run(&mut rows, &mut out);
            }
            out
        })
        .collect();
    found
        .into_iter()
        .flatten()
        .map(|l| RingIsoWitness::new(a, b, l))
        .collect()
}

/// Whether the anticanonical degrees agree. A c1-preserving ring
/// isomorphism needs equal degrees.
pub fn degree_gate(
    p: &SmoothFanoPolytope,
    q: &SmoothFanoPolytope,
) -> Result<bool, CohomologyError> {
    Ok(degree_anticanonical(p)? == degree_anticanonical(q)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::build_presentation;
    use crate::fixtures::d4;

    #[test]
    fn seventy_to_141() {
        let a = build_presentation(d4(70));
        let b = build_presentation(d4(141));
        let isos = find_ring_isos_bounded(&a, &b, 2).unwrap();
        let shown: Vec<Vec<String>> = isos.iter().map(|w| w.display(b.names())).collect();
        assert_eq!(shown.len(), 2, "{shown:?}");
        assert!(shown.contains(&vec!["x".to_string(), "-y + x".to_string()]));
        assert!(shown.contains(&vec!["-x".to_string(), "y - x".to_string()]));
        assert!(isos
            .iter()
            .all(|w| !w.c1_preserving && !check_c1_preserving(w, &a, &b)));
    }

    #[test]
    fn identity_preserves_everything() {
        let a = build_presentation(d4(50));
        let w = RingIsoWitness::new(&a, &a, IntMatrix::identity(4)).unwrap();
        assert!(w.c1_preserving && w.pontryagin_preserving);
        assert!(find_ring_isos_bounded(&a, &a, 1)
            .unwrap()
            .iter()
            .any(|w| w.l == IntMatrix::identity(4)));
    }

    #[test]
    fn fifty_to_57() {
        let a = build_presentation(d4(50));
        let b = build_presentation(d4(57));
        let l = IntMatrix::from_i64(&[
            &[-1, 0, 0, 2],
            &[0, -1, 0, 1],
            &[0, 0, 0, 1],
            &[0, 0, -1, 0],
        ]);
        let w = RingIsoWitness::new(&a, &b, l.clone()).unwrap();
        assert!(!w.c1_preserving);
        assert!(!check_c1_preserving_up_to_sign(&w, &a, &b));
        assert!(w.pontryagin_preserving);
        let mut bad = l;
        bad.set(0, 0, BigInt::from(1));
        assert!(RingIsoWitness::new(&a, &b, bad).is_err());
    }

    #[test]
    fn search_finds_the_fifty_map() {
        let a = build_presentation(d4(50));
        let b = build_presentation(d4(57));
        let l = IntMatrix::from_i64(&[
            &[-1, 0, 0, 2],
            &[0, -1, 0, 1],
            &[0, 0, 0, 1],
            &[0, 0, -1, 0],
        ]);
        assert!(find_ring_isos_bounded(&a, &b, 2)
            .unwrap()
            .iter()
            .any(|w| w.l == l));
    }

    #[test]
    fn closed_under_automorphisms() {
        let a = build_presentation(d4(70));
        let b = build_presentation(d4(141));
        let isos: Vec<IntMatrix> = find_ring_isos_bounded(&a, &b, 2)
            .unwrap()
            .into_iter()
            .map(|w| w.l)
            .collect();
        let auts_a = find_ring_isos_bounded(&a, &a, 2).unwrap();
        let auts_b = find_ring_isos_bounded(&b, &b, 2).unwrap();
        // Rows are images, so composing "first s then t" is the product s * t.
        for s in &auts_a {
            for l in &isos {
                assert!(isos.contains(&s.l.mul(l)));
            }
        }
        for t in &auts_b {
            for l in &isos {
                assert!(isos.contains(&l.mul(&t.l)));
            }
        }
    }

    #[test]
    fn cohomology_equal_three_folds() {
        use crate::fixtures::d3;
        for (i, j) in [(11, 18), (10, 13)] {
            let a = build_presentation(d3(i));
            let b = build_presentation(d3(j));
            assert!(
                !find_ring_isos_bounded(&a, &b, 2).unwrap().is_empty(),
                "{i} vs {j}"
            );
        }
    }

    #[test]
    fn mismatched_counts() {
        let a = build_presentation(d4(70));
        let b = build_presentation(d4(50));
        assert_eq!(
            find_ring_isos_bounded(&a, &b, 1),
            Err(RingIsoError::GeneratorCount(2, 4))
        );
    }

    #[test]
    fn gates() {
        assert!(!degree_gate(d4(28), d4(32)).unwrap());
        assert!(degree_gate(d4(70), d4(141)).unwrap());
    }
}
