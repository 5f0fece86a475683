//! Smooth Fano polytopes: validation, facet and face combinatorics, duals,
//! normalized volumes and direct sums.
//!
//! Vertex indices are 0-based in the API and 1-based wherever they are
//! shown to a user (see [`SmoothFanoPolytope::minimal_nonfaces_display`]).

mod families;
mod parse;
mod volume;

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::lattice::{is_primitive, IntMatrix, LatticeVector};

pub use families::*;
pub use parse::{parse_polytopes, parse_records, write_polytopes, ParseError, RawRecord};
pub use volume::{
    dual_polytope, dual_volume_from_vertices, normalized_volume, RationalPolytope, VolumeError,
};

/// Largest vertex count supported (vertex sets are `u64` bitmasks).
pub const MAX_VERTICES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolytopeError {
    #[error("polytope{} failed validation: {}", id_suffix(*.id), .report.failures().join("; "))]
    Invalid {
        id: Option<u32>,
        report: ValidationReport,
    },
    #[error("{0} vertices exceed the supported maximum")]
    TooManyVertices(usize),
}

fn id_suffix(id: Option<u32>) -> String {
    id.map_or(String::new(), |i| format!(" {i}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Dimension,
    PrimitiveVertices,
    DistinctVertices,
    FullDimensional,
    OriginInterior,
    Simplicial,
    UnimodularFacets,
}

impl Check {
    pub const ALL: [Check; 7] = [
        Check::Dimension,
        Check::PrimitiveVertices,
        Check::DistinctVertices,
        Check::FullDimensional,
        Check::OriginInterior,
        Check::Simplicial,
        Check::UnimodularFacets,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub check: Check,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Pass/fail per smoothness and Fano condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn passed(&self, check: Check) -> bool {
        self.checks
            .iter()
            .find(|c| c.check == check)
            .is_none_or(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| match &c.detail {
                Some(d) => format!("{:?}: {d}", c.check),
                None => format!("{:?}", c.check),
            })
            .collect()
    }
}

/// A supporting hyperplane `<a, x> = b` through `d` affinely independent
/// vertices, oriented so every vertex has `<a, x> <= b`. Only `b` is kept.
struct Hyperplane {
    subset: Vec<usize>,
    offset: BigInt,
    /// Vertices on the hyperplane, including `subset`.
    on: Vec<usize>,
}

fn affine_normal(points: &[&LatticeVector]) -> Option<(Vec<BigInt>, BigInt)> {
    // Kernel of the d x (d+1) matrix [v_i | -1] by cofactors.
    let d = points.len();
    let full: Vec<Vec<BigInt>> = points
        .iter()
        .map(|p| {
            let mut r = (*p).clone();
            r.push(-BigInt::one());
            r
        })
        .collect();
    let mut comps = Vec::with_capacity(d + 1);
    for skip in 0..=d {
        let rows: Vec<LatticeVector> = full
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != skip)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let det = if d == 0 {
            BigInt::one()
        } else {
            IntMatrix::from_rows(&rows).det()
        };
        comps.push(if skip % 2 == 0 { det } else { -det });
    }
    if comps.iter().all(Zero::is_zero) {
        return None;
    }
    let offset = comps.pop().unwrap();
    Some((comps, offset))
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn supporting_hyperplanes(vertices: &[LatticeVector], dim: usize) -> Vec<Hyperplane> {
    let m = vertices.len();
    let mut out = Vec::new();
    for subset in combinations(m, dim) {
        let pts: Vec<&LatticeVector> = subset.iter().map(|&i| &vertices[i]).collect();
        let Some((normal, mut offset)) = affine_normal(&pts) else {
            continue;
        };
        let vals: Vec<BigInt> = vertices.iter().map(|v| dot(&normal, v) - &offset).collect();
        let pos = vals.iter().any(Signed::is_positive);
        let neg = vals.iter().any(Signed::is_negative);
        if pos && neg {
            continue;
        }
        if pos {
            offset = -offset;
        }
        let on = (0..m).filter(|&k| vals[k].is_zero()).collect();
        out.push(Hyperplane { subset, offset, on });
    }
    out
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn rank(rows: &[LatticeVector]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let (s, _, _) = crate::lattice::smith_normal_form(&IntMatrix::from_rows(rows));
    (0..s.rows().min(s.cols()))
        .filter(|&i| !s.get(i, i).is_zero())
        .count()
}

/// Run every check and return the facets found (sorted 0-based index sets)
/// alongside the report.
fn validate_with_facets(
    dim: usize,
    vertices: &[LatticeVector],
) -> (ValidationReport, Vec<Vec<usize>>) {
    let mut checks = Vec::new();
    let mut push = |check: Check, passed: bool, detail: Option<String>| {
        checks.push(CheckResult {
            check,
            passed,
            detail,
        });
    };

    let bad_len: Vec<usize> = (0..vertices.len())
        .filter(|&i| vertices[i].len() != dim)
        .collect();
    let dim_ok = dim >= 1 && bad_len.is_empty();
    push(
        Check::Dimension,
        dim_ok,
        (!dim_ok).then(|| {
            format!(
                "vertices {} do not have {dim} coordinates",
                one_based(&bad_len)
            )
        }),
    );
    if !dim_ok {
        return (ValidationReport { checks }, Vec::new());
    }

    let non_prim: Vec<usize> = (0..vertices.len())
        .filter(|&i| !is_primitive(&vertices[i]))
        .collect();
    push(
        Check::PrimitiveVertices,
        non_prim.is_empty(),
        (!non_prim.is_empty())
            .then(|| format!("vertices {} are not primitive", one_based(&non_prim))),
    );

    let mut seen = HashSet::new();
    let dups: Vec<usize> = (0..vertices.len())
        .filter(|&i| !seen.insert(&vertices[i]))
        .collect();
    push(
        Check::DistinctVertices,
        dups.is_empty(),
        (!dups.is_empty()).then(|| format!("vertices {} repeat earlier ones", one_based(&dups))),
    );

    let full = rank(vertices) == dim && vertices.len() > dim;
    push(
        Check::FullDimensional,
        full,
        (!full).then(|| "vertices do not span R^d".to_string()),
    );
    if !full {
        return (ValidationReport { checks }, Vec::new());
    }

    let planes = supporting_hyperplanes(vertices, dim);
    let mut bad_origin = Vec::new();
    let mut non_simplicial = Vec::new();
    let mut facets: Vec<Vec<usize>> = Vec::new();
    let mut bad_det = Vec::new();
    for h in &planes {
        if !h.offset.is_positive() {
            bad_origin.push(h.subset.clone());
        }
        if h.on.len() > dim {
            if !non_simplicial.contains(&h.on) {
                non_simplicial.push(h.on.clone());
            }
            continue;
        }
        let rows: Vec<LatticeVector> = h.subset.iter().map(|&i| vertices[i].clone()).collect();
        if !IntMatrix::from_rows(&rows).det().abs().is_one() {
            bad_det.push(h.subset.clone());
        }
        facets.push(h.subset.clone());
    }
    push(
        Check::OriginInterior,
        bad_origin.is_empty(),
        bad_origin.first().map(|s| {
            format!(
                "origin is not strictly inside the facet through {}",
                one_based(s)
            )
        }),
    );
    push(
        Check::Simplicial,
        non_simplicial.is_empty(),
        non_simplicial
            .first()
            .map(|s| format!("vertices {} lie on one facet", one_based(s))),
    );
    push(
        Check::UnimodularFacets,
        bad_det.is_empty(),
        bad_det
            .first()
            .map(|s| format!("facet {} is not a Z-basis", one_based(s))),
    );
    (ValidationReport { checks }, facets)
}

fn one_based(idx: &[usize]) -> String {
    let parts: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// Check primitivity, interior origin, simpliciality and facet determinants.
pub fn validate_smooth_fano(dim: usize, vertices: &[LatticeVector]) -> ValidationReport {
    validate_with_facets(dim, vertices).0
}

fn mask(set: &[usize]) -> u64 {
    set.iter().fold(0u64, |m, &i| m | (1u64 << i))
}

fn unmask(mut m: u64) -> Vec<usize> {
    let mut out = Vec::new();
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        out.push(i);
        m &= m - 1;
    }
    out
}

/// A validated smooth Fano polytope together with its face data.
#[derive(Clone, PartialEq, Eq)]
pub struct SmoothFanoPolytope {
    id: Option<u32>,
    dim: usize,
    vertices: Vec<LatticeVector>,
    facets: Vec<Vec<usize>>,
    facet_masks: Vec<u64>,
    minimal_nonfaces: Vec<Vec<usize>>,
    f_vector: Vec<usize>,
}

impl SmoothFanoPolytope {
    pub fn new(
        id: Option<u32>,
        dim: usize,
        vertices: Vec<LatticeVector>,
    ) -> Result<Self, PolytopeError> {
        if vertices.len() > MAX_VERTICES {
            return Err(PolytopeError::TooManyVertices(vertices.len()));
        }
        let (report, facets) = validate_with_facets(dim, &vertices);
        if !report.is_valid() {
            return Err(PolytopeError::Invalid { id, report });
        }
        Ok(Self::from_facets(id, dim, vertices, facets))
    }

    /// Face data from a known facet list.
    fn from_facets(
        id: Option<u32>,
        dim: usize,
        vertices: Vec<LatticeVector>,
        mut facets: Vec<Vec<usize>>,
    ) -> Self {
        facets.sort();
        let facet_masks: Vec<u64> = facets.iter().map(|f| mask(f)).collect();

        let mut faces: HashSet<u64> = HashSet::new();
        for &fm in &facet_masks {
            let mut sub = fm;
            loop {
                faces.insert(sub);
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & fm;
            }
        }
        let mut f_vector = vec![0usize; dim];
        for &f in &faces {
            let k = f.count_ones() as usize;
            if k >= 1 {
                f_vector[k - 1] += 1;
            }
        }
        let m = vertices.len();
        let mut mnf: Vec<Vec<usize>> = Vec::new();
        for &f in &faces {
            let top = if f == 0 {
                0
            } else {
                64 - f.leading_zeros() as usize
            };
            for j in top..m {
                let s = f | (1u64 << j);
                if faces.contains(&s) {
                    continue;
                }
                if unmask(s)
                    .iter()
                    .all(|&i| faces.contains(&(s & !(1u64 << i))))
                {
                    mnf.push(unmask(s));
                }
            }
        }
        mnf.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));

        SmoothFanoPolytope {
            id,
            dim,
            vertices,
            facets,
            facet_masks,
            minimal_nonfaces: mnf,
            f_vector,
        }
    }

    pub fn from_i64(id: Option<u32>, vertices: &[&[i64]]) -> Result<Self, PolytopeError> {
        let dim = vertices.first().map_or(0, |v| v.len());
        Self::new(
            id,
            dim,
            vertices.iter().map(|v| crate::lattice::lv(v)).collect(),
        )
    }

    pub fn id(&self) -> Option<u32> {
        self.id
    }

    pub fn with_id(mut self, id: Option<u32>) -> Self {
        self.id = id;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[LatticeVector] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &LatticeVector {
        &self.vertices[i]
    }

    /// Facets as sorted 0-based vertex index sets, in lexicographic order.
    pub fn facets(&self) -> &[Vec<usize>] {
        &self.facets
    }

    pub fn facet_masks(&self) -> &[u64] {
        &self.facet_masks
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    pub fn is_face(&self, set: &[usize]) -> bool {
        let s = mask(set);
        self.facet_masks.iter().any(|&f| f & s == s)
    }

    /// Minimal nonfaces, 0-based, ordered by size then lexicographically.
    pub fn minimal_nonfaces(&self) -> &[Vec<usize>] {
        &self.minimal_nonfaces
    }

    /// Minimal nonfaces written as 1-based digit strings, sorted as strings
    /// (`["1235", "37", "46"]`). Uses commas between indices above 9.
    pub fn minimal_nonfaces_display(&self) -> Vec<String> {
        let big = self.num_vertices() > 9;
        let mut out: Vec<String> = self
            .minimal_nonfaces
            .iter()
            .map(|s| {
                let parts: Vec<String> = s.iter().map(|i| (i + 1).to_string()).collect();
                parts.join(if big { "," } else { "" })
            })
            .collect();
        out.sort();
        out
    }

    /// Number of faces with `k + 1` vertices for `k = 0..d`.
    pub fn f_vector(&self) -> &[usize] {
        &self.f_vector
    }

    /// Number of facets containing each vertex.
    pub fn vertex_degrees(&self) -> Vec<usize> {
        (0..self.num_vertices())
            .map(|i| {
                self.facet_masks
                    .iter()
                    .filter(|&&f| f & (1 << i) != 0)
                    .count()
            })
            .collect()
    }

    /// Picard number `m - d`.
    pub fn picard_number(&self) -> usize {
        self.num_vertices() - self.dim
    }

    /// `conv(P x 0 ∪ 0 x Q)` with the vertices of `P` first.
    pub fn direct_sum(
        &self,
        other: &SmoothFanoPolytope,
    ) -> Result<SmoothFanoPolytope, PolytopeError> {
        let (d, e) = (self.dim, other.dim);
        let mut verts = Vec::with_capacity(self.num_vertices() + other.num_vertices());
        for v in &self.vertices {
            let mut w = v.clone();
            w.extend(std::iter::repeat_n(BigInt::zero(), e));
            verts.push(w);
        }
        for v in &other.vertices {
            let mut w = vec![BigInt::zero(); d];
            w.extend(v.iter().cloned());
            verts.push(w);
        }
        if verts.len() > MAX_VERTICES {
            return Err(PolytopeError::TooManyVertices(verts.len()));
        }
        // Facets of a free sum are the joins of facets of the summands.
        let m = self.num_vertices();
        let facets = self
            .facets
            .iter()
            .flat_map(|f| {
                other
                    .facets
                    .iter()
                    .map(move |g| f.iter().copied().chain(g.iter().map(|&j| j + m)).collect())
            })
            .collect();
        Ok(SmoothFanoPolytope::from_facets(None, d + e, verts, facets))
    }

    /// Apply `x -> U x` to every vertex.
    pub fn transform(&self, u: &IntMatrix) -> Result<SmoothFanoPolytope, PolytopeError> {
        let verts = self.vertices.iter().map(|v| u.mul_vec(v)).collect();
        SmoothFanoPolytope::new(self.id, self.dim, verts)
    }

    /// Reorder vertices: new vertex `k` is old vertex `order[k]`.
    pub fn reorder(&self, order: &[usize]) -> Result<SmoothFanoPolytope, PolytopeError> {
        let verts = order.iter().map(|&i| self.vertices[i].clone()).collect();
        SmoothFanoPolytope::new(self.id, self.dim, verts)
    }
}

/// `P ⊕ Q`.
pub fn direct_sum(
    p: &SmoothFanoPolytope,
    q: &SmoothFanoPolytope,
) -> Result<SmoothFanoPolytope, PolytopeError> {
    p.direct_sum(q)
}

/// Facets of a validated polytope.
pub fn enumerate_facets(p: &SmoothFanoPolytope) -> Vec<Vec<usize>> {
    p.facets().to_vec()
}

/// Minimal nonfaces of a validated polytope (0-based).
pub fn minimal_nonfaces(p: &SmoothFanoPolytope) -> Vec<Vec<usize>> {
    p.minimal_nonfaces().to_vec()
}

impl fmt::Debug for SmoothFanoPolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verts: Vec<String> = self
            .vertices
            .iter()
            .map(|v| {
                format!(
                    "({})",
                    v.iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join(",")
                )
            })
            .collect();
        write!(
            f,
            "SmoothFanoPolytope {{ id: {:?}, dim: {}, vertices: [{}] }}",
            self.id,
            self.dim,
            verts.join(", ")
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::lv;

    fn id12() -> SmoothFanoPolytope {
        SmoothFanoPolytope::from_i64(
            Some(12),
            &[
                &[1, 0, 0],
                &[0, 1, 0],
                &[0, 0, 1],
                &[-1, 0, 1],
                &[0, -1, 0],
                &[0, 1, -1],
            ],
        )
        .unwrap()
    }

    #[test]
    fn octahedral_complex() {
        let p = id12();
        assert_eq!(p.num_facets(), 8);
        assert_eq!(p.minimal_nonfaces_display(), vec!["14", "25", "36"]);
        assert_eq!(p.f_vector(), &[6, 12, 8]);
    }

    #[test]
    fn id24_nonfaces() {
        let p = SmoothFanoPolytope::from_i64(
            Some(24),
            &[
                &[1, 0, 0, 0],
                &[0, 1, 0, 0],
                &[0, 0, 1, 0],
                &[0, 0, 0, 1],
                &[-1, -1, -1, 3],
                &[0, 0, 1, -1],
                &[0, 0, 0, -1],
            ],
        )
        .unwrap();
        assert_eq!(
            p.minimal_nonfaces_display(),
            vec!["1235", "1256", "37", "46", "47"]
        );
        assert_eq!(p.num_facets(), 11);
    }

    #[test]
    fn small_polygons() {
        let tri = SmoothFanoPolytope::from_i64(None, &[&[1, 0], &[0, 1], &[-1, -1]]).unwrap();
        assert_eq!(tri.facets(), &[vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(tri.minimal_nonfaces(), &[vec![0, 1, 2]]);
        let hex = p6();
        assert_eq!(hex.num_facets(), 6);
        for f in hex.facets() {
            let (a, b) = (f[0], f[1]);
            let sum: Vec<BigInt> = hex
                .vertex(a)
                .iter()
                .zip(hex.vertex(b))
                .map(|(x, y)| x + y)
                .collect();
            // Adjacent hexagon vertices sum to a vector of norm 1 or 2, never 0.
            assert!(sum.iter().any(|x| !x.is_zero()));
        }
    }

    #[test]
    fn validation_failures() {
        let r = validate_smooth_fano(2, &[lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, -2])]);
        assert!(!r.passed(Check::UnimodularFacets));
        assert!(r.passed(Check::OriginInterior));
        let r = validate_smooth_fano(2, &[lv(&[1, 0]), lv(&[2, 1]), lv(&[1, 1])]);
        assert!(!r.passed(Check::OriginInterior));
        let r = validate_smooth_fano(2, &[lv(&[2, 0]), lv(&[0, 1]), lv(&[-1, -1])]);
        assert!(!r.passed(Check::PrimitiveVertices));
        let r = validate_smooth_fano(
            2,
            &[
                lv(&[1, 0]),
                lv(&[0, 1]),
                lv(&[-1, 0]),
                lv(&[0, -1]),
                lv(&[1, 1]),
            ],
        );
        assert!(r.passed(Check::Simplicial));
        let r = validate_smooth_fano(2, &[lv(&[1, 0]), lv(&[1, 1]), lv(&[1, -1]), lv(&[-1, 0])]);
        assert!(!r.passed(Check::Simplicial));
    }

    #[test]
    fn sums() {
        let sq = segment().direct_sum(&segment()).unwrap();
        assert_eq!((sq.num_vertices(), sq.num_facets()), (4, 4));
        let s = p5().direct_sum(&p6()).unwrap();
        assert_eq!((s.num_vertices(), s.num_facets(), s.dim()), (11, 30, 4));
        let s = p6().direct_sum(&p6()).unwrap();
        assert_eq!((s.num_vertices(), s.num_facets()), (12, 36));
    }

    #[test]
    fn sum_facets_match_validation() {
        for (a, b) in [
            (p5(), p6()),
            (f1(), segment()),
            (crate::fixtures::d3(10).clone(), p6()),
        ] {
            let s = a.direct_sum(&b).unwrap();
            let fresh = SmoothFanoPolytope::new(None, s.dim(), s.vertices().to_vec()).unwrap();
            assert_eq!(s, fresh);
        }
    }
}
