//! Rational polytopes, polar duals and normalized volumes.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{supporting_hyperplanes, SmoothFanoPolytope};
use crate::lattice::IntMatrix;

type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VolumeError {
    #[error("points do not span a full-dimensional polytope")]
    Degenerate,
    #[error("origin is not in the interior")]
    OriginNotInterior,
    #[error("dual vertex {0:?} is not a lattice point; the polytope is not reflexive")]
    NotReflexive(Vec<String>),
    #[error("normalized volume {0} is not an integer")]
    NotIntegral(String),
    #[error("facet {0:?} is not a lattice basis")]
    SingularFacet(Vec<usize>),
}

/// A full-dimensional polytope with rational vertices and the origin in its
/// interior. Facets are vertex index sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPolytope {
    pub dim: usize,
    pub vertices: Vec<Vec<Q>>,
    pub facets: Vec<Vec<usize>>,
}

fn rank_q(rows: &[Vec<Q>]) -> usize {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &m[r][c];
            for j in c..cols {
                let t = &f * &m[r][j];
                m[i][j] -= t;
            }
        }
        r += 1;
    }
    r
}

fn det_q(mut m: Vec<Vec<Q>>) -> Q {
    let n = m.len();
    let mut det = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &m[c][c];
            for j in c..n {
                let t = &f * &m[c][j];
                m[i][j] -= t;
            }
        }
    }
    det
}

/// Solve `rows · a = (1, ..., 1)` for a square nonsingular system.
fn solve_ones(rows: &[Vec<Q>]) -> Option<Vec<Q>> {
    let n = rows.len();
    let mut m: Vec<Vec<Q>> = rows
        .iter()
        .map(|r| {
            let mut r = r.clone();
            r.push(Q::one());
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(p, c);
        let inv = m[c][c].recip();
        for j in c..=n {
            m[c][j] = &m[c][j] * &inv;
        }
        for i in 0..n {
            if i == c || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for j in c..=n {
                let t = &f * &m[c][j];
                m[i][j] -= t;
            }
        }
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

fn to_q(v: &[BigInt]) -> Vec<Q> {
    v.iter().map(|x| Q::from_integer(x.clone())).collect()
}

fn show(v: &[Q]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

impl RationalPolytope {
    /// Lattice polytope with the same vertices and facets as `p`.
    pub fn from_smooth(p: &SmoothFanoPolytope) -> Self {
        RationalPolytope {
            dim: p.dim(),
            vertices: p.vertices().iter().map(|v| to_q(v)).collect(),
            facets: p.facets().to_vec(),
        }
    }

    /// Convex hull of `points`, which must all be vertices. Facets are found
    /// by scanning every `dim`-subset.
    pub fn from_vertices(dim: usize, points: Vec<Vec<Q>>) -> Result<Self, VolumeError> {
        if points.iter().any(|p| p.len() != dim) || rank_q(&points) < dim {
            return Err(VolumeError::Degenerate);
        }
        let l = points
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let scaled: Vec<Vec<BigInt>> = points
            .iter()
            .map(|p| {
                p.iter()
                    .map(|x| (x * Q::from_integer(l.clone())).to_integer())
                    .collect()
            })
            .collect();
        let mut facets = Vec::new();
        let mut seen = HashSet::new();
        for h in supporting_hyperplanes(&scaled, dim) {
            if !h.offset.is_positive() {
                return Err(VolumeError::OriginNotInterior);
            }
            if seen.insert(h.on.clone()) {
                facets.push(h.on);
            }
        }
        facets.sort();
        Ok(RationalPolytope {
            dim,
            vertices: points,
            facets,
        })
    }

    /// `a` with `<a, v> = 1` on the facet.
    fn facet_normal(&self, facet: &[usize]) -> Vec<Q> {
        let mut basis: Vec<Vec<Q>> = Vec::with_capacity(self.dim);
        for &i in facet {
            let mut trial = basis.clone();
            trial.push(self.vertices[i].clone());
            if rank_q(&trial) == trial.len() {
                basis = trial;
                if basis.len() == self.dim {
                    break;
                }
            }
        }
        solve_ones(&basis).expect("facet spans a hyperplane off the origin")
    }

    /// Polar dual `{u : <u, v> >= -1 for every vertex v}`. Dual vertex `k`
    /// belongs to facet `k`; dual facet `i` belongs to vertex `i`.
    pub fn dual(&self) -> RationalPolytope {
        let vertices: Vec<Vec<Q>> = self
            .facets
            .iter()
            .map(|f| self.facet_normal(f).into_iter().map(|x| -x).collect())
            .collect();
        let facets = (0..self.vertices.len())
            .map(|i| {
                (0..self.facets.len())
                    .filter(|&k| self.facets[k].contains(&i))
                    .collect()
            })
            .collect();
        RationalPolytope {
            dim: self.dim,
            vertices,
            facets,
        }
    }

    pub fn is_lattice(&self) -> bool {
        self.vertices.iter().flatten().all(|x| x.is_integer())
    }

    /// Vertices rounded to integers, if they are all integral.
    pub fn lattice_vertices(&self) -> Option<Vec<Vec<BigInt>>> {
        self.is_lattice().then(|| {
            self.vertices
                .iter()
                .map(|v| v.iter().map(Q::to_integer).collect())
                .collect()
        })
    }

    fn affine_dim(&self, set: &[usize]) -> usize {
        if set.is_empty() {
            return 0;
        }
        let base = &self.vertices[set[0]];
        let diffs: Vec<Vec<Q>> = set[1..]
            .iter()
            .map(|&i| {
                self.vertices[i]
                    .iter()
                    .zip(base)
                    .map(|(a, b)| a - b)
                    .collect()
            })
            .collect();
        rank_q(&diffs)
    }

    /// Pulling triangulation of the face with vertex set `face` (sorted) and
    /// affine dimension `k`: cone from its first vertex over the faces of
    /// dimension `k - 1` that avoid it.
    fn triangulate_face(&self, face: &[usize], k: usize, out: &mut Vec<Vec<usize>>) {
        if k == 0 {
            out.push(vec![face[0]]);
            return;
        }
        let apex = face[0];
        let mut subfaces: Vec<Vec<usize>> = Vec::new();
        for g in &self.facets {
            let meet: Vec<usize> = face.iter().copied().filter(|i| g.contains(i)).collect();
            if meet.len() < k || meet.len() == face.len() || meet.contains(&apex) {
                continue;
            }
            if subfaces.contains(&meet) || self.affine_dim(&meet) != k - 1 {
                continue;
            }
            subfaces.push(meet);
        }
        for s in subfaces {
            let mut inner = Vec::new();
            self.triangulate_face(&s, k - 1, &mut inner);
            for mut simplex in inner {
                simplex.push(apex);
                out.push(simplex);
            }
        }
    }

    /// `d! · vol`, as an exact rational.
    pub fn normalized_volume_rational(&self) -> Result<Q, VolumeError> {
        if self.vertices.iter().any(|v| v.len() != self.dim) || rank_q(&self.vertices) < self.dim {
            return Err(VolumeError::Degenerate);
        }
        let mut total = Q::zero();
        for f in &self.facets {
            let mut simplices = Vec::new();
            self.triangulate_face(f, self.dim - 1, &mut simplices);
            for s in simplices {
                let m: Vec<Vec<Q>> = s.iter().map(|&i| self.vertices[i].clone()).collect();
                total += det_q(m).abs();
            }
        }
        Ok(total)
    }
}

/// Polar dual of a smooth Fano polytope. Errors if a dual vertex is not a
/// lattice point.
pub fn dual_polytope(p: &SmoothFanoPolytope) -> Result<RationalPolytope, VolumeError> {
    let q = RationalPolytope::from_smooth(p).dual();
    if let Some(v) = q
        .vertices
        .iter()
        .find(|v| v.iter().any(|x| !x.is_integer()))
    {
        return Err(VolumeError::NotReflexive(show(v)));
    }
    Ok(q)
}

/// `d! · vol(Q)` as an integer.
pub fn normalized_volume(q: &RationalPolytope) -> Result<BigInt, VolumeError> {
    let v = q.normalized_volume_rational()?;
    if !v.is_integer() {
        return Err(VolumeError::NotIntegral(v.to_string()));
    }
    Ok(v.to_integer())
}

/// `d! · vol(P*)` from the vertices of the dual alone. Each facet `σ` of
/// `P` is a lattice basis, so `P*` is simple with vertex `m_σ` and edge
/// directions the dual basis `w_j`; Brion's formula gives
/// `Σ_σ <c, m_σ>^d / Π_j (-<c, w_j>)` for any `c` off every edge hyperplane.
pub fn dual_volume_from_vertices(p: &SmoothFanoPolytope) -> Result<BigInt, VolumeError> {
    let d = p.dim();
    let mut cones = Vec::with_capacity(p.facets().len());
    for f in p.facets() {
        let rows: Vec<Vec<BigInt>> = f.iter().map(|&i| p.vertex(i).clone()).collect();
        let inv = IntMatrix::from_rows(&rows)
            .inverse_unimodular()
            .ok_or_else(|| VolumeError::SingularFacet(f.clone()))?;
        let edges: Vec<Vec<BigInt>> = (0..d).map(|j| inv.column(j)).collect();
        let vertex: Vec<BigInt> = (0..d)
            .map(|k| -edges.iter().map(|w| &w[k]).sum::<BigInt>())
            .collect();
        cones.push((vertex, edges));
    }
    let dot = |c: &[BigInt], v: &[BigInt]| -> BigInt { c.iter().zip(v).map(|(a, b)| a * b).sum() };
    let c = (2i64..)
        .map(|t| {
            (0..d as u32)
                .map(|k| BigInt::from(t).pow(k))
                .collect::<Vec<_>>()
        })
        .find(|c| {
            cones
                .iter()
                .all(|(_, ws)| ws.iter().all(|w| !dot(c, w).is_zero()))
        })
        .expect("some moment curve point avoids finitely many hyperplanes");
    let mut total = Q::zero();
    for (m, ws) in &cones {
        let num = dot(&c, m).pow(d as u32);
        let den = ws.iter().fold(BigInt::one(), |acc, w| acc * -dot(&c, w));
        total += Q::new(num, den);
    }
    if !total.is_integer() {
        return Err(VolumeError::NotIntegral(total.to_string()));
    }
    Ok(total.to_integer())
}
