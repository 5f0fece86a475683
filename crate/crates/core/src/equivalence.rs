//! Unimodular equivalence, the sign-equivalence criterion for
//! diffeomorphism, and partitions of polytope lists.
//!
//! A witness `(pi, U, eps)` satisfies `U v_i = eps_i v'_{pi(i)}` for every
//! vertex `v_i` of the first polytope. Failing to find a sign witness only
//! means the criterion does not apply; it says nothing against a
//! diffeomorphism.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::ControlFlow;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::invariants::{fingerprint, InvariantFingerprint};
use crate::lattice::{solve_unimodular_from_basis, IntMatrix, LatticeVector};
use crate::polytope::SmoothFanoPolytope;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceWitness {
    /// `pi[i]` is the image of vertex `i`, 0-based.
    pub pi: Vec<usize>,
    pub u: IntMatrix,
    pub eps: Vec<i8>,
}

impl EquivalenceWitness {
    pub fn is_unimodular(&self) -> bool {
        self.eps.iter().all(|&e| e == 1)
    }

    /// Witness for the opposite direction: `(pi^-1, U^-1, eps ∘ pi^-1)`.
    pub fn reverse(&self) -> EquivalenceWitness {
        let mut inv = vec![0; self.pi.len()];
        for (i, &j) in self.pi.iter().enumerate() {
            inv[j] = i;
        }
        let eps = inv.iter().map(|&i| self.eps[i]).collect();
        let u = self
            .u
            .inverse_unimodular()
            .expect("witness matrix is unimodular");
        EquivalenceWitness { pi: inv, u, eps }
    }

    /// `pi` as 1-based vertex labels.
    pub fn pi_one_based(&self) -> Vec<usize> {
        self.pi.iter().map(|i| i + 1).collect()
    }
}

impl Serialize for EquivalenceWitness {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("EquivalenceWitness", 3)?;
        st.serialize_field("pi", &self.pi_one_based())?;
        st.serialize_field("u", &self.u)?;
        st.serialize_field("eps", &self.eps)?;
        st.end()
    }
}

/// Edge adjacency as one bit mask per vertex.
fn edge_matrix(p: &SmoothFanoPolytope) -> Vec<u64> {
    let m = p.num_vertices();
    (0..m)
        .map(|i| {
            (0..m)
                .filter(|&j| j != i && p.is_face(&[i, j]))
                .fold(0u64, |acc, j| acc | (1 << j))
        })
        .collect()
}

struct IsoSearch<'a> {
    m: usize,
    deg_p: Vec<usize>,
    deg_q: Vec<usize>,
    edges_p: Vec<u64>,
    edges_q: Vec<u64>,
    facets_p: &'a [u64],
    facets_q: &'a [u64],
}

impl IsoSearch<'_> {
    fn image_mask(pi: &[usize], mask: u64, assigned: usize) -> u64 {
        (0..assigned)
            .filter(|&i| mask & (1 << i) != 0)
            .fold(0u64, |acc, i| acc | (1 << pi[i]))
    }

    fn is_face_q(&self, mask: u64) -> bool {
        self.facets_q.iter().any(|&f| f & mask == mask)
    }

    fn run<F>(&self, pi: &mut Vec<usize>, used: u64, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        let k = pi.len();
        if k == self.m {
            let mut images: Vec<u64> = self
                .facets_p
                .iter()
                .map(|&f| Self::image_mask(pi, f, self.m))
                .collect();
            images.sort_unstable();
            let mut target = self.facets_q.to_vec();
            target.sort_unstable();
            return if images == target {
                visit(pi)
            } else {
                ControlFlow::Continue(())
            };
        }
        for c in 0..self.m {
            if used & (1 << c) != 0 || self.deg_p[k] != self.deg_q[c] {
                continue;
            }
            // Edges to already placed vertices must correspond both ways.
            let ok_edges = (0..k).all(|i| {
                let e1 = self.edges_p[k] & (1 << i) != 0;
                let e2 = self.edges_q[c] & (1 << pi[i]) != 0;
                e1 == e2
            });
            if !ok_edges {
                continue;
            }
            pi.push(c);
            let ok_faces = self
                .facets_p
                .iter()
                .filter(|&&f| f & (1 << k) != 0)
                .all(|&f| self.is_face_q(Self::image_mask(pi, f, k + 1)));
            if ok_faces {
                self.run(pi, used | (1 << c), visit)?;
            }
            pi.pop();
        }
        ControlFlow::Continue(())
    }
}

/// Visit every isomorphism of the face complexes, lexicographically smallest
/// image sequence first, until `visit` breaks.
pub fn for_each_complex_isomorphism<F>(p: &SmoothFanoPolytope, q: &SmoothFanoPolytope, mut visit: F)
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    if p.num_vertices() != q.num_vertices() || p.f_vector() != q.f_vector() {
        return;
    }
    let mut dp = p.vertex_degrees();
    let mut dq = q.vertex_degrees();
    let (deg_p, deg_q) = (dp.clone(), dq.clone());
    dp.sort_unstable();
    dq.sort_unstable();
    if dp != dq {
        return;
    }
    let search = IsoSearch {
        m: p.num_vertices(),
        deg_p,
        deg_q,
        edges_p: edge_matrix(p),
        edges_q: edge_matrix(q),
        facets_p: p.facet_masks(),
        facets_q: q.facet_masks(),
    };
    let _ = search.run(&mut Vec::with_capacity(search.m), 0, &mut visit);
}

/// All isomorphisms of the face complexes, in lexicographic order.
pub fn complex_isomorphisms(p: &SmoothFanoPolytope, q: &SmoothFanoPolytope) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_complex_isomorphism(p, q, |pi| {
        out.push(pi.to_vec());
        ControlFlow::Continue(())
    });
    out
}

fn negate(v: &LatticeVector) -> LatticeVector {
    v.iter().map(|x| -x).collect()
}

/// Given `pi` and signs on the seed facet, solve `U` and propagate signs to
/// the other vertices.
fn witness_for(
    p: &SmoothFanoPolytope,
    q: &SmoothFanoPolytope,
    pi: &[usize],
    seed_signs: &[i8],
    signs_allowed: bool,
) -> Option<EquivalenceWitness> {
    let seed = &p.facets()[0];
    let src: Vec<LatticeVector> = seed.iter().map(|&i| p.vertex(i).clone()).collect();
    let dst: Vec<LatticeVector> = seed
        .iter()
        .zip(seed_signs)
        .map(|(&i, &s)| {
            if s > 0 {
                q.vertex(pi[i]).clone()
            } else {
                negate(q.vertex(pi[i]))
            }
        })
        .collect();
    let u = solve_unimodular_from_basis(&src, &dst).ok().flatten()?;
    let mut eps = vec![0i8; p.num_vertices()];
    for i in 0..p.num_vertices() {
        let w = u.mul_vec(p.vertex(i));
        let target = q.vertex(pi[i]);
        eps[i] = if &w == target {
            1
        } else if signs_allowed && w == negate(target) {
            -1
        } else {
            return None;
        };
    }
    Some(EquivalenceWitness {
        pi: pi.to_vec(),
        u,
        eps,
    })
}

fn search(
    p: &SmoothFanoPolytope,
    q: &SmoothFanoPolytope,
    signs_allowed: bool,
) -> Option<EquivalenceWitness> {
    if p.dim() != q.dim() {
        return None;
    }
    let d = p.dim();
    let sign_choices: Vec<Vec<i8>> = if signs_allowed {
        (0..1u32 << d)
            .map(|bits| {
                (0..d)
                    .map(|k| if bits & (1 << k) != 0 { -1 } else { 1 })
                    .collect()
            })
            .collect()
    } else {
        vec![vec![1; d]]
    };
    let mut found = None;
    for_each_complex_isomorphism(p, q, |pi| {
        for signs in &sign_choices {
            if let Some(w) = witness_for(p, q, pi, signs, signs_allowed) {
                found = Some(w);
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    });
    found
}

/// A lattice isomorphism carrying the vertices of `p` onto those of `q`.
pub fn unimodular_equivalent(
    p: &SmoothFanoPolytope,
    q: &SmoothFanoPolytope,
) -> Option<EquivalenceWitness> {
    search(p, q, false)
}

/// A witness that the rays of `p` and `q` agree up to sign after a
/// unimodular map, on isomorphic face complexes.
pub fn sign_equivalent(
    p: &SmoothFanoPolytope,
    q: &SmoothFanoPolytope,
) -> Option<EquivalenceWitness> {
    search(p, q, true)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WitnessError {
    #[error("vertex counts differ ({0} vs {1})")]
    VertexCount(usize, usize),
    #[error("pi is not a permutation of the vertices")]
    NotPermutation,
    #[error("matrix is not unimodular")]
    NotUnimodular,
    #[error("sign vector has an entry other than ±1")]
    BadSign,
    #[error("U v_{0} is not eps_{0} v'_pi({0})")]
    VertexMismatch(usize),
    #[error("pi does not carry facets onto facets")]
    FacetMismatch,
}

/// Check a witness from scratch.
pub fn verify_witness(
    p: &SmoothFanoPolytope,
    q: &SmoothFanoPolytope,
    w: &EquivalenceWitness,
) -> Result<(), WitnessError> {
    let m = p.num_vertices();
    if q.num_vertices() != m {
        return Err(WitnessError::VertexCount(m, q.num_vertices()));
    }
    let mut seen = vec![false; m];
    if w.pi.len() != m || w.eps.len() != m {
        return Err(WitnessError::NotPermutation);
    }
    for &j in &w.pi {
        if j >= m || std::mem::replace(&mut seen[j], true) {
            return Err(WitnessError::NotPermutation);
        }
    }
    if w.u.rows() != p.dim() || !w.u.is_unimodular() {
        return Err(WitnessError::NotUnimodular);
    }
    for i in 0..m {
        let s = match w.eps[i] {
            1 => BigInt::from(1),
            -1 => BigInt::from(-1),
            _ => return Err(WitnessError::BadSign),
        };
        let lhs = w.u.mul_vec(p.vertex(i));
        let rhs: Vec<BigInt> = q.vertex(w.pi[i]).iter().map(|x| x * &s).collect();
        if lhs != rhs {
            return Err(WitnessError::VertexMismatch(i));
        }
    }
    let mut mapped: Vec<Vec<usize>> = p
        .facets()
        .iter()
        .map(|f| {
            let mut g: Vec<usize> = f.iter().map(|&i| w.pi[i]).collect();
            g.sort_unstable();
            g
        })
        .collect();
    mapped.sort();
    let mut target = q.facets().to_vec();
    target.sort();
    if mapped != target {
        return Err(WitnessError::FacetMismatch);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Relation {
    SignEquiv,
    UnimodularEquiv,
    FingerprintEqual,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::SignEquiv => "sign",
            Relation::UnimodularEquiv => "unimodular",
            Relation::FingerprintEqual => "fingerprint",
        })
    }
}

impl std::str::FromStr for Relation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "sign" | "signequiv" | "sign-equiv" => Ok(Relation::SignEquiv),
            "unimodular" | "unimodularequiv" | "unimodular-equiv" => Ok(Relation::UnimodularEquiv),
            "fingerprint" | "fingerprintequal" | "fingerprint-equal" => {
                Ok(Relation::FingerprintEqual)
            }
            other => Err(format!(
                "unknown relation `{other}` (expected sign, unimodular or fingerprint)"
            )),
        }
    }
}

/// A merge recorded by [`classify`], by positions in the input list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Link {
    pub from: usize,
    pub to: usize,
    pub witness: Option<EquivalenceWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceClass {
    /// Positions in the input list, ascending.
    pub members: Vec<usize>,
    /// Links joining the members into one tree.
    pub links: Vec<Link>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    pub relation: Relation,
    pub classes: Vec<EquivalenceClass>,
}

impl Partition {
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// Index of the class containing input position `i`.
    pub fn class_of(&self, i: usize) -> usize {
        self.classes
            .iter()
            .position(|c| c.members.contains(&i))
            .expect("every input is in a class")
    }

    /// Classes with more than one member, as lists of input positions.
    pub fn merges(&self) -> Vec<Vec<usize>> {
        self.classes
            .iter()
            .filter(|c| c.members.len() > 1)
            .map(|c| c.members.clone())
            .collect()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut j = i;
        while self.0[j] != r {
            let next = self.0[j];
            self.0[j] = r;
            j = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.0[hi] = lo;
        true
    }
}

/// Fingerprints of every polytope, computed in parallel.
pub fn fingerprints(polytopes: &[&SmoothFanoPolytope]) -> Vec<InvariantFingerprint> {
    polytopes.par_iter().map(|p| fingerprint(p)).collect()
}

/// Partition `polytopes` under `relation`.
pub fn classify(polytopes: &[&SmoothFanoPolytope], relation: Relation) -> Partition {
    classify_with(polytopes, relation, &fingerprints(polytopes))
}

/// [`classify`] with precomputed fingerprints. Equivalent polytopes have
/// isomorphic cohomology rings, so only fingerprint-equal pairs are tested.
pub fn classify_with(
    polytopes: &[&SmoothFanoPolytope],
    relation: Relation,
    fps: &[InvariantFingerprint],
) -> Partition {
    let n = polytopes.len();
    assert_eq!(fps.len(), n, "one fingerprint per polytope");
    let mut buckets: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        match buckets
            .iter_mut()
            .find(|b| fps[b[0]] == fps[i] && polytopes[b[0]].dim() == polytopes[i].dim())
        {
            Some(b) => b.push(i),
            None => buckets.push(vec![i]),
        }
    }
    let pairs: Vec<(usize, usize)> = buckets
        .iter()
        .flat_map(|b| {
            b.iter()
                .enumerate()
                .flat_map(move |(k, &i)| b[k + 1..].iter().map(move |&j| (i, j)))
        })
        .collect();
    let results: Vec<(usize, usize, Option<Option<EquivalenceWitness>>)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let w = match relation {
                Relation::FingerprintEqual => Some(None),
                Relation::SignEquiv => sign_equivalent(polytopes[i], polytopes[j]).map(Some),
                Relation::UnimodularEquiv => {
                    unimodular_equivalent(polytopes[i], polytopes[j]).map(Some)
                }
            };
            (i, j, w)
        })
        .collect();
    let mut uf = UnionFind((0..n).collect());
    let mut links: Vec<Link> = Vec::new();
    for (i, j, w) in results {
        if let Some(witness) = w {
            if uf.union(i, j) {
                links.push(Link {
                    from: i,
                    to: j,
                    witness,
                });
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = uf.find(i);
        groups.entry(r).or_default().push(i);
    }
    let classes = groups
        .into_values()
        .map(|members| {
            let links = links
                .iter()
                .filter(|l| members.contains(&l.from))
                .cloned()
                .collect();
            EquivalenceClass { members, links }
        })
        .collect();
    Partition { relation, classes }
}

/// Positions whose fingerprint class is strictly larger than their class
/// under `finer`.
pub fn anomalies(fingerprint_classes: &Partition, finer: &Partition) -> Vec<usize> {
    let mut out = Vec::new();
    for c in &fingerprint_classes.classes {
        for &i in &c.members {
            let f = &finer.classes[finer.class_of(i)];
            if f.members.len() < c.members.len() {
                out.push(i);
            }
        }
    }
    out.sort_unstable();
    out
}
