//! Integral cohomology presentations of toric Fano manifolds and their
//! characteristic classes.
//!
//! `H*(X) = Z[x_1..x_m] / (I + J)` where `I` is generated by the squarefree
//! monomials of minimal nonfaces and `J` by the linear relations
//! `sum_j <u, v_j> x_j`. Eliminating the variables of the first facet leaves
//! `m - d` free generators of degree 2 (degree 1 internally).

use std::any::Any;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::lattice::IntMatrix;
use crate::poly::{buchberger, default_names, Field, GroebnerBasis, Monomial, Poly, VarOrder, Q};
use crate::polytope::{dual_volume_from_vertices, PolytopeError, SmoothFanoPolytope, VolumeError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CohomologyError {
    #[error(transparent)]
    Volume(#[from] VolumeError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("presentation has no polytope data")]
    NoPolytope,
    #[error("top graded piece has dimension {0}, expected 1")]
    TopDegree(usize),
    #[error("facet class vanishes in the top degree")]
    ZeroFacetClass,
    #[error("ratio c1^d / [pt] = {0} is not a positive integer")]
    BadRatio(String),
    #[error("Pontryagin component in degree {0} has non-integral coefficients")]
    NonIntegral(u32),
}

/// Where a presentation came from when it was built from a polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct PolytopeOrigin {
    pub dim: usize,
    /// 0-based vertex indices of the eliminated facet.
    pub eliminated: Vec<usize>,
    /// 0-based vertex indices of the free generators, in order.
    pub free_indices: Vec<usize>,
    /// Class of every vertex variable as a linear form in the free generators.
    pub substitution: Vec<Poly<BigInt>>,
    pub facets: Vec<Vec<usize>>,
}

/// A graded quotient `Z[x_1..x_n] / I` with generators in degree 2, plus the
/// polytope data when built by [`build_presentation`].
///
/// When `modulus` is `Some(p)` the presentation is only meaningful after
/// reducing coefficients mod `p`.
pub struct CohomologyPresentation {
    names: Vec<String>,
    ideal: Vec<Poly<BigInt>>,
    origin: Option<PolytopeOrigin>,
    modulus: Option<u32>,
    gb_cache: Mutex<HashMap<u32, Arc<dyn Any + Send + Sync>>>,
}

impl Clone for CohomologyPresentation {
    fn clone(&self) -> Self {
        let cache = self.gb_cache.lock().expect("gb cache poisoned").clone();
        CohomologyPresentation {
            names: self.names.clone(),
            ideal: self.ideal.clone(),
            origin: self.origin.clone(),
            modulus: self.modulus,
            gb_cache: Mutex::new(cache),
        }
    }
}

impl fmt::Debug for CohomologyPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Z[{}]/({})",
            self.names.join(","),
            self.display_ideal().join(", ")
        )?;
        if let Some(p) = self.modulus {
            write!(f, " mod {p}")?;
        }
        Ok(())
    }
}

impl CohomologyPresentation {
    /// Quotient of `Z[names]` by `ideal`. Generators must be homogeneous.
    pub fn from_ideal(names: Vec<String>, ideal: Vec<Poly<BigInt>>) -> Self {
        CohomologyPresentation {
            names,
            ideal,
            origin: None,
            modulus: None,
            gb_cache: Mutex::new(HashMap::new()),
        }
    }

    /// Quotient given by printed generators, e.g. `["x^2", "y(y-x)"]`.
    pub fn parse(names: &[&str], ideal: &[&str]) -> Result<Self, crate::poly::ParseError> {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let gens = ideal
            .iter()
            .map(|g| crate::poly::parse_poly(g, &names))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_ideal(names, gens))
    }

    pub(crate) fn with_modulus(mut self, p: Option<u32>) -> Self {
        self.modulus = p;
        self
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Same ring with other generator names.
    pub fn with_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.names.len(), "one name per generator");
        self.names = names;
        self
    }

    pub fn ideal(&self) -> &[Poly<BigInt>] {
        &self.ideal
    }

    pub fn origin(&self) -> Option<&PolytopeOrigin> {
        self.origin.as_ref()
    }

    pub fn modulus(&self) -> Option<u32> {
        self.modulus
    }

    pub fn free_indices(&self) -> &[usize] {
        self.origin.as_ref().map_or(&[], |o| &o.free_indices)
    }

    pub fn substitution(&self) -> &[Poly<BigInt>] {
        self.origin.as_ref().map_or(&[], |o| &o.substitution)
    }

    pub fn display_ideal(&self) -> Vec<String> {
        self.ideal.iter().map(|g| g.display(&self.names)).collect()
    }

    /// Reduced Gröbner basis over `K` (grlex, `x_1 < x_2 < ...`), computed
    /// once per characteristic.
    pub fn gb<K: Field>(&self) -> Arc<GroebnerBasis<K>> {
        if let Some(p) = self.modulus {
            assert_eq!(K::CHARACTERISTIC, p, "presentation is only defined mod {p}");
        }
        let key = K::CHARACTERISTIC;
        if let Some(hit) = self.gb_cache.lock().expect("gb cache poisoned").get(&key) {
            return Arc::clone(hit)
                .downcast::<GroebnerBasis<K>>()
                .expect("cache entry matches its field");
        }
        let gens: Vec<Poly<K>> = self.ideal.iter().map(Poly::to_field::<K>).collect();
        let gb = Arc::new(buchberger(&gens, &VarOrder::natural(self.nvars())));
        self.gb_cache
            .lock()
            .expect("gb cache poisoned")
            .insert(key, gb.clone() as Arc<dyn Any + Send + Sync>);
        gb
    }

    /// Dimensions of the graded pieces over `K`, from degree 0 up to the last
    /// nonzero one.
    pub fn hilbert_function_over<K: Field>(&self) -> Vec<usize> {
        let gb = self.gb::<K>();
        let mut out = Vec::new();
        for deg in 0.. {
            let n = gb.standard_monomials(deg).len();
            if n == 0 || deg > 64 {
                break;
            }
            out.push(n);
        }
        out
    }

    /// Hilbert function over the rationals (or over `Z/p` for a mod-`p`
    /// presentation).
    pub fn hilbert_function(&self) -> Vec<usize> {
        match self.modulus {
            None => self.hilbert_function_over::<Q>(),
            Some(2) => self.hilbert_function_over::<crate::poly::F2>(),
            Some(3) => self.hilbert_function_over::<crate::poly::F3>(),
            Some(5) => self.hilbert_function_over::<crate::poly::F5>(),
            Some(7) => self.hilbert_function_over::<crate::poly::F7>(),
            Some(p) => panic!("unsupported modulus {p}"),
        }
    }

    /// Minimal generator degrees of the ideal over the rationals (over `Z/p`
    /// for a mod-`p` presentation).
    pub fn ideal_degrees(&self) -> Vec<u32> {
        match self.modulus {
            None => self.ideal_degrees_over::<Q>(),
            Some(2) => self.ideal_degrees_over::<crate::poly::F2>(),
            Some(3) => self.ideal_degrees_over::<crate::poly::F3>(),
            Some(5) => self.ideal_degrees_over::<crate::poly::F5>(),
            Some(7) => self.ideal_degrees_over::<crate::poly::F7>(),
            Some(p) => panic!("unsupported modulus {p}"),
        }
    }

    pub fn ideal_degrees_over<K: Field>(&self) -> Vec<u32> {
        minimal_generators::<K>(&self.ideal, self.nvars())
            .iter()
            .map(|g| g.degree().unwrap_or(0))
            .collect()
    }

    /// Normal form over the rationals.
    pub fn normal_form_q(&self, f: &Poly<BigInt>) -> Poly<Q> {
        self.gb::<Q>().normal_form(&f.to_field::<Q>())
    }

    /// Whether `f` vanishes in the ring over `K`.
    pub fn vanishes<K: Field>(&self, f: &Poly<BigInt>) -> bool {
        self.gb::<K>().contains(&f.to_field::<K>())
    }

    /// Linear form `sum c_i x_i`.
    pub fn linear_form(&self, coeffs: &[i64]) -> Poly<BigInt> {
        let c: Vec<BigInt> = coeffs.iter().map(|&x| BigInt::from(x)).collect();
        Poly::linear(&c)
    }

    pub fn parse_element(&self, s: &str) -> Result<Poly<BigInt>, crate::poly::ParseError> {
        crate::poly::parse_poly(s, &self.names)
    }
}

/// Keep generators (taken by increasing degree, stable) that are not in the
/// ideal of those kept before them.
pub fn minimal_generators<K: Field>(gens: &[Poly<BigInt>], nvars: usize) -> Vec<Poly<BigInt>> {
    let mut sorted: Vec<&Poly<BigInt>> = gens.iter().filter(|g| !g.is_zero()).collect();
    sorted.sort_by_key(|g| g.degree());
    let order = VarOrder::natural(nvars);
    let mut kept: Vec<Poly<BigInt>> = Vec::new();
    let mut gb: Option<GroebnerBasis<K>> = None;
    for g in sorted {
        if g.to_field::<K>().is_zero()
            || gb
                .as_ref()
                .is_some_and(|gb| gb.contains(&g.to_field::<K>()))
        {
            continue;
        }
        kept.push(g.clone());
        let field: Vec<Poly<K>> = kept.iter().map(Poly::to_field::<K>).collect();
        gb = Some(buchberger(&field, &order));
    }
    kept
}

/// Like [`minimal_generators`], but a generator is dropped only when it is
/// redundant over the rationals and over every small prime field, so the
/// kept set still generates the same ideal after reduction mod `p`.
fn minimal_generators_integral(gens: &[Poly<BigInt>], nvars: usize) -> Vec<Poly<BigInt>> {
    use crate::poly::{F2, F3, F5, F7};
    fn member<K: Field>(kept: &[Poly<BigInt>], g: &Poly<BigInt>, order: &VarOrder) -> bool {
        let field: Vec<Poly<K>> = kept.iter().map(Poly::to_field::<K>).collect();
        buchberger(&field, order).contains(&g.to_field::<K>())
    }
    let mut sorted: Vec<&Poly<BigInt>> = gens.iter().filter(|g| !g.is_zero()).collect();
    sorted.sort_by_key(|g| g.degree());
    let order = VarOrder::natural(nvars);
    let mut kept: Vec<Poly<BigInt>> = Vec::new();
    for g in sorted {
        let redundant = !kept.is_empty()
            && member::<Q>(&kept, g, &order)
            && member::<F2>(&kept, g, &order)
            && member::<F3>(&kept, g, &order)
            && member::<F5>(&kept, g, &order)
            && member::<F7>(&kept, g, &order);
        if !redundant {
            kept.push(g.clone());
        }
    }
    kept
}

/// Integer linear forms `x_sigma = -(V_sigma^T)^{-1} sum_{j free} v_j x_j`.
fn eliminate(p: &SmoothFanoPolytope, sigma: &[usize], free: &[usize]) -> Vec<Poly<BigInt>> {
    let rows: Vec<Vec<BigInt>> = sigma.iter().map(|&i| p.vertex(i).clone()).collect();
    let inv_t = IntMatrix::from_rows(&rows)
        .transpose()
        .inverse_unimodular()
        .expect("facet vertices form a Z-basis");
    let mut subst = vec![Poly::zero(); p.num_vertices()];
    for (k, &j) in free.iter().enumerate() {
        subst[j] = Poly::var(k);
    }
    for (k, &j) in free.iter().enumerate() {
        let c = inv_t.mul_vec(p.vertex(j));
        for (r, &s) in sigma.iter().enumerate() {
            if !c[r].is_zero() {
                let t = Poly::term(Monomial::var(k), -c[r].clone());
                subst[s] = subst[s].add(&t);
            }
        }
    }
    subst
}

/// Presentation with the lexicographically first facet eliminated and the
/// remaining vertices as free generators, in vertex order.
pub fn build_presentation(p: &SmoothFanoPolytope) -> CohomologyPresentation {
    let sigma = p.facets()[0].clone();
    let free: Vec<usize> = (0..p.num_vertices())
        .filter(|i| !sigma.contains(i))
        .collect();
    let substitution = eliminate(p, &sigma, &free);
    let raw: Vec<Poly<BigInt>> = p
        .minimal_nonfaces()
        .iter()
        .map(|s| {
            s.iter()
                .fold(Poly::one(), |acc, &i| acc.mul(&substitution[i]))
        })
        .collect();
    let ideal = minimal_generators_integral(&raw, free.len());
    CohomologyPresentation {
        names: default_names(free.len()),
        ideal,
        origin: Some(PolytopeOrigin {
            dim: p.dim(),
            eliminated: sigma,
            free_indices: free,
            substitution,
            facets: p.facets().to_vec(),
        }),
        modulus: None,
        gb_cache: Mutex::new(HashMap::new()),
    }
}

/// First Chern class `sum_i x_i`.
pub fn chern_c1(pres: &CohomologyPresentation) -> Poly<BigInt> {
    pres.substitution()
        .iter()
        .fold(Poly::zero(), |acc, s| acc.add(s))
}

/// Total Pontryagin class `prod_i (1 + x_i^2)` reduced modulo the ideal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PontryaginClass {
    /// Display form of each nontrivial factor `x_i^2` base, i.e. `x_i`.
    pub factors: Vec<String>,
    /// `components[j]` is `p_j`, of cohomological degree `4j`, in normal form.
    pub components: Vec<String>,
    #[serde(skip)]
    pub polys: Vec<Poly<BigInt>>,
}

fn q_to_int(p: &Poly<Q>) -> Option<Poly<BigInt>> {
    if p.terms().iter().any(|(_, c)| !c.is_integer()) {
        return None;
    }
    Some(Poly::from_terms(
        p.terms().iter().map(|(m, c)| (*m, c.to_integer())),
    ))
}

pub fn pontryagin_total(pres: &CohomologyPresentation) -> Result<PontryaginClass, CohomologyError> {
    let origin = pres.origin().ok_or(CohomologyError::NoPolytope)?;
    let d = origin.dim as u32;
    let gb = pres.gb::<Q>();
    let mut total: Poly<Q> = Poly::one();
    let mut factors = Vec::new();
    for s in &origin.substitution {
        if s.is_zero() {
            continue;
        }
        factors.push(s.display(pres.names()));
        let sq = s.mul(s).to_field::<Q>();
        let next = total.add(&total.mul(&sq));
        // Drop everything above degree d before reducing.
        let trimmed = Poly::from_terms(
            next.terms()
                .iter()
                .filter(|(m, _)| m.degree() <= d)
                .cloned(),
        );
        total = gb.normal_form(&trimmed);
    }
    let mut polys = Vec::new();
    for j in 0..=d / 2 {
        let part = total.homogeneous_part(2 * j);
        polys.push(q_to_int(&part).ok_or(CohomologyError::NonIntegral(4 * j))?);
    }
    let components = polys.iter().map(|p| p.display(pres.names())).collect();
    Ok(PontryaginClass {
        factors,
        components,
        polys,
    })
}

/// `(-K)^d` as the normalized volume of the dual polytope, summed over its
/// vertices.
pub fn degree_anticanonical(p: &SmoothFanoPolytope) -> Result<BigInt, CohomologyError> {
    Ok(dual_volume_from_vertices(p)?)
}

/// `(-K)^d` from the ring: `NF(c1^d) / NF(x_sigma)` for a facet `sigma`
/// disjoint from the eliminated one (else the one with least overlap).
pub fn degree_via_ring(pres: &CohomologyPresentation) -> Result<BigInt, CohomologyError> {
    let origin = pres.origin().ok_or(CohomologyError::NoPolytope)?;
    let d = origin.dim as u32;
    let gb = pres.gb::<Q>();
    let top = gb.standard_monomials(d);
    if top.len() != 1 {
        return Err(CohomologyError::TopDegree(top.len()));
    }
    let overlap = |f: &Vec<usize>| f.iter().filter(|i| origin.eliminated.contains(i)).count();
    let sigma = origin
        .facets
        .iter()
        .min_by_key(|f| overlap(f))
        .expect("polytope has facets");
    let point = sigma.iter().fold(Poly::<BigInt>::one(), |acc, &i| {
        acc.mul(&origin.substitution[i])
    });
    let pt = gb.normal_form(&point.to_field::<Q>()).coeff_of(&top[0]);
    if pt.is_zero() {
        return Err(CohomologyError::ZeroFacetClass);
    }
    let c1 = chern_c1(pres).to_field::<Q>();
    let vol = gb.normal_form(&c1.pow(d)).coeff_of(&top[0]);
    let ratio: BigRational = vol / pt;
    if !ratio.is_integer() || ratio <= BigRational::zero() {
        return Err(CohomologyError::BadRatio(ratio.to_string()));
    }
    Ok(ratio.to_integer())
}

/// `deg(P ⊕ Q) = C(p+q, p) deg(P) deg(Q)`.
pub fn degree_of_product_check(
    p: &SmoothFanoPolytope,
    q: &SmoothFanoPolytope,
) -> Result<bool, CohomologyError> {
    let sum = p.direct_sum(q)?;
    let lhs = degree_anticanonical(&sum)?;
    let rhs = binomial(BigInt::from(p.dim() + q.dim()), BigInt::from(p.dim()))
        * degree_anticanonical(p)?
        * degree_anticanonical(q)?;
    Ok(lhs == rhs)
}

/// Serializable view of a presentation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PresentationReport {
    pub generators: Vec<String>,
    /// `(vertex, class)` with 1-based vertex numbers.
    pub substitution: Vec<(usize, String)>,
    pub ideal: Vec<String>,
}

impl From<&CohomologyPresentation> for PresentationReport {
    fn from(p: &CohomologyPresentation) -> Self {
        PresentationReport {
            generators: p.names().to_vec(),
            substitution: p
                .substitution()
                .iter()
                .enumerate()
                .map(|(i, s)| (i + 1, s.display(p.names())))
                .collect(),
            ideal: p.display_ideal(),
        }
    }
}

/// `true` if the two integer ideals agree over the rationals.
pub fn same_ideal_q(names: usize, a: &[Poly<BigInt>], b: &[Poly<BigInt>]) -> bool {
    let order = VarOrder::natural(names);
    let ga = buchberger(
        &a.iter().map(Poly::to_field::<Q>).collect::<Vec<_>>(),
        &order,
    );
    let gb = buchberger(
        &b.iter().map(Poly::to_field::<Q>).collect::<Vec<_>>(),
        &order,
    );
    ga == gb
}

impl CohomologyPresentation {
    /// Reduced Gröbner basis over the rationals, as primitive integer
    /// polynomials.
    pub fn reduced_basis_display(&self) -> Vec<String> {
        self.gb::<Q>()
            .generators()
            .iter()
            .map(|g| g.to_primitive_integer().display(&self.names))
            .collect()
    }

    pub fn top_degree(&self) -> usize {
        self.hilbert_function().len().saturating_sub(1)
    }

    pub fn is_one(&self) -> bool {
        self.gb::<Q>().is_unit()
    }
}

impl PartialEq for CohomologyPresentation {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.ideal == other.ideal && self.modulus == other.modulus
    }
}

/// Binomial coefficient as an integer, for the product formula.
pub fn product_degree(p_dim: usize, deg_p: &BigInt, q_dim: usize, deg_q: &BigInt) -> BigInt {
    binomial(BigInt::from(p_dim + q_dim), BigInt::from(p_dim)) * deg_p * deg_q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{d3, d4};
    use crate::polytope::{p6, segment, simplex};

    fn same(pres: &CohomologyPresentation, printed: &[&str]) -> bool {
        let gens: Vec<Poly<BigInt>> = printed
            .iter()
            .map(|s| pres.parse_element(s).unwrap())
            .collect();
        same_ideal_q(pres.nvars(), pres.ideal(), &gens)
    }

    #[test]
    fn id12_database_order() {
        let p = SmoothFanoPolytope::from_i64(
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
        let pres = build_presentation(&p);
        assert_eq!(pres.free_indices(), &[3, 4, 5]);
        assert_eq!(pres.display_ideal(), vec!["x^2", "z^2 - y*z", "y^2 - x*y"]);
        assert!(same(&pres, &["x^2", "(z-y)z", "(y-x)y"]));
        let s: Vec<String> = pres
            .substitution()
            .iter()
            .map(|s| s.display(pres.names()))
            .collect();
        assert_eq!(s, vec!["x", "z - y", "y - x", "x", "y", "z"]);
    }

    #[test]
    fn printed_presentations() {
        assert!(same(
            &build_presentation(d4(24)),
            &["z(x-y)", "y(y+z-3x)", "z(z-2x)", "x^4", "x^3y"]
        ));
        // The hand-simplified form with (-2x+y)y is a different ideal.
        assert!(!same(
            &build_presentation(d4(24)),
            &["x^4", "(x-y)z", "(-2y+z)z", "(-2x+y)y", "x^3y"]
        ));
        assert!(same(&build_presentation(d4(70)), &["x^3", "y(x-y)^2"]));
        assert!(same(&build_presentation(d4(141)), &["x^3", "y^2(x-y)"]));
        assert!(same(
            &build_presentation(d3(12)),
            &["x^2", "y(y-z)", "z(x-z)"]
        ));
    }

    #[test]
    fn chern_classes() {
        let c = |id| chern_c1(&build_presentation(d4(id))).display(&default_names(2));
        assert_eq!(c(70), "3*y + x");
        assert_eq!(c(141), "3*y + 2*x");
        let s = build_presentation(&simplex(4));
        assert_eq!(chern_c1(&s).display(s.names()), "5*x");
    }

    #[test]
    fn pontryagin_of_line_and_plane() {
        let p = pontryagin_total(&build_presentation(&segment())).unwrap();
        assert_eq!(p.components, vec!["1"]);
        // P^2: p_1 = 3h^2.
        let p = pontryagin_total(&build_presentation(&simplex(2))).unwrap();
        assert_eq!(p.components, vec!["1", "3*x^2"]);
    }

    #[test]
    fn degrees_agree() {
        assert_eq!(degree_anticanonical(d4(70)).unwrap(), BigInt::from(513));
        assert_eq!(
            degree_via_ring(&build_presentation(d4(70))).unwrap(),
            BigInt::from(513)
        );
        assert_eq!(
            degree_via_ring(&build_presentation(&simplex(4))).unwrap(),
            BigInt::from(625)
        );
        assert_eq!(
            degree_via_ring(&build_presentation(&segment())).unwrap(),
            BigInt::from(2)
        );
        for (id, deg) in [(11, 52), (18, 44), (10, 44), (13, 40)] {
            assert_eq!(
                degree_anticanonical(d3(id)).unwrap(),
                BigInt::from(deg),
                "id {id}"
            );
        }
    }

    #[test]
    fn product_formula() {
        assert!(degree_of_product_check(&p6(), &p6()).unwrap());
        assert_eq!(
            degree_anticanonical(&p6().direct_sum(&p6()).unwrap()).unwrap(),
            BigInt::from(216)
        );
        assert!(degree_of_product_check(&segment(), &segment()).unwrap());
    }

    #[test]
    fn graded_dimensions() {
        for id in [24, 70, 100, 63] {
            let p = d4(id);
            let h = build_presentation(p).hilbert_function();
            assert_eq!(h[1], p.picard_number());
            assert_eq!(*h.last().unwrap(), 1);
            assert_eq!(h.len(), 5);
            assert_eq!(h.iter().sum::<usize>(), p.num_facets());
        }
    }
}
