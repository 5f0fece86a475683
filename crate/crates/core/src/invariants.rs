//! Degree-2 classes whose powers vanish, maximal basis numbers, quotient
//! refinements and fingerprints of cohomology rings.
//!
//! Coefficient vectors are indexed by the free generators of a presentation.
//! Over `Z` they are primitive and normalized so the first nonzero entry is
//! positive; over `Z/p` they have entries in `0..p` and first nonzero entry 1.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::cohomology::{build_presentation, minimal_generators, CohomologyPresentation};
use crate::lattice::{extends_to_basis, smith_normal_form, IntMatrix};
use crate::poly::{Fp, Monomial, ParamCoeff, Poly, Q};
use crate::polytope::SmoothFanoPolytope;

/// Box size used for integral searches unless told otherwise.
pub const DEFAULT_BOUND: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CoeffRing {
    Integer,
    ModP(u32),
}

impl fmt::Display for CoeffRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffRing::Integer => write!(f, "Z"),
            CoeffRing::ModP(p) => write!(f, "Z/{p}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Completeness {
    Exhaustive,
    BoundedSearch(u32),
    /// More solutions showed up in the doubled box.
    HeuristicInfinite,
}

/// Primitive classes `f` of degree 2 with `f^k = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KveReport {
    pub k: u32,
    pub ring: CoeffRing,
    pub solutions: Vec<Vec<i64>>,
    pub completeness: Completeness,
    /// Over `Z/p`: a reduced echelon basis when the solutions together with
    /// zero form a subspace.
    pub span_basis: Option<Vec<Vec<i64>>>,
}

impl KveReport {
    fn empty_integral(k: u32, bound: u32) -> Self {
        KveReport {
            k,
            ring: CoeffRing::Integer,
            solutions: Vec::new(),
            completeness: Completeness::BoundedSearch(bound),
            span_basis: None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.completeness == Completeness::HeuristicInfinite
    }

    /// `None` when the set looks infinite.
    pub fn count(&self) -> Option<usize> {
        (!self.is_infinite()).then_some(self.solutions.len())
    }

    pub fn span_dim(&self) -> Option<usize> {
        self.span_basis.as_ref().map(Vec::len)
    }

    pub fn display(&self, names: &[String]) -> Vec<String> {
        self.solutions
            .iter()
            .map(|v| linear_display(v, names))
            .collect()
    }

    pub fn display_basis(&self, names: &[String]) -> Option<Vec<String>> {
        self.span_basis
            .as_ref()
            .map(|b| b.iter().map(|v| linear_display(v, names)).collect())
    }

    /// Table-style rendering: `∅`, `∞`, `all`, `(x, y)` for a proper span, or
    /// the list itself.
    pub fn table_cell(&self, names: &[String]) -> String {
        if self.is_infinite() {
            return "∞".into();
        }
        if self.solutions.is_empty() {
            return "∅".into();
        }
        if let Some(b) = &self.span_basis {
            if b.len() == names.len() && b.len() > 1 {
                return "all".into();
            }
            if b.len() > 1 {
                return format!(
                    "({})",
                    self.display_basis(names).unwrap_or_default().join(", ")
                );
            }
        }
        self.display(names).join(", ")
    }
}

/// `sum v_i x_i`, with the largest generator first.
pub fn linear_display(v: &[i64], names: &[String]) -> String {
    let c: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
    Poly::linear(&c).display(names)
}

fn linear_poly(v: &[i64]) -> Poly<BigInt> {
    let c: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
    Poly::linear(&c)
}

/// `NF(f^k)` for `f = a_1 x_1 + ... + a_n x_n` with symbolic `a_i`.
pub fn kve_normal_form(pres: &CohomologyPresentation, k: u32) -> Poly<ParamCoeff> {
    let n = pres.nvars();
    let f: Poly<ParamCoeff> =
        Poly::from_terms((0..n).map(|i| (Monomial::var(i), ParamCoeff::var(i))));
    pres.gb::<Q>().normal_form(&f.pow(k))
}

fn clear_denominators(p: &Poly<Q>) -> Poly<BigInt> {
    let l = p
        .terms()
        .iter()
        .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    Poly::from_terms(
        p.terms()
            .iter()
            .map(|(m, c)| (*m, (c * Q::from_integer(l.clone())).to_integer())),
    )
}

/// The coefficients of `NF(f^k)` on the standard monomials, as integer
/// polynomials in `a_1..a_n`. `f^k = 0` iff all of them vanish.
pub fn kve_condition_polynomials(pres: &CohomologyPresentation, k: u32) -> Vec<Poly<BigInt>> {
    kve_normal_form(pres, k)
        .terms()
        .iter()
        .map(|(_, c)| clear_denominators(c))
        .filter(|c| !c.is_zero())
        .collect()
}

fn multinomial(exps: &[u32]) -> u64 {
    let k: u32 = exps.iter().sum();
    let fact = |n: u32| (1..=u64::from(n)).product::<u64>();
    exps.iter().fold(fact(k), |acc, &e| acc / fact(e))
}

fn pow_mod(a: u32, e: u32, p: u32) -> u32 {
    (0..e).fold(1u64, |acc, _| acc * u64::from(a) % u64::from(p)) as u32
}

/// Projective representatives of `(Z/p)^n`: first nonzero entry 1.
fn projective_points(n: usize, p: u32) -> impl Iterator<Item = Vec<u32>> {
    (0..n).flat_map(move |lead| {
        let free = n - lead - 1;
        let total = (p as usize).pow(free as u32);
        (0..total).map(move |mut idx| {
            let mut v = vec![0u32; n];
            v[lead] = 1;
            for slot in v.iter_mut().skip(lead + 1) {
                *slot = (idx % p as usize) as u32;
                idx /= p as usize;
            }
            v
        })
    })
}

fn kve_mod_prime<const P: u32>(pres: &CohomologyPresentation, k: u32) -> Vec<Vec<u32>> {
    let n = pres.nvars();
    let gb = pres.gb::<Fp<P>>();
    let top = gb.standard_monomials(k);
    let index: HashMap<Monomial, usize> = top.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let mut table: Vec<(Vec<u32>, Vec<u32>)> = Vec::new();
    for m in Monomial::all_of_degree(n, k) {
        let exps = m.exponents(n);
        let mult = (multinomial(&exps) % u64::from(P)) as u32;
        if mult == 0 {
            continue;
        }
        let nf = gb.normal_form(&Poly::term(m, Fp::<P>::new(1)));
        if nf.is_zero() {
            continue;
        }
        let mut dense = vec![0u32; top.len()];
        for (mm, c) in nf.terms() {
            dense[index[mm]] = c.value() * mult % P;
        }
        table.push((exps, dense));
    }
    projective_points(n, P)
        .filter(|a| {
            let mut acc = vec![0u32; top.len()];
            for (exps, dense) in &table {
                let coef = exps
                    .iter()
                    .zip(a)
                    .fold(1u32, |c, (&e, &ai)| c * pow_mod(ai, e, P) % P);
                if coef == 0 {
                    continue;
                }
                for (s, d) in acc.iter_mut().zip(dense) {
                    *s = (*s + coef * d) % P;
                }
            }
            acc.iter().all(|&s| s == 0)
        })
        .collect()
}

/// Reduced row echelon form over `Z/p`, zero rows dropped.
fn rref_mod(rows: &[Vec<u32>], p: u32) -> Vec<Vec<u32>> {
    let mut m: Vec<Vec<u32>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, piv);
        let inv = pow_mod(m[r][c], p - 2, p);
        for x in m[r].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for j in 0..cols {
                    m[i][j] = (m[i][j] + p * p - f * m[r][j] % p) % p;
                }
            }
        }
        r += 1;
    }
    m.truncate(r);
    m
}

fn to_i64(v: &[u32]) -> Vec<i64> {
    v.iter().map(|&x| i64::from(x)).collect()
}

/// Exact set of classes with `f^k = 0` over `Z/p`, up to nonzero scalar.
pub fn kve_mod_p(pres: &CohomologyPresentation, k: u32, p: u32) -> KveReport {
    if let Some(q) = pres.modulus() {
        assert_eq!(p, q, "presentation is only defined mod {q}");
    }
    let sols = match p {
        2 => kve_mod_prime::<2>(pres, k),
        3 => kve_mod_prime::<3>(pres, k),
        5 => kve_mod_prime::<5>(pres, k),
        7 => kve_mod_prime::<7>(pres, k),
        _ => panic!("unsupported prime {p}"),
    };
    let basis = rref_mod(&sols, p);
    let span_size = ((p as usize).pow(basis.len() as u32) - 1) / (p as usize - 1);
    let span_basis = (!sols.is_empty() && span_size == sols.len())
        .then(|| basis.iter().map(|v| to_i64(v)).collect());
    KveReport {
        k,
        ring: CoeffRing::ModP(p),
        solutions: sols.iter().map(|v| to_i64(v)).collect(),
        completeness: Completeness::Exhaustive,
        span_basis,
    }
}

/// A condition polynomial ready for machine-integer evaluation.
struct Condition {
    terms: Vec<(i128, Vec<(usize, u32)>)>,
}

impl Condition {
    fn new(p: &Poly<BigInt>, n: usize) -> Self {
        let terms = p
            .terms()
            .iter()
            .map(|(m, c)| {
                let vars = (0..n)
                    .filter(|&i| m.exponent(i) > 0)
                    .map(|i| (i, m.exponent(i)))
                    .collect();
                (
                    c.to_i128().expect("condition coefficient fits in i128"),
                    vars,
                )
            })
            .collect();
        Condition { terms }
    }

    fn vars(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .terms
            .iter()
            .flat_map(|(_, t)| t.iter().map(|&(i, _)| i))
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    fn eval(&self, a: &[i64]) -> i128 {
        self.terms
            .iter()
            .map(|(c, vars)| {
                vars.iter()
                    .fold(*c, |acc, &(i, e)| acc * i128::from(a[i]).pow(e))
            })
            .sum()
    }
}

/// Depth-first search state for the integral box search.
struct BoxSearch<'a> {
    order: Vec<usize>,
    /// Conditions that become fully assigned at each depth.
    due: Vec<Vec<&'a Condition>>,
    /// Allowed residues of assigned prefixes, per prime and depth.
    prefixes: Vec<(u32, Vec<HashSet<Vec<u8>>>)>,
    bound: i64,
    /// Stop at the first solution outside this box.
    stop_outside: Option<i64>,
    found: Vec<Vec<i64>>,
    stopped: bool,
}

impl BoxSearch<'_> {
    fn run(&mut self, a: &mut Vec<i64>, depth: usize, all_zero: bool) {
        if self.stopped {
            return;
        }
        let n = self.order.len();
        if depth == n {
            if all_zero {
                return;
            }
            let g = a.iter().fold(0i64, |g, &x| g.gcd(&x));
            if g != 1 {
                return;
            }
            if let Some(inner) = self.stop_outside {
                if a.iter().any(|x| x.abs() > inner) {
                    self.stopped = true;
                }
                return;
            }
            let mut v = a.clone();
            if v.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            self.found.push(v);
            return;
        }
        let var = self.order[depth];
        let lo = if all_zero { 0 } else { -self.bound };
        for val in lo..=self.bound {
            a[var] = val;
            if !self.prefix_ok(a, depth) {
                continue;
            }
            if self.due[depth].iter().any(|c| c.eval(a) != 0) {
                continue;
            }
            self.run(a, depth + 1, all_zero && val == 0);
            if self.stopped {
                break;
            }
        }
        a[var] = 0;
    }

    fn prefix_ok(&self, a: &[i64], depth: usize) -> bool {
        self.prefixes.iter().all(|(p, sets)| {
            let key: Vec<u8> = self.order[..=depth]
                .iter()
                .map(|&i| a[i].rem_euclid(i64::from(*p)) as u8)
                .collect();
            sets[depth].contains(&key)
        })
    }
}

/// Variable order that completes conditions as early as possible.
fn search_order(n: usize, conds: &[Condition]) -> Vec<usize> {
    let vars: Vec<Vec<usize>> = conds.iter().map(Condition::vars).collect();
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    while order.len() < n {
        let best = (0..n)
            .filter(|&i| !placed[i])
            .max_by_key(|&i| {
                let completes = vars
                    .iter()
                    .filter(|vs| vs.contains(&i) && vs.iter().all(|&j| j == i || placed[j]))
                    .count();
                let touches = vars.iter().filter(|vs| vs.contains(&i)).count();
                (completes, touches, std::cmp::Reverse(i))
            })
            .expect("an unplaced variable remains");
        placed[best] = true;
        order.push(best);
    }
    order
}

fn prefix_sets(sols: &[Vec<i64>], p: u32, order: &[usize]) -> Vec<HashSet<Vec<u8>>> {
    let n = order.len();
    let mut sets = vec![HashSet::new(); n];
    for s in sols {
        for c in 1..p {
            let scaled: Vec<u8> = order
                .iter()
                .map(|&i| ((s[i] as u32 * c) % p) as u8)
                .collect();
            for (j, set) in sets.iter_mut().enumerate() {
                set.insert(scaled[..=j].to_vec());
            }
        }
    }
    sets
}

fn box_search(
    n: usize,
    conds: &[Condition],
    order: &[usize],
    prefixes: &[(u32, Vec<HashSet<Vec<u8>>>)],
    bound: i64,
    stop_outside: Option<i64>,
) -> (Vec<Vec<i64>>, bool) {
    let pos: Vec<usize> = {
        let mut pos = vec![0; n];
        for (d, &v) in order.iter().enumerate() {
            pos[v] = d;
        }
        pos
    };
    let mut due: Vec<Vec<&Condition>> = vec![Vec::new(); n];
    for c in conds {
        let last = c.vars().iter().map(|&v| pos[v]).max().unwrap_or(0);
        due[last].push(c);
    }
    let mut s = BoxSearch {
        order: order.to_vec(),
        due,
        prefixes: prefixes.to_vec(),
        bound,
        stop_outside,
        found: Vec::new(),
        stopped: false,
    };
    s.run(&mut vec![0; n], 0, true);
    (s.found, s.stopped)
}

fn sort_solutions(sols: &mut [Vec<i64>]) {
    sols.sort_by_key(|v| {
        (
            v.iter().map(|x| x.abs()).sum::<i64>(),
            v.iter().map(|x| -x.abs()).collect::<Vec<_>>(),
            v.clone(),
        )
    });
}

/// Primitive integral classes with `f^k = 0` and entries in `[-bound, bound]`,
/// up to sign. A second search in the doubled box marks the result
/// [`Completeness::HeuristicInfinite`] when it finds anything new.
pub fn sve_integer_bounded(pres: &CohomologyPresentation, k: u32, bound: u32) -> KveReport {
    assert!(
        pres.modulus().is_none(),
        "integral search needs an integral presentation"
    );
    assert!(bound >= 1, "bound must be positive");
    let n = pres.nvars();
    let polys = kve_condition_polynomials(pres, k);
    if polys
        .iter()
        .any(|p| p.terms().len() == 1 && p.terms()[0].0.is_one())
    {
        return KveReport::empty_integral(k, bound);
    }
    let conds: Vec<Condition> = polys.iter().map(|p| Condition::new(p, n)).collect();
    let order = search_order(n, &conds);
    let primes: &[u32] = if n <= 8 { &[2, 3, 5] } else { &[2, 3] };
    let prefixes: Vec<(u32, Vec<HashSet<Vec<u8>>>)> = primes
        .iter()
        .map(|&p| (p, prefix_sets(&kve_mod_p(pres, k, p).solutions, p, &order)))
        .collect();
    let b = i64::from(bound);
    let (mut sols, _) = box_search(n, &conds, &order, &prefixes, b, None);
    sort_solutions(&mut sols);
    let (_, grew) = box_search(n, &conds, &order, &prefixes, 2 * b, Some(b));
    KveReport {
        k,
        ring: CoeffRing::Integer,
        solutions: sols,
        completeness: if grew {
            Completeness::HeuristicInfinite
        } else {
            Completeness::BoundedSearch(bound)
        },
        span_basis: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MbnBounds {
    pub lower: usize,
    pub upper: usize,
}

impl MbnBounds {
    pub fn exact(&self) -> Option<usize> {
        (self.lower == self.upper).then_some(self.lower)
    }
}

/// Largest subset of `cands` that is part of a Z-basis, stopping early at
/// `cap`.
fn max_basis_subset(cands: &[Vec<i64>], cap: usize) -> usize {
    fn extends(set: &[&Vec<i64>]) -> bool {
        let rows: Vec<Vec<BigInt>> = set
            .iter()
            .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        extends_to_basis(&rows).unwrap_or(false)
    }
    fn go<'a>(
        cands: &'a [Vec<i64>],
        start: usize,
        cur: &mut Vec<&'a Vec<i64>>,
        best: &mut usize,
        cap: usize,
    ) {
        *best = (*best).max(cur.len());
        if *best >= cap {
            return;
        }
        for i in start..cands.len() {
            if cur.len() + (cands.len() - i) <= *best {
                return;
            }
            cur.push(&cands[i]);
            if extends(cur) {
                go(cands, i + 1, cur, best, cap);
            }
            cur.pop();
            if *best >= cap {
                return;
            }
        }
    }
    let mut best = 0;
    go(cands, 0, &mut Vec::new(), &mut best, cap);
    best
}

/// Bounds on the maximal basis number. The lower bound comes from the
/// integral solutions found. A set extending to a Z-basis stays independent
/// mod every prime, so the rank of each mod-p solution set is an upper bound.
pub fn maximal_basis_number(sve: &KveReport, sve_mod_p: &[KveReport]) -> MbnBounds {
    let n = sve.solutions.first().map_or(usize::MAX, Vec::len);
    let upper = sve_mod_p
        .iter()
        .map(|r| match r.ring {
            CoeffRing::ModP(p) => rref_mod(&u32_rows(&r.solutions), p).len(),
            CoeffRing::Integer => panic!("upper bounds come from mod-p reports"),
        })
        .min()
        .unwrap_or(n);
    let lower = max_basis_subset(&sve.solutions, upper);
    MbnBounds { lower, upper }
}

/// Primes used for the upper bound of the maximal basis number.
pub const MBN_PRIMES: [u32; 3] = [2, 3, 5];

/// Maximal basis number bounds, growing the integral box from 1 up to
/// `bound` and stopping once the bounds meet.
pub fn mbn_for(pres: &CohomologyPresentation, bound: u32) -> MbnBounds {
    let primes: &[u32] = if pres.nvars() <= 8 {
        &MBN_PRIMES
    } else {
        &MBN_PRIMES[..2]
    };
    let mod_p: Vec<KveReport> = primes.iter().map(|&p| kve_mod_p(pres, 2, p)).collect();
    let mut last = maximal_basis_number(&KveReport::empty_integral(2, 0), &mod_p);
    for b in 1..=bound {
        if last.lower == last.upper {
            break;
        }
        last = maximal_basis_number(&sve_integer_bounded(pres, 2, b), &mod_p);
    }
    last
}

fn u32_rows(rows: &[Vec<i64>]) -> Vec<Vec<u32>> {
    rows.iter()
        .map(|v| v.iter().map(|&x| x as u32).collect())
        .collect()
}

fn sym_mod(x: &BigInt, p: u32) -> BigInt {
    let p = BigInt::from(p);
    let r = x.mod_floor(&p);
    if &r * 2 > p {
        r - p
    } else {
        r
    }
}

/// Coefficients of `f` reduced to symmetric residues mod `p`.
fn poly_mod(f: &Poly<BigInt>, p: u32) -> Poly<BigInt> {
    Poly::from_terms(f.terms().iter().map(|(m, c)| (*m, sym_mod(c, p))))
}

/// A quotient together with the images of the old generators in the new
/// ones.
struct Elimination {
    pres: CohomologyPresentation,
    images: Vec<Poly<BigInt>>,
}

/// Substitute `x_i -> images[i]`, where `images` avoids generator `drop`,
/// then renumber the survivors and keep their names.
fn substitute_out(
    pres: &CohomologyPresentation,
    images: &[Poly<BigInt>],
    drop: usize,
) -> Elimination {
    let n = pres.nvars();
    let reindex: Vec<Poly<BigInt>> = (0..n)
        .map(|i| {
            if i == drop {
                Poly::zero()
            } else {
                Poly::var(if i < drop { i } else { i - 1 })
            }
        })
        .collect();
    let images: Vec<Poly<BigInt>> = images.iter().map(|g| g.substitute(&reindex)).collect();
    let ideal = pres.ideal().iter().map(|g| g.substitute(&images)).collect();
    let names = pres
        .names()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != drop)
        .map(|(_, s)| s.clone())
        .collect();
    Elimination {
        pres: CohomologyPresentation::from_ideal(names, ideal).with_modulus(pres.modulus()),
        images,
    }
}

fn keep(pres: &CohomologyPresentation, extra: Option<Poly<BigInt>>) -> Elimination {
    let mut ideal = pres.ideal().to_vec();
    ideal.extend(extra);
    Elimination {
        pres: CohomologyPresentation::from_ideal(pres.names().to_vec(), ideal)
            .with_modulus(pres.modulus()),
        images: (0..pres.nvars()).map(Poly::var).collect(),
    }
}

/// `H / (f)` for a linear `f` over the integers.
fn eliminate_integral(pres: &CohomologyPresentation, f: &Poly<BigInt>) -> Elimination {
    let n = pres.nvars();
    let coeffs: Vec<BigInt> = (0..n).map(|i| f.coeff_of(&Monomial::var(i))).collect();
    if coeffs.iter().all(Zero::is_zero) {
        return keep(pres, None);
    }
    if let Some(i) = (0..n).find(|&i| coeffs[i].abs().is_one()) {
        // c_i = ±1, so x_i = -c_i * sum_{j != i} c_j x_j.
        let ci = coeffs[i].clone();
        let mut images: Vec<Poly<BigInt>> = (0..n).map(Poly::var).collect();
        images[i] = Poly::from_terms(
            (0..n)
                .filter(|&j| j != i && !coeffs[j].is_zero())
                .map(|j| (Monomial::var(j), -(&ci * &coeffs[j]))),
        );
        return substitute_out(pres, &images, i);
    }
    let g = coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if !g.is_one() {
        // Torsion in the quotient: keep f as a relation.
        return keep(pres, Some(f.clone()));
    }
    // coeffs * R = ±e_1, so in the coordinates x = R y the form f is ±y_1.
    let (_, _, r) = smith_normal_form(&IntMatrix::from_rows(&[coeffs]));
    let images: Vec<Poly<BigInt>> = (0..n).map(|i| Poly::linear(&r.row(i))).collect();
    substitute_out(pres, &images, 0)
}

/// `H / (f)` over `Z/p` for a linear `f`.
fn eliminate_mod(pres: &CohomologyPresentation, f: &Poly<BigInt>, p: u32) -> Elimination {
    let n = pres.nvars();
    let pb = BigInt::from(p);
    let coeffs: Vec<BigInt> = (0..n)
        .map(|i| f.coeff_of(&Monomial::var(i)).mod_floor(&pb))
        .collect();
    let Some(i) = (0..n).find(|&i| !coeffs[i].is_zero()) else {
        return keep(pres, None);
    };
    let inv = BigInt::from(pow_mod(coeffs[i].to_u32().expect("residue"), p - 2, p));
    let mut images: Vec<Poly<BigInt>> = (0..n).map(Poly::var).collect();
    images[i] = Poly::from_terms(
        (0..n)
            .filter(|&j| j != i && !coeffs[j].is_zero())
            .map(|j| (Monomial::var(j), sym_mod(&-(&inv * &coeffs[j]), p))),
    );
    let mut e = substitute_out(pres, &images, i);
    let ideal = e
        .pres
        .ideal()
        .iter()
        .map(|g| poly_mod(g, p))
        .filter(|g| !g.is_zero())
        .collect();
    e.pres =
        CohomologyPresentation::from_ideal(e.pres.names().to_vec(), ideal).with_modulus(Some(p));
    e
}

fn eliminate(pres: &CohomologyPresentation, f: &Poly<BigInt>) -> Elimination {
    match pres.modulus() {
        None => eliminate_integral(pres, f),
        Some(p) => eliminate_mod(pres, f, p),
    }
}

fn prune(pres: CohomologyPresentation) -> CohomologyPresentation {
    let n = pres.nvars();
    let ideal = match pres.modulus() {
        None => minimal_generators::<Q>(pres.ideal(), n),
        Some(2) => minimal_generators::<Fp<2>>(pres.ideal(), n),
        Some(3) => minimal_generators::<Fp<3>>(pres.ideal(), n),
        Some(5) => minimal_generators::<Fp<5>>(pres.ideal(), n),
        Some(7) => minimal_generators::<Fp<7>>(pres.ideal(), n),
        Some(p) => panic!("unsupported modulus {p}"),
    };
    let ideal = ideal.iter().map(|g| g.primitive_part()).collect();
    CohomologyPresentation::from_ideal(pres.names().to_vec(), ideal).with_modulus(pres.modulus())
}

/// `H ⊗ Z/p` with every linear relation solved away.
pub fn reduce_mod(pres: &CohomologyPresentation, p: u32) -> CohomologyPresentation {
    if let Some(q) = pres.modulus() {
        assert_eq!(p, q, "presentation is only defined mod {q}");
    }
    let mut cur = CohomologyPresentation::from_ideal(
        pres.names().to_vec(),
        pres.ideal()
            .iter()
            .map(|g| poly_mod(g, p))
            .filter(|g| !g.is_zero())
            .collect(),
    )
    .with_modulus(Some(p));
    while let Some(lin) = cur.ideal().iter().find(|g| g.degree() == Some(1)).cloned() {
        cur = eliminate_mod(&cur, &lin, p).pres;
    }
    prune(cur)
}

/// Adjoin `elements[i]^powers[i]` to the ideal. Linear elements with power 1
/// are solved away where the coefficients allow it. Over a mod-`p`
/// presentation everything happens over `Z/p`.
pub fn quotient_refine(
    pres: &CohomologyPresentation,
    elements: &[Poly<BigInt>],
    powers: &[u32],
) -> CohomologyPresentation {
    assert_eq!(elements.len(), powers.len(), "one power per element");
    if elements.is_empty() {
        return pres.clone();
    }
    let mut cur = pres.clone();
    // Images of the original generators in the current ones.
    let mut images: Vec<Poly<BigInt>> = (0..pres.nvars()).map(Poly::var).collect();
    for (f, _) in elements.iter().zip(powers).filter(|(_, &k)| k == 1) {
        let e = eliminate(&cur, &f.substitute(&images));
        images = images.iter().map(|g| g.substitute(&e.images)).collect();
        cur = e.pres;
    }
    let mut ideal = cur.ideal().to_vec();
    for (f, &k) in elements.iter().zip(powers).filter(|(_, &k)| k != 1) {
        let g = f.substitute(&images).pow(k);
        ideal.push(match cur.modulus() {
            Some(p) => poly_mod(&g, p),
            None => g,
        });
    }
    prune(
        CohomologyPresentation::from_ideal(cur.names().to_vec(), ideal).with_modulus(cur.modulus()),
    )
}

/// Invariants of a quotient ring used to tell refinements apart.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct RingSignature {
    pub hilbert: Vec<usize>,
    pub ideal_degrees: Vec<u32>,
    /// `(k, p, count, span dimension)` over `Z/p` after solving linear
    /// relations.
    pub mod_p: Vec<(u32, u32, usize, Option<usize>)>,
    pub ideal_degrees_mod2: Vec<u32>,
}

const SIGNATURE_KVE: [(u32, u32); 4] = [(2, 2), (3, 2), (3, 3), (4, 2)];

pub fn ring_signature(pres: &CohomologyPresentation) -> RingSignature {
    let (hilbert, ideal_degrees) = match pres.modulus() {
        None => (
            pres.hilbert_function_over::<Q>(),
            sorted(pres.ideal_degrees_over::<Q>()),
        ),
        Some(_) => (pres.hilbert_function(), sorted(pres.ideal_degrees())),
    };
    let mut reduced: HashMap<u32, CohomologyPresentation> = HashMap::new();
    let mut mod_p = Vec::new();
    for (k, p) in SIGNATURE_KVE {
        if pres.modulus().is_some_and(|q| q != p) {
            continue;
        }
        let r = reduced.entry(p).or_insert_with(|| reduce_mod(pres, p));
        let rep = kve_mod_p(r, k, p);
        mod_p.push((k, p, rep.solutions.len(), rep.span_dim()));
    }
    let ideal_degrees_mod2 = match pres.modulus() {
        Some(q) if q != 2 => Vec::new(),
        _ => sorted(
            reduced
                .entry(2)
                .or_insert_with(|| reduce_mod(pres, 2))
                .ideal_degrees(),
        ),
    };
    RingSignature {
        hilbert,
        ideal_degrees,
        mod_p,
        ideal_degrees_mod2,
    }
}

fn sorted<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort();
    v
}

/// Summary of one `(k, ring)` cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KveSummary {
    /// `None` when the set looks infinite.
    pub count: Option<usize>,
    pub span_dim: Option<usize>,
    pub solutions: Vec<String>,
}

/// The cells recorded in a fingerprint.
pub const FINGERPRINT_KVE: [(u32, CoeffRing); 6] = [
    (2, CoeffRing::Integer),
    (2, CoeffRing::ModP(2)),
    (3, CoeffRing::Integer),
    (3, CoeffRing::ModP(2)),
    (3, CoeffRing::ModP(3)),
    (4, CoeffRing::ModP(2)),
];

/// Computable invariants of `H*(X_P)`. Equality ignores the literal
/// solution lists, which depend on the chosen generators.
#[derive(Debug, Clone, Serialize)]
pub struct InvariantFingerprint {
    pub face_numbers: Vec<usize>,
    pub ideal_degrees: Vec<u32>,
    pub kve_table: BTreeMap<String, KveSummary>,
    pub mbn_lower: usize,
    pub mbn_upper: usize,
    /// Signatures of canonical quotients, each list sorted.
    pub refinements: BTreeMap<String, Vec<RingSignature>>,
}

type FingerprintKey<'a> = (
    &'a [usize],
    &'a [u32],
    Vec<(&'a String, Option<usize>, Option<usize>)>,
    usize,
    usize,
    &'a BTreeMap<String, Vec<RingSignature>>,
);

impl InvariantFingerprint {
    fn key(&self) -> FingerprintKey<'_> {
        (
            &self.face_numbers,
            &self.ideal_degrees,
            self.kve_table
                .iter()
                .map(|(k, s)| (k, s.count, s.span_dim))
                .collect(),
            self.mbn_lower,
            self.mbn_upper,
            &self.refinements,
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fingerprint serializes")
    }
}

impl PartialEq for InvariantFingerprint {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for InvariantFingerprint {}

pub fn kve_key(k: u32, ring: CoeffRing) -> String {
    format!("k={k} {ring}")
}

/// All kve reports a fingerprint is built from, keyed like
/// [`InvariantFingerprint::kve_table`].
pub fn kve_reports(pres: &CohomologyPresentation, bound: u32) -> BTreeMap<String, KveReport> {
    FINGERPRINT_KVE
        .iter()
        .map(|&(k, ring)| {
            let rep = match ring {
                CoeffRing::Integer => sve_integer_bounded(pres, k, bound),
                CoeffRing::ModP(p) => kve_mod_p(pres, k, p),
            };
            (kve_key(k, ring), rep)
        })
        .collect()
}

fn refine_all(
    pres: &CohomologyPresentation,
    sets: &[Vec<Vec<i64>>],
    powers: u32,
) -> Vec<RingSignature> {
    let mut out: Vec<RingSignature> = sets
        .iter()
        .map(|set| {
            let elems: Vec<Poly<BigInt>> = set.iter().map(|v| linear_poly(v)).collect();
            ring_signature(&quotient_refine(pres, &elems, &vec![powers; elems.len()]))
        })
        .collect();
    out.sort();
    out
}

pub fn fingerprint(p: &SmoothFanoPolytope) -> InvariantFingerprint {
    fingerprint_with_bound(p, DEFAULT_BOUND)
}

pub fn fingerprint_with_bound(p: &SmoothFanoPolytope, bound: u32) -> InvariantFingerprint {
    let pres = build_presentation(p);
    fingerprint_of(&pres, p.f_vector().to_vec(), bound)
}

pub fn fingerprint_of(
    pres: &CohomologyPresentation,
    face_numbers: Vec<usize>,
    bound: u32,
) -> InvariantFingerprint {
    let reports = kve_reports(pres, bound);
    let names = pres.names();
    let kve_table = reports
        .iter()
        .map(|(key, r)| {
            (
                key.clone(),
                KveSummary {
                    count: r.count(),
                    span_dim: r.span_dim(),
                    solutions: r.display(names),
                },
            )
        })
        .collect();
    let sve = &reports[&kve_key(2, CoeffRing::Integer)];
    let cve = &reports[&kve_key(3, CoeffRing::Integer)];
    let sve2 = &reports[&kve_key(2, CoeffRing::ModP(2))];
    let mbn = mbn_for(pres, bound);

    let mut refinements = BTreeMap::new();
    if !sve.is_infinite() {
        let singles: Vec<Vec<Vec<i64>>> = sve.solutions.iter().map(|v| vec![v.clone()]).collect();
        refinements.insert("sve".to_string(), refine_all(pres, &singles, 1));
        let mut pairs = Vec::new();
        for i in 0..sve.solutions.len() {
            for j in i + 1..sve.solutions.len() {
                pairs.push(vec![sve.solutions[i].clone(), sve.solutions[j].clone()]);
            }
        }
        refinements.insert("sve pairs".to_string(), refine_all(pres, &pairs, 1));
    }
    if !cve.is_infinite() && !cve.solutions.is_empty() {
        let singles: Vec<Vec<Vec<i64>>> = cve.solutions.iter().map(|v| vec![v.clone()]).collect();
        refinements.insert("cve".to_string(), refine_all(pres, &singles, 1));
        refinements.insert("cve squared".to_string(), refine_all(pres, &singles, 2));
        refinements.insert(
            "cve all".to_string(),
            refine_all(pres, &[cve.solutions.clone()], 1),
        );
    }
    if !sve2.solutions.is_empty() {
        let r2 = reduce_mod(pres, 2);
        refinements.insert(
            "sve mod 2 all".to_string(),
            refine_all(&r2, &[sve2.solutions.clone()], 1),
        );
    }
    InvariantFingerprint {
        face_numbers,
        ideal_degrees: sorted(pres.ideal_degrees_over::<Q>()),
        kve_table,
        mbn_lower: mbn.lower,
        mbn_upper: mbn.upper,
        refinements,
    }
}

/// Vector of a linear form `f` in `nvars` generators.
pub fn linear_coeffs(f: &Poly<BigInt>, nvars: usize) -> Vec<i64> {
    (0..nvars)
        .map(|i| {
            f.coeff_of(&Monomial::var(i))
                .to_i64()
                .expect("small coefficient")
        })
        .collect()
}

/// Normalize a vector as the reports do: over `Z` make it primitive with
/// positive first entry, over `Z/p` scale the first nonzero entry to 1.
pub fn normalize(v: &[i64], ring: CoeffRing) -> Vec<i64> {
    match ring {
        CoeffRing::Integer => {
            let g = v.iter().fold(0i64, |g, &x| g.gcd(&x)).max(1);
            let s = if v.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
                -1
            } else {
                1
            };
            v.iter().map(|&x| s * x / g).collect()
        }
        CoeffRing::ModP(p) => {
            let p = i64::from(p);
            let r: Vec<i64> = v.iter().map(|x| x.rem_euclid(p)).collect();
            let Some(&lead) = r.iter().find(|&&x| x != 0) else {
                return r;
            };
            let inv = i64::from(pow_mod(lead as u32, p as u32 - 2, p as u32));
            r.iter().map(|x| x * inv % p).collect()
        }
    }
}

/// All nonzero vectors of the span of `basis` over `Z/p`, normalized.
pub fn span_mod_p(basis: &[Vec<i64>], p: u32) -> Vec<Vec<i64>> {
    let n = basis.first().map_or(0, Vec::len);
    let rows = rref_mod(
        &u32_rows(
            &basis
                .iter()
                .map(|v| normalize(v, CoeffRing::ModP(p)))
                .collect::<Vec<_>>(),
        ),
        p,
    );
    let r = rows.len();
    let mut out = Vec::new();
    for coeffs in projective_points(r, p) {
        let mut v = vec![0u32; n];
        for (c, row) in coeffs.iter().zip(&rows) {
            for (x, y) in v.iter_mut().zip(row) {
                *x = (*x + c * y) % p;
            }
        }
        out.push(normalize(&to_i64(&v), CoeffRing::ModP(p)));
    }
    out.sort();
    out.dedup();
    out
}
