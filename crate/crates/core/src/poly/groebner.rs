//! Reduced Gröbner bases by Buchberger's algorithm, normal forms and the
//! minimal degree sequence of a homogeneous ideal.

use std::cmp::Ordering;
use std::collections::HashSet;

use super::{Coeff, Field, Module, Monomial, Poly, MAX_VARS};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("generator {index} is not homogeneous")]
    NotHomogeneous { index: usize },
    #[error("invalid variable order {0:?}")]
    BadOrder(Vec<usize>),
    #[error("{0} variables exceed the supported maximum")]
    TooManyVars(usize),
}

/// Variables listed from smallest to largest; `[0, 1, 2]` is `x < y < z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarOrder {
    smallest_first: Vec<usize>,
    rank: Vec<usize>,
}

impl VarOrder {
    pub fn natural(nvars: usize) -> Self {
        let v: Vec<usize> = (0..nvars).collect();
        VarOrder {
            rank: v.clone(),
            smallest_first: v,
        }
    }

    pub fn new(smallest_first: Vec<usize>) -> Result<Self, PolyError> {
        let n = smallest_first.len();
        if n > MAX_VARS {
            return Err(PolyError::TooManyVars(n));
        }
        let mut rank = vec![usize::MAX; n];
        for (r, &v) in smallest_first.iter().enumerate() {
            if v >= n || rank[v] != usize::MAX {
                return Err(PolyError::BadOrder(smallest_first));
            }
            rank[v] = r;
        }
        Ok(VarOrder {
            smallest_first,
            rank,
        })
    }

    pub fn nvars(&self) -> usize {
        self.rank.len()
    }

    pub fn is_natural(&self) -> bool {
        self.rank.iter().enumerate().all(|(i, &r)| i == r)
    }

    fn to_internal<C: Coeff>(&self, p: &Poly<C>) -> Poly<C> {
        if self.is_natural() {
            p.clone()
        } else {
            p.permute_vars(&self.rank)
        }
    }

    fn to_external<C: Coeff>(&self, p: &Poly<C>) -> Poly<C> {
        if self.is_natural() {
            p.clone()
        } else {
            p.permute_vars(&self.smallest_first)
        }
    }
}

/// Graded-lex comparison: total degree first, then the exponent of the
/// largest variable, then the next largest, and so on.
pub fn grlex_compare(m1: &Monomial, m2: &Monomial, order: &VarOrder) -> Ordering {
    m1.permuted(&order.rank).cmp(&m2.permuted(&order.rank))
}

/// Reduced, monic Gröbner basis over a field.
#[derive(Clone, Debug, PartialEq)]
pub struct GroebnerBasis<K> {
    nvars: usize,
    order: VarOrder,
    /// Generators in the internal (naturally ordered) variables, sorted by
    /// ascending leading monomial.
    gens: Vec<Poly<K>>,
}

impl<K: Field> GroebnerBasis<K> {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> &VarOrder {
        &self.order
    }

    /// Generators in the caller's variables, by ascending leading monomial.
    pub fn generators(&self) -> Vec<Poly<K>> {
        self.gens
            .iter()
            .map(|g| self.order.to_external(g))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.gens
            .iter()
            .any(|g| g.leading_monomial().is_some_and(Monomial::is_one))
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.gens
            .iter()
            .map(|g| {
                g.leading_monomial()
                    .expect("nonzero generator")
                    .permuted(&self.order.smallest_first)
            })
            .collect()
    }

    pub fn normal_form<C: Module<K>>(&self, f: &Poly<C>) -> Poly<C> {
        let f = self.order.to_internal(f);
        self.order.to_external(&reduce(&f, &self.gens))
    }

    pub fn contains(&self, f: &Poly<K>) -> bool {
        self.normal_form(f).is_zero()
    }

    fn is_standard_internal(&self, m: &Monomial) -> bool {
        !self
            .gens
            .iter()
            .any(|g| g.leading_monomial().unwrap().divides(m))
    }

    /// Monomials of degree `deg` not in the initial ideal, ascending.
    pub fn standard_monomials(&self, deg: u32) -> Vec<Monomial> {
        let mut out: Vec<Monomial> = Monomial::all_of_degree(self.nvars, deg)
            .into_iter()
            .map(|m| m.permuted(&self.order.rank))
            .filter(|m| self.is_standard_internal(m))
            .collect();
        out.sort();
        out.into_iter()
            .map(|m| m.permuted(&self.order.smallest_first))
            .collect()
    }

    /// Dimensions of the graded pieces of the quotient, up to and including
    /// `max_deg` or the first zero piece.
    pub fn hilbert_function(&self, max_deg: u32) -> Vec<usize> {
        let mut out = Vec::new();
        for k in 0..=max_deg {
            let n = self.standard_monomials(k).len();
            if n == 0 {
                break;
            }
            out.push(n);
        }
        out
    }
}

/// Fully reduce `f` by monic `basis` (internal variables).
fn reduce<K: Field, C: Module<K>>(f: &Poly<C>, basis: &[Poly<K>]) -> Poly<C> {
    let mut rest = f.terms().to_vec();
    rest.reverse(); // smallest first, so the leading term pops off the end
    let mut out: Vec<(Monomial, C)> = Vec::new();
    while let Some((m, c)) = rest.pop() {
        let hit = basis.iter().find_map(|g| {
            g.leading_monomial()
                .unwrap()
                .quotient_of(&m)
                .map(|q| (g, q))
        });
        let Some((g, q)) = hit else {
            out.push((m, c));
            continue;
        };
        // rest -= c * q * tail(g), merging into the ascending vector.
        let mut sub: Vec<(Monomial, C)> = g.terms()[1..]
            .iter()
            .map(|(t, k)| (t.mul(&q), c.scale(k).neg()))
            .collect();
        sub.reverse();
        rest = merge_ascending(rest, sub);
    }
    Poly { terms: out }
}

fn merge_ascending<C: Coeff>(a: Vec<(Monomial, C)>, b: Vec<(Monomial, C)>) -> Vec<(Monomial, C)> {
    if b.is_empty() {
        return a;
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut ia = a.into_iter().peekable();
    let mut ib = b.into_iter().peekable();
    loop {
        let ord = match (ia.peek(), ib.peek()) {
            (Some(x), Some(y)) => x.0.cmp(&y.0),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => break,
        };
        match ord {
            Ordering::Less => out.push(ia.next().unwrap()),
            Ordering::Greater => out.push(ib.next().unwrap()),
            Ordering::Equal => {
                let (m, x) = ia.next().unwrap();
                let (_, y) = ib.next().unwrap();
                let s = x.add(&y);
                if !s.is_zero() {
                    out.push((m, s));
                }
            }
        }
    }
    out
}

fn s_polynomial<K: Field>(f: &Poly<K>, g: &Poly<K>) -> Poly<K> {
    let (lf, lg) = (f.leading_monomial().unwrap(), g.leading_monomial().unwrap());
    let l = lf.lcm(lg);
    let qf = lf.quotient_of(&l).unwrap();
    let qg = lg.quotient_of(&l).unwrap();
    f.mul_term(&qf, &K::one()).sub(&g.mul_term(&qg, &K::one()))
}

/// Reduced Gröbner basis of the ideal generated by `gens` under graded-lex
/// with the given variable order.
///
/// S-pairs are processed by the normal strategy (smallest lcm degree, ties by
/// index pair) with the coprime and chain criteria.
pub fn buchberger<K: Field>(gens: &[Poly<K>], order: &VarOrder) -> GroebnerBasis<K> {
    let nvars = order.nvars();
    let mut basis: Vec<Poly<K>> = Vec::new();
    for g in gens {
        let g = order.to_internal(g);
        let r = reduce(&g, &basis).monic();
        if !r.is_zero() {
            basis.push(r);
        }
    }
    let mut pending: HashSet<(usize, usize)> = HashSet::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pending.insert((i, j));
        }
    }
    while !pending.is_empty() {
        let lm = |k: usize| *basis[k].leading_monomial().unwrap();
        let &(i, j) = pending
            .iter()
            .min_by_key(|&&(i, j)| (lm(i).lcm(&lm(j)).degree(), i, j))
            .unwrap();
        pending.remove(&(i, j));
        let (li, lj) = (lm(i), lm(j));
        if li.is_coprime(&lj) {
            continue;
        }
        let l = li.lcm(&lj);
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && lm(k).divides(&l)
                && !pending.contains(&(i.min(k), i.max(k)))
                && !pending.contains(&(j.min(k), j.max(k)))
        });
        if chain {
            continue;
        }
        let r = reduce(&s_polynomial(&basis[i], &basis[j]), &basis).monic();
        if r.is_zero() {
            continue;
        }
        let n = basis.len();
        basis.push(r);
        for k in 0..n {
            pending.insert((k, n));
        }
    }

    // Minimize, then inter-reduce.
    let lms: Vec<Monomial> = basis
        .iter()
        .map(|g| *g.leading_monomial().unwrap())
        .collect();
    let keep: Vec<usize> = (0..basis.len())
        .filter(|&a| {
            !(0..basis.len())
                .any(|b| b != a && lms[b].divides(&lms[a]) && (lms[b] != lms[a] || b < a))
        })
        .collect();
    let minimal: Vec<Poly<K>> = keep.iter().map(|&k| basis[k].clone()).collect();
    let mut reduced: Vec<Poly<K>> = (0..minimal.len())
        .map(|a| {
            let others: Vec<Poly<K>> = minimal
                .iter()
                .enumerate()
                .filter(|&(b, _)| b != a)
                .map(|(_, g)| g.clone())
                .collect();
            reduce(&minimal[a], &others).monic()
        })
        .collect();
    reduced.sort_by(|a, b| a.leading_monomial().cmp(&b.leading_monomial()));
    GroebnerBasis {
        nvars,
        order: order.clone(),
        gens: reduced,
    }
}

pub fn normal_form<K: Field, C: Module<K>>(f: &Poly<C>, gb: &GroebnerBasis<K>) -> Poly<C> {
    gb.normal_form(f)
}

pub fn ideal_member<K: Field>(f: &Poly<K>, gb: &GroebnerBasis<K>) -> bool {
    gb.contains(f)
}

/// Degrees of a minimal homogeneous generating set, ascending.
///
/// Generators are taken by increasing degree; one already in the ideal of
/// those kept is dropped.
pub fn minimal_degree_sequence<K: Field>(
    gens: &[Poly<K>],
    order: &VarOrder,
) -> Result<Vec<u32>, PolyError> {
    if let Some(index) = gens.iter().position(|g| !g.is_homogeneous()) {
        return Err(PolyError::NotHomogeneous { index });
    }
    let mut sorted: Vec<&Poly<K>> = gens.iter().filter(|g| !g.is_zero()).collect();
    sorted.sort_by_key(|g| g.degree());
    let mut kept: Vec<Poly<K>> = Vec::new();
    let mut gb: Option<GroebnerBasis<K>> = None;
    for g in sorted {
        if gb.as_ref().is_some_and(|gb| gb.contains(g)) {
            continue;
        }
        kept.push(g.clone());
        gb = Some(buchberger(&kept, order));
    }
    Ok(kept.iter().map(|g| g.degree().unwrap()).collect())
}
