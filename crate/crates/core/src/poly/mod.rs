//! Sparse multivariate polynomials over pluggable coefficient rings.
//!
//! Terms are stored in descending graded-lex order where variable `i` is
//! smaller than variable `i + 1` (so with names `x, y, z` we have
//! `x < y < z`). Other variable orders are handled by permuting variables, see
//! [`groebner::VarOrder`].

mod field;
pub mod groebner;
mod parse;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use field::{Fp, F2, F3, F5, F7, Q};
pub use groebner::{
    buchberger, grlex_compare, ideal_member, minimal_degree_sequence, normal_form, GroebnerBasis,
    PolyError, VarOrder,
};
pub use parse::{parse_poly, ParseError};

/// Hard limit on the number of variables a [`Monomial`] can carry.
pub const MAX_VARS: usize = 16;

/// Commutative ring of coefficients.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_int(v: &BigInt) -> Self;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

pub trait Field: Coeff {
    /// 0 for the rationals.
    const CHARACTERISTIC: u32;
    fn inv(&self) -> Self;
}

/// A coefficient ring that the field `K` acts on; used for parametric
/// coefficients reduced by a basis over `K`.
pub trait Module<K: Field>: Coeff {
    fn scale(&self, k: &K) -> Self;
}

impl<K: Field> Module<K> for K {
    fn scale(&self, k: &K) -> Self {
        self.mul(k)
    }
}

impl Coeff for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_int(v: &BigInt) -> Self {
        v.clone()
    }
}

/// Exponent vector; variables beyond the ring's arity stay zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial([u8; MAX_VARS]);

impl Monomial {
    pub fn one() -> Self {
        Monomial([0; MAX_VARS])
    }

    pub fn var(i: usize) -> Self {
        let mut m = Self::one();
        m.0[i] = 1;
        m
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        assert!(
            exps.len() <= MAX_VARS,
            "at most {MAX_VARS} variables are supported"
        );
        let mut m = Self::one();
        for (slot, &e) in m.0.iter_mut().zip(exps) {
            *slot = u8::try_from(e).expect("exponent overflow");
        }
        m
    }

    pub fn exponent(&self, i: usize) -> u32 {
        u32::from(self.0[i])
    }

    pub fn exponents(&self, nvars: usize) -> Vec<u32> {
        self.0[..nvars].iter().map(|&e| u32::from(e)).collect()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| u32::from(e)).sum()
    }

    /// One past the largest variable index that occurs.
    pub fn support_len(&self) -> usize {
        self.0.iter().rposition(|&e| e > 0).map_or(0, |i| i + 1)
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut r = *self;
        for (a, b) in r.0.iter_mut().zip(o.0) {
            *a = a.checked_add(b).expect("exponent overflow");
        }
        r
    }

    pub fn divides(&self, o: &Monomial) -> bool {
        self.0.iter().zip(o.0).all(|(a, b)| *a <= b)
    }

    /// `o / self` when `self` divides `o`.
    pub fn quotient_of(&self, o: &Monomial) -> Option<Monomial> {
        if !self.divides(o) {
            return None;
        }
        let mut r = *o;
        for (a, b) in r.0.iter_mut().zip(self.0) {
            *a -= b;
        }
        Some(r)
    }

    pub fn lcm(&self, o: &Monomial) -> Monomial {
        let mut r = *self;
        for (a, b) in r.0.iter_mut().zip(o.0) {
            *a = (*a).max(b);
        }
        r
    }

    pub fn is_coprime(&self, o: &Monomial) -> bool {
        self.0.iter().zip(o.0).all(|(a, b)| *a == 0 || b == 0)
    }

    pub fn permuted(&self, perm: &[usize]) -> Monomial {
        let mut r = Self::one();
        for (i, &p) in perm.iter().enumerate() {
            r.0[p] = self.0[i];
        }
        r
    }

    /// All monomials of total degree `deg` in `nvars` variables, ascending.
    pub fn all_of_degree(nvars: usize, deg: u32) -> Vec<Monomial> {
        fn rec(i: usize, nvars: usize, left: u32, cur: &mut Monomial, out: &mut Vec<Monomial>) {
            if i + 1 == nvars {
                cur.0[i] = left as u8;
                out.push(*cur);
                cur.0[i] = 0;
                return;
            }
            for e in 0..=left {
                cur.0[i] = e as u8;
                rec(i + 1, nvars, left - e, cur, out);
            }
            cur.0[i] = 0;
        }
        let mut out = Vec::new();
        if nvars == 0 {
            if deg == 0 {
                out.push(Monomial::one());
            }
            return out;
        }
        rec(0, nvars, deg, &mut Monomial::one(), &mut out);
        out.sort();
        out
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        let mut parts = Vec::new();
        for i in 0..MAX_VARS {
            let e = self.0[i];
            if e == 0 {
                continue;
            }
            let name = names
                .get(i)
                .cloned()
                .unwrap_or_else(|| format!("x{}", i + 1));
            parts.push(if e == 1 { name } else { format!("{name}^{e}") });
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree().cmp(&o.degree()).then_with(|| {
            for i in (0..MAX_VARS).rev() {
                match self.0[i].cmp(&o.0[i]) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.0[..self.support_len()])
    }
}

/// Polynomial with terms in strictly descending monomial order and no zero
/// coefficients.
#[derive(Clone, PartialEq)]
pub struct Poly<C> {
    terms: Vec<(Monomial, C)>,
}

impl<C: Coeff> Poly<C> {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn constant(c: C) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn term(m: Monomial, c: C) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Poly {
                terms: vec![(m, c)],
            }
        }
    }

    pub fn var(i: usize) -> Self {
        Self::term(Monomial::var(i), C::one())
    }

    /// Linear form `sum c_i x_i`.
    pub fn linear(coeffs: &[C]) -> Self {
        Self::from_terms(
            coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (Monomial::var(i), c.clone())),
        )
    }

    /// Collects like terms and sorts.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, C)>>(it: I) -> Self {
        let mut map: HashMap<Monomial, C> = HashMap::new();
        for (m, c) in it {
            match map.get_mut(&m) {
                Some(acc) => *acc = acc.add(&c),
                None => {
                    map.insert(m, c);
                }
            }
        }
        let mut terms: Vec<(Monomial, C)> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        Poly { terms }
    }

    pub fn terms(&self) -> &[(Monomial, C)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, C)> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.0)
    }

    pub fn leading_coeff(&self) -> Option<&C> {
        self.terms.first().map(|t| &t.1)
    }

    pub fn coeff_of(&self, m: &Monomial) -> C {
        self.terms
            .binary_search_by(|t| m.cmp(&t.0))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_else(|_| C::zero())
    }

    /// Largest total degree, `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|t| t.0.degree()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        match self.terms.first() {
            None => true,
            Some((m, _)) => self.terms.iter().all(|t| t.0.degree() == m.degree()),
        }
    }

    pub fn homogeneous_part(&self, deg: u32) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|t| t.0.degree() == deg)
                .cloned()
                .collect(),
        }
    }

    /// One past the largest variable index that occurs.
    pub fn support_len(&self) -> usize {
        self.terms
            .iter()
            .map(|t| t.0.support_len())
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < o.terms.len() {
            let (a, b) = (&self.terms[i], &o.terms[j]);
            match a.0.cmp(&b.0) {
                Ordering::Greater => {
                    out.push(a.clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(b.clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = a.1.add(&b.1);
                    if !c.is_zero() {
                        out.push((a.0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&o.terms[j..]);
        Poly { terms: out }
    }

    pub fn neg(&self) -> Self {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        Self::from_terms(
            self.terms
                .iter()
                .flat_map(|(m1, c1)| o.terms.iter().map(move |(m2, c2)| (m1.mul(m2), c1.mul(c2)))),
        )
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (*m, a.mul(c)))
                .filter(|(_, a)| !a.is_zero())
                .collect(),
        }
    }

    /// `c * m * self`; the order is preserved by monomial multiplication.
    pub fn mul_term(&self, m: &Monomial, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(t, a)| (t.mul(m), a.mul(c)))
                .filter(|(_, a)| !a.is_zero())
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (*m, f(c))))
    }

    /// Substitute polynomial `images[i]` for variable `i`.
    pub fn substitute(&self, images: &[Poly<C>]) -> Self {
        let mut out = Self::zero();
        let mut powers: Vec<Vec<Poly<C>>> = images
            .iter()
            .map(|p| vec![Self::one(), p.clone()])
            .collect();
        for (m, c) in &self.terms {
            let mut t = Self::constant(c.clone());
            for (i, pw) in powers.iter_mut().enumerate() {
                let e = m.exponent(i) as usize;
                while pw.len() <= e {
                    let next = pw.last().unwrap().mul(&pw[1]);
                    pw.push(next);
                }
                if e > 0 {
                    t = t.mul(&pw[e]);
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Rename variable `i` to `perm[i]`.
    pub fn permute_vars(&self, perm: &[usize]) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|(m, c)| (m.permuted(perm), c.clone())),
        )
    }

    /// Evaluate with coefficient-ring values for the variables.
    pub fn eval(&self, vals: &[C]) -> C {
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, v) in vals.iter().enumerate() {
                for _ in 0..m.exponent(i) {
                    t = t.mul(v);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }
}

impl<K: Field> Poly<K> {
    pub fn monic(&self) -> Self {
        match self.leading_coeff() {
            None => Self::zero(),
            Some(c) if c.is_one() => self.clone(),
            Some(c) => self.scale(&c.inv()),
        }
    }
}

impl Poly<BigInt> {
    pub fn to_field<K: Field>(&self) -> Poly<K> {
        self.map_coeffs(K::from_int)
    }

    pub fn content(&self) -> BigInt {
        self.terms
            .iter()
            .fold(<BigInt as Zero>::zero(), |g, (_, c)| g.gcd(c))
    }

    /// Divide by the content and make the leading coefficient positive.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.terms[0].1.is_negative() {
            g = -g;
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, c / &g)).collect(),
        }
    }
}

impl Poly<BigRational> {
    /// Integer multiple with coprime coefficients and positive leading coefficient.
    pub fn to_primitive_integer(&self) -> Poly<BigInt> {
        let den = self
            .terms
            .iter()
            .fold(<BigInt as One>::one(), |l, (_, c)| l.lcm(c.denom()));
        let ints = Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    (
                        *m,
                        (c * BigRational::from_integer(den.clone())).to_integer(),
                    )
                })
                .collect(),
        };
        ints.primitive_part()
    }
}

impl<C: fmt::Debug> fmt::Debug for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("{c:?}*{m:?}"))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Coefficients that render as a sign and an absolute value.
pub trait DisplayCoeff: Coeff {
    /// `(negative, magnitude)`; the magnitude is `None` for a unit.
    fn split_sign(&self) -> (bool, Option<String>);
}

impl DisplayCoeff for BigInt {
    fn split_sign(&self) -> (bool, Option<String>) {
        let neg = self.is_negative();
        let a = self.abs();
        (neg, (!One::is_one(&a)).then(|| a.to_string()))
    }
}

impl DisplayCoeff for BigRational {
    fn split_sign(&self) -> (bool, Option<String>) {
        let neg = self.is_negative();
        let a = self.abs();
        (neg, (!One::is_one(&a)).then(|| a.to_string()))
    }
}

impl<const P: u32> DisplayCoeff for Fp<P> {
    fn split_sign(&self) -> (bool, Option<String>) {
        (false, (self.value() != 1).then(|| self.value().to_string()))
    }
}

impl<C: DisplayCoeff> Poly<C> {
    /// Terms in descending order, e.g. `z^2 - y*z`.
    pub fn display(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let (neg, mag) = c.split_sign();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            match (mag, m.is_one()) {
                (Some(a), true) => s.push_str(&a),
                (Some(a), false) => {
                    s.push_str(&a);
                    s.push('*');
                    s.push_str(&m.fmt_with(names));
                }
                (None, true) => s.push('1'),
                (None, false) => s.push_str(&m.fmt_with(names)),
            }
        }
        s
    }
}

/// Default variable names: `x y z u v w` then `x7, x8, ...`.
pub fn default_names(n: usize) -> Vec<String> {
    const BASE: [&str; 6] = ["x", "y", "z", "u", "v", "w"];
    (0..n)
        .map(|i| {
            if n <= BASE.len() {
                BASE[i].to_string()
            } else {
                format!("x{}", i + 1)
            }
        })
        .collect()
}

/// Parameter names `a b c d ...` used in condition polynomials.
pub fn param_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| {
            if n <= 16 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("a{}", i + 1)
            }
        })
        .collect()
}

/// Polynomials whose coefficients are themselves polynomials (in parameters)
/// over the rationals.
pub type ParamCoeff = Poly<BigRational>;

impl Coeff for Poly<BigRational> {
    fn zero() -> Self {
        Poly::zero()
    }
    fn one() -> Self {
        Poly::one()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        Poly::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Poly::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Poly::mul(self, o)
    }
    fn neg(&self) -> Self {
        Poly::neg(self)
    }
    fn from_int(v: &BigInt) -> Self {
        Poly::constant(BigRational::from_integer(v.clone()))
    }
}

impl Module<BigRational> for Poly<BigRational> {
    fn scale(&self, k: &BigRational) -> Self {
        Poly::scale(self, k)
    }
}
