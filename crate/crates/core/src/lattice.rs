//! Exact integer linear algebra over arbitrary-precision integers.
//!
//! Matrices are dense and row-major. Everything here is pure; nothing caches.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// A point of the lattice `Z^d`.
pub type LatticeVector = Vec<BigInt>;

/// Build a lattice vector from machine integers.
pub fn lv(coords: &[i64]) -> LatticeVector {
    coords.iter().map(|&c| BigInt::from(c)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{count} vectors cannot be part of a basis of Z^{dim}")]
    TooManyVectors { count: usize, dim: usize },
    #[error("source vectors do not form a Z-basis (|det| = {det})")]
    NotABasis { det: BigInt },
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Rows must all have the same length; an empty list gives a 0x0 matrix.
    pub fn from_rows(rows: &[LatticeVector]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        IntMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().cloned().collect(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let rows: Vec<LatticeVector> = rows.iter().map(|r| lv(r)).collect();
        Self::from_rows(&rows)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[LatticeVector]) -> Self {
        Self::from_rows(cols).transpose()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> LatticeVector {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> LatticeVector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<LatticeVector> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    /// Entries as `i64`, if they all fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_i64()).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> LatticeVector {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        if let Some(d) = self.det_i128() {
            return BigInt::from(d);
        }
        let mut a = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[i * n + k].is_zero()) else {
                    return BigInt::zero();
                };
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                    a[i * n + j] = v / &prev;
                }
            }
            prev = a[k * n + k].clone();
        }
        sign * &a[n * n - 1]
    }

    /// Bareiss in `i128`, `None` on overflow or oversized entries.
    fn det_i128(&self) -> Option<i128> {
        let n = self.rows;
        let mut a: Vec<i128> = self
            .data
            .iter()
            .map(|x| i128::try_from(x).ok())
            .collect::<Option<_>>()?;
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k * n + k] == 0 {
                let Some(p) = (k + 1..n).find(|&i| a[i * n + k] != 0) else {
                    return Some(0);
                };
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = a[i * n + j]
                        .checked_mul(a[k * n + k])?
                        .checked_sub(a[i * n + k].checked_mul(a[k * n + j])?)?;
                    a[i * n + j] = v / prev;
                }
            }
            prev = a[k * n + k];
        }
        sign.checked_mul(a[n * n - 1])
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square() && self.det().abs().is_one()
    }

    /// Exact inverse over the rationals, `None` when singular.
    pub fn inverse_rational(&self) -> Option<Vec<Vec<BigRational>>> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                let mut row: Vec<BigRational> = (0..n)
                    .map(|j| BigRational::from_integer(self.get(i, j).clone()))
                    .collect();
                row.extend((0..n).map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                }));
                row
            })
            .collect();
        for col in 0..n {
            let p = (col..n).find(|&i| !a[i][col].is_zero())?;
            a.swap(col, p);
            let inv = a[col][col].recip();
            for v in a[col].iter_mut() {
                *v *= &inv;
            }
            for i in 0..n {
                if i != col && !a[i][col].is_zero() {
                    let f = a[i][col].clone();
                    for j in 0..2 * n {
                        let t = &f * &a[col][j];
                        a[i][j] -= t;
                    }
                }
            }
        }
        Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
    }

    /// Integer inverse, present exactly when the matrix is unimodular.
    pub fn inverse_unimodular(&self) -> Option<IntMatrix> {
        if !self.is_unimodular() {
            return None;
        }
        let inv = self.inverse_rational()?;
        let rows: Vec<LatticeVector> = inv
            .into_iter()
            .map(|r| r.into_iter().map(|q| q.to_integer()).collect())
            .collect();
        Some(IntMatrix::from_rows(&rows))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += f * row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        for j in 0..self.cols {
            let t = f * &self.data[src * self.cols + j];
            self.data[dst * self.cols + j] += t;
        }
    }

    /// col[dst] += f * col[src]
    fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        for i in 0..self.rows {
            let t = f * &self.data[i * self.cols + src];
            self.data[i * self.cols + dst] += t;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self.data[i * self.cols + j]);
            self.data[i * self.cols + j] = v;
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str("; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            f.write_str(&row.join(" "))?;
        }
        f.write_str("]")
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self
            .to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(|v| v.to_string()).collect())
            .collect();
        match self.to_i64_rows() {
            Some(small) => small.serialize(s),
            None => rows.serialize(s),
        }
    }
}

/// Smith normal form `(S, L, R)` with `L * M * R = S`.
///
/// Pivots are chosen with minimal nonzero absolute value, ties going to the
/// first position in row-major order, so the transforms are reproducible.
pub fn smith_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let (r, c) = (m.rows, m.cols);
    let mut s = m.clone();
    let mut l = IntMatrix::identity(r);
    let mut rt = IntMatrix::identity(c);

    for t in 0..r.min(c) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    let v = s.get(i, j);
                    if v.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| v.abs() < s.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(s, l, rt);
            };
            s.swap_rows(t, pi);
            l.swap_rows(t, pi);
            s.swap_cols(t, pj);
            rt.swap_cols(t, pj);

            let pivot = s.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..r {
                let q = s.get(i, t).div_floor(&pivot);
                if !q.is_zero() {
                    s.add_row(i, t, &-&q);
                    l.add_row(i, t, &-&q);
                }
                clean &= s.get(i, t).is_zero();
            }
            for j in t + 1..c {
                let q = s.get(t, j).div_floor(&pivot);
                if !q.is_zero() {
                    s.add_col(j, t, &-&q);
                    rt.add_col(j, t, &-&q);
                }
                clean &= s.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !s.get(i, j).is_multiple_of(&pivot)));
            if let Some(i) = bad {
                s.add_row(t, i, &BigInt::one());
                l.add_row(t, i, &BigInt::one());
                continue;
            }
            break;
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            l.negate_row(t);
        }
    }
    finish(s, l, rt)
}

fn finish(mut s: IntMatrix, mut l: IntMatrix, r: IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    for t in 0..s.rows.min(s.cols) {
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            l.negate_row(t);
        }
    }
    (s, l, r)
}

/// Diagonal of the Smith form (the invariant factors, zeros included).
pub fn invariant_factors(m: &IntMatrix) -> Vec<BigInt> {
    let (s, _, _) = smith_normal_form(m);
    (0..s.rows.min(s.cols))
        .map(|i| s.get(i, i).clone())
        .collect()
}

/// Whether the vectors are part of a Z-basis of `Z^d`.
pub fn extends_to_basis(vectors: &[LatticeVector]) -> Result<bool, LatticeError> {
    let Some(first) = vectors.first() else {
        return Ok(true);
    };
    let d = first.len();
    if let Some(v) = vectors.iter().find(|v| v.len() != d) {
        return Err(LatticeError::DimensionMismatch {
            expected: d,
            found: v.len(),
        });
    }
    if vectors.len() > d {
        return Err(LatticeError::TooManyVectors {
            count: vectors.len(),
            dim: d,
        });
    }
    Ok(invariant_factors(&IntMatrix::from_rows(vectors))
        .iter()
        .all(|f| f.is_one()))
}

/// The matrix `U` with `U * src[i] = dst[i]` for all `i`, if it is unimodular.
pub fn solve_unimodular_from_basis(
    src: &[LatticeVector],
    dst: &[LatticeVector],
) -> Result<Option<IntMatrix>, LatticeError> {
    let d = src.len();
    for v in src.iter().chain(dst) {
        if v.len() != d {
            return Err(LatticeError::DimensionMismatch {
                expected: d,
                found: v.len(),
            });
        }
    }
    if dst.len() != d {
        return Err(LatticeError::DimensionMismatch {
            expected: d,
            found: dst.len(),
        });
    }
    let s = IntMatrix::from_columns(src);
    let det = s.det();
    if !det.abs().is_one() {
        return Err(LatticeError::NotABasis { det: det.abs() });
    }
    let s_inv = s
        .inverse_unimodular()
        .expect("unimodular matrix has an integer inverse");
    let u = IntMatrix::from_columns(dst).mul(&s_inv);
    Ok(u.is_unimodular().then_some(u))
}

pub fn gcd_of(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

pub fn is_primitive(v: &[BigInt]) -> bool {
    gcd_of(v).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64(rows)
    }

    fn check_snf(a: &IntMatrix) {
        let (s, l, r) = smith_normal_form(a);
        assert_eq!(l.mul(a).mul(&r), s);
        assert!(l.is_unimodular() && r.is_unimodular());
        let diag: Vec<BigInt> = (0..s.rows().min(s.cols()))
            .map(|i| s.get(i, i).clone())
            .collect();
        for i in 0..s.rows() {
            for j in 0..s.cols() {
                if i != j {
                    assert!(s.get(i, j).is_zero());
                }
            }
        }
        for w in diag.windows(2) {
            assert!(w[1].is_zero() || (!w[0].is_zero() && w[1].is_multiple_of(&w[0])));
        }
    }

    #[test]
    fn snf_identity_and_zero() {
        let (s, _, _) = smith_normal_form(&IntMatrix::identity(3));
        assert_eq!(s, IntMatrix::identity(3));
        let (s, _, _) = smith_normal_form(&m(&[&[0]]));
        assert_eq!(s, m(&[&[0]]));
    }

    #[test]
    fn snf_diag_2_3() {
        let a = m(&[&[2, 0], &[0, 3]]);
        let (s, _, _) = smith_normal_form(&a);
        assert_eq!(s, m(&[&[1, 0], &[0, 6]]));
        check_snf(&a);
    }

    /// Invariant factors of a 2x2 matrix are gcd of entries and |det| / gcd.
    #[test]
    fn snf_matches_minor_gcds() {
        for a in -3..=3i64 {
            for b in -3..=3i64 {
                for c in [-2i64, 0, 5] {
                    for d in [1i64, -4, 6] {
                        let mat = m(&[&[a, b], &[c, d]]);
                        check_snf(&mat);
                        let g1 = [a, b, c, d].iter().fold(0i64, |g, x| g.gcd(x));
                        let det = (a * d - b * c).abs();
                        let f = invariant_factors(&mat);
                        assert_eq!(f[0], BigInt::from(g1));
                        let expect2 = if g1 == 0 { 0 } else { det / g1 };
                        assert_eq!(f[1], BigInt::from(expect2));
                    }
                }
            }
        }
    }

    #[test]
    fn snf_rectangular() {
        check_snf(&m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16], &[1, 0, 3]]));
        check_snf(&m(&[&[0, 0, 0], &[0, 0, 0]]));
        check_snf(&m(&[&[6, 10, 15]]));
    }

    #[test]
    fn determinant() {
        assert_eq!(m(&[&[1, 2], &[3, 4]]).det(), BigInt::from(-2));
        assert_eq!(
            m(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]).det(),
            BigInt::from(-1)
        );
        assert_eq!(
            m(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 2]]).det(),
            BigInt::from(6)
        );
        assert_eq!(
            m(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 1]]).det(),
            BigInt::from(0)
        );
    }

    #[test]
    fn basis_extension() {
        assert!(extends_to_basis(&[lv(&[1, 0, 0]), lv(&[0, 1, 0])]).unwrap());
        assert!(!extends_to_basis(&[lv(&[1, 0]), lv(&[1, 2])]).unwrap());
        assert!(!extends_to_basis(&[lv(&[2, 0])]).unwrap());
        assert!(matches!(
            extends_to_basis(&[lv(&[1, 0]), lv(&[0, 1]), lv(&[1, 1])]),
            Err(LatticeError::TooManyVectors { count: 3, dim: 2 })
        ));
    }

    #[test]
    fn unimodular_solve() {
        let e = vec![lv(&[1, 0]), lv(&[0, 1])];
        assert_eq!(
            solve_unimodular_from_basis(&e, &e).unwrap(),
            Some(IntMatrix::identity(2))
        );
        let dst = vec![lv(&[2, 0]), lv(&[0, 1])];
        assert_eq!(solve_unimodular_from_basis(&e, &dst).unwrap(), None);
        let bad = vec![lv(&[1, 1]), lv(&[1, -1])];
        assert!(matches!(
            solve_unimodular_from_basis(&bad, &e),
            Err(LatticeError::NotABasis { .. })
        ));
        let src = vec![lv(&[1, 1]), lv(&[0, 1])];
        let dst = vec![lv(&[0, 1]), lv(&[-1, 0])];
        let u = solve_unimodular_from_basis(&src, &dst).unwrap().unwrap();
        for (s, d) in src.iter().zip(&dst) {
            assert_eq!(&u.mul_vec(s), d);
        }
    }
}
