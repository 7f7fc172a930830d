//! Dense matrices over an exact field.

use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{format_rational, parse_rational, Field};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self[(r, c)])?;
            }
        }
        write!(f, "] ({}x{})", self.rows, self.cols)
    }
}

impl<F> std::ops::Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (r, c): (usize, usize)) -> &F {
        &self.data[r * self.cols + c]
    }
}

impl<F> std::ops::IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut F {
        &mut self.data[r * self.cols + c]
    }
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn scalar(n: usize, s: F) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = s.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Parse("ragged matrix rows".into()));
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Explicit shape, for matrices with a zero dimension.
    pub fn from_shape(rows: usize, cols: usize, data: Vec<F>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Parse(format!("expected {} entries for a {rows}x{cols} matrix", rows * cols)));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| F::from_i64(x)).collect()).collect())
            .expect("rectangular input")
    }

    pub fn from_columns(rows: usize, cols: &[Vec<F>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn row(&self, r: usize) -> Vec<F> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn column(&self, c: usize) -> Vec<F> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Field::is_zero)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix shape mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a.mul(&other[(k, j)]);
                    out[(i, j)] = out[(i, j)].add(&t);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        (0..self.rows)
            .map(|i| (0..self.cols).fold(F::zero(), |acc, j| acc.add(&self[(i, j)].mul(&v[j]))))
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, F::add)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, F::sub)
    }

    fn zip(&self, other: &Self, f: impl Fn(&F, &F) -> F) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix shape mismatch");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(F::neg).collect() }
    }

    pub fn scale(&self, s: &F) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.mul(s)).collect() }
    }

    /// Row echelon form by Gaussian elimination; returns (echelon, pivot columns, sign of the row permutation).
    fn echelon(&self) -> (Self, Vec<usize>, bool) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut odd = false;
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
                odd = !odd;
            }
            let inv = m[(r, c)].inv().expect("pivot is nonzero");
            for i in r + 1..m.rows {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let factor = m[(i, c)].mul(&inv);
                for j in c..m.cols {
                    let t = factor.mul(&m[(r, j)]);
                    m[(i, j)] = m[(i, j)].sub(&t);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots, odd)
    }

    pub fn rank(&self) -> usize {
        self.echelon().1.len()
    }

    pub fn det(&self) -> F {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let (m, pivots, odd) = self.echelon();
        if pivots.len() < self.rows {
            return F::zero();
        }
        let d = (0..self.rows).fold(F::one(), |acc, i| acc.mul(&m[(i, i)]));
        if odd {
            d.neg()
        } else {
            d
        }
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = F::one();
        }
        let rref = aug.rref();
        if (0..n).any(|i| !rref[(i, i)].is_one()) {
            return None;
        }
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = rref[(i, n + j)].clone();
            }
        }
        Some(out)
    }

    /// Reduced row echelon form.
    pub fn rref(&self) -> Self {
        let (mut m, pivots, _) = self.echelon();
        for (r, &c) in pivots.iter().enumerate().rev() {
            let inv = m[(r, c)].inv().expect("pivot is nonzero");
            for j in c..m.cols {
                m[(r, j)] = m[(r, j)].mul(&inv);
            }
            for i in 0..r {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let factor = m[(i, c)].clone();
                for j in c..m.cols {
                    let t = factor.mul(&m[(r, j)]);
                    m[(i, j)] = m[(i, j)].sub(&t);
                }
            }
        }
        m
    }

    /// Basis of the right kernel `{v : M v = 0}`.
    pub fn kernel(&self) -> Vec<Vec<F>> {
        let rref = self.rref();
        let (_, pivots, _) = rref.echelon();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![F::zero(); self.cols];
                v[f] = F::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = rref[(r, f)].neg();
                }
                v
            })
            .collect()
    }

    /// Integer power; negative exponents need an invertible matrix.
    pub fn pow(&self, e: i64) -> Option<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut exp = e.unsigned_abs();
        let mut acc = Self::identity(self.rows);
        let mut b = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            exp >>= 1;
        }
        Some(acc)
    }

    /// Coefficients of `det(t I - M)`, ascending in `t` (Berkowitz, division free).
    pub fn char_poly(&self) -> Vec<F> {
        assert!(self.is_square(), "characteristic polynomial of a non-square matrix");
        let mut desc = berkowitz(self);
        desc.reverse();
        desc
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        self.mul(other) == other.mul(self)
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out[(self.rows + i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        out
    }
}

/// Descending coefficient vector `[1, c_1, ..., c_n]` of `det(t I - M)`.
fn berkowitz<F: Field>(m: &Matrix<F>) -> Vec<F> {
    let n = m.rows;
    if n == 0 {
        return vec![F::one()];
    }
    if n == 1 {
        return vec![F::one(), m[(0, 0)].neg()];
    }
    let a = m[(0, 0)].clone();
    let row: Vec<F> = (1..n).map(|j| m[(0, j)].clone()).collect();
    let mut sub = Matrix::zeros(n - 1, n - 1);
    for i in 1..n {
        for j in 1..n {
            sub[(i - 1, j - 1)] = m[(i, j)].clone();
        }
    }
    let mut col: Vec<F> = (1..n).map(|i| m[(i, 0)].clone()).collect();
    let mut diags = vec![F::one(), a.neg()];
    for step in 0..n - 1 {
        if step > 0 {
            col = sub.mul_vec(&col);
        }
        let dot = row.iter().zip(&col).fold(F::zero(), |acc, (r, c)| acc.add(&r.mul(c)));
        diags.push(dot.neg());
    }
    let inner = berkowitz(&sub);
    // Toeplitz (n+1) x n lower-triangular matrix times `inner`.
    (0..=n)
        .map(|i| {
            (0..n).filter(|&j| j <= i).fold(F::zero(), |acc, j| acc.add(&diags[i - j].mul(&inner[j])))
        })
        .collect()
}

/// Row-major matrix of rational strings, the JSON wire format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RationalRows(pub Vec<Vec<String>>);

impl Matrix<BigRational> {
    pub fn to_strings(&self) -> RationalRows {
        RationalRows(self.to_rows().iter().map(|r| r.iter().map(format_rational).collect()).collect())
    }

    /// Parses rows of `"p/q"` strings; the shape must be given because a
    /// matrix with zero columns has no rows to read it from.
    pub fn from_strings(rows: usize, cols: usize, s: &RationalRows) -> Result<Self> {
        if s.0.len() != rows || s.0.iter().any(|r| r.len() != cols) {
            return Err(Error::Parse(format!("expected a {rows}x{cols} matrix")));
        }
        let data = s
            .0
            .iter()
            .flatten()
            .map(|e| parse_rational(e).ok_or_else(|| Error::Parse(format!("bad rational {e:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_shape(rows, cols, data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{q, Fp};

    fn m(rows: &[Vec<i64>]) -> Matrix<BigRational> {
        Matrix::from_i64(rows)
    }

    #[test]
    fn inverse_and_det() {
        let a = m(&[vec![2, 1], vec![7, 4]]);
        assert_eq!(a.det(), q(1, 1));
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(2));
        assert!(m(&[vec![1, 2], vec![2, 4]]).inverse().is_none());
        assert_eq!(m(&[vec![0, 1], vec![1, 0]]).det(), q(-1, 1));
    }

    #[test]
    fn powers() {
        let a = m(&[vec![1, 1], vec![0, 1]]);
        assert_eq!(a.pow(3).unwrap(), m(&[vec![1, 3], vec![0, 1]]));
        assert_eq!(a.pow(-2).unwrap(), m(&[vec![1, -2], vec![0, 1]]));
        assert_eq!(a.pow(0).unwrap(), Matrix::identity(2));
    }

    #[test]
    fn kernel_basis() {
        let a = m(&[vec![1, 2, 3], vec![2, 4, 6]]);
        let k = a.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(a.mul_vec(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn char_poly_matches_det_expansion() {
        let a = m(&[vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]]);
        let cp = a.char_poly();
        // evaluate det(tI - A) at several t and compare
        for t in -3..4 {
            let tm = Matrix::scalar(3, q(t, 1)).sub(&a);
            let val = cp.iter().rev().fold(q(0, 1), |acc, c| acc * q(t, 1) + c);
            assert_eq!(val, tm.det());
        }
        let f: Matrix<Fp<5>> = Matrix::from_i64(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(f.char_poly(), vec![Fp::new(-1), Fp::new(0), Fp::new(1)]);
    }

    #[test]
    fn string_round_trip() {
        let a = Matrix::from_rows(vec![vec![q(1, 2), q(-3, 1)]]).unwrap();
        let s = a.to_strings();
        assert_eq!(s.0, vec![vec!["1/2".to_string(), "-3".to_string()]]);
        assert_eq!(Matrix::from_strings(1, 2, &s).unwrap(), a);
        let empty: Matrix<BigRational> = Matrix::zeros(0, 2);
        assert_eq!(Matrix::from_strings(0, 2, &empty.to_strings()).unwrap(), empty);
    }
}
