//! Dense vectors and matrices over any [`Scalar`].
//!
//! Sizes here are tiny (at most a handful of rows), so everything is plain
//! row-major storage with checked dimensions at the public boundary.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Vector<T>(Vec<T>);

impl<T: Scalar> Vector<T> {
    pub fn new(entries: Vec<T>) -> Self {
        Self(entries)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![T::zero(); len])
    }

    pub fn constant(len: usize, value: T) -> Self {
        Self(vec![value; len])
    }

    /// The `k`th standard basis vector (0-based index).
    pub fn basis(len: usize, k: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[k] = T::one();
        v
    }

    pub fn from_i64s(values: &[i64]) -> Self {
        Self(values.iter().map(|&v| T::from_i64(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::SizeMismatch { expected: self.len(), found: other.len() });
        }
        Ok(())
    }

    /// Standard inner product `Σ u_x v_x`.
    pub fn inner(&self, other: &Self) -> Result<T> {
        self.check_len(other)?;
        Ok(self.dot_unchecked(other))
    }

    pub(crate) fn dot_unchecked(&self, other: &Self) -> T {
        self.0.iter().zip(&other.0).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    pub fn norm_sq(&self) -> T {
        self.dot_unchecked(self)
    }

    pub fn sum(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, x| acc + x.clone())
    }

    pub fn mean(&self) -> T {
        self.sum() / T::from_i64(self.len() as i64)
    }

    pub fn scale(&self, c: &T) -> Self {
        Self(self.0.iter().map(|x| x.clone() * c.clone()).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a.clone() + b.clone()).collect()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a.clone() - b.clone()).collect()))
    }

    /// `self + c * other`
    pub fn axpy(&self, c: &T, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a.clone() + c.clone() * b.clone()).collect()))
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|x| -x.clone()).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    pub fn to_f64(&self) -> Vector<f64> {
        Vector(self.0.iter().map(Scalar::to_f64).collect())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Vector<U> {
        Vector(self.0.iter().map(f).collect())
    }

    /// Coordinates permuted so that entry `perm[a]` of the result is entry `a` here.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = self.0.clone();
        for (a, &b) in perm.iter().enumerate() {
            out[b] = self.0[a].clone();
        }
        Self(out)
    }
}

impl<T> Index<usize> for Vector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T> IndexMut<usize> for Vector<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.0[i]
    }
}

impl<T: Scalar> fmt::Display for Vector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(Scalar::to_text).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// `(u, M v)`
pub fn quad_form<T: Scalar>(u: &Vector<T>, m: &Matrix<T>, v: &Vector<T>) -> Result<T> {
    u.inner(&m.mul_vec(v)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != n_cols) {
            return Err(Error::SizeMismatch { expected: n_cols, found: bad.len() });
        }
        Ok(Self { rows: n_rows, cols: n_cols, data: rows.into_iter().flatten().collect() })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vector<T>]) -> Result<Self> {
        let n_rows = cols.first().map_or(0, Vector::len);
        if let Some(bad) = cols.iter().find(|c| c.len() != n_rows) {
            return Err(Error::SizeMismatch { expected: n_rows, found: bad.len() });
        }
        Ok(Self::from_fn(n_rows, cols.len(), |r, c| cols[c][r].clone()))
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| T::from_i64(v)).collect()).collect())
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

    pub fn row(&self, r: usize) -> Vector<T> {
        Vector::new(self.data[r * self.cols..(r + 1) * self.cols].to_vec())
    }

    pub fn column(&self, c: usize) -> Vector<T> {
        Vector::new((0..self.rows).map(|r| self[(r, c)].clone()).collect())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::SizeMismatch { expected: self.cols, found: other.rows });
        }
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[r * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let prod = a.clone() * other.data[k * other.cols + c].clone();
                    let slot = &mut out.data[r * other.cols + c];
                    *slot = slot.clone() + prod;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &Vector<T>) -> Result<Vector<T>> {
        if self.cols != v.len() {
            return Err(Error::SizeMismatch { expected: self.cols, found: v.len() });
        }
        Ok(self.mul_vec_unchecked(v))
    }

    pub(crate) fn mul_vec_unchecked(&self, v: &Vector<T>) -> Vector<T> {
        Vector::new(
            (0..self.rows)
                .map(|r| {
                    (0..self.cols).fold(T::zero(), |acc, c| acc + self.data[r * self.cols + c].clone() * v[c].clone())
                })
                .collect(),
        )
    }

    /// `ᵗM v`, without materializing the transpose.
    pub fn tmul_vec(&self, v: &Vector<T>) -> Result<Vector<T>> {
        if self.rows != v.len() {
            return Err(Error::SizeMismatch { expected: self.rows, found: v.len() });
        }
        Ok(Vector::new(
            (0..self.cols)
                .map(|c| {
                    (0..self.rows).fold(T::zero(), |acc, r| acc + self.data[r * self.cols + c].clone() * v[r].clone())
                })
                .collect(),
        ))
    }

    pub fn scale(&self, c: &T) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.clone() * c.clone()).collect() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::SizeMismatch { expected: self.rows * self.cols, found: other.rows * other.cols });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        })
    }

    /// Sum of all squared entries.
    pub fn frobenius_sq(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, x| acc + x.clone() * x.clone())
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    /// Simultaneous row/column permutation: entry `(perm[a], perm[b])` of the
    /// result is entry `(a, b)` here.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = self.clone();
        for a in 0..self.rows {
            for b in 0..self.cols {
                out[(perm[a], perm[b])] = self[(a, b)].clone();
            }
        }
        out
    }

    /// Index of the pivot row for column `col` among rows `from..`: largest
    /// magnitude for floats, first nonzero for exact types.
    fn pivot_row(&self, col: usize, from: usize) -> Option<usize> {
        if T::EXACT {
            (from..self.rows).find(|&r| !self[(r, col)].is_zero())
        } else {
            (from..self.rows)
                .filter(|&r| !self[(r, col)].is_zero())
                .max_by(|&a, &b| self[(a, col)].to_f64().abs().total_cmp(&self[(b, col)].to_f64().abs()))
        }
    }

    pub fn determinant(&self) -> Result<T> {
        if !self.is_square() {
            return Err(Error::SizeMismatch { expected: self.rows, found: self.cols });
        }
        let mut m = self.clone();
        let n = self.rows;
        let mut det = T::one();
        for col in 0..n {
            let Some(p) = m.pivot_row(col, col) else {
                return Ok(T::zero());
            };
            if p != col {
                m.swap_rows(p, col);
                det = -det;
            }
            let pivot = m[(col, col)].clone();
            det = det * pivot.clone();
            for r in col + 1..n {
                let factor = m[(r, col)].clone() / pivot.clone();
                if factor.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = m[(r, c)].clone() - factor.clone() * m[(col, c)].clone();
                    m[(r, c)] = v;
                }
            }
        }
        Ok(det)
    }

    /// Determinant of the top-left `k × k` block.
    pub fn leading_minor(&self, k: usize) -> Result<T> {
        if k > self.rows.min(self.cols) {
            return Err(Error::SizeMismatch { expected: self.rows.min(self.cols), found: k });
        }
        Self::from_fn(k, k, |r, c| self[(r, c)].clone()).determinant()
    }

    /// Rank by Gaussian elimination; exact for rational entries, tolerance-free
    /// otherwise (exact zero test), so only meaningful for exact types or well
    /// separated floats.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(p) = m.pivot_row(col, rank) else { continue };
            m.swap_rows(p, rank);
            let pivot = m[(rank, col)].clone();
            for r in rank + 1..self.rows {
                let factor = m[(r, col)].clone() / pivot.clone();
                for c in col..self.cols {
                    let v = m[(r, c)].clone() - factor.clone() * m[(rank, c)].clone();
                    m[(r, c)] = v;
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::SizeMismatch { expected: self.rows, found: self.cols });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let p = a.pivot_row(col, col).ok_or(Error::Singular)?;
            a.swap_rows(p, col);
            inv.swap_rows(p, col);
            let pivot = a[(col, col)].clone();
            for c in 0..n {
                a[(col, c)] = a[(col, c)].clone() / pivot.clone();
                inv[(col, c)] = inv[(col, c)].clone() / pivot.clone();
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[(r, col)].clone();
                if factor.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let va = a[(r, c)].clone() - factor.clone() * a[(col, c)].clone();
                    a[(r, c)] = va;
                    let vi = inv[(r, c)].clone() - factor.clone() * inv[(col, c)].clone();
                    inv[(r, c)] = vi;
                }
            }
        }
        Ok(inv)
    }

    /// Solve `self · x = b` for square `self`.
    pub fn solve(&self, b: &Vector<T>) -> Result<Vector<T>> {
        self.inverse()?.mul_vec(b)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(Scalar::to_f64).collect() }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    /// Row-major CSV, one matrix row per line, entries in [`Scalar::to_text`] form.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self[(r, c)].to_text()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}
