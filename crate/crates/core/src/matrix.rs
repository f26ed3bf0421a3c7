//! Dense complex matrices in row-major storage, plus small vector helpers.
//!
//! The matrix type is the finite-dimensional stand-in for operators on the
//! underlying space: the space is `C^n`, the duality pairing is
//! `<f, g> = g^H f`, and the adjoint of a matrix is its conjugate transpose.

use std::ops::{Index, IndexMut};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{czero, Cx, Scalar};

/// Dense complex matrix, entries in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<S: Scalar> {
    rows: usize,
    cols: usize,
    data: Vec<Cx<S>>,
}

impl<S: Scalar> ComplexMatrix<S> {
    /// Zero matrix. Empty shapes (0 columns) are permitted for factorization
    /// outputs; user-facing constructors require at least one row and column.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![czero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(S::one(), S::zero());
        }
        m
    }

    /// Builds a matrix from row-major data, validating shape and finiteness.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Cx<S>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput("matrix must be at least 1x1".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {}x{} matrix, got {}",
                rows * cols,
                rows,
                cols,
                data.len()
            )));
        }
        let m = Self { rows, cols, data };
        m.check_finite()?;
        Ok(m)
    }

    /// Builds a matrix from nested rows.
    pub fn from_rows(rows: &[Vec<Cx<S>>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::InvalidInput("matrix must be at least 1x1".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data: Vec<Cx<S>> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::from_vec(rows.len(), cols, data)
    }

    /// Builds a square diagonal matrix.
    pub fn diag(entries: &[Cx<S>]) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(Error::InvalidInput("empty diagonal".into()));
        }
        let mut m = Self::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m.check_finite()?;
        Ok(m)
    }

    /// Builds a matrix entry by entry.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Cx<S>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Assembles columns into a matrix.
    pub fn from_columns(cols: &[Vec<Cx<S>>]) -> Result<Self> {
        if cols.is_empty() || cols[0].is_empty() {
            return Err(Error::InvalidInput("matrix must be at least 1x1".into()));
        }
        let rows = cols[0].len();
        if cols.iter().any(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch("ragged columns".into()));
        }
        Ok(Self::from_fn(rows, cols.len(), |i, j| cols[j][i]))
    }

    fn check_finite(&self) -> Result<()> {
        for (k, z) in self.data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "non-finite entry at ({}, {})",
                    k / self.cols,
                    k % self.cols
                )));
            }
        }
        Ok(())
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

    pub fn data(&self) -> &[Cx<S>] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Cx<S>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[Cx<S>]) {
        assert_eq!(col.len(), self.rows);
        for i in 0..self.rows {
            self[(i, j)] = col[i];
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scaled(&self, factor: Cx<S>) -> Self {
        let data = self.data.iter().map(|a| a * factor).collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == czero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + aik * other[(k, j)];
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn matvec(&self, x: &[Cx<S>]) -> Vec<Cx<S>> {
        assert_eq!(self.cols, x.len(), "matvec shape");
        (0..self.rows)
            .map(|i| {
                let mut acc = czero();
                for j in 0..self.cols {
                    acc = acc + self[(i, j)] * x[j];
                }
                acc
            })
            .collect()
    }

    /// Product `self^H * x` without forming the adjoint.
    pub fn adjoint_matvec(&self, x: &[Cx<S>]) -> Vec<Cx<S>> {
        assert_eq!(self.rows, x.len(), "adjoint matvec shape");
        (0..self.cols)
            .map(|j| {
                let mut acc = czero();
                for i in 0..self.rows {
                    acc = acc + self[(i, j)].conj() * x[i];
                }
                acc
            })
            .collect()
    }

    pub fn frobenius_norm(&self) -> S {
        let mut acc = S::zero();
        for z in &self.data {
            acc = acc + z.norm_sqr();
        }
        acc.sqrt()
    }

    pub fn max_abs(&self) -> S {
        let mut m = S::zero();
        for z in &self.data {
            let a = z.norm();
            if a > m {
                m = a;
            }
        }
        m
    }
}

impl<S: Scalar> Index<(usize, usize)> for ComplexMatrix<S> {
    type Output = Cx<S>;

    fn index(&self, (i, j): (usize, usize)) -> &Cx<S> {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<S: Scalar> IndexMut<(usize, usize)> for ComplexMatrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cx<S> {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Euclidean norm of a complex vector.
pub fn vec_norm<S: Scalar>(x: &[Cx<S>]) -> S {
    let mut acc = S::zero();
    for z in x {
        acc = acc + z.norm_sqr();
    }
    acc.sqrt()
}

/// Duality pairing `<f, g> = g^H f`, summed in index order.
pub fn pairing<S: Scalar>(f: &[Cx<S>], g: &[Cx<S>]) -> Cx<S> {
    assert_eq!(f.len(), g.len());
    let mut acc = czero();
    for i in 0..f.len() {
        acc = acc + g[i].conj() * f[i];
    }
    acc
}

/// Rescales a vector to unit Euclidean norm; errors on the zero vector.
pub fn normalized<S: Scalar>(x: &[Cx<S>]) -> Result<Vec<Cx<S>>> {
    let n = vec_norm(x);
    if n <= S::zero() || !n.is_finite() {
        return Err(Error::InvalidInput("cannot normalize zero vector".into()));
    }
    Ok(x.iter().map(|z| z / n).collect())
}

/// `y <- y + a*x`.
pub fn axpy<S: Scalar>(y: &mut [Cx<S>], a: Cx<S>, x: &[Cx<S>]) {
    assert_eq!(y.len(), x.len());
    for i in 0..y.len() {
        y[i] = y[i] + a * x[i];
    }
}
