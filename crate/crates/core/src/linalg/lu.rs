//! LU factorization with partial pivoting for dense complex matrices.

use crate::error::{Error, Result};
use crate::matrix::{vec_norm, ComplexMatrix};
use crate::scalar::{czero, Cx, Scalar};

/// Relative pivot threshold: a pivot below `PIVOT_TOL * max|A_ij|` is
/// treated as an exact zero and the matrix reported singular.
const PIVOT_TOL: f64 = 1e-14;

/// Packed LU factors of a square matrix, `P A = L U`.
#[derive(Debug, Clone)]
pub struct LuFactors<S: Scalar> {
    lu: ComplexMatrix<S>,
    perm: Vec<usize>,
}

/// Factors a square matrix. Errors with [`Error::SingularMatrix`] when a
/// pivot magnitude falls below `1e-14 * max|A_ij|`.
pub fn factor<S: Scalar>(a: &ComplexMatrix<S>) -> Result<LuFactors<S>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "LU needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let tol = S::real(PIVOT_TOL) * a.max_abs();

    for k in 0..n {
        // Partial pivot on column k.
        let mut p = k;
        let mut best = lu[(k, k)].norm();
        for i in k + 1..n {
            let mag = lu[(i, k)].norm();
            if mag > best {
                best = mag;
                p = i;
            }
        }
        if best <= tol {
            return Err(Error::SingularMatrix(format!(
                "pivot {:.3e} at column {} below threshold",
                best.to_f64().unwrap_or(0.0),
                k
            )));
        }
        if p != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = tmp;
            }
            perm.swap(k, p);
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let m = lu[(i, k)] / pivot;
            lu[(i, k)] = m;
            if m != czero() {
                for j in k + 1..n {
                    let a_kj = lu[(k, j)];
                    lu[(i, j)] = lu[(i, j)] - m * a_kj;
                }
            }
        }
    }
    Ok(LuFactors { lu, perm })
}

impl<S: Scalar> LuFactors<S> {
    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// Solves `A x = b` for one right-hand side.
    pub fn solve_vec(&self, b: &[Cx<S>]) -> Vec<Cx<S>> {
        let n = self.dim();
        assert_eq!(b.len(), n, "rhs length");
        // Forward substitution on L (unit diagonal) with permuted rhs.
        let mut x: Vec<Cx<S>> = (0..n).map(|i| b[self.perm[i]]).collect();
        for i in 1..n {
            let mut acc = x[i];
            for j in 0..i {
                acc = acc - self.lu[(i, j)] * x[j];
            }
            x[i] = acc;
        }
        // Back substitution on U.
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc = acc - self.lu[(i, j)] * x[j];
            }
            x[i] = acc / self.lu[(i, i)];
        }
        x
    }

    /// Solves `A X = B` column by column.
    pub fn solve(&self, b: &ComplexMatrix<S>) -> ComplexMatrix<S> {
        let n = self.dim();
        assert_eq!(b.rows(), n, "rhs rows");
        let mut out = ComplexMatrix::zeros(n, b.cols());
        for j in 0..b.cols() {
            let col = self.solve_vec(&b.column(j));
            out.set_column(j, &col);
        }
        out
    }

    /// Solves `A^H y = c` using the factors of `A`:
    /// `A^H = U^H L^H P`, so solve `U^H z = c`, `L^H w = z`, `y = P^T w`.
    pub fn adjoint_solve_vec(&self, c: &[Cx<S>]) -> Vec<Cx<S>> {
        let n = self.dim();
        assert_eq!(c.len(), n, "rhs length");
        // U^H is lower triangular: forward substitution.
        let mut z = c.to_vec();
        for i in 0..n {
            let mut acc = z[i];
            for j in 0..i {
                acc = acc - self.lu[(j, i)].conj() * z[j];
            }
            z[i] = acc / self.lu[(i, i)].conj();
        }
        // L^H is unit upper triangular: back substitution.
        for i in (0..n).rev() {
            let mut acc = z[i];
            for j in i + 1..n {
                acc = acc - self.lu[(j, i)].conj() * z[j];
            }
            z[i] = acc;
        }
        // Undo the row permutation: y[perm[i]] = w[i].
        let mut y = vec![czero(); n];
        for i in 0..n {
            y[self.perm[i]] = z[i];
        }
        y
    }

    /// Estimates the smallest singular value by fixed-count power iteration
    /// on `(A^H A)^{-1}`. Deterministic start vector; accurate to a few
    /// percent, which is enough for pole-proximity guards.
    pub fn smallest_singular_estimate(&self) -> S {
        let n = self.dim();
        let scale = S::real(1.0) / S::real(n as f64).sqrt();
        let mut x: Vec<Cx<S>> = (0..n)
            .map(|i| {
                // Mildly irregular deterministic start to avoid symmetry traps.
                let t = S::real(0.5 + (i as f64 % 7.0) / 13.0);
                Cx::new(scale * t, scale * (S::one() - t))
            })
            .collect();
        let xn = vec_norm(&x);
        for z in x.iter_mut() {
            *z = *z / xn;
        }
        let mut growth = S::one();
        for _ in 0..6 {
            let y = self.solve_vec(&x);
            let z = self.adjoint_solve_vec(&y);
            growth = vec_norm(&z);
            if !growth.is_finite() || growth <= S::zero() {
                return S::zero();
            }
            x = z.iter().map(|v| v / growth).collect();
        }
        // growth approximates 1/sigma_min^2 per iteration at convergence.
        S::one() / growth.sqrt()
    }
}

/// Solves `A X = B`; the workhorse behind every resolvent application.
pub fn solve_linear<S: Scalar>(
    a: &ComplexMatrix<S>,
    b: &ComplexMatrix<S>,
) -> Result<ComplexMatrix<S>> {
    if b.rows() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "A is {}x{} but B has {} rows",
            a.rows(),
            a.cols(),
            b.rows()
        )));
    }
    Ok(factor(a)?.solve(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    type M = ComplexMatrix<f64>;

    #[test]
    fn identity_solve() {
        let b = M::from_rows(&[
            vec![cx(1.0, 2.0), cx(-0.5, 0.0)],
            vec![cx(3.0, -1.0), cx(0.25, 0.125)],
            vec![cx(0.0, 0.0), cx(7.0, 7.0)],
        ])
        .unwrap();
        let x = solve_linear(&M::identity(3), &b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn diagonal_solve() {
        let a = M::diag(&[cx(2.0, 0.0), cx(4.0, 0.0)]).unwrap();
        let b = M::from_rows(&[vec![cx(1.0, 0.0)], vec![cx(1.0, 0.0)]]).unwrap();
        let x = solve_linear(&a, &b).unwrap();
        assert!((x[(0, 0)] - cx(0.5, 0.0)).norm() < 1e-15);
        assert!((x[(1, 0)] - cx(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn permutation_solve() {
        let a = M::from_rows(&[
            vec![cx(0.0, 0.0), cx(1.0, 0.0)],
            vec![cx(1.0, 0.0), cx(0.0, 0.0)],
        ])
        .unwrap();
        let b = M::from_rows(&[vec![cx(-3.0, 1.0)], vec![cx(2.0, 5.0)]]).unwrap();
        let x = solve_linear(&a, &b).unwrap();
        assert!((x[(0, 0)] - cx(2.0, 5.0)).norm() < 1e-15);
        assert!((x[(1, 0)] - cx(-3.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn singular_detected() {
        let a = M::from_rows(&[
            vec![cx(1.0, 0.0), cx(2.0, 0.0)],
            vec![cx(2.0, 0.0), cx(4.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(
            factor(&a),
            Err(Error::SingularMatrix(_))
        ));
    }

    #[test]
    fn adjoint_solve_matches_adjoint_factor() {
        let a = M::from_rows(&[
            vec![cx(2.0, 1.0), cx(-1.0, 0.5), cx(0.0, 3.0)],
            vec![cx(0.5, -2.0), cx(4.0, 0.0), cx(1.0, 1.0)],
            vec![cx(-1.0, 0.0), cx(2.0, -1.0), cx(3.0, 2.0)],
        ])
        .unwrap();
        let c = vec![cx(1.0, -1.0), cx(0.5, 2.0), cx(-3.0, 0.25)];
        let via_adj_solve = factor(&a).unwrap().adjoint_solve_vec(&c);
        let via_adj_factor = factor(&a.adjoint()).unwrap().solve_vec(&c);
        for (x, y) in via_adj_solve.iter().zip(&via_adj_factor) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn sigma_min_estimate_diagonal() {
        let a = M::diag(&[cx(5.0, 0.0), cx(0.001, 0.0), cx(1.0, 0.0)]).unwrap();
        let est = factor(&a).unwrap().smallest_singular_estimate();
        assert!((est - 0.001).abs() < 1e-5, "est = {est}");
    }
}
