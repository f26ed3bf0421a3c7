//! Singular value decomposition by one-sided Jacobi rotations.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matrix::{vec_norm, ComplexMatrix};
use crate::scalar::{czero, Cx, Scalar};

/// Singular values below `RANK_TOL * sigma_max` are treated as zero. This
/// fixes rank decisions (and the contour solver's rank test) deterministically.
pub const RANK_TOL: f64 = 1e-10;

/// Thin SVD `A = U diag(S) V^H` truncated at the numerical rank.
#[derive(Debug, Clone)]
pub struct Svd<S: Scalar> {
    /// `n x r`, orthonormal columns.
    pub u: ComplexMatrix<S>,
    /// `r` positive values, descending.
    pub sigma: Vec<S>,
    /// `k x r`, orthonormal columns.
    pub v: ComplexMatrix<S>,
}

/// Full factorization with all `min(n,k)` singular values (including zeros);
/// `v` is the complete right unitary factor, `w` holds the rotated columns
/// of `A` (so `w = U diag(sigma)` where defined).
struct JacobiResult<S: Scalar> {
    w: ComplexMatrix<S>,
    sigma: Vec<S>,
    v: ComplexMatrix<S>,
}

/// One-sided Jacobi on the columns of `a` (requires `rows >= cols`).
fn jacobi<S: Scalar>(a: &ComplexMatrix<S>, sweep_cap: usize) -> Result<JacobiResult<S>> {
    let n = a.rows();
    let k = a.cols();
    debug_assert!(n >= k);
    let mut w = a.clone();
    let mut v = ComplexMatrix::<S>::identity(k);
    let eps = S::epsilon() * S::real(4.0);

    let mut sweeps = 0usize;
    loop {
        let mut rotated = false;
        for p in 0..k.saturating_sub(1) {
            for q in p + 1..k {
                let mut app = S::zero();
                let mut aqq = S::zero();
                let mut apq = czero();
                for i in 0..n {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    app = app + wp.norm_sqr();
                    aqq = aqq + wq.norm_sqr();
                    apq = apq + wp.conj() * wq;
                }
                let mag = apq.norm();
                if app == S::zero() || aqq == S::zero() {
                    continue;
                }
                if mag <= eps * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                // Rotation diagonalizing the 2x2 Gram block
                // [[app, apq], [conj(apq), aqq]] with the phase absorbed.
                let phase = apq / Complex::new(mag, S::zero());
                let tau = (aqq - app) / (S::real(2.0) * mag);
                let t = if tau >= S::zero() {
                    S::one() / (tau + (S::one() + tau * tau).sqrt())
                } else {
                    -S::one() / (-tau + (S::one() + tau * tau).sqrt())
                };
                let c = S::one() / (S::one() + t * t).sqrt();
                let s = c * t;
                let cs = Complex::new(c, S::zero());
                let s_p = Complex::new(s, S::zero()) * phase;
                let s_m = Complex::new(s, S::zero()) * phase.conj();
                for i in 0..n {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    w[(i, p)] = cs * wp - s_m * wq;
                    w[(i, q)] = s_p * wp + cs * wq;
                }
                for i in 0..k {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = cs * vp - s_m * vq;
                    v[(i, q)] = s_p * vp + cs * vq;
                }
            }
        }
        if !rotated {
            break;
        }
        sweeps += 1;
        if sweeps > sweep_cap {
            return Err(Error::NoConvergence(format!(
                "one-sided Jacobi exceeded {} sweeps",
                sweep_cap
            )));
        }
    }

    let mut sigma: Vec<S> = (0..k).map(|j| vec_norm(&w.column(j))).collect();
    // Stable descending order by magnitude, index as tie-break.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| {
        sigma[j]
            .partial_cmp(&sigma[i])
            .unwrap()
            .then(i.cmp(&j))
    });
    let w_sorted = ComplexMatrix::from_fn(n, k, |i, j| w[(i, order[j])]);
    let v_sorted = ComplexMatrix::from_fn(k, k, |i, j| v[(i, order[j])]);
    sigma = order.iter().map(|&j| sigma[j]).collect();
    Ok(JacobiResult {
        w: w_sorted,
        sigma,
        v: v_sorted,
    })
}

/// Computes the thin SVD truncated at the numerical rank
/// (`sigma_j > 1e-10 * sigma_1`). The iteration cap is `100 * max(n, k)`
/// sweeps; exceeding it raises [`Error::NoConvergence`].
pub fn svd<S: Scalar>(a: &ComplexMatrix<S>) -> Result<Svd<S>> {
    let (n, k) = (a.rows(), a.cols());
    if n == 0 || k == 0 {
        return Ok(Svd {
            u: ComplexMatrix::zeros(n, 0),
            sigma: vec![],
            v: ComplexMatrix::zeros(k, 0),
        });
    }
    if n < k {
        // Factor the adjoint and swap factors.
        let t = svd(&a.adjoint())?;
        return Ok(Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        });
    }
    let cap = 100 * n.max(k);
    let res = jacobi(a, cap)?;
    let smax = res.sigma.first().copied().unwrap_or_else(S::zero);
    let tol = S::real(RANK_TOL) * smax;
    let r = res
        .sigma
        .iter()
        .take_while(|&&s| s > tol && s > S::zero())
        .count();
    let mut u = ComplexMatrix::zeros(n, r);
    for j in 0..r {
        let col: Vec<Cx<S>> = res.w.column(j).iter().map(|z| z / res.sigma[j]).collect();
        u.set_column(j, &col);
    }
    let v = ComplexMatrix::from_fn(k, r, |i, j| res.v[(i, j)]);
    Ok(Svd {
        u,
        sigma: res.sigma[..r].to_vec(),
        v,
    })
}

/// Operator 2-norm (largest singular value); 0 for the zero matrix.
pub fn operator_norm<S: Scalar>(a: &ComplexMatrix<S>) -> Result<S> {
    Ok(svd(a)?.sigma.first().copied().unwrap_or_else(S::zero))
}

/// Smallest singular value with its right singular vector.
pub fn smallest_right_singular<S: Scalar>(a: &ComplexMatrix<S>) -> Result<(S, Vec<Cx<S>>)> {
    if a.rows() < a.cols() {
        return Err(Error::DimensionMismatch(
            "smallest_right_singular expects rows >= cols".into(),
        ));
    }
    let cap = 100 * a.rows().max(a.cols());
    let res = jacobi(a, cap)?;
    let last = a.cols() - 1;
    Ok((res.sigma[last], res.v.column(last)))
}

/// Orthonormal basis of the (right) null space at a relative tolerance:
/// columns `v_j` of the full right factor with `sigma_j <= rel_tol * sigma_1`.
pub fn null_space<S: Scalar>(a: &ComplexMatrix<S>, rel_tol: S) -> Result<ComplexMatrix<S>> {
    let (n, k) = (a.rows(), a.cols());
    if n < k {
        return Err(Error::DimensionMismatch(
            "null_space expects rows >= cols".into(),
        ));
    }
    let cap = 100 * n.max(k);
    let res = jacobi(a, cap)?;
    let smax = res.sigma.first().copied().unwrap_or_else(S::zero);
    let keep: Vec<usize> = (0..k)
        .filter(|&j| res.sigma[j] <= rel_tol * smax.max(S::min_positive_value()))
        .collect();
    let mut out = ComplexMatrix::zeros(k, keep.len());
    for (c, &j) in keep.iter().enumerate() {
        out.set_column(c, &res.v.column(j));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    type M = ComplexMatrix<f64>;

    fn reconstruct(s: &Svd<f64>) -> M {
        let r = s.sigma.len();
        let mut us = s.u.clone();
        for j in 0..r {
            let col: Vec<_> = us.column(j).iter().map(|z| z * cx(s.sigma[j], 0.0)).collect();
            us.set_column(j, &col);
        }
        us.matmul(&s.v.adjoint())
    }

    #[test]
    fn diagonal_case() {
        let a = M::diag(&[cx(3.0, 0.0), cx(1.0, 0.0)]).unwrap();
        let s = svd(&a).unwrap();
        assert_eq!(s.sigma.len(), 2);
        assert!((s.sigma[0] - 3.0).abs() < 1e-14);
        assert!((s.sigma[1] - 1.0).abs() < 1e-14);
        assert!(reconstruct(&s).sub(&a).frobenius_norm() < 1e-13);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let a = M::zeros(3, 2);
        let s = svd(&a).unwrap();
        assert!(s.sigma.is_empty());
        assert_eq!(s.u.cols(), 0);
        assert_eq!(s.v.cols(), 0);
    }

    #[test]
    fn permuted_singular_vectors() {
        // A = [[0, 2], [1, 0]] has singular values (2, 1); check by
        // reconstruction and orthonormality rather than fixing vector signs.
        let a = M::from_rows(&[
            vec![cx(0.0, 0.0), cx(2.0, 0.0)],
            vec![cx(1.0, 0.0), cx(0.0, 0.0)],
        ])
        .unwrap();
        let s = svd(&a).unwrap();
        assert!((s.sigma[0] - 2.0).abs() < 1e-14);
        assert!((s.sigma[1] - 1.0).abs() < 1e-14);
        assert!(reconstruct(&s).sub(&a).frobenius_norm() < 1e-13);
        let utu = s.u.adjoint().matmul(&s.u);
        assert!(utu.sub(&M::identity(2)).frobenius_norm() < 1e-13);
    }

    #[test]
    fn wide_matrix() {
        let a = M::from_rows(&[vec![cx(1.0, 1.0), cx(0.0, -2.0), cx(0.5, 0.0)]]).unwrap();
        let s = svd(&a).unwrap();
        assert_eq!(s.sigma.len(), 1);
        assert!(reconstruct(&s).sub(&a).frobenius_norm() < 1e-12);
    }

    #[test]
    fn null_space_of_rank_deficient() {
        let a = M::from_rows(&[
            vec![cx(1.0, 0.0), cx(2.0, 0.0)],
            vec![cx(2.0, 0.0), cx(4.0, 0.0)],
        ])
        .unwrap();
        let ns = null_space(&a, 1e-10).unwrap();
        assert_eq!(ns.cols(), 1);
        // A * v = 0 for the null vector.
        let v = ns.column(0);
        assert!(vec_norm(&a.matvec(&v)) < 1e-12);
    }
}
