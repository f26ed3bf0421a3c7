//! Dense complex eigensolver: Hessenberg reduction followed by shifted QR
//! iteration to Schur form, then triangular back/forward substitution for
//! right and left eigenvectors.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matrix::{normalized, ComplexMatrix};
use crate::scalar::{cone, czero, Cx, Scalar};

/// Small dense problems only; the contour solver's reduced problems and the
/// companion-linearization oracle stay well under this.
pub const MAX_DIM: usize = 200;

/// Eigenvalues with matched right and left eigenvectors (unit 2-norm columns).
///
/// For each index `i`: `A v_i ~= mu_i v_i` and `w_i^H A ~= mu_i w_i^H`.
#[derive(Debug, Clone)]
pub struct Eigen<S: Scalar> {
    pub values: Vec<Cx<S>>,
    pub right: ComplexMatrix<S>,
    pub left: ComplexMatrix<S>,
}

struct Givens<S: Scalar> {
    c: S,
    s: Cx<S>,
}

fn givens<S: Scalar>(f: Cx<S>, g: Cx<S>) -> Givens<S> {
    let fn_ = f.norm();
    let gn = g.norm();
    if gn == S::zero() {
        return Givens {
            c: S::one(),
            s: czero(),
        };
    }
    if fn_ == S::zero() {
        return Givens {
            c: S::zero(),
            s: g.conj() / Complex::new(gn, S::zero()),
        };
    }
    let d = (fn_ * fn_ + gn * gn).sqrt();
    let c = fn_ / d;
    let s = (f / Complex::new(fn_, S::zero())) * g.conj() / Complex::new(d, S::zero());
    Givens { c, s }
}

/// Applies G to rows (i, i+1): `row_i <- c*row_i + s*row_{i+1}`,
/// `row_{i+1} <- -conj(s)*row_i + c*row_{i+1}`, over columns `j0..j1`.
fn rot_left<S: Scalar>(h: &mut ComplexMatrix<S>, g: &Givens<S>, i: usize, j0: usize, j1: usize) {
    let c = Complex::new(g.c, S::zero());
    for j in j0..j1 {
        let a = h[(i, j)];
        let b = h[(i + 1, j)];
        h[(i, j)] = c * a + g.s * b;
        h[(i + 1, j)] = -g.s.conj() * a + c * b;
    }
}

/// Applies G^H to columns (j, j+1): `col_j <- c*col_j + conj(s)*col_{j+1}`,
/// `col_{j+1} <- -s*col_j + c*col_{j+1}`, over rows `i0..i1`.
fn rot_right<S: Scalar>(h: &mut ComplexMatrix<S>, g: &Givens<S>, j: usize, i0: usize, i1: usize) {
    let c = Complex::new(g.c, S::zero());
    for i in i0..i1 {
        let a = h[(i, j)];
        let b = h[(i, j + 1)];
        h[(i, j)] = c * a + g.s.conj() * b;
        h[(i, j + 1)] = -g.s * a + c * b;
    }
}

/// Reduces `a` to upper Hessenberg form `H = Q^H A Q`, returning `(H, Q)`.
fn hessenberg<S: Scalar>(a: &ComplexMatrix<S>) -> (ComplexMatrix<S>, ComplexMatrix<S>) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = ComplexMatrix::<S>::identity(n);
    for col in 0..n.saturating_sub(2) {
        let m = n - col - 1;
        // Householder vector for rows col+1..n of column col.
        let mut v: Vec<Cx<S>> = (0..m).map(|i| h[(col + 1 + i, col)]).collect();
        let mut norm2 = S::zero();
        for z in &v {
            norm2 = norm2 + z.norm_sqr();
        }
        let tail: S = v.iter().skip(1).map(|z| z.norm_sqr()).fold(S::zero(), |a, b| a + b);
        if tail == S::zero() {
            continue;
        }
        let norm = norm2.sqrt();
        let phase = if v[0].norm() == S::zero() {
            cone()
        } else {
            v[0] / Complex::new(v[0].norm(), S::zero())
        };
        v[0] = v[0] + phase * Complex::new(norm, S::zero());
        let mut vv = S::zero();
        for z in &v {
            vv = vv + z.norm_sqr();
        }
        if vv == S::zero() {
            continue;
        }
        let beta = S::real(2.0) / vv;
        let betac = Complex::new(beta, S::zero());

        // Left: H[col+1.., col..] -= v (beta v^H H).
        for j in col..n {
            let mut acc: Cx<S> = czero();
            for i in 0..m {
                acc = acc + v[i].conj() * h[(col + 1 + i, j)];
            }
            acc = acc * betac;
            for i in 0..m {
                h[(col + 1 + i, j)] = h[(col + 1 + i, j)] - v[i] * acc;
            }
        }
        // Right: H[.., col+1..] -= (H v beta) v^H.
        for i in 0..n {
            let mut acc: Cx<S> = czero();
            for j in 0..m {
                acc = acc + h[(i, col + 1 + j)] * v[j];
            }
            acc = acc * betac;
            for j in 0..m {
                h[(i, col + 1 + j)] = h[(i, col + 1 + j)] - acc * v[j].conj();
            }
        }
        // Accumulate Q the same way as the right application.
        for i in 0..n {
            let mut acc: Cx<S> = czero();
            for j in 0..m {
                acc = acc + q[(i, col + 1 + j)] * v[j];
            }
            acc = acc * betac;
            for j in 0..m {
                q[(i, col + 1 + j)] = q[(i, col + 1 + j)] - acc * v[j].conj();
            }
        }
    }
    // Clean below the first subdiagonal.
    for i in 0..n {
        for j in 0..i.saturating_sub(1) {
            h[(i, j)] = czero();
        }
    }
    (h, q)
}

/// Wilkinson shift: eigenvalue of the trailing 2x2 block closest to its
/// bottom-right entry.
fn wilkinson<S: Scalar>(a: Cx<S>, b: Cx<S>, c: Cx<S>, d: Cx<S>) -> Cx<S> {
    let half = Complex::new(S::real(0.5), S::zero());
    let tr = (a + d) * half;
    let det = a * d - b * c;
    let disc = (tr * tr - det).sqrt();
    let e1 = tr + disc;
    let e2 = tr - disc;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// Schur decomposition `A = Z T Z^H` with `T` upper triangular.
fn schur<S: Scalar>(a: &ComplexMatrix<S>) -> Result<(ComplexMatrix<S>, ComplexMatrix<S>)> {
    let n = a.rows();
    let (mut h, mut z) = hessenberg(a);
    if n <= 1 {
        return Ok((h, z));
    }
    let hnorm = h.frobenius_norm();
    let eps = S::epsilon();
    let floor = S::min_positive_value() * S::real(16.0);

    let mut hi = n - 1;
    let mut stall = 0usize;
    let mut total = 0usize;
    let cap = 120 * n;
    loop {
        // Deflate negligible subdiagonals.
        for i in 1..=hi {
            let sub = h[(i, i - 1)].norm();
            if sub == S::zero() {
                continue;
            }
            let tst = h[(i - 1, i - 1)].norm() + h[(i, i)].norm();
            let thr = if tst > S::zero() { eps * tst } else { eps * hnorm };
            if sub <= thr.max(floor) {
                h[(i, i - 1)] = czero();
            }
        }
        // Shrink from the bottom.
        while hi > 0 && h[(hi, hi - 1)] == czero() {
            hi -= 1;
            stall = 0;
        }
        if hi == 0 {
            break;
        }
        // Window start.
        let mut lo = hi;
        while lo > 0 && h[(lo, lo - 1)] != czero() {
            lo -= 1;
        }

        total += 1;
        stall += 1;
        if total > cap {
            return Err(Error::NoConvergence(format!(
                "QR iteration cap {} exceeded",
                cap
            )));
        }
        let mu = if stall % 13 == 0 {
            // Exceptional shift to break symmetric stalls.
            h[(hi, hi)] + Complex::new(S::real(0.75) * h[(hi, hi - 1)].norm(), S::zero())
        } else {
            wilkinson(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        // Explicit shifted QR step on [lo, hi].
        for i in lo..=hi {
            h[(i, i)] = h[(i, i)] - mu;
        }
        let mut rots: Vec<Givens<S>> = Vec::with_capacity(hi - lo);
        for i in lo..hi {
            let g = givens(h[(i, i)], h[(i + 1, i)]);
            rot_left(&mut h, &g, i, i, n);
            h[(i + 1, i)] = czero();
            rots.push(g);
        }
        for (k, g) in rots.iter().enumerate() {
            let j = lo + k;
            let imax = (j + 2).min(hi + 1);
            rot_right(&mut h, g, j, 0, imax);
            rot_right(&mut z, g, j, 0, n);
        }
        for i in lo..=hi {
            h[(i, i)] = h[(i, i)] + mu;
        }
    }
    // Zero strictly-lower storage.
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = czero();
        }
    }
    Ok((h, z))
}

/// Right eigenvector of the triangular `t` for the eigenvalue at `idx`,
/// padded to full length.
fn triangular_right<S: Scalar>(t: &ComplexMatrix<S>, idx: usize, dmin: S) -> Vec<Cx<S>> {
    let n = t.rows();
    let lam = t[(idx, idx)];
    let big = S::real(1e100);
    let mut x: Vec<Cx<S>> = vec![czero(); n];
    x[idx] = cone();
    for j in (0..idx).rev() {
        let mut s: Cx<S> = czero();
        for k in j + 1..=idx {
            s = s + t[(j, k)] * x[k];
        }
        let mut d = t[(j, j)] - lam;
        if d.norm() < dmin {
            d = if d.norm() == S::zero() {
                Complex::new(dmin, S::zero())
            } else {
                d / Complex::new(d.norm(), S::zero()) * Complex::new(dmin, S::zero())
            };
        }
        x[j] = -s / d;
        if x[j].norm() > big {
            let scale = Complex::new(S::one() / x[j].norm(), S::zero());
            for v in x.iter_mut() {
                *v = *v * scale;
            }
        }
    }
    x
}

/// Left eigenvector (as a plain vector `w`, so `w^H T = lam w^H`) of the
/// triangular `t` for the eigenvalue at `idx`, padded to full length.
fn triangular_left<S: Scalar>(t: &ComplexMatrix<S>, idx: usize, dmin: S) -> Vec<Cx<S>> {
    let n = t.rows();
    let lam = t[(idx, idx)];
    let big = S::real(1e100);
    // c[j] holds conj(w[j]); the recurrence is linear in the entries of T.
    let mut c: Vec<Cx<S>> = vec![czero(); n];
    c[idx] = cone();
    for j in idx + 1..n {
        let mut s: Cx<S> = czero();
        for k in idx..j {
            s = s + c[k] * t[(k, j)];
        }
        let mut d = t[(j, j)] - lam;
        if d.norm() < dmin {
            d = if d.norm() == S::zero() {
                Complex::new(dmin, S::zero())
            } else {
                d / Complex::new(d.norm(), S::zero()) * Complex::new(dmin, S::zero())
            };
        }
        c[j] = -s / d;
        if c[j].norm() > big {
            let scale = Complex::new(S::one() / c[j].norm(), S::zero());
            for v in c.iter_mut() {
                *v = *v * scale;
            }
        }
    }
    c.iter().map(|z| z.conj()).collect()
}

/// Computes eigenvalues with right and left eigenvectors of a square matrix
/// (`m <= 200`). Output is sorted by real part, then imaginary part.
pub fn eig_dense<S: Scalar>(a: &ComplexMatrix<S>) -> Result<Eigen<S>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eig needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if n > MAX_DIM {
        return Err(Error::InvalidInput(format!(
            "eig_dense supports m <= {}, got {}",
            MAX_DIM, n
        )));
    }
    let (t, z) = schur(a)?;
    let dmin = S::epsilon() * t.frobenius_norm().max(S::min_positive_value());

    type Item<S> = (Cx<S>, Vec<Cx<S>>, Vec<Cx<S>>);
    let mut items: Vec<Item<S>> = Vec::with_capacity(n);
    for i in 0..n {
        let x = triangular_right(&t, i, dmin);
        let v = normalized(&z.matvec(&x))?;
        let w_t = triangular_left(&t, i, dmin);
        let w = normalized(&z.matvec(&w_t))?;
        items.push((t[(i, i)], v, w));
    }
    items.sort_by(|a, b| {
        (a.0.re, a.0.im)
            .partial_cmp(&(b.0.re, b.0.im))
            .expect("finite eigenvalues")
    });

    let values: Vec<Cx<S>> = items.iter().map(|it| it.0).collect();
    let right = ComplexMatrix::from_columns(&items.iter().map(|it| it.1.clone()).collect::<Vec<_>>())?;
    let left = ComplexMatrix::from_columns(&items.iter().map(|it| it.2.clone()).collect::<Vec<_>>())?;
    Ok(Eigen {
        values,
        right,
        left,
    })
}
