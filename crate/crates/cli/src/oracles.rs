//! Independent oracles used by the verification suite and the acceptance
//! tests. Everything here computes expected values by a route disjoint from
//! the code path it checks: closed-form algebra, companion linearizations,
//! transfer-matrix root finding, and residue limits.

use nep_core::family::OperatorFamily;
use nep_core::linalg::{eig_dense, lu};
use nep_core::matrix::ComplexMatrix;
use nep_core::resolvent::apply_resolvent;
use nep_core::{C64, Matrix64};

/// Roots of `c z^2 + b z + a = 0` (two when `c != 0`, one when linear).
pub fn quadratic_roots(a: C64, b: C64, c: C64) -> Vec<C64> {
    if c.norm() == 0.0 {
        if b.norm() == 0.0 {
            return vec![];
        }
        return vec![-a / b];
    }
    let disc = (b * b - 4.0 * a * c).sqrt();
    // Numerically stable pairing.
    let q = if (b + disc).norm() >= (b - disc).norm() {
        -0.5 * (b + disc)
    } else {
        -0.5 * (b - disc)
    };
    vec![q / c, a / q]
}

/// Eigenvalues of the companion linearization of
/// `det(A + lambda B + lambda^2 C) = 0` (requires invertible `C`):
/// the `2n x 2n` matrix `[[0, I], [-C^{-1}A, -C^{-1}B]]`.
pub fn companion_eigenvalues(
    a: &Matrix64,
    b: &Matrix64,
    c: &Matrix64,
) -> Result<Vec<C64>, nep_core::Error> {
    let n = a.rows();
    let fac = lu::factor(c)?;
    let ca = fac.solve(a);
    let cb = fac.solve(b);
    let mut comp = Matrix64::zeros(2 * n, 2 * n);
    for i in 0..n {
        comp[(i, n + i)] = C64::new(1.0, 0.0);
        for j in 0..n {
            comp[(n + i, j)] = -ca[(i, j)];
            comp[(n + i, n + j)] = -cb[(i, j)];
        }
    }
    Ok(eig_dense(&comp)?.values)
}

/// Newton root of the constant-well transfer-matrix resonance condition
/// `e^{2 i kappa} ((kappa - k)/(kappa + k))^2 = 1`, `kappa = sqrt((1+eta0)
/// lambda)`, `k = sqrt(lambda)`, from the given starting point.
pub fn transfer_matrix_resonance(eta0: f64, guess: C64) -> C64 {
    let np = 1.0 + eta0;
    let mut lambda = guess;
    for _ in 0..100 {
        let k = lambda.sqrt();
        let kappa = (lambda * np).sqrt();
        let kp = 0.5 / k;
        let kappap = 0.5 * np / kappa;
        let g = (kappa - k) / (kappa + k);
        let gp = 2.0 * (kappap * k - kp * kappa) / ((kappa + k) * (kappa + k));
        let e = (C64::new(0.0, 2.0) * kappa).exp();
        let f = e * g * g - 1.0;
        let fp = e * (C64::new(0.0, 2.0) * kappap * g * g + 2.0 * g * gp);
        let step = f / fp;
        lambda -= step;
        if step.norm() < 1e-13 * (1.0 + lambda.norm()) {
            break;
        }
    }
    lambda
}

/// Residual of the transfer-matrix condition at `lambda`.
pub fn transfer_matrix_residual(eta0: f64, lambda: C64) -> f64 {
    let k = lambda.sqrt();
    let kappa = (lambda * (1.0 + eta0)).sqrt();
    let g = (kappa - k) / (kappa + k);
    ((C64::new(0.0, 2.0) * kappa).exp() * g * g - 1.0).norm()
}

/// Asymptotic seed for the n-th constant-well resonance:
/// `kappa ~= n pi + i ln rho` with `rho = (sqrt(1+eta0)-1)/(sqrt(1+eta0)+1)`.
pub fn resonance_guess(eta0: f64, n: usize) -> C64 {
    let s = (1.0 + eta0).sqrt();
    let rho = (s - 1.0) / (s + 1.0);
    let kappa = C64::new(n as f64 * std::f64::consts::PI, rho.ln());
    kappa * kappa / (1.0 + eta0)
}

/// Residue of the scalar modified resolvent at a simple pole `lambda0`,
/// estimated by averaging `(lambda - lambda0) R(lambda)` on a tiny circle
/// (the linear Laurent term cancels on the circle average).
pub fn residue_limit(family: &OperatorFamily<f64>, lambda0: C64, radius: f64) -> C64 {
    let eye = ComplexMatrix::identity(1);
    let m = 64;
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..m {
        let th = 2.0 * std::f64::consts::PI * (j as f64) / (m as f64);
        let z = lambda0 + C64::new(radius * th.cos(), radius * th.sin());
        let r = apply_resolvent(family, z, &eye).expect("off-pole sample");
        acc += (z - lambda0) * r[(0, 0)];
    }
    acc / C64::new(m as f64, 0.0)
}

/// Exact perturbed eigenvalue branch near 1 for `[[1, 1], [h, 0.5]]`
/// (the non-normal Osborn test case): `mu_h = (1.5 + sqrt(0.25 + 4h))/2`.
pub fn nonnormal_exact_eigenvalue(h: f64) -> f64 {
    (1.5 + (0.25 + 4.0 * h).sqrt()) / 2.0
}

/// Implicit-differentiation slope of the root of
/// `0.25 l^2 + (0.5 + h) l - 1 = 0` at `h = 0`: `-l0/(0.5 l0 + 0.5)`.
pub fn scalar_quadratic_slope(lambda0: f64) -> f64 {
    -lambda0 / (0.5 * lambda0 + 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_root_pairing() {
        // 0.25 z^2 + 0.5 z - 1: roots -1 +- sqrt(5).
        let roots = quadratic_roots(C64::new(-1.0, 0.0), C64::new(0.5, 0.0), C64::new(0.25, 0.0));
        let mut re: Vec<f64> = roots.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((re[0] - (-1.0 - 5.0_f64.sqrt())).abs() < 1e-14);
        assert!((re[1] - (-1.0 + 5.0_f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn transfer_matrix_root_is_a_root() {
        let root = transfer_matrix_resonance(1.0, resonance_guess(1.0, 1));
        assert!(transfer_matrix_residual(1.0, root) < 1e-12);
        assert!(root.im < 0.0);
    }
}
