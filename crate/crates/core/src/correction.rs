//! First-order eigenvalue corrections: the linear (Osborn) correction for
//! standard eigenvalue problems and the nonlinear correction with its
//! denominator condition.
//!
//! For a semisimple nonlinear eigenvalue `lambda0` of `T_0` with right basis
//! `phi_j` and dual basis `phi_j*`, the perturbed eigenvalue satisfies
//!
//! ```text
//! lambda_h ~= lambda0 +
//!     (lambda0^2/m) sum_j <(T_0(lambda0) - T_h(lambda0)) phi_j, phi_j*>
//!     -----------------------------------------------------------------
//!     1 + (lambda0^2/m) sum_j <DT_0(lambda0) phi_j, phi_j*>
//! ```
//!
//! provided the denominator stays away from zero. Both pairings are
//! evaluated at the unperturbed `lambda0`; the remainder is the product of
//! the left/right eigenspace convergence rates, so second order in `h` for
//! linear-in-h perturbations.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::family::PerturbationFamily;
use crate::matrix::{pairing, ComplexMatrix};
use crate::scalar::{cone, czero, Cx, Scalar};
use crate::solver::SpectralCluster;

/// The formula is declared inapplicable when `|denominator|` falls at or
/// below this tolerance.
pub const COND_TOL: f64 = 1e-8;

/// One evaluation of the nonlinear correction formula.
#[derive(Debug, Clone)]
pub struct CorrectionReport<S: Scalar> {
    pub lambda0: Cx<S>,
    pub multiplicity: usize,
    /// `(lambda0^2/m) sum_j <(T_0 - T_h)(lambda0) phi_j, phi_j*>`.
    pub numerator: Cx<S>,
    /// `1 + (lambda0^2/m) sum_j <DT_0(lambda0) phi_j, phi_j*>`.
    pub denominator: Cx<S>,
    /// `lambda0 + numerator/denominator`.
    pub predicted: Cx<S>,
    pub h: S,
    pub condition_ok: bool,
}

fn cluster_mean_pairing<S: Scalar>(
    m: &ComplexMatrix<S>,
    cluster: &SpectralCluster<S>,
) -> Cx<S> {
    // (1/m) sum_j <M phi_j, phi_j*>, accumulated in basis order.
    let mut acc: Cx<S> = czero();
    for j in 0..cluster.multiplicity {
        let phi = cluster.basis.column(j);
        let dual = cluster.dual_basis.column(j);
        acc = acc + pairing(&m.matvec(&phi), &dual);
    }
    acc / Complex::new(S::real(cluster.multiplicity as f64), S::zero())
}

fn check_cluster<S: Scalar>(
    cluster: &SpectralCluster<S>,
    dim: usize,
) -> Result<()> {
    if !cluster.semisimple {
        return Err(Error::DefectiveCluster(
            "corrections require a semisimple cluster".into(),
        ));
    }
    if cluster.basis.rows() != dim {
        return Err(Error::DimensionMismatch(format!(
            "cluster lives in dimension {}, family in {}",
            cluster.basis.rows(),
            dim
        )));
    }
    Ok(())
}

/// Nonlinear first-order correction at perturbation size `h`.
///
/// The numerator evaluates `T_0 - T_h` at the unperturbed `lambda0`; the
/// denominator uses the analytic (or quadrature) derivative of the base
/// family. Errors with [`Error::DenominatorNearSingular`] when the
/// denominator condition fails and [`Error::ZeroEigenvalue`] at
/// `lambda0 = 0`.
pub fn nonlinear_correction<S: Scalar>(
    perturbation: &PerturbationFamily<S>,
    cluster: &SpectralCluster<S>,
    h: S,
) -> Result<CorrectionReport<S>> {
    let base = perturbation.base();
    check_cluster(cluster, base.dim())?;
    let lambda0 = cluster.lambda0;
    if lambda0 == czero() {
        return Err(Error::ZeroEigenvalue);
    }
    let t0 = base.evaluate(lambda0)?;
    let th = perturbation.family_at(h).evaluate(lambda0)?;
    let dt = base.derivative(lambda0)?;
    let lam_sq = lambda0 * lambda0;

    let numerator = lam_sq * cluster_mean_pairing(&t0.sub(&th), cluster);
    let denominator = cone::<S>() + lam_sq * cluster_mean_pairing(&dt, cluster);
    if denominator.norm() <= S::real(COND_TOL) {
        return Err(Error::DenominatorNearSingular(format!(
            "|denominator| = {:.3e} <= {:.0e}",
            denominator.norm().to_f64().unwrap_or(0.0),
            COND_TOL
        )));
    }
    let predicted = lambda0 + numerator / denominator;
    Ok(CorrectionReport {
        lambda0,
        multiplicity: cluster.multiplicity,
        numerator,
        denominator,
        predicted,
        h,
        condition_ok: true,
    })
}

/// The h-independent first-order slope `lambda^(1)` for linear-in-h
/// perturbations, so that `lambda_h = lambda0 + h lambda^(1) + o(h)`:
///
/// `lambda^(1) = -(lambda0^2/m) sum_j <T1(lambda0) phi_j, phi_j*> / denominator`.
pub fn first_order_slope<S: Scalar>(
    perturbation: &PerturbationFamily<S>,
    cluster: &SpectralCluster<S>,
) -> Result<Cx<S>> {
    let base = perturbation.base();
    check_cluster(cluster, base.dim())?;
    let direction = perturbation.direction().ok_or(Error::NotLinearFamily)?;
    let lambda0 = cluster.lambda0;
    if lambda0 == czero() {
        return Err(Error::ZeroEigenvalue);
    }
    let t1 = direction.evaluate(lambda0)?;
    let dt = base.derivative(lambda0)?;
    let lam_sq = lambda0 * lambda0;
    let numerator = -lam_sq * cluster_mean_pairing(&t1, cluster);
    let denominator = cone::<S>() + lam_sq * cluster_mean_pairing(&dt, cluster);
    if denominator.norm() <= S::real(COND_TOL) {
        return Err(Error::DenominatorNearSingular(format!(
            "|denominator| = {:.3e} <= {:.0e}",
            denominator.norm().to_f64().unwrap_or(0.0),
            COND_TOL
        )));
    }
    Ok(numerator / denominator)
}

/// Linear (Osborn) eigenvalue correction for a standard eigenvalue problem.
///
/// Given compact `K` and its approximation `K_n`, and a cluster of `K` at
/// the eigenvalue `mu` (as a nonlinear cluster of the constant family
/// `T == K`, so `mu = 1/lambda0`), predicts the mean of the `m` perturbed
/// eigenvalues:
///
/// `mu_hat = mu - (1/m) sum_j <(K - K_n) phi_j, phi_j*>`.
pub fn osborn_linear_correction<S: Scalar>(
    k: &ComplexMatrix<S>,
    k_n: &ComplexMatrix<S>,
    cluster: &SpectralCluster<S>,
) -> Result<Cx<S>> {
    if k.rows() != k_n.rows() || k.cols() != k_n.cols() || !k.is_square() {
        return Err(Error::DimensionMismatch(
            "K and K_n must be square with equal shape".into(),
        ));
    }
    check_cluster(cluster, k.rows())?;
    if cluster.lambda0 == czero() {
        return Err(Error::ZeroEigenvalue);
    }
    let mu = cluster.lambda0.inv();
    let correction = cluster_mean_pairing(&k.sub(k_n), cluster);
    Ok(mu - correction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::OperatorFamily as F;
    use crate::resolvent::Contour;
    use crate::scalar::cx;
    use crate::solver::{find_cluster, track};

    type M = ComplexMatrix<f64>;
    type P = PerturbationFamily<f64>;

    fn scalar_poly(coeffs: &[f64]) -> F<f64> {
        F::polynomial(
            coeffs
                .iter()
                .map(|&c| M::from_vec(1, 1, vec![cx(c, 0.0)]).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn scalar_cluster(lambda0: f64) -> SpectralCluster<f64> {
        SpectralCluster::from_bases(
            cx(lambda0, 0.0),
            M::from_vec(1, 1, vec![cx(1.0, 0.0)]).unwrap(),
            M::from_vec(1, 1, vec![cx(1.0, 0.0)]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn constant_family_geometric_series() {
        // T_0 = t, T_h = t + h s: lambda0 = 1/t, DT = 0,
        // predicted = 1/t - h s / t^2; exact 1/(t + h s) agrees to O(h^2).
        let t = 0.4;
        let s = 0.7;
        let base = scalar_poly(&[t]);
        let dir = scalar_poly(&[s]);
        let pert = P::linear(base, dir).unwrap();
        let cluster = scalar_cluster(1.0 / t);
        for &h in &[1e-2, 1e-3] {
            let rep = nonlinear_correction(&pert, &cluster, h).unwrap();
            let want = 1.0 / t - h * s / (t * t);
            assert!((rep.predicted - cx(want, 0.0)).norm() < 1e-13);
            // Geometric series: next term is (h s)^2 / t^3.
            let exact = 1.0 / (t + h * s);
            let second_order = (h * s) * (h * s) / (t * t * t);
            assert!((rep.predicted - cx(exact, 0.0)).norm() < 1.5 * second_order);
        }
    }

    #[test]
    fn scalar_quadratic_slope_matches_implicit_differentiation() {
        // T_0 = 0.5 + 0.25 lambda, direction 1, lambda0 = -1 + sqrt(5):
        // slope = -lambda0^2/(1 + 0.25 lambda0^2)
        //       = -lambda0/(0.5 lambda0 + 0.5)  (same by the root equation).
        let lambda0 = -1.0 + 5.0_f64.sqrt();
        let base = scalar_poly(&[0.5, 0.25]);
        let dir = scalar_poly(&[1.0]);
        let pert = P::linear(base, dir).unwrap();
        let cluster = scalar_cluster(lambda0);
        let slope = first_order_slope(&pert, &cluster).unwrap();
        let by_formula = -lambda0 * lambda0 / (1.0 + 0.25 * lambda0 * lambda0);
        let by_implicit = -lambda0 / (0.5 * lambda0 + 0.5);
        assert!((by_formula - by_implicit).abs() < 1e-14);
        assert!((slope - cx(by_formula, 0.0)).norm() < 1e-13);
        assert!((slope.re - (-1.1055728090)).abs() < 1e-9);
        // The slope is h-independent: numerator/(h denominator) at two h.
        for &h in &[1e-2, 1e-3] {
            let rep = nonlinear_correction(&pert, &cluster, h).unwrap();
            let per_h = (rep.numerator / rep.denominator) / cx(h, 0.0);
            assert!((per_h - slope).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_direction_and_linear_scaling() {
        let base = scalar_poly(&[0.5, 0.25]);
        let cluster = scalar_cluster(-1.0 + 5.0_f64.sqrt());
        let zero = P::linear(base.clone(), F::zero(1)).unwrap();
        let rep = nonlinear_correction(&zero, &cluster, 0.01).unwrap();
        assert_eq!(rep.numerator, cx(0.0, 0.0));
        assert_eq!(rep.predicted, cluster.lambda0);
        assert_eq!(first_order_slope(&zero, &cluster).unwrap(), cx(0.0, 0.0));
        // Doubling the direction doubles the slope exactly.
        let d1 = P::linear(base.clone(), scalar_poly(&[0.3, -0.2])).unwrap();
        let d2 = P::linear(base, scalar_poly(&[0.6, -0.4])).unwrap();
        let s1 = first_order_slope(&d1, &cluster).unwrap();
        let s2 = first_order_slope(&d2, &cluster).unwrap();
        assert!((s2 - s1 * cx(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn slope_requires_linear_tag() {
        let base = scalar_poly(&[0.5, 0.25]);
        let cluster = scalar_cluster(-1.0 + 5.0_f64.sqrt());
        let general = P::general(base.clone(), move |h| {
            F::polynomial(vec![M::from_vec(1, 1, vec![cx(0.5 + h * h, 0.0)]).unwrap()]).unwrap()
        });
        assert!(matches!(
            first_order_slope(&general, &cluster),
            Err(Error::NotLinearFamily)
        ));
    }

    #[test]
    fn denominator_guard_fires() {
        // T = 2 - lambda at lambda0 = 1: 1 + lambda0^2 DT = 0.
        let base = scalar_poly(&[2.0, -1.0]);
        let dir = scalar_poly(&[1.0]);
        let pert = P::linear(base, dir).unwrap();
        let cluster = scalar_cluster(1.0);
        assert!(matches!(
            nonlinear_correction(&pert, &cluster, 1e-3),
            Err(Error::DenominatorNearSingular(_))
        ));
        assert!(matches!(
            first_order_slope(&pert, &cluster),
            Err(Error::DenominatorNearSingular(_))
        ));
    }

    #[test]
    fn osborn_diagonal_perturbation_is_exact() {
        // K = diag(1, 0.5), K_n = K + h e1 e1^T at mu = 1: the shift is
        // exactly h and the correction reproduces it with zero remainder.
        let h = 1e-3;
        let k = M::diag(&[cx(1.0, 0.0), cx(0.5, 0.0)]).unwrap();
        let mut k_n = k.clone();
        k_n[(0, 0)] = cx(1.0 + h, 0.0);
        let cluster = SpectralCluster::from_bases(
            cx(1.0, 0.0),
            M::from_vec(2, 1, vec![cx(1.0, 0.0), cx(0.0, 0.0)]).unwrap(),
            M::from_vec(2, 1, vec![cx(1.0, 0.0), cx(0.0, 0.0)]).unwrap(),
        )
        .unwrap();
        let mu_hat = osborn_linear_correction(&k, &k_n, &cluster).unwrap();
        assert!((mu_hat - cx(1.0 + h, 0.0)).norm() < 1e-15);
        // K_n = K leaves mu unchanged.
        let same = osborn_linear_correction(&k, &k, &cluster).unwrap();
        assert_eq!(same, cx(1.0, 0.0));
    }

    #[test]
    fn osborn_nonnormal_first_order() {
        // K = [[1, 1], [0, 0.5]], K_n = K + h e2 e1^T at mu = 1:
        // phi = e1, phi* = (1, 2)^H, mu_hat = 1 + 2h;
        // exact branch mu_h = (1.5 + sqrt(0.25 + 4h))/2 = 1 + 2h - 8h^2 + ...
        let k = M::from_rows(&[vec![cx(1.0, 0.0), cx(1.0, 0.0)], vec![cx(0.0, 0.0), cx(0.5, 0.0)]])
            .unwrap();
        let cluster = SpectralCluster::from_bases(
            cx(1.0, 0.0),
            M::from_vec(2, 1, vec![cx(1.0, 0.0), cx(0.0, 0.0)]).unwrap(),
            M::from_vec(2, 1, vec![cx(1.0, 0.0), cx(2.0, 0.0)]).unwrap(),
        )
        .unwrap();
        let h = 1e-3;
        let mut k_n = k.clone();
        k_n[(1, 0)] = cx(h, 0.0);
        let mu_hat = osborn_linear_correction(&k, &k_n, &cluster).unwrap();
        assert!((mu_hat - cx(1.0 + 2.0 * h, 0.0)).norm() < 1e-14);
        let exact = (1.5 + (0.25 + 4.0 * h).sqrt()) / 2.0;
        let err = (mu_hat - cx(exact, 0.0)).norm();
        assert!(err < 10.0 * h * h, "first-order remainder {err} not O(h^2)");
    }

    #[test]
    fn normalization_invariance() {
        // Rescaling phi (and re-deriving the dual so <phi_i, phi_j*> stays
        // the identity) leaves numerator, denominator and prediction fixed.
        let base = scalar_poly(&[0.5, 0.25]);
        let dir = scalar_poly(&[1.0, 0.5]);
        let pert = P::linear(base, dir).unwrap();
        let lambda0 = -1.0 + 5.0_f64.sqrt();
        let c1 = scalar_cluster(lambda0);
        // Scaled pair: phi -> s phi requires phi* -> phi*/conj(s); with the
        // unit-norm convention we instead rotate by a phase.
        let phase = cx(0.6, 0.8); // |phase| = 1
        let c2 = SpectralCluster::from_bases(
            cx(lambda0, 0.0),
            M::from_vec(1, 1, vec![phase]).unwrap(),
            M::from_vec(1, 1, vec![phase]).unwrap(),
        )
        .unwrap();
        let r1 = nonlinear_correction(&pert, &c1, 1e-3).unwrap();
        let r2 = nonlinear_correction(&pert, &c2, 1e-3).unwrap();
        assert!((r1.numerator - r2.numerator).norm() < 1e-12);
        assert!((r1.denominator - r2.denominator).norm() < 1e-12);
        assert!((r1.predicted - r2.predicted).norm() < 1e-12);
    }

    #[test]
    fn consistency_with_linear_theory_for_constant_families() {
        // For T == K the nonlinear prediction agrees with the
        // reciprocal-transformed Osborn prediction to O(h^2).
        let k = M::from_rows(&[vec![cx(0.8, 0.0), cx(0.2, 0.0)], vec![cx(0.1, 0.0), cx(0.3, 0.0)]])
            .unwrap();
        let base = F::constant(k.clone()).unwrap();
        let d = M::from_rows(&[vec![cx(0.5, 0.0), cx(-0.1, 0.0)], vec![cx(0.2, 0.0), cx(0.4, 0.0)]])
            .unwrap();
        let dir = F::constant(d.clone()).unwrap();
        let pert = P::linear(base.clone(), dir).unwrap();

        // Largest eigenvalue of K is near 0.85; lambda0 = 1/mu near 1.18.
        let g = Contour::new(cx(1.2, 0.0), 0.4, 32).unwrap();
        let cluster = find_cluster(&base, &g, 4, 1, None).unwrap();
        assert_eq!(cluster.multiplicity, 1);

        let h = 1e-4;
        let rep = nonlinear_correction(&pert, &cluster, h).unwrap();
        let k_n = k.add(&d.scaled(cx(h, 0.0)));
        let mu_hat = osborn_linear_correction(&k, &k_n, &cluster).unwrap();
        assert!(
            (rep.predicted - mu_hat.inv()).norm() < 1e-6,
            "nonlinear {} vs reciprocal Osborn {}",
            rep.predicted,
            mu_hat.inv()
        );
    }

    #[test]
    fn slope_matches_central_difference_of_tracked_eigenvalues() {
        let base = scalar_poly(&[0.5, 0.25]);
        let dir = scalar_poly(&[1.0, -0.3]);
        let pert = P::linear(base.clone(), dir).unwrap();
        let g = Contour::new(cx(1.0, 0.0), 1.0, 32).unwrap();
        let cluster = find_cluster(&base, &g, 2, 1, None).unwrap();
        let slope = first_order_slope(&pert, &cluster).unwrap();
        let h = 1e-5;
        let plus = track(&pert, &cluster, h, &g, 2, 1).unwrap();
        let minus = track(&pert, &cluster, -h, &g, 2, 1).unwrap();
        let central = (plus.lambda_mean - minus.lambda_mean) / cx(2.0 * h, 0.0);
        let rel = (slope - central).norm() / slope.norm();
        assert!(rel < 1e-6, "slope {slope} vs central {central}");
    }

    #[test]
    fn remainder_is_second_order() {
        // |lambda_h(track) - predicted(h)| fits a log-log slope >= 1.9.
        let base = scalar_poly(&[0.5, 0.25]);
        let dir = scalar_poly(&[1.0]);
        let pert = P::linear(base.clone(), dir).unwrap();
        let g = Contour::new(cx(1.0, 0.0), 1.0, 32).unwrap();
        let cluster = find_cluster(&base, &g, 2, 1, None).unwrap();
        let hs = [1e-1, 1e-2, 1e-3, 1e-4];
        let mut logs: Vec<(f64, f64)> = Vec::new();
        for &h in &hs {
            let tr = track(&pert, &cluster, h, &g, 2, 1).unwrap();
            let rep = nonlinear_correction(&pert, &cluster, h).unwrap();
            let err = (tr.lambda_mean - rep.predicted).norm();
            assert!(err > 0.0);
            logs.push((h.log10(), err.log10()));
        }
        let n = logs.len() as f64;
        let sx: f64 = logs.iter().map(|p| p.0).sum();
        let sy: f64 = logs.iter().map(|p| p.1).sum();
        let sxx: f64 = logs.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = logs.iter().map(|p| p.0 * p.1).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        assert!(slope >= 1.9, "remainder slope {slope}");
    }
}
