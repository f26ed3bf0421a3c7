//! The 1D constant-well resonance against the transfer-matrix oracle.
//!
//! For a constant profile `eta0` on `[0, 1]`, the exact resonances solve the
//! transcendental equation `e^{2 i kappa} ((kappa - k)/(kappa + k))^2 = 1`
//! with `kappa = sqrt(lambda (1 + eta0))` and `k = sqrt(lambda)`. The oracle
//! below locates a root with a complex Newton iteration, independently of
//! the Nystrom discretization it checks.

use nep_core::family::{OperatorFamily, PiecewiseConstant};
use nep_core::resolvent::Contour;
use nep_core::solver::{default_probes, solve_in_contour_auto};
use num_complex::Complex;

type C = Complex<f64>;

/// Newton root of the transfer-matrix resonance condition.
fn transfer_matrix_resonance(eta0: f64, guess: C) -> C {
    let np = 1.0 + eta0;
    let mut lambda = guess;
    for _ in 0..100 {
        let k = lambda.sqrt();
        let kappa = (lambda * np).sqrt();
        let kp = 0.5 / k;
        let kappap = 0.5 * np / kappa;
        let g = (kappa - k) / (kappa + k);
        let gp = 2.0 * (kappap * k - kp * kappa) / ((kappa + k) * (kappa + k));
        let e = (C::new(0.0, 2.0) * kappa).exp();
        let f = e * g * g - 1.0;
        let fp = e * (C::new(0.0, 2.0) * kappap * g * g + 2.0 * g * gp);
        let step = f / fp;
        lambda -= step;
        if step.norm() < 1e-13 * (1.0 + lambda.norm()) {
            break;
        }
    }
    lambda
}

/// First-resonance asymptotic used to seed the Newton iteration:
/// `kappa ~= pi + i ln rho`, `rho = (sqrt(1+eta0)-1)/(sqrt(1+eta0)+1)`.
fn first_resonance_guess(eta0: f64) -> C {
    let s = (1.0 + eta0).sqrt();
    let rho = (s - 1.0) / (s + 1.0);
    let kappa = C::new(std::f64::consts::PI, rho.ln());
    kappa * kappa / (1.0 + eta0)
}

#[test]
fn oracle_root_satisfies_the_resonance_condition() {
    let eta0 = 1.0;
    let root = transfer_matrix_resonance(eta0, first_resonance_guess(eta0));
    let k = root.sqrt();
    let kappa = (root * 2.0).sqrt();
    let g = (kappa - k) / (kappa + k);
    let f = ((C::new(0.0, 2.0) * kappa).exp() * g * g - 1.0).norm();
    assert!(f < 1e-12, "oracle residual {f}");
    // The resonance sits below the real axis on the principal branch.
    assert!(root.im < 0.0);
    assert!((root - C::new(3.3811, -5.5378)).norm() < 1e-2);
}

#[test]
fn nystrom_resonance_converges_to_the_oracle() {
    let eta0 = 1.0;
    let oracle = transfer_matrix_resonance(eta0, first_resonance_guess(eta0));
    let eta = PiecewiseConstant::constant(eta0);
    let contour = Contour::new(oracle, 0.5, 16).unwrap();

    let mut errors = Vec::new();
    for q in [32usize, 64] {
        let family = OperatorFamily::resonance_1d(&eta, q).unwrap();
        let pairs =
            solve_in_contour_auto(&family, &contour, default_probes(q), 4).unwrap();
        assert!(!pairs.is_empty(), "q = {q}: no resonance found");
        let nearest = pairs
            .iter()
            .map(|p| (p.lambda - oracle).norm())
            .fold(f64::INFINITY, f64::min);
        errors.push(nearest);
    }
    // Discretization error decays when q doubles.
    assert!(
        errors[1] <= 0.5 * errors[0],
        "q-refinement did not halve the error: {errors:?}"
    );
    assert!(errors[1] < 2e-3, "q = 64 error {}", errors[1]);
}

#[test]
fn profile_perturbation_moves_the_resonance_first_order() {
    // delta-eta perturbation: lambda_h from the corrected formula matches
    // the tracked resonance to second order (small fixed q keeps it fast).
    use nep_core::correction::nonlinear_correction;
    use nep_core::family::PerturbationFamily;
    use nep_core::solver::{find_cluster, track};

    let eta0 = 1.0;
    let q = 48;
    let oracle = transfer_matrix_resonance(eta0, first_resonance_guess(eta0));
    let eta = PiecewiseConstant::constant(eta0);
    let delta = PiecewiseConstant::constant(1.0);
    let base = OperatorFamily::resonance_1d(&eta, q).unwrap();
    let dir = OperatorFamily::resonance_1d(&delta, q).unwrap();
    let pert = PerturbationFamily::linear(base.clone(), dir).unwrap();

    let contour = Contour::new(oracle, 0.6, 16).unwrap();
    let cluster = find_cluster(&base, &contour, default_probes(q), 4, None).unwrap();
    assert_eq!(cluster.multiplicity, 1);

    let mut prev_err = f64::INFINITY;
    for &h in &[1e-2, 1e-3] {
        let tracked = track(&pert, &cluster, h, &contour, default_probes(q), 4).unwrap();
        let rep = nonlinear_correction(&pert, &cluster, h).unwrap();
        let err = (tracked.lambda_mean - rep.predicted).norm();
        assert!(err < prev_err / 50.0, "h = {h}: remainder {err} not O(h^2)");
        prev_err = err;
    }
}
