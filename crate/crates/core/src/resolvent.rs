//! The modified resolvent `R(lambda) = (I - lambda T(lambda))^{-1}`, its
//! contour moments for pole detection, and the resolvent perturbation bound.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::family::OperatorFamily;
use crate::linalg::{lu, svd};
use crate::matrix::ComplexMatrix;
use crate::scalar::{Cx, Scalar};

/// A node whose `I - lambda T(lambda)` has smallest singular value below
/// this fraction of its Frobenius norm aborts the quadrature: the contour
/// passes too close to a pole for the moments to be trusted.
const NODE_POLE_TOL: f64 = 1e-10;

/// Moments with norm above this fraction of the resolvent scale at the
/// nodes certify a pole inside the contour.
const POLE_DETECT_TOL: f64 = 1e-8;

/// Default highest moment order consulted for pole/rank decisions.
pub const DEFAULT_ALPHA_MAX: usize = 2;

/// Positively oriented circle with trapezoid nodes
/// `lambda_j = center + radius e^{2 pi i j / N}`.
#[derive(Debug, Clone)]
pub struct Contour<S: Scalar> {
    center: Cx<S>,
    radius: S,
    nodes: usize,
}

impl<S: Scalar> Contour<S> {
    /// Requires `radius > 0` and an even node count of at least 16.
    pub fn new(center: Cx<S>, radius: S, nodes: usize) -> Result<Self> {
        if radius.is_nan() || radius <= S::zero() || radius.is_infinite() {
            return Err(Error::InvalidInput("contour radius must be positive".into()));
        }
        if nodes < 16 || nodes % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "contour needs an even node count >= 16, got {}",
                nodes
            )));
        }
        Ok(Self {
            center,
            radius,
            nodes,
        })
    }

    pub fn center(&self) -> Cx<S> {
        self.center
    }

    pub fn radius(&self) -> S {
        self.radius
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Offset of node `j` from the center.
    pub fn offset(&self, j: usize) -> Cx<S> {
        let theta = S::real(2.0) * S::PI() * S::real(j as f64) / S::real(self.nodes as f64);
        Complex::new(theta.cos(), theta.sin()) * Complex::new(self.radius, S::zero())
    }

    pub fn node(&self, j: usize) -> Cx<S> {
        self.center + self.offset(j)
    }

    /// A variant with a different node count (used for refinement checks).
    pub fn with_nodes(&self, nodes: usize) -> Result<Self> {
        Self::new(self.center, self.radius, nodes)
    }

    /// Checks the closed disk stays inside the family's analyticity region.
    pub fn validate_region(&self, family: &OperatorFamily<S>) -> Result<()> {
        if !family.region().contains_disk(self.center, self.radius) {
            return Err(Error::OutOfRegion(format!(
                "contour disk (center {} + {}i, radius {}) leaves the analyticity region",
                self.center.re, self.center.im, self.radius
            )));
        }
        Ok(())
    }
}

/// Trapezoid moments `M_alpha = (1/2 pi i) \oint (lambda - center)^alpha
/// R(lambda) dlambda` together with per-node solve diagnostics.
#[derive(Debug, Clone)]
pub struct MomentTable<S: Scalar> {
    /// `moments[alpha]` for `alpha = 0..=alpha_max`.
    pub moments: Vec<ComplexMatrix<S>>,
    /// Relative residual of each node solve `(I - lambda T) R = I`.
    pub node_residuals: Vec<S>,
    /// Smallest ratio `sigma_min / ||I - lambda T||_F` seen over the nodes;
    /// small values mean the contour grazes a pole.
    pub min_sigma_ratio: S,
    /// Largest resolvent Frobenius norm over the nodes (the natural scale
    /// against which moment magnitudes are judged).
    pub resolvent_scale: S,
}

impl<S: Scalar> MomentTable<S> {
    /// True when every moment is negligible although some node solve was
    /// near singular: the quadrature likely straddled structure it cannot
    /// represent, so absence of moments should not be read as absence of
    /// eigenvalues.
    pub fn suspicious(&self) -> bool {
        let tol = S::real(POLE_DETECT_TOL) * self.resolvent_scale;
        let all_small = self.moments.iter().all(|m| m.frobenius_norm() <= tol);
        all_small && self.min_sigma_ratio < S::real(1e-6)
    }
}

/// Applies the modified resolvent: solves `(I - lambda T(lambda)) X = B`.
///
/// A singular system signals that `lambda` is (numerically) a nonlinear
/// eigenvalue of the family.
pub fn apply_resolvent<S: Scalar>(
    family: &OperatorFamily<S>,
    lambda: Cx<S>,
    b: &ComplexMatrix<S>,
) -> Result<ComplexMatrix<S>> {
    let s = resolvent_system(family, lambda)?;
    lu::solve_linear(&s, b)
}

/// Forms `I - lambda T(lambda)`.
pub fn resolvent_system<S: Scalar>(
    family: &OperatorFamily<S>,
    lambda: Cx<S>,
) -> Result<ComplexMatrix<S>> {
    let t = family.evaluate(lambda)?;
    let n = family.dim();
    Ok(ComplexMatrix::identity(n).sub(&t.scaled(lambda)))
}

struct NodeSolve<S: Scalar> {
    resolvent: ComplexMatrix<S>,
    residual: S,
    sigma_ratio: S,
}

fn solve_node<S: Scalar>(
    family: &OperatorFamily<S>,
    lambda: Cx<S>,
    j: usize,
) -> Result<NodeSolve<S>> {
    let s = resolvent_system(family, lambda)?;
    let s_norm = s.frobenius_norm();
    let fac = lu::factor(&s).map_err(|_| {
        Error::NodeOnPole(format!("node {} at {} + {}i is singular", j, lambda.re, lambda.im))
    })?;
    let sigma_min = fac.smallest_singular_estimate();
    let ratio = if s_norm > S::zero() {
        sigma_min / s_norm
    } else {
        S::zero()
    };
    if ratio < S::real(NODE_POLE_TOL) {
        return Err(Error::NodeOnPole(format!(
            "node {} at {} + {}i: sigma_min/||S|| = {:.3e}",
            j,
            lambda.re,
            lambda.im,
            ratio.to_f64().unwrap_or(0.0)
        )));
    }
    let n = family.dim();
    let eye = ComplexMatrix::identity(n);
    let r = fac.solve(&eye);
    let residual = s.matmul(&r).sub(&eye).frobenius_norm();
    Ok(NodeSolve {
        resolvent: r,
        residual,
        sigma_ratio: ratio,
    })
}

/// Computes the contour moments `M_0 .. M_alpha_max` of the resolvent by the
/// trapezoid rule, in fixed node order.
pub fn contour_moments<S: Scalar>(
    family: &OperatorFamily<S>,
    contour: &Contour<S>,
    alpha_max: usize,
) -> Result<MomentTable<S>> {
    contour.validate_region(family)?;
    let n = family.dim();
    let n_nodes = S::real(contour.nodes() as f64);
    let mut moments = vec![ComplexMatrix::<S>::zeros(n, n); alpha_max + 1];
    let mut node_residuals = Vec::with_capacity(contour.nodes());
    let mut min_ratio = S::infinity();
    let mut scale = S::zero();

    for j in 0..contour.nodes() {
        let lambda = contour.node(j);
        let sol = solve_node(family, lambda, j)?;
        node_residuals.push(sol.residual);
        if sol.sigma_ratio < min_ratio {
            min_ratio = sol.sigma_ratio;
        }
        let rn = sol.resolvent.frobenius_norm();
        if rn > scale {
            scale = rn;
        }
        // (1/2 pi i) (lambda_j - c)^alpha R_j dlambda -> offset^(alpha+1)/N * R_j.
        let offset = contour.offset(j);
        let mut w = offset / Complex::new(n_nodes, S::zero());
        for alpha in 0..=alpha_max {
            moments[alpha] = moments[alpha].add(&sol.resolvent.scaled(w));
            w = w * offset;
        }
    }
    Ok(MomentTable {
        moments,
        node_residuals,
        min_sigma_ratio: min_ratio,
        resolvent_scale: scale,
    })
}

/// Decides whether the contour encloses a nonlinear eigenvalue, and
/// estimates the rank of the zeroth moment (the residue).
///
/// A pole is reported when any moment up to order [`DEFAULT_ALPHA_MAX`]
/// rises above `1e-8` times the resolvent scale at the nodes.
pub fn pole_indicator<S: Scalar>(
    family: &OperatorFamily<S>,
    contour: &Contour<S>,
) -> Result<(bool, usize)> {
    let table = contour_moments(family, contour, DEFAULT_ALPHA_MAX)?;
    let tol = S::real(POLE_DETECT_TOL) * table.resolvent_scale;
    let has_pole = table
        .moments
        .iter()
        .any(|m| m.frobenius_norm() > tol);
    if !has_pole {
        return Ok((false, 0));
    }
    let rank = svd::svd(&table.moments[0])?
        .sigma
        .iter()
        .filter(|&&s| s > tol)
        .count();
    Ok((true, rank))
}

/// Outcome of the resolvent perturbation bound
/// `||R_h - R_0|| <= |lambda| d ||R_0||^2 / (1 - |lambda| d ||R_0||)`,
/// `d = ||T_0(lambda) - T_h(lambda)||`, valid while the smallness product
/// `|lambda| d ||R_0|| < 1`. Operator norms are largest singular values.
#[derive(Debug, Clone)]
pub struct PerturbationBound<S: Scalar> {
    pub valid: bool,
    /// Upper bound on `||R_h(lambda) - R_0(lambda)||`; `None` when invalid.
    pub bound: Option<S>,
    /// The smallness product `|lambda| ||T_0 - T_h|| ||R_0||`.
    pub smallness: S,
}

pub fn perturbation_bound<S: Scalar>(
    base: &OperatorFamily<S>,
    perturbed: &OperatorFamily<S>,
    lambda: Cx<S>,
) -> Result<PerturbationBound<S>> {
    if base.dim() != perturbed.dim() {
        return Err(Error::DimensionMismatch(
            "perturbation bound needs equal dimensions".into(),
        ));
    }
    let n = base.dim();
    let r0 = apply_resolvent(base, lambda, &ComplexMatrix::identity(n))?;
    let r0_norm = svd::operator_norm(&r0)?;
    let diff = base.evaluate(lambda)?.sub(&perturbed.evaluate(lambda)?);
    let d = svd::operator_norm(&diff)?;
    let smallness = lambda.norm() * d * r0_norm;
    if smallness < S::one() {
        let bound = lambda.norm() * d * r0_norm * r0_norm / (S::one() - smallness);
        Ok(PerturbationBound {
            valid: true,
            bound: Some(bound),
            smallness,
        })
    } else {
        Ok(PerturbationBound {
            valid: false,
            bound: None,
            smallness,
        })
    }
}
