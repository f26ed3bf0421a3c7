//! Analytic operator-valued functions `lambda -> T(lambda)` and perturbation
//! families `h -> T_h`, including the generalized, quadratic and 1D
//! scattering-resonance constructions.

use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::lu;
use crate::matrix::ComplexMatrix;
use crate::scalar::{czero, Cx, Scalar};

/// Default radius cap and node count for the Cauchy-quadrature derivative.
const CAUCHY_RADIUS: f64 = 0.5;
const CAUCHY_NODES: usize = 32;

/// Analyticity region of a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// The whole complex plane.
    Entire,
    /// The plane minus the origin (generalized eigenvalue reductions).
    PuncturedPlane,
    /// The plane minus the closed negative real axis `(-inf, 0]`
    /// (the principal branch of `sqrt(lambda)` lives here).
    SlitPlane,
}

impl Region {
    pub fn contains<S: Scalar>(&self, lambda: Cx<S>) -> bool {
        match self {
            Region::Entire => true,
            Region::PuncturedPlane => lambda != czero(),
            Region::SlitPlane => !(lambda.im == S::zero() && lambda.re <= S::zero()),
        }
    }

    /// Distance from `lambda` to the region boundary (`None` when entire).
    pub fn boundary_distance<S: Scalar>(&self, lambda: Cx<S>) -> Option<S> {
        match self {
            Region::Entire => None,
            Region::PuncturedPlane => Some(lambda.norm()),
            Region::SlitPlane => {
                // Nearest slit point is the origin when Re > 0, else the
                // projection onto the negative real axis.
                if lambda.re > S::zero() {
                    Some(lambda.norm())
                } else {
                    Some(lambda.im.abs())
                }
            }
        }
    }

    /// Whether the closed disk `|z - center| <= radius` stays inside.
    pub fn contains_disk<S: Scalar>(&self, center: Cx<S>, radius: S) -> bool {
        match self {
            Region::Entire => true,
            _ => match self.boundary_distance(center) {
                Some(d) => self.contains(center) && d > radius,
                None => true,
            },
        }
    }

    /// Intersection of two regions (the smaller one in our lattice).
    pub fn intersect(self, other: Region) -> Region {
        use Region::*;
        match (self, other) {
            (Entire, r) | (r, Entire) => r,
            (SlitPlane, _) | (_, SlitPlane) => SlitPlane,
            (PuncturedPlane, PuncturedPlane) => PuncturedPlane,
        }
    }
}

/// Piecewise-constant profile on `[0, 1]`: breakpoints `0 = b_0 < ... < b_K = 1`
/// and one value per interval.
#[derive(Debug, Clone)]
pub struct PiecewiseConstant<S: Scalar> {
    breakpoints: Vec<S>,
    values: Vec<S>,
}

impl<S: Scalar> PiecewiseConstant<S> {
    pub fn new(breakpoints: Vec<S>, values: Vec<S>) -> Result<Self> {
        if breakpoints.len() != values.len() + 1 || values.is_empty() {
            return Err(Error::InvalidInput(
                "need K+1 breakpoints for K interval values".into(),
            ));
        }
        if breakpoints[0] != S::zero() || *breakpoints.last().unwrap() != S::one() {
            return Err(Error::InvalidInput(
                "breakpoints must start at 0 and end at 1".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("breakpoints must be increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("profile values must be finite".into()));
        }
        Ok(Self {
            breakpoints,
            values,
        })
    }

    /// Constant profile of the given value.
    pub fn constant(value: S) -> Self {
        Self {
            breakpoints: vec![S::zero(), S::one()],
            values: vec![value],
        }
    }

    /// Value at `y` (right-open intervals, last interval closed).
    pub fn eval(&self, y: S) -> S {
        for k in 0..self.values.len() {
            if y < self.breakpoints[k + 1] || k == self.values.len() - 1 {
                return self.values[k];
            }
        }
        *self.values.last().unwrap()
    }

    pub fn breakpoints(&self) -> &[S] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }
}

#[derive(Debug, Clone)]
enum FamilyKind<S: Scalar> {
    /// `sum_j lambda^j coeffs[j]`; entire.
    Polynomial { coeffs: Vec<ComplexMatrix<S>> },
    /// `-(1/lambda) AinvK + AinvB`; punctured plane.
    Generalized {
        ainv_k: ComplexMatrix<S>,
        ainv_b: ComplexMatrix<S>,
    },
    /// Nystrom matrix of the 1D outgoing Lippmann-Schwinger kernel on the
    /// slit plane: `T[i,j] = w_j eta(y_j) * (-exp(i sqrt(lambda) |x_i - y_j|)
    /// / (2 i sqrt(lambda)))` on composite-midpoint nodes.
    Resonance1d {
        nodes: Vec<S>,
        weights: Vec<S>,
        eta_at_nodes: Vec<S>,
    },
    /// `a(lambda) + b(lambda)`.
    Sum {
        a: Box<OperatorFamily<S>>,
        b: Box<OperatorFamily<S>>,
    },
    /// `factor * inner(lambda)`.
    Scaled {
        inner: Box<OperatorFamily<S>>,
        factor: Cx<S>,
    },
}

/// Analytic map `lambda -> T(lambda)` with an evaluable derivative.
#[derive(Debug, Clone)]
pub struct OperatorFamily<S: Scalar> {
    dim: usize,
    region: Region,
    kind: FamilyKind<S>,
    /// When set, `derivative` ignores analytic rules and uses Cauchy
    /// quadrature with default parameters.
    quadrature_derivative: bool,
}

impl<S: Scalar> OperatorFamily<S> {
    /// Family constant in `lambda`.
    pub fn constant(m: ComplexMatrix<S>) -> Result<Self> {
        Self::polynomial(vec![m])
    }

    /// Matrix polynomial `sum_j lambda^j coeffs[j]`.
    pub fn polynomial(coeffs: Vec<ComplexMatrix<S>>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("polynomial needs coefficients".into()));
        }
        let n = coeffs[0].rows();
        for c in &coeffs {
            if !c.is_square() || c.rows() != n {
                return Err(Error::DimensionMismatch(
                    "polynomial coefficients must be square of equal size".into(),
                ));
            }
        }
        Ok(Self {
            dim: n,
            region: Region::Entire,
            kind: FamilyKind::Polynomial { coeffs },
            quadrature_derivative: false,
        })
    }

    /// Zero family of dimension `n`.
    pub fn zero(n: usize) -> Self {
        Self::polynomial(vec![ComplexMatrix::zeros(n, n)]).expect("n >= 1")
    }

    /// Generalized eigenvalue reduction `T(lambda) = -(1/lambda) A^{-1}K +
    /// A^{-1}B`, from `(A + K)u = lambda B u` after multiplying by `A^{-1}`.
    /// The origin is excluded from the region.
    pub fn generalized(
        a: &ComplexMatrix<S>,
        k: &ComplexMatrix<S>,
        b: &ComplexMatrix<S>,
    ) -> Result<Self> {
        let n = a.rows();
        if !a.is_square() || !k.is_square() || !b.is_square() || k.rows() != n || b.rows() != n {
            return Err(Error::DimensionMismatch(
                "generalized family needs equal square A, K, B".into(),
            ));
        }
        let fac = lu::factor(a)?;
        let ainv_k = fac.solve(k);
        let ainv_b = fac.solve(b);
        Ok(Self {
            dim: n,
            region: Region::PuncturedPlane,
            kind: FamilyKind::Generalized { ainv_k, ainv_b },
            quadrature_derivative: false,
        })
    }

    /// Quadratic pencil reduction `T(lambda) = -A^{-1}B - lambda A^{-1}C`,
    /// from `A u + lambda B u + lambda^2 C u = 0` after inverting `A`.
    /// Nonlinear eigenvalues coincide with the finite roots of
    /// `det(A + lambda B + lambda^2 C)`.
    pub fn quadratic(
        a: &ComplexMatrix<S>,
        b: &ComplexMatrix<S>,
        c: &ComplexMatrix<S>,
    ) -> Result<Self> {
        let n = a.rows();
        if !a.is_square() || !b.is_square() || !c.is_square() || b.rows() != n || c.rows() != n {
            return Err(Error::DimensionMismatch(
                "quadratic family needs equal square A, B, C".into(),
            ));
        }
        let fac = lu::factor(a)?;
        let m_one = Complex::new(-S::one(), S::zero());
        let c0 = fac.solve(b).scaled(m_one);
        let c1 = fac.solve(c).scaled(m_one);
        Self::polynomial(vec![c0, c1])
    }

    /// Nystrom discretization (composite midpoint, `q` nodes on `[0, 1]`) of
    /// the 1D outgoing kernel `G(x, y; lambda) = -e^{i sqrt(lambda)|x-y|} /
    /// (2 i sqrt(lambda))`, weighted by a piecewise-constant profile `eta`.
    /// Analytic on the slit plane with the principal square root branch.
    pub fn resonance_1d(eta: &PiecewiseConstant<S>, q: usize) -> Result<Self> {
        if q < 8 {
            return Err(Error::InvalidInput(format!(
                "resonance discretization needs q >= 8, got {}",
                q
            )));
        }
        let qe = S::real(q as f64);
        let nodes: Vec<S> = (0..q)
            .map(|i| (S::real(i as f64) + S::real(0.5)) / qe)
            .collect();
        let weights: Vec<S> = vec![S::one() / qe; q];
        let eta_at_nodes: Vec<S> = nodes.iter().map(|&y| eta.eval(y)).collect();
        Ok(Self {
            dim: q,
            region: Region::SlitPlane,
            kind: FamilyKind::Resonance1d {
                nodes,
                weights,
                eta_at_nodes,
            },
            quadrature_derivative: false,
        })
    }

    /// Pointwise sum of two families on the intersection of their regions.
    pub fn sum(a: OperatorFamily<S>, b: OperatorFamily<S>) -> Result<Self> {
        if a.dim != b.dim {
            return Err(Error::DimensionMismatch(format!(
                "cannot add families of dimension {} and {}",
                a.dim, b.dim
            )));
        }
        let region = a.region.intersect(b.region);
        Ok(Self {
            dim: a.dim,
            region,
            kind: FamilyKind::Sum {
                a: Box::new(a),
                b: Box::new(b),
            },
            quadrature_derivative: false,
        })
    }

    /// Scalar multiple of a family.
    pub fn scaled(inner: OperatorFamily<S>, factor: Cx<S>) -> Self {
        Self {
            dim: inner.dim,
            region: inner.region,
            kind: FamilyKind::Scaled {
                inner: Box::new(inner),
                factor,
            },
            quadrature_derivative: false,
        }
    }

    /// Drops analytic derivative rules, forcing the Cauchy-quadrature
    /// fallback. Used to exercise and cross-check the fallback path.
    pub fn with_quadrature_derivative(mut self) -> Self {
        self.quadrature_derivative = true;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn region(&self) -> Region {
        self.region
    }

    /// Evaluates `T(lambda)`.
    pub fn evaluate(&self, lambda: Cx<S>) -> Result<ComplexMatrix<S>> {
        if !self.region.contains(lambda) {
            return Err(Error::OutOfRegion(format!(
                "lambda = {} + {}i",
                lambda.re, lambda.im
            )));
        }
        Ok(self.eval_unchecked(lambda))
    }

    fn eval_unchecked(&self, lambda: Cx<S>) -> ComplexMatrix<S> {
        match &self.kind {
            FamilyKind::Polynomial { coeffs } => {
                // Horner in fixed order.
                let mut acc = coeffs.last().unwrap().clone();
                for c in coeffs.iter().rev().skip(1) {
                    acc = acc.scaled(lambda).add(c);
                }
                acc
            }
            FamilyKind::Generalized { ainv_k, ainv_b } => {
                let m_inv = -lambda.inv();
                ainv_k.scaled(m_inv).add(ainv_b)
            }
            FamilyKind::Resonance1d {
                nodes,
                weights,
                eta_at_nodes,
            } => {
                let root = lambda.sqrt();
                let two_i_root = Complex::new(S::zero(), S::real(2.0)) * root;
                let i_root = Complex::new(S::zero(), S::one()) * root;
                let q = nodes.len();
                ComplexMatrix::from_fn(q, q, |i, j| {
                    let r = (nodes[i] - nodes[j]).abs();
                    let kernel = -(i_root * Complex::new(r, S::zero())).exp() / two_i_root;
                    kernel * Complex::new(weights[j] * eta_at_nodes[j], S::zero())
                })
            }
            FamilyKind::Sum { a, b } => a.eval_unchecked(lambda).add(&b.eval_unchecked(lambda)),
            FamilyKind::Scaled { inner, factor } => inner.eval_unchecked(lambda).scaled(*factor),
        }
    }

    fn analytic_derivative(&self, lambda: Cx<S>) -> ComplexMatrix<S> {
        match &self.kind {
            FamilyKind::Polynomial { coeffs } => {
                if coeffs.len() == 1 {
                    return ComplexMatrix::zeros(self.dim, self.dim);
                }
                // Term-by-term: sum_{j>=1} j lambda^{j-1} coeffs[j], Horner.
                let deg = coeffs.len() - 1;
                let mut acc = coeffs[deg].scaled(Complex::new(S::real(deg as f64), S::zero()));
                for j in (1..deg).rev() {
                    let cj = coeffs[j].scaled(Complex::new(S::real(j as f64), S::zero()));
                    acc = acc.scaled(lambda).add(&cj);
                }
                acc
            }
            FamilyKind::Generalized { ainv_k, .. } => {
                let inv_sq = (lambda * lambda).inv();
                ainv_k.scaled(inv_sq)
            }
            FamilyKind::Resonance1d {
                nodes,
                weights,
                eta_at_nodes,
            } => {
                // d/dlambda of -e^{ikr}/(2ik) with k = sqrt(lambda):
                // i e^{ikr} (i r k - 1) / (4 k^3).
                let k = lambda.sqrt();
                let i_unit = Complex::new(S::zero(), S::one());
                let four_k3 = Complex::new(S::real(4.0), S::zero()) * k * k * k;
                let q = nodes.len();
                ComplexMatrix::from_fn(q, q, |i, j| {
                    let r = Complex::new((nodes[i] - nodes[j]).abs(), S::zero());
                    let e = (i_unit * k * r).exp();
                    let dk = i_unit * e * (i_unit * r * k - Complex::new(S::one(), S::zero()))
                        / four_k3;
                    dk * Complex::new(weights[j] * eta_at_nodes[j], S::zero())
                })
            }
            FamilyKind::Sum { a, b } => a
                .analytic_derivative(lambda)
                .add(&b.analytic_derivative(lambda)),
            FamilyKind::Scaled { inner, factor } => {
                inner.analytic_derivative(lambda).scaled(*factor)
            }
        }
    }

    /// Evaluates `DT(lambda0)`, by the analytic rule when available and by
    /// Cauchy quadrature over a default circle otherwise.
    pub fn derivative(&self, lambda0: Cx<S>) -> Result<ComplexMatrix<S>> {
        if !self.region.contains(lambda0) {
            return Err(Error::OutOfRegion(format!(
                "lambda0 = {} + {}i",
                lambda0.re, lambda0.im
            )));
        }
        if !self.quadrature_derivative {
            return Ok(self.analytic_derivative(lambda0));
        }
        let radius = match self.region.boundary_distance(lambda0) {
            None => S::real(CAUCHY_RADIUS),
            Some(d) => S::real(CAUCHY_RADIUS).min(d * S::real(0.5)),
        };
        self.cauchy_derivative(lambda0, radius, CAUCHY_NODES)
    }

    /// Cauchy-quadrature derivative
    /// `DT(lambda0) = (1/2 pi i) \oint T(lambda) / (lambda - lambda0)^2 dlambda`
    /// over a circle of the given radius with `nodes` trapezoid points.
    pub fn cauchy_derivative(
        &self,
        lambda0: Cx<S>,
        radius: S,
        nodes: usize,
    ) -> Result<ComplexMatrix<S>> {
        if radius <= S::zero() || nodes < 4 {
            return Err(Error::InvalidInput(
                "cauchy derivative needs radius > 0 and at least 4 nodes".into(),
            ));
        }
        if !self.region.contains_disk(lambda0, radius) {
            return Err(Error::QuadratureBreakdown(format!(
                "circle radius {} around {} + {}i exits the region",
                radius, lambda0.re, lambda0.im
            )));
        }
        // (1/2 pi i) \oint T/(z - l0)^2 dz = (1/(N r)) sum_j e^{-i theta_j} T(z_j).
        let mut acc = ComplexMatrix::zeros(self.dim, self.dim);
        let n_s = S::real(nodes as f64);
        for j in 0..nodes {
            let theta = S::real(2.0) * S::PI() * S::real(j as f64) / n_s;
            let dir = Complex::new(theta.cos(), theta.sin());
            let z = lambda0 + dir * Complex::new(radius, S::zero());
            let t = self.evaluate(z)?;
            acc = acc.add(&t.scaled(dir.conj()));
        }
        Ok(acc.scaled(Complex::new(S::one() / (n_s * radius), S::zero())))
    }
}

/// Tag describing how a perturbation family depends on `h`.
#[derive(Clone)]
enum PerturbationKind<S: Scalar> {
    /// `T_h = T_0 + h T1`.
    LinearInH { direction: OperatorFamily<S> },
    /// Arbitrary dependence supplied as a constructor.
    General {
        build: Arc<dyn Fn(S) -> OperatorFamily<S> + Send + Sync>,
    },
}

impl<S: Scalar> std::fmt::Debug for PerturbationKind<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PerturbationKind::LinearInH { .. } => f.write_str("LinearInH"),
            PerturbationKind::General { .. } => f.write_str("General"),
        }
    }
}

/// Map `(h, lambda) -> T_h(lambda)` with base `T_0`.
#[derive(Debug, Clone)]
pub struct PerturbationFamily<S: Scalar> {
    base: OperatorFamily<S>,
    kind: PerturbationKind<S>,
}

impl<S: Scalar> PerturbationFamily<S> {
    /// Linear-in-h perturbation `T_h(lambda) = T_0(lambda) + h T1(lambda)`.
    pub fn linear(base: OperatorFamily<S>, direction: OperatorFamily<S>) -> Result<Self> {
        if base.dim() != direction.dim() {
            return Err(Error::DimensionMismatch(format!(
                "base dimension {} vs direction dimension {}",
                base.dim(),
                direction.dim()
            )));
        }
        Ok(Self {
            base,
            kind: PerturbationKind::LinearInH { direction },
        })
    }

    /// General perturbation given by an `h -> T_h` constructor; `build(0)`
    /// must reproduce the base family.
    pub fn general(
        base: OperatorFamily<S>,
        build: impl Fn(S) -> OperatorFamily<S> + Send + Sync + 'static,
    ) -> Self {
        Self {
            base,
            kind: PerturbationKind::General {
                build: Arc::new(build),
            },
        }
    }

    pub fn base(&self) -> &OperatorFamily<S> {
        &self.base
    }

    pub fn is_linear_in_h(&self) -> bool {
        matches!(self.kind, PerturbationKind::LinearInH { .. })
    }

    /// The direction family `T1` for linear-in-h perturbations.
    pub fn direction(&self) -> Option<&OperatorFamily<S>> {
        match &self.kind {
            PerturbationKind::LinearInH { direction } => Some(direction),
            PerturbationKind::General { .. } => None,
        }
    }

    /// The perturbed family at parameter `h`; `h = 0` returns the base
    /// family exactly.
    pub fn family_at(&self, h: S) -> OperatorFamily<S> {
        if h == S::zero() {
            return self.base.clone();
        }
        match &self.kind {
            PerturbationKind::LinearInH { direction } => {
                let scaled = OperatorFamily::scaled(direction.clone(), Complex::new(h, S::zero()));
                OperatorFamily::sum(self.base.clone(), scaled).expect("dimensions checked")
            }
            PerturbationKind::General { build } => build(h),
        }
    }
}
