//! Nonlinear eigenvalue problems `lambda T(lambda) u = u` for dense
//! discretizations of compact operator families, with first-order eigenvalue
//! corrections under perturbations `T_h` of a base family `T_0`.
//!
//! The crate is organized around six pieces:
//!
//! - [`matrix`] / [`linalg`]: dense complex matrices with LU, SVD and a small
//!   dense eigensolver;
//! - [`family`]: analytic operator-valued functions `lambda -> T(lambda)`
//!   and perturbation families `h -> T_h`, including generalized, quadratic
//!   and 1D scattering-resonance constructions;
//! - [`resolvent`]: the modified resolvent `R(lambda) = (I - lambda
//!   T(lambda))^{-1}`, its contour moments for pole detection, and a
//!   perturbation bound diagnostic;
//! - [`solver`]: a contour-integral eigensolver with Newton refinement,
//!   cluster extraction and eigenvalue tracking under perturbations;
//! - [`correction`]: the linear (Osborn) and nonlinear first-order
//!   eigenvalue correction formulas with their denominator condition;
//! - [`io`]: the plain-text matrix format shared with the CLI.
//!
//! Core numerics are generic over the real scalar via [`scalar::Scalar`]
//! (`f32` or `f64`); the documented tolerances target the `f64`
//! instantiation, for which aliases are exported at the crate root.
//!
//! ```
//! use nep_core::correction::nonlinear_correction;
//! use nep_core::family::{OperatorFamily, PerturbationFamily};
//! use nep_core::resolvent::Contour;
//! use nep_core::solver::{find_cluster, track};
//! use nep_core::{C64, Matrix64};
//!
//! // T_0(lambda) = 0.5 + 0.25 lambda, perturbed by a constant direction.
//! let scalar = |v: f64| Matrix64::from_vec(1, 1, vec![C64::new(v, 0.0)]).unwrap();
//! let base = OperatorFamily::polynomial(vec![scalar(0.5), scalar(0.25)]).unwrap();
//! let dir = OperatorFamily::constant(scalar(1.0)).unwrap();
//! let pert = PerturbationFamily::linear(base.clone(), dir).unwrap();
//!
//! // One eigenvalue (-1 + sqrt 5) inside the unit contour around 1.
//! let contour = Contour::new(C64::new(1.0, 0.0), 1.0, 32).unwrap();
//! let cluster = find_cluster(&base, &contour, 2, 7, None).unwrap();
//! assert!((cluster.lambda0.re - (5.0f64.sqrt() - 1.0)).abs() < 1e-10);
//!
//! // First-order prediction vs the directly tracked eigenvalue.
//! let h = 1e-2;
//! let report = nonlinear_correction(&pert, &cluster, h).unwrap();
//! let tracked = track(&pert, &cluster, h, &contour, 2, 7).unwrap();
//! assert!((tracked.lambda_mean - report.predicted).norm() < 1e-4);
//! ```

// Kernel-style index loops and `x = x + y` on generic scalars (no
// NumAssign bound) read better than the clippy-preferred forms here.
#![allow(clippy::needless_range_loop)]
#![allow(clippy::assign_op_pattern)]
#![allow(clippy::manual_is_multiple_of)]

pub mod correction;
pub mod error;
pub mod family;
pub mod io;
pub mod linalg;
pub mod matrix;
pub mod resolvent;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use scalar::{Cx, Scalar};

/// Complex scalar in double precision.
pub type C64 = num_complex::Complex<f64>;
/// Dense complex matrix in double precision.
pub type Matrix64 = matrix::ComplexMatrix<f64>;
/// Operator family in double precision.
pub type Family64 = family::OperatorFamily<f64>;
/// Perturbation family in double precision.
pub type Perturbation64 = family::PerturbationFamily<f64>;
/// Circular contour in double precision.
pub type Contour64 = resolvent::Contour<f64>;
/// Spectral cluster in double precision.
pub type Cluster64 = solver::SpectralCluster<f64>;
