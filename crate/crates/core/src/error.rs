//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by factorizations, operator families, contour probes and
/// the eigensolver.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A pivot (or the whole matrix) is numerically singular. When the matrix
    /// is `I - lambda*T(lambda)` this signals that `lambda` is at or near a
    /// nonlinear eigenvalue.
    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    /// An iteration cap was exceeded.
    #[error("no convergence: {0}")]
    NoConvergence(String),

    /// Evaluation point outside the family's analyticity region.
    #[error("out of analyticity region: {0}")]
    OutOfRegion(String),

    /// The Cauchy-quadrature circle leaves the analyticity region.
    #[error("quadrature breakdown: {0}")]
    QuadratureBreakdown(String),

    /// Operands have incompatible dimensions.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A contour node sits on (or numerically too close to) a resolvent pole.
    #[error("contour node on pole: {0}")]
    NodeOnPole(String),

    /// The moment matrix has full probe rank; the probe count is too small
    /// and the caller must increase it.
    #[error("moment rank equals probe count {0}; increase probes")]
    RankOverflow(usize),

    /// Fewer eigenvalues were found than the tracked cluster's multiplicity.
    #[error("multiplicity mismatch: {0}")]
    MultiplicityMismatch(String),

    /// The cluster carries Jordan structure; the dual-basis construction is
    /// only defined for semisimple clusters.
    #[error("defective cluster: {0}")]
    DefectiveCluster(String),

    /// Newton update direction is degenerate (defective eigenvalue or a
    /// denominator-condition degeneracy at the iterate).
    #[error("singular Jacobian in Newton refinement: {0}")]
    SingularJacobian(String),

    /// The correction denominator is within tolerance of zero; the
    /// first-order formula does not apply.
    #[error("correction denominator near singular: {0}")]
    DenominatorNearSingular(String),

    /// A correction was requested at lambda0 = 0, which is excluded.
    #[error("correction undefined at zero eigenvalue")]
    ZeroEigenvalue,

    /// The perturbation family is not tagged linear-in-h.
    #[error("perturbation family is not linear in h")]
    NotLinearFamily,

    /// No eigenvalue found where one was required.
    #[error("no eigenvalue: {0}")]
    NoEigenvalue(String),

    /// Precondition violation or otherwise invalid argument.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Text parse failure with a 1-based line number.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
