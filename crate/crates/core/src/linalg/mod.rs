//! Dense complex linear algebra kernel: LU solves, SVD, and a small dense
//! eigensolver. Everything here is a pure function of immutable inputs with
//! fixed reduction order, so repeated runs are bitwise reproducible.

pub mod eig;
pub mod lu;
pub mod svd;

pub use eig::{eig_dense, Eigen};
pub use lu::{factor, solve_linear, LuFactors};
pub use svd::{null_space, operator_norm, svd, Svd};
