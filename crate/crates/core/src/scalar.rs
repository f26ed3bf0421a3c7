//! Real scalar abstraction underlying all complex arithmetic in the crate.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar the library is generic over: `f32` or `f64`.
///
/// All matrices hold `Complex<S>` entries. Tolerances quoted in the
/// documentation are calibrated for the `f64` instantiation.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Converts a literal coefficient or tolerance into the scalar type.
    fn real(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Complex scalar built on [`Scalar`].
pub type Cx<S> = Complex<S>;

/// Shorthand for constructing a complex value from f64 parts.
pub fn cx<S: Scalar>(re: f64, im: f64) -> Cx<S> {
    Complex::new(S::real(re), S::real(im))
}

/// Zero complex value.
pub fn czero<S: Scalar>() -> Cx<S> {
    Complex::new(S::zero(), S::zero())
}

/// One (real unit) complex value.
pub fn cone<S: Scalar>() -> Cx<S> {
    Complex::new(S::one(), S::zero())
}
