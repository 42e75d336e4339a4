//! Scalar abstraction for the probability and information-measure code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point type usable as a probability / bit value.
///
/// The tolerances scale with the precision of the type: the `f64` values are
/// the ones every documented contract is stated against.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Allowed deviation of a pmf total from one.
    fn norm_tol() -> Self;
    /// Largest drift that construction silently renormalizes away.
    fn renorm_tol() -> Self;
    /// Negative mutual-information values down to `-mi_clamp()` are reported as zero.
    fn mi_clamp() -> Self;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn norm_tol() -> Self {
        1e-12
    }
    fn renorm_tol() -> Self {
        1e-9
    }
    fn mi_clamp() -> Self {
        1e-12
    }
}

impl Real for f32 {
    fn norm_tol() -> Self {
        1e-6
    }
    fn renorm_tol() -> Self {
        1e-4
    }
    fn mi_clamp() -> Self {
        1e-5
    }
}
