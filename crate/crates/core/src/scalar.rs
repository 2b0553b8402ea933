//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar (`f32` or `f64`).
///
/// Accuracy targets quoted throughout the crate (characteristic-equation
/// residuals of 1e-12 and similar) assume `f64`; `f32` runs the same code
/// paths with correspondingly looser results.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts a count or index.
    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Relative machine tolerance used by root finders.
    fn solver_eps() -> Self;
}

impl Real for f32 {
    fn solver_eps() -> Self {
        4.0 * f32::EPSILON
    }
}

impl Real for f64 {
    fn solver_eps() -> Self {
        4.0 * f64::EPSILON
    }
}

/// Shorthand for [`Real::lit`].
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::lit(x)
}
