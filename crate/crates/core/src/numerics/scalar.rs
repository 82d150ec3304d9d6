//! Scalar abstraction over the floating-point types used by the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::float::Float;
use num_traits::NumAssignOps;

/// Floating-point scalar usable in every numeric kernel.
///
/// Implemented for `f32` (training precision) and `f64` (test and oracle
/// precision). The conversion helpers avoid the `Option` dance of
/// `num_traits::FromPrimitive` in hot loops.
pub trait Scalar:
    Float + NumAssignOps + Sum + Debug + Display + Default + Send + Sync + 'static
{
    fn from_f64(v: f64) -> Self;
    fn into_f64(self) -> f64;

    fn from_usize(v: usize) -> Self {
        Self::from_f64(v as f64)
    }
}

impl Scalar for f32 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v as f32
    }

    #[inline]
    fn into_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }

    #[inline]
    fn into_f64(self) -> f64 {
        self
    }
}
