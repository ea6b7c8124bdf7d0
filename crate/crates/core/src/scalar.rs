//! The floating-point abstraction the numerical core is written against.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Floating point scalar: `f32` or `f64`.
///
/// Everything in the crate that touches field values, basis functions or
/// quadrature is generic over this trait. Small dense linear solves
/// (Gram matrices, polynomial fits) are carried out in `f64` regardless.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + FftNum
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough conversion from an `f64` literal.
    #[inline]
    fn of(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 is representable")
    }

    #[inline]
    fn of_i64(x: i64) -> Self {
        <Self as FromPrimitive>::from_i64(x).expect("i64 is representable")
    }

    #[inline]
    fn of_usize(x: usize) -> Self {
        <Self as FromPrimitive>::from_usize(x).expect("usize is representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// Geometric tolerance used by point-location and polytope clipping.
    #[inline]
    fn geom_eps() -> Self {
        Self::epsilon() * Self::of(1024.0)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
