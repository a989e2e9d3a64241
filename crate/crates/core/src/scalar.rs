//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real floating-point scalar the physics is written against (`f32` or `f64`).
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Machine-precision-scaled tolerance used for "exact" identities.
    fn tight() -> Self;
}

impl Scalar for f32 {
    fn tight() -> Self {
        1e-5
    }
}

impl Scalar for f64 {
    fn tight() -> Self {
        1e-12
    }
}

/// Lossless-as-possible literal conversion.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

#[inline]
pub fn from_usize<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("index representable in scalar type")
}

#[inline]
pub fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
