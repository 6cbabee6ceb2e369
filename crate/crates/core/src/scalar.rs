//! Scalar abstraction shared by every numerical routine in the crate.

use nalgebra::RealField;
use num_traits::FromPrimitive;

/// Floating point scalar: `f32` or `f64`.
///
/// Everything geometric and every Gram assembly is written against this
/// trait. Tolerances quoted in tests assume `f64`.
pub trait Real: RealField + Copy + FromPrimitive {}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Converts a count into the working scalar.
#[inline]
pub fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

/// Lossy conversion back to `f64` for reporting.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    simba::scalar::SupersetOf::<f64>::to_subset(&x).unwrap_or(f64::NAN)
}
