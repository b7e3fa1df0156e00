//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, NumCast};

/// Floating point type the balancing machinery runs on: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + NumCast + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only for values the type cannot hold at all.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal out of range for scalar type")
    }

    /// Structural tolerance used when the caller does not pass one.
    fn default_tol() -> Self {
        Self::lit(1e-9).max(Self::epsilon() * Self::lit(1e4))
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// A matrix entry whose magnitude feeds the log-domain graph.
///
/// Only the magnitude enters the balancing problem; the original value is
/// kept so scaled matrices can be returned in the caller's number type.
pub trait Entry<T: Scalar>: Copy + Debug + PartialEq {
    fn magnitude(&self) -> T;
    fn scaled(&self, factor: T) -> Self;
    fn is_zero_entry(&self) -> bool {
        self.magnitude() == T::zero()
    }
}

impl<T: Scalar> Entry<T> for T {
    fn magnitude(&self) -> T {
        self.abs()
    }

    fn scaled(&self, factor: T) -> Self {
        *self * factor
    }
}

impl<T: Scalar> Entry<T> for Complex<T> {
    fn magnitude(&self) -> T {
        self.norm()
    }

    fn scaled(&self, factor: T) -> Self {
        Complex::new(self.re * factor, self.im * factor)
    }
}

/// Exact factorial table for `0..=max`. `None` once the value leaves `u64`.
pub(crate) fn factorials(max: usize) -> Option<Vec<u64>> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc: u64 = 1;
    out.push(acc);
    for k in 1..=max {
        acc = acc.checked_mul(k as u64)?;
        out.push(acc);
    }
    Some(out)
}
