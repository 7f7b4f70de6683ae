use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point type the numerical kernels are written against.
///
/// Implemented for `f32` and `f64`. Tolerances that are quoted in absolute
/// terms (1e-12 and friends) are meaningful for `f64`; kernels that iterate
/// to a tolerance clamp it from below by a few ulps of the working type.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal into the working type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `(1 - e^{-z}) / z`, equal to 1 at `z = 0` and free of cancellation
    /// for small `|z|`.
    #[inline]
    fn one_minus_exp_neg_over(z: Self) -> Self {
        if z == Self::zero() {
            Self::one()
        } else {
            -(-z).exp_m1() / z
        }
    }

    /// `(e^{d} - 1) / d`, equal to 1 at `d = 0`.
    #[inline]
    fn exprel(d: Self) -> Self {
        if d == Self::zero() {
            Self::one()
        } else {
            d.exp_m1() / d
        }
    }

    /// `ln(1 + r) / r`, equal to 1 at `r = 0`.
    #[inline]
    fn ln1p_rel(r: Self) -> Self {
        if r == Self::zero() {
            Self::one()
        } else {
            r.ln_1p() / r
        }
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Time over which the damped front accumulates: `(1 - e^{-rate t}) / rate`,
/// which reduces to `t` when `rate = 0`.
#[inline]
pub fn decay_time<S: Scalar>(rate: S, t: S) -> S {
    t * S::one_minus_exp_neg_over(rate * t)
}

/// Integer power for the odd exponents used throughout.
#[inline]
pub fn pow<S: Scalar>(x: S, k: u32) -> S {
    x.powi(k as i32)
}
