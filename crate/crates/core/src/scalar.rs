//! Generic scalar abstraction for the numeric kernels.
//!
//! Everything in this crate is written against [`Real`] so the same code runs
//! at `f32` or `f64`. The documented tolerances assume `f64`; `f32` is useful
//! for quick smoke runs only.

use std::fmt::{Debug, Display};
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Debug
    + Display
    + serde::Serialize
    + serde::de::DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, for literals and tabulated constants.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to any Real")
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn half() -> Self {
        Self::one() / Self::two()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// 2-vector helpers used throughout; plain arrays keep call sites light.
pub type Vec2<T> = [T; 2];

#[inline]
pub fn dot<T: Real>(a: Vec2<T>, b: Vec2<T>) -> T {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn cross<T: Real>(a: Vec2<T>, b: Vec2<T>) -> T {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn norm<T: Real>(a: Vec2<T>) -> T {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vec2_ops() {
        let a = [3.0_f64, 4.0];
        let b = [1.0, 2.0];
        assert_eq!(dot(a, b), 11.0);
        assert_eq!(cross(a, b), 2.0);
        assert_eq!(norm(a), 5.0);
    }

    #[test]
    fn of_converts_both_widths() {
        assert_eq!(f32::of(1.5), 1.5_f32);
        assert_eq!(f64::of(1.5), 1.5_f64);
    }
}
