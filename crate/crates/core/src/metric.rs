//! The flat Berwald metric on the open unit disk.
//!
//! The metric is spherically symmetric, F(x, y) = |y| φ(r, s) with r = |x| and
//! s = ⟨x,y⟩/|y|, where
//!
//! ```text
//! φ(r, s) = (√(1 - r² + s²) + s)² / ((1 - r²)² √(1 - r² + s²))
//! ```
//!
//! It is non-reversible (F(x, -y) ≠ F(x, y) away from the origin) and blows up
//! like (1 - r²)⁻² at the rim, hence the configurable boundary guard.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{dot, norm, Real, Vec2};

/// Default width of the excluded annulus at the disk boundary.
pub const DEFAULT_EPS_BOUNDARY: f64 = 1e-2;

/// |s| may exceed r by at most this much before it is a hard domain error;
/// smaller excursions are treated as dot-product rounding and clamped.
pub const S_CLAMP_TOL: f64 = 1e-10;

/// Berwald metric evaluator carrying the boundary guard.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BerwaldMetric<T> {
    pub eps_boundary: T,
}

impl<T: Real> Default for BerwaldMetric<T> {
    fn default() -> Self {
        BerwaldMetric { eps_boundary: T::of(DEFAULT_EPS_BOUNDARY) }
    }
}

impl<T: Real> BerwaldMetric<T> {
    pub fn with_guard(eps_boundary: T) -> Self {
        BerwaldMetric { eps_boundary }
    }

    /// Largest admissible |x|.
    pub fn r_max(&self) -> T {
        T::one() - self.eps_boundary
    }

    pub fn check_radius(&self, r: T) -> Result<()> {
        if r >= self.r_max() {
            return Err(Error::Boundary {
                r: r.to_f64().unwrap_or(f64::NAN),
                limit: self.r_max().to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    }

    /// Spherically symmetric profile φ(r, s).
    pub fn phi(&self, r: T, s: T) -> Result<T> {
        self.check_radius(r)?;
        let s = clamp_s(r, s)?;
        let w = (T::one() - r * r + s * s).sqrt();
        let q = T::one() - r * r;
        let num = w + s;
        Ok(num * num / (q * q * w))
    }

    /// F_B(x, y) evaluated directly from the closed form.
    pub fn norm(&self, x: Vec2<T>, y: Vec2<T>) -> Result<T> {
        self.check_radius(norm(x))?;
        let yy = dot(y, y);
        if yy == T::zero() {
            return Err(Error::ZeroVector);
        }
        let xx = dot(x, x);
        let xy = dot(x, y);
        // radicand = (1-|x|²)|y|² + ⟨x,y⟩², positive for |x| < 1 and y ≠ 0
        let a = ((T::one() - xx) * yy + xy * xy).sqrt();
        let q = T::one() - xx;
        let num = a + xy;
        Ok(num * num / (q * q * a))
    }

    /// F_B via the spherically symmetric profile; agrees with [`Self::norm`]
    /// to rounding.
    pub fn norm_at(&self, p: &MetricPoint<T>) -> Result<T> {
        Ok(p.u * self.phi(p.r, p.s)?)
    }
}

fn clamp_s<T: Real>(r: T, s: T) -> Result<T> {
    if s.abs() <= r {
        return Ok(s);
    }
    if s.abs() <= r + T::of(S_CLAMP_TOL) {
        return Ok(r * s.signum());
    }
    Err(Error::Domain {
        r: r.to_f64().unwrap_or(f64::NAN),
        s: s.to_f64().unwrap_or(f64::NAN),
    })
}

/// A base point / tangent vector pair with the cached spherically symmetric
/// invariants r = |x|, u = |y|, s = ⟨x,y⟩/|y|.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MetricPoint<T> {
    pub x: Vec2<T>,
    pub y: Vec2<T>,
    pub r: T,
    pub u: T,
    pub s: T,
}

impl<T: Real> MetricPoint<T> {
    pub fn new(x: Vec2<T>, y: Vec2<T>) -> Result<Self> {
        Self::with_guard(x, y, T::of(DEFAULT_EPS_BOUNDARY))
    }

    pub fn with_guard(x: Vec2<T>, y: Vec2<T>, eps_boundary: T) -> Result<Self> {
        let r = norm(x);
        if r >= T::one() - eps_boundary {
            return Err(Error::Boundary {
                r: r.to_f64().unwrap_or(f64::NAN),
                limit: (T::one() - eps_boundary).to_f64().unwrap_or(f64::NAN),
            });
        }
        let u = norm(y);
        if u == T::zero() {
            return Err(Error::ZeroVector);
        }
        let s = clamp_s(r, dot(x, y) / u)?;
        Ok(MetricPoint { x, y, r, u, s })
    }
}

/// φ with the default boundary guard.
pub fn phi<T: Real>(r: T, s: T) -> Result<T> {
    BerwaldMetric::default().phi(r, s)
}

/// F_B with the default boundary guard.
pub fn finsler_norm<T: Real>(x: Vec2<T>, y: Vec2<T>) -> Result<T> {
    BerwaldMetric::default().norm(x, y)
}
