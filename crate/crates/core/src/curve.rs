//! Closed C² curves in the unit disk as truncated Fourier series.
//!
//! Two representations:
//! * polar-Fourier — r(θ) = a + Σₖ (αₖ cos kθ + βₖ sin kθ), parametrized by
//!   c(t) = (r(t) cos t, r(t) sin t). Star-shaped about the origin by
//!   construction (r > 0 is validated), which is the optimizer's search space.
//! * cartesian-Fourier — independent series for x₁(t), x₂(t), for curves that
//!   are not star-shaped about the origin.
//!
//! Closure c(0) = c(2π) is automatic from the Fourier form; validation checks
//! the boundary guard, positivity of the polar radius and regularity
//! (min |ċ| > 0) on a dense grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::DEFAULT_EPS_BOUNDARY;
use crate::scalar::{cross, dot, norm, Real, Vec2};

/// Grid density used by constructors to validate radius/speed bounds.
pub const VALIDATION_GRID: usize = 4096;

/// Regularity threshold: min |ċ| over the validation grid must exceed this.
pub const MIN_SPEED: f64 = 1e-8;

/// Truncated real Fourier series on [0, 2π]:
/// mean + Σₖ (cos[k-1]·cos kt + sin[k-1]·sin kt).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierSeries<T> {
    pub mean: T,
    #[serde(default = "Vec::new")]
    pub cos: Vec<T>,
    #[serde(default = "Vec::new")]
    pub sin: Vec<T>,
}

impl<T: Real> FourierSeries<T> {
    pub fn constant(mean: T) -> Self {
        FourierSeries { mean, cos: Vec::new(), sin: Vec::new() }
    }

    pub fn new(mean: T, cos: Vec<T>, sin: Vec<T>) -> Self {
        FourierSeries { mean, cos, sin }
    }

    pub fn modes(&self) -> usize {
        self.cos.len().max(self.sin.len())
    }

    /// Value and first two derivatives at t, in one pass over the modes.
    pub fn eval2(&self, t: T) -> (T, T, T) {
        eval2_slices(self.mean, &self.cos, &self.sin, t)
    }

    pub fn eval(&self, t: T) -> T {
        self.eval2(t).0
    }

    /// Least-squares-exact refit from equispaced samples; recovers the
    /// coefficients exactly (to rounding) when samples.len() > 2*modes.
    pub fn fit(samples: &[T], modes: usize) -> Self {
        let n = samples.len();
        let nt = T::from_usize(n).unwrap();
        let two = T::two();
        let mut mean = T::zero();
        for &s in samples {
            mean += s;
        }
        mean = mean / nt;
        let mut cos = vec![T::zero(); modes];
        let mut sin = vec![T::zero(); modes];
        for k in 0..modes {
            let kk = T::from_usize(k + 1).unwrap();
            let mut ak = T::zero();
            let mut bk = T::zero();
            for (j, &s) in samples.iter().enumerate() {
                let t = two * T::PI() * T::from_usize(j).unwrap() / nt;
                let (skt, ckt) = (kk * t).sin_cos();
                ak = ak + s * ckt;
                bk = bk + s * skt;
            }
            cos[k] = two * ak / nt;
            sin[k] = two * bk / nt;
        }
        FourierSeries { mean, cos, sin }
    }

    /// Series for f(-t): cosine amplitudes unchanged, sine amplitudes negated.
    fn time_reversed(&self) -> Self {
        FourierSeries {
            mean: self.mean,
            cos: self.cos.clone(),
            sin: self.sin.iter().map(|&b| -b).collect(),
        }
    }
}

/// Shared evaluation kernel: value and first two derivatives of
/// mean + Σ (cos[k-1] cos kt + sin[k-1] sin kt).
pub(crate) fn eval2_slices<T: Real>(mean: T, cos: &[T], sin: &[T], t: T) -> (T, T, T) {
    let mut v = mean;
    let mut d1 = T::zero();
    let mut d2 = T::zero();
    let modes = cos.len().max(sin.len());
    for k in 0..modes {
        let kk = T::from_usize(k + 1).unwrap();
        let (skt, ckt) = (kk * t).sin_cos();
        let a = cos.get(k).copied().unwrap_or_else(T::zero);
        let b = sin.get(k).copied().unwrap_or_else(T::zero);
        v = v + a * ckt + b * skt;
        d1 = d1 + kk * (b * ckt - a * skt);
        d2 = d2 - kk * kk * (a * ckt + b * skt);
    }
    (v, d1, d2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveForm {
    Polar,
    Cartesian,
}

/// Serialized layout: {"form": "polar", "mean": a, "cos": [...], "sin": [...]}
/// or {"form": "cartesian", "x1": {...}, "x2": {...}}.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase", bound(
    serialize = "T: serde::Serialize",
    deserialize = "T: serde::de::DeserializeOwned + Real"
))]
enum Repr<T> {
    Polar {
        mean: T,
        #[serde(default = "Vec::new")]
        cos: Vec<T>,
        #[serde(default = "Vec::new")]
        sin: Vec<T>,
    },
    Cartesian { x1: FourierSeries<T>, x2: FourierSeries<T> },
}

/// A validated closed curve in the unit disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(
    try_from = "Repr<T>",
    into = "Repr<T>",
    bound(serialize = "T: Real", deserialize = "T: Real")
)]
pub struct Curve<T: Real> {
    repr: Repr<T>,
}

impl<T: Real> From<Curve<T>> for Repr<T> {
    fn from(c: Curve<T>) -> Repr<T> {
        c.repr
    }
}

impl<T: Real> TryFrom<Repr<T>> for Curve<T> {
    type Error = Error;

    fn try_from(repr: Repr<T>) -> Result<Curve<T>> {
        match repr {
            Repr::Polar { mean, cos, sin } => Curve::polar(mean, cos, sin),
            Repr::Cartesian { x1, x2 } => Curve::cartesian(x1, x2),
        }
    }
}

/// Position, velocity and acceleration at equispaced parameter nodes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveSamples<T> {
    pub n: usize,
    pub t: Vec<T>,
    pub pos: Vec<Vec2<T>>,
    pub vel: Vec<Vec2<T>>,
    pub acc: Vec<Vec2<T>>,
}

impl<T: Real> Curve<T> {
    /// Origin-centered circle of radius a, counterclockwise.
    pub fn circle(a: T) -> Result<Self> {
        Self::circle_with_guard(a, T::of(DEFAULT_EPS_BOUNDARY))
    }

    pub fn circle_with_guard(a: T, eps_boundary: T) -> Result<Self> {
        Self::polar_with_guard(a, Vec::new(), Vec::new(), eps_boundary)
    }

    /// Polar-Fourier curve r(θ) = mean + Σ (cos[k-1] cos kθ + sin[k-1] sin kθ).
    pub fn polar(mean: T, cos: Vec<T>, sin: Vec<T>) -> Result<Self> {
        Self::polar_with_guard(mean, cos, sin, T::of(DEFAULT_EPS_BOUNDARY))
    }

    pub fn polar_with_guard(mean: T, cos: Vec<T>, sin: Vec<T>, eps_boundary: T) -> Result<Self> {
        let curve = Curve { repr: Repr::Polar { mean, cos, sin } };
        curve.validate(eps_boundary)?;
        Ok(curve)
    }

    /// Cartesian-Fourier curve (x₁(t), x₂(t)).
    pub fn cartesian(x1: FourierSeries<T>, x2: FourierSeries<T>) -> Result<Self> {
        Self::cartesian_with_guard(x1, x2, T::of(DEFAULT_EPS_BOUNDARY))
    }

    pub fn cartesian_with_guard(
        x1: FourierSeries<T>,
        x2: FourierSeries<T>,
        eps_boundary: T,
    ) -> Result<Self> {
        let curve = Curve { repr: Repr::Cartesian { x1, x2 } };
        curve.validate(eps_boundary)?;
        Ok(curve)
    }

    /// Fit a cartesian curve to a smooth closed map t ↦ (x₁, x₂); exact when
    /// the map is a trigonometric polynomial of degree ≤ modes.
    pub fn fit_cartesian(f: impl Fn(T) -> Vec2<T>, modes: usize) -> Result<Self> {
        let n = (4 * modes.max(1)).max(256);
        let mut s1 = Vec::with_capacity(n);
        let mut s2 = Vec::with_capacity(n);
        for j in 0..n {
            let t = T::two() * T::PI() * T::from_usize(j).unwrap() / T::from_usize(n).unwrap();
            let p = f(t);
            s1.push(p[0]);
            s2.push(p[1]);
        }
        Self::cartesian(FourierSeries::fit(&s1, modes), FourierSeries::fit(&s2, modes))
    }

    fn validate(&self, eps_boundary: T) -> Result<()> {
        let r_max = T::one() - eps_boundary;
        let n = VALIDATION_GRID;
        let mut min_r = T::infinity();
        let mut max_r = T::neg_infinity();
        let mut min_speed = T::infinity();
        for j in 0..n {
            let t = T::two() * T::PI() * T::from_usize(j).unwrap() / T::from_usize(n).unwrap();
            if let Repr::Polar { .. } = self.repr {
                let (r, _, _) = self.radial(t).expect("polar repr");
                min_r = min_r.min(r);
            }
            let p = self.position(t);
            max_r = max_r.max(norm(p));
            min_speed = min_speed.min(norm(self.velocity(t)));
        }
        if let Repr::Polar { .. } = self.repr {
            if min_r <= T::zero() {
                return Err(Error::NonPositiveRadius { min_r: min_r.to_f64().unwrap_or(f64::NAN) });
            }
        }
        if max_r > r_max {
            return Err(Error::Boundary {
                r: max_r.to_f64().unwrap_or(f64::NAN),
                limit: r_max.to_f64().unwrap_or(f64::NAN),
            });
        }
        if min_speed <= T::of(MIN_SPEED) {
            return Err(Error::DegenerateSpeed { d2: min_speed.to_f64().unwrap_or(f64::NAN) });
        }
        Ok(())
    }

    pub fn form(&self) -> CurveForm {
        match self.repr {
            Repr::Polar { .. } => CurveForm::Polar,
            Repr::Cartesian { .. } => CurveForm::Cartesian,
        }
    }

    /// Radial profile (r, ṙ, r̈) at θ = t; polar curves only.
    pub fn radial(&self, t: T) -> Option<(T, T, T)> {
        match &self.repr {
            Repr::Polar { mean, cos, sin } => Some(eval2_slices(*mean, cos, sin, t)),
            Repr::Cartesian { .. } => None,
        }
    }

    /// Polar coefficient view (mean, cos, sin); polar curves only.
    pub fn polar_coefficients(&self) -> Option<(T, &[T], &[T])> {
        match &self.repr {
            Repr::Polar { mean, cos, sin } => Some((*mean, cos, sin)),
            Repr::Cartesian { .. } => None,
        }
    }

    pub fn modes(&self) -> usize {
        match &self.repr {
            Repr::Polar { cos, sin, .. } => cos.len().max(sin.len()),
            Repr::Cartesian { x1, x2 } => x1.modes().max(x2.modes()),
        }
    }

    pub fn position(&self, t: T) -> Vec2<T> {
        match &self.repr {
            Repr::Polar { .. } => {
                let (r, _, _) = self.radial(t).expect("polar repr");
                let (st, ct) = t.sin_cos();
                [r * ct, r * st]
            }
            Repr::Cartesian { x1, x2 } => [x1.eval(t), x2.eval(t)],
        }
    }

    pub fn velocity(&self, t: T) -> Vec2<T> {
        match &self.repr {
            Repr::Polar { .. } => {
                let (r, rd, _) = self.radial(t).expect("polar repr");
                let (st, ct) = t.sin_cos();
                [rd * ct - r * st, rd * st + r * ct]
            }
            Repr::Cartesian { x1, x2 } => [x1.eval2(t).1, x2.eval2(t).1],
        }
    }

    pub fn acceleration(&self, t: T) -> Vec2<T> {
        match &self.repr {
            Repr::Polar { .. } => {
                let (r, rd, rdd) = self.radial(t).expect("polar repr");
                let (st, ct) = t.sin_cos();
                let two = T::two();
                [rdd * ct - two * rd * st - r * ct, rdd * st + two * rd * ct - r * st]
            }
            Repr::Cartesian { x1, x2 } => [x1.eval2(t).2, x2.eval2(t).2],
        }
    }

    /// Exact Fourier evaluation at n equispaced nodes 2πk/n.
    pub fn sample(&self, n: usize) -> Result<CurveSamples<T>> {
        if n < 16 {
            return Err(Error::config(format!("sample count {n} < 16")));
        }
        let mut s = CurveSamples {
            n,
            t: Vec::with_capacity(n),
            pos: Vec::with_capacity(n),
            vel: Vec::with_capacity(n),
            acc: Vec::with_capacity(n),
        };
        for j in 0..n {
            let t = T::two() * T::PI() * T::from_usize(j).unwrap() / T::from_usize(n).unwrap();
            s.t.push(t);
            s.pos.push(self.position(t));
            s.vel.push(self.velocity(t));
            s.acc.push(self.acceleration(t));
        }
        Ok(s)
    }

    /// Winding number about the origin: total argument increment / 2π.
    pub fn winding_number(&self) -> Result<i32> {
        let n = VALIDATION_GRID;
        let mut min_dist = T::infinity();
        let mut total = T::zero();
        let mut prev = self.position(T::zero());
        min_dist = min_dist.min(norm(prev));
        for j in 1..=n {
            let t = T::two() * T::PI() * T::from_usize(j).unwrap() / T::from_usize(n).unwrap();
            let cur = self.position(t);
            min_dist = min_dist.min(norm(cur));
            total = total + cross(prev, cur).atan2(dot(prev, cur));
            prev = cur;
        }
        if min_dist <= T::of(MIN_SPEED) {
            return Err(Error::OriginOnCurve { min_dist: min_dist.to_f64().unwrap_or(f64::NAN) });
        }
        let turns = total / (T::two() * T::PI());
        let rounded = turns.round();
        if (turns - rounded).abs() >= T::of(0.1) {
            return Err(Error::AmbiguousWinding { raw: turns.to_f64().unwrap_or(f64::NAN) });
        }
        Ok(rounded.to_f64().unwrap_or(0.0) as i32)
    }

    /// The same image traversed in the opposite direction, t ↦ c(-t).
    /// Polar curves convert to cartesian form (degree rises by one; the refit
    /// at that degree is exact).
    pub fn reversed(&self) -> Result<Self> {
        match &self.repr {
            Repr::Cartesian { x1, x2 } => {
                Curve::cartesian(x1.time_reversed(), x2.time_reversed())
            }
            Repr::Polar { cos, sin, .. } => {
                let modes = cos.len().max(sin.len()) + 1;
                let rev = Curve::fit_cartesian(|t: T| self.position(-t), modes)?;
                Ok(rev)
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("curve serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::config(format!("curve JSON: {e}")))
    }
}
