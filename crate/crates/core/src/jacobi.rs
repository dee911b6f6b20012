//! Jacobi equation and conjugate points along the extremal circles.
//!
//! Along circle(a) with λ = λ₀(a) the constrained Jacobi equation reduces to
//!
//! ```text
//! w'' + κ(a) w + μ P(a) = 0,
//! κ(a) = (12a⁶ + 46a⁴ + 19a² - 2) / ((3a²+2)(2a²+1)(a²-1)),
//! P(a) = a(2a²+1)(3a²+2) / (2(1-a²)^{5/2}),
//! ```
//!
//! with the integral constraint ∫ U w dt = 0, U = (2a²+1)/(a(1-a²)^{5/2}).
//! κ changes sign at the critical radius a₀ (root of the numerator), giving
//! an oscillatory basis (sin, cos, constant) below a₀, a polynomial basis
//! (t, 1, b₄t²) at a₀ and a hyperbolic basis (sinh, cosh, constant) above.
//!
//! A conjugate point t₁ of t₀ requires the 3×3 determinant D(t₀, t₁) — basis
//! values at both ends plus the constraint row ∫ U θᵢ — to vanish. The
//! determinant assembled by quadrature is the ground truth here; the closed
//! branch forms are evaluated in two readings (see [`ClosedFormD`]) because
//! the printed hyperbolic/critical forms contain typos, and the reading that
//! matches quadrature is reported.
//!
//! Sign finding: under this row convention D is strictly negative for
//! 0 < t₁ - t₀ ≤ 2π in every regime, bounded away from zero; the scan
//! therefore reports min |D| and the oscillatory would-be zero
//! t₀ + 2π/b₁ > t₀ + 2π.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::DEFAULT_EPS_BOUNDARY;
use crate::quad::{integrate_adaptive_scaled, QuadratureSpec};
use crate::scalar::Real;

/// |a - a₀| below this is classified critical.
pub const CRITICAL_CLASSIFY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Oscillatory,
    Critical,
    Hyperbolic,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Oscillatory => write!(f, "oscillatory"),
            Regime::Critical => write!(f, "critical"),
            Regime::Hyperbolic => write!(f, "hyperbolic"),
        }
    }
}

fn check_radius<T: Real>(a: T) -> Result<()> {
    if a <= T::zero() || a >= T::one() - T::of(DEFAULT_EPS_BOUNDARY) {
        return Err(Error::Boundary {
            r: a.to_f64().unwrap_or(f64::NAN),
            limit: 1.0 - DEFAULT_EPS_BOUNDARY,
        });
    }
    Ok(())
}

fn numerator<T: Real>(a2: T) -> T {
    ((T::of(12.0) * a2 + T::of(46.0)) * a2 + T::of(19.0)) * a2 - T::two()
}

/// w-coefficient κ(a) of the Jacobi equation.
pub fn jacobi_coefficient<T: Real>(a: T) -> Result<T> {
    check_radius(a)?;
    let a2 = a * a;
    let den = (T::of(3.0) * a2 + T::two()) * (T::two() * a2 + T::one()) * (a2 - T::one());
    Ok(numerator(a2) / den)
}

/// Constraint density U(a) = (2a²+1)/(a(1-a²)^{5/2}).
pub fn constraint_density<T: Real>(a: T) -> Result<T> {
    check_radius(a)?;
    let a2 = a * a;
    let q = T::one() - a2;
    Ok((T::two() * a2 + T::one()) / (a * q * q * q.sqrt()))
}

/// Forcing amplitude P(a) of the μ term.
fn forcing<T: Real>(a: T) -> T {
    let a2 = a * a;
    let q = T::one() - a2;
    a * (T::two() * a2 + T::one()) * (T::of(3.0) * a2 + T::two())
        / (T::two() * q * q * q.sqrt())
}

/// The critical radius a₀: unique root in (0, 1) of 12a⁶ + 46a⁴ + 19a² - 2,
/// found by bisection in u = a² and one Newton polish.
pub fn critical_radius<T: Real>() -> T {
    T::of(critical_radius_f64())
}

fn critical_radius_f64() -> f64 {
    let poly = |u: f64| ((12.0 * u + 46.0) * u + 19.0) * u - 2.0;
    let dpoly = |u: f64| (36.0 * u + 92.0) * u + 19.0;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    debug_assert!(poly(lo) < 0.0 && poly(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if poly(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut u = 0.5 * (lo + hi);
    u -= poly(u) / dpoly(u);
    u.sqrt()
}

/// Solution basis of the Jacobi equation at radius a.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct JacobiBasis<T> {
    pub a: T,
    pub kappa: T,
    pub regime: Regime,
    /// Frequency b₁ = √κ (oscillatory) or rate b₂ = √(-κ) (hyperbolic);
    /// zero in the critical regime.
    pub rate: T,
    /// θ₃ amplitude: the constant b₃ = -P/κ off-critical, the t²-coefficient
    /// b₄ = -P/2 at the critical radius.
    pub particular: T,
    /// Constraint density U(a).
    pub u: T,
}

pub fn jacobi_basis<T: Real>(a: T) -> Result<JacobiBasis<T>> {
    check_radius(a)?;
    let kappa = jacobi_coefficient(a)?;
    let u = constraint_density(a)?;
    let p = forcing(a);
    let a0 = critical_radius::<T>();
    let regime = if (a - a0).abs() < T::of(CRITICAL_CLASSIFY_TOL) {
        Regime::Critical
    } else if kappa > T::zero() {
        Regime::Oscillatory
    } else {
        Regime::Hyperbolic
    };
    let (rate, particular) = match regime {
        Regime::Oscillatory => (kappa.sqrt(), -p / kappa),
        Regime::Hyperbolic => ((-kappa).sqrt(), -p / kappa),
        Regime::Critical => (T::zero(), -p * T::half()),
    };
    Ok(JacobiBasis { a, kappa, regime, rate, particular, u })
}

impl<T: Real> JacobiBasis<T> {
    pub fn theta1(&self, t: T) -> T {
        match self.regime {
            Regime::Oscillatory => (self.rate * t).sin(),
            Regime::Critical => t,
            Regime::Hyperbolic => (self.rate * t).sinh(),
        }
    }

    pub fn theta2(&self, t: T) -> T {
        match self.regime {
            Regime::Oscillatory => (self.rate * t).cos(),
            Regime::Critical => T::one(),
            Regime::Hyperbolic => (self.rate * t).cosh(),
        }
    }

    pub fn theta3(&self, t: T) -> T {
        match self.regime {
            Regime::Oscillatory | Regime::Hyperbolic => self.particular,
            Regime::Critical => self.particular * t * t,
        }
    }

    pub fn theta(&self, i: usize, t: T) -> T {
        match i {
            0 => self.theta1(t),
            1 => self.theta2(t),
            2 => self.theta3(t),
            _ => panic!("basis index {i} out of range"),
        }
    }

    fn theta_dd(&self, i: usize, t: T) -> T {
        match (self.regime, i) {
            (Regime::Oscillatory, 0) => -self.rate * self.rate * (self.rate * t).sin(),
            (Regime::Oscillatory, 1) => -self.rate * self.rate * (self.rate * t).cos(),
            (Regime::Hyperbolic, 0) => self.rate * self.rate * (self.rate * t).sinh(),
            (Regime::Hyperbolic, 1) => self.rate * self.rate * (self.rate * t).cosh(),
            (Regime::Critical, 0) | (Regime::Critical, 1) => T::zero(),
            (Regime::Oscillatory, 2) | (Regime::Hyperbolic, 2) => T::zero(),
            (Regime::Critical, 2) => T::two() * self.particular,
            _ => panic!("basis index {i} out of range"),
        }
    }

    /// Residual of w'' + κw + μP for w = c₁θ₁ + c₂θ₂ + μθ₃.
    pub fn ode_residual(&self, c1: T, c2: T, mu: T, t: T) -> T {
        let w = c1 * self.theta1(t) + c2 * self.theta2(t) + mu * self.theta3(t);
        let wdd = c1 * self.theta_dd(0, t) + c2 * self.theta_dd(1, t) + mu * self.theta_dd(2, t);
        wdd + self.kappa * w + mu * forcing(self.a)
    }
}

/// Conjugate-point determinant assembled from the basis and the constraint
/// row by quadrature. Ground truth for the closed branch forms.
pub fn conjugate_determinant<T: Real>(
    a: T,
    t0: T,
    t1: T,
    spec: &QuadratureSpec<T>,
) -> Result<T> {
    if t1 <= t0 {
        return Err(Error::config("conjugate determinant needs t1 > t0"));
    }
    let basis = jacobi_basis(a)?;
    let mut m = [[T::zero(); 3]; 3];
    for i in 0..3 {
        m[0][i] = basis.theta(i, t0);
        m[1][i] = basis.theta(i, t1);
        m[2][i] = integrate_adaptive_scaled(|t| basis.u * basis.theta(i, t), t0, t1, spec)?;
    }
    Ok(det3(&m))
}

fn det3<T: Real>(m: &[[T; 3]; 3]) -> T {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// The closed branch forms of D(t₀, t₁), in two readings.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ClosedFormD<T> {
    /// The reading that matches the quadrature determinant:
    /// oscillatory 4(b₃/b₁)U sin(β/2)[sin(β/2) - (β/2)cos(β/2)],
    /// hyperbolic with cosh in the bracket, critical (1/6)b₄U Δ⁴.
    pub matching: T,
    /// The branch expressions exactly as printed (cos in the hyperbolic
    /// bracket, Δ² at critical); kept to document the typos.
    pub printed: T,
}

pub fn conjugate_determinant_closed<T: Real>(a: T, t0: T, t1: T) -> Result<ClosedFormD<T>> {
    if t1 <= t0 {
        return Err(Error::config("conjugate determinant needs t1 > t0"));
    }
    let basis = jacobi_basis(a)?;
    let delta = t1 - t0;
    let four = T::of(4.0);
    Ok(match basis.regime {
        Regime::Oscillatory => {
            let half = basis.rate * delta * T::half();
            let v = four * (basis.particular / basis.rate) * basis.u
                * half.sin()
                * (half.sin() - half * half.cos());
            ClosedFormD { matching: v, printed: v }
        }
        Regime::Hyperbolic => {
            let half = basis.rate * delta * T::half();
            let common = four * (basis.particular / basis.rate) * basis.u * half.sinh();
            ClosedFormD {
                matching: common * (half.sinh() - half * half.cosh()),
                printed: common * (half.sinh() - half * half.cos()),
            }
        }
        Regime::Critical => {
            let base = basis.particular * basis.u / T::of(6.0);
            ClosedFormD {
                matching: base * delta.powi(4),
                printed: base * delta.powi(2),
            }
        }
    })
}

/// Outcome of scanning D(t₀, t₀ + δ) for zeros over δ ∈ (0, window].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConjugateScan<T> {
    pub a: T,
    pub regime: Regime,
    /// Rate b₁ or b₂ (zero at critical).
    pub b: T,
    /// First zero location within the window, if any.
    pub first_zero: Option<T>,
    /// Oscillatory regime only: the zero 2π/b₁ the closed form predicts
    /// beyond the window (b₁ < 1 puts it past 2π).
    pub would_be_zero: Option<T>,
    /// Minimum of |D| over the scan grid (excluding the trivial δ → 0 limit).
    pub min_abs_d: T,
}

/// Scan the window (0, 2π] for conjugate points along circle(a).
pub fn conjugate_scan<T: Real>(a: T, spec: &QuadratureSpec<T>) -> Result<ConjugateScan<T>> {
    let basis = jacobi_basis(a)?;
    let window = T::two() * T::PI();
    let m = 256;
    // D vanishes like δ⁴ at the trivial coincidence limit; start the grid
    // clear of it
    let delta_min = T::of(0.05);
    let mut first_zero = None;
    let mut min_abs_d = T::infinity();
    let mut prev: Option<(T, T)> = None;
    for j in 0..=m {
        let delta = delta_min
            + (window - delta_min) * T::from_usize(j).unwrap() / T::from_usize(m).unwrap();
        let d = conjugate_determinant(a, T::zero(), delta, spec)?;
        min_abs_d = min_abs_d.min(d.abs());
        if let Some((pd, pdelta)) = prev {
            if first_zero.is_none() && (pd.signum() != d.signum() || d == T::zero()) {
                // bisect the bracket for the reported location
                let (mut lo, mut hi) = (pdelta, delta);
                let (mut dlo, _) = (pd, d);
                for _ in 0..60 {
                    let mid = (lo + hi) * T::half();
                    let dm = conjugate_determinant(a, T::zero(), mid, spec)?;
                    if dlo.signum() != dm.signum() {
                        hi = mid;
                    } else {
                        lo = mid;
                        dlo = dm;
                    }
                }
                first_zero = Some((lo + hi) * T::half());
            }
        }
        prev = Some((d, delta));
    }
    let would_be_zero = match basis.regime {
        Regime::Oscillatory => Some(T::two() * T::PI() / basis.rate),
        _ => None,
    };
    Ok(ConjugateScan { a, regime: basis.regime, b: basis.rate, first_zero, would_be_zero, min_abs_d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    const A0: f64 = 0.29439269385251134;

    fn spec() -> QuadratureSpec<f64> {
        QuadratureSpec::default()
    }

    #[test]
    fn coefficient_limits_and_values() {
        // a → 0: (-2)/((2)(1)(-1)) = 1
        assert!((jacobi_coefficient(1e-8_f64).unwrap() - 1.0).abs() < 1e-6);
        assert_relative_eq!(jacobi_coefficient(0.5).unwrap(), -62.0 / 33.0, epsilon = 1e-14);
        assert_relative_eq!(jacobi_coefficient(0.1).unwrap(), 0.8807226129741343, epsilon = 1e-14);
    }

    #[test]
    fn critical_radius_root() {
        let a0: f64 = critical_radius();
        assert_relative_eq!(a0, A0, epsilon = 1e-14);
        let u = a0 * a0;
        let poly = ((12.0 * u + 46.0) * u + 19.0) * u - 2.0;
        assert!(poly.abs() < 1e-12, "residual {poly}");
    }

    #[test]
    fn coefficient_sign_straddles_critical_radius() {
        for i in 1..50 {
            let a = A0 * i as f64 / 50.0;
            assert!(jacobi_coefficient(a).unwrap() > 0.0, "a = {a}");
        }
        for i in 1..50 {
            let a = A0 + (0.99 - 0.01 - A0) * i as f64 / 50.0;
            assert!(jacobi_coefficient(a).unwrap() < 0.0, "a = {a}");
        }
    }

    #[test]
    fn regimes_and_constants() {
        assert_eq!(jacobi_basis(0.1).unwrap().regime, Regime::Oscillatory);
        assert_eq!(jacobi_basis(0.5).unwrap().regime, Regime::Hyperbolic);
        assert_eq!(jacobi_basis(critical_radius::<f64>()).unwrap().regime, Regime::Critical);
        assert_relative_eq!(
            jacobi_basis(0.5).unwrap().u,
            6.158402871356008,
            epsilon = 1e-13
        );
        assert_relative_eq!(
            jacobi_basis(0.1).unwrap().rate,
            0.9384682269390553,
            epsilon = 1e-13
        );
        assert_relative_eq!(
            jacobi_basis(0.1).unwrap().particular,
            -0.12054219080064659,
            epsilon = 1e-12
        );
    }

    #[test]
    fn basis_endpoints() {
        for &a in &[0.1, A0, 0.5] {
            let b = jacobi_basis(a).unwrap();
            assert_eq!(b.theta1(0.0), 0.0);
            assert_eq!(b.theta2(0.0), 1.0);
        }
    }

    #[test]
    fn basis_solves_the_ode() {
        let rng = CounterRng::new(3);
        for &a in &[0.1, 0.25, critical_radius::<f64>(), 0.5, 0.9] {
            let basis = jacobi_basis(a).unwrap();
            for i in 0..20 {
                let it = rng.item(i);
                let c1 = it.range_f64(0, -2.0, 2.0);
                let c2 = it.range_f64(1, -2.0, 2.0);
                let mu = it.range_f64(2, -2.0, 2.0);
                for j in 0..5 {
                    let t = 2.0 * PI * j as f64 / 5.0;
                    let res = basis.ode_residual(c1, c2, mu, t);
                    // hyperbolic solutions grow; compare against their size
                    let scale = basis.theta2(t).abs().max(1.0);
                    assert!(
                        res.abs() < 1e-9 * scale,
                        "a = {a}, t = {t}: residual {res}"
                    );
                }
            }
        }
    }

    #[test]
    fn determinant_vanishes_quartically_at_coincidence() {
        let d1 = conjugate_determinant(0.1, 0.3, 0.3 + 1e-4, &spec()).unwrap();
        let d2 = conjugate_determinant(0.1, 0.3, 0.3 + 2e-4, &spec()).unwrap();
        assert!(d1.abs() < 1e-12);
        assert_relative_eq!(d2 / d1, 16.0, max_relative = 1e-2);
    }

    #[test]
    fn quadrature_matches_closed_form_all_regimes() {
        let cases = [(0.1, 0.3, 2.0), (0.22, 0.0, 5.0), (A0, 0.3, 2.0), (0.5, 0.3, 2.0), (0.7, 1.0, 4.0)];
        for &(a, t0, t1) in &cases {
            let quad = conjugate_determinant(a, t0, t1, &spec()).unwrap();
            let closed = conjugate_determinant_closed(a, t0, t1).unwrap();
            let scale = quad.abs().max(1.0);
            assert!(
                (quad - closed.matching).abs() < 1e-8 * scale,
                "a = {a}: quad {quad} vs closed {}",
                closed.matching
            );
        }
    }

    #[test]
    fn printed_branch_readings_diverge_where_typoed() {
        // hyperbolic: cos vs cosh
        let c = conjugate_determinant_closed(0.5, 0.3, 2.0).unwrap();
        let quad = conjugate_determinant(0.5, 0.3, 2.0, &spec()).unwrap();
        assert!((quad - c.matching).abs() < 1e-8 * quad.abs());
        assert!((quad - c.printed).abs() > 1.0);
        // critical: Δ² vs Δ⁴
        let a0 = critical_radius::<f64>();
        let c = conjugate_determinant_closed(a0, 0.3, 2.0).unwrap();
        let quad = conjugate_determinant(a0, 0.3, 2.0, &spec()).unwrap();
        assert!((quad - c.matching).abs() < 1e-8 * quad.abs());
        assert!((quad - c.printed).abs() > 0.5);
        // oscillatory: printed form is correct
        let c = conjugate_determinant_closed(0.1, 0.3, 2.0).unwrap();
        assert_eq!(c.matching, c.printed);
    }

    #[test]
    fn no_conjugate_points_on_the_period_window() {
        for &a in &[0.05, 0.1, 0.2, A0, 0.5, 0.7, 0.9] {
            let scan = conjugate_scan(a, &spec()).unwrap();
            assert!(scan.first_zero.is_none(), "a = {a}: {:?}", scan.first_zero);
            assert!(scan.min_abs_d > 0.0);
        }
    }

    #[test]
    fn oscillatory_would_be_zero_is_beyond_the_window() {
        let scan = conjugate_scan(0.1, &spec()).unwrap();
        let predicted = scan.would_be_zero.unwrap();
        assert_relative_eq!(predicted, 6.6951497416945796, epsilon = 1e-12);
        assert!(predicted > 2.0 * PI);
        // the determinant really does vanish there
        let d = conjugate_determinant(0.1, 0.0, predicted, &spec()).unwrap();
        assert!(d.abs() < 1e-9, "D at predicted zero: {d}");
    }

    #[test]
    fn rate_below_one_in_oscillatory_regime() {
        for i in 1..=100 {
            let a = A0 * i as f64 / 101.0;
            let b = jacobi_basis(a).unwrap();
            assert_eq!(b.regime, Regime::Oscillatory);
            assert!(b.rate > 0.0 && b.rate < 1.0, "a = {a}: b1 = {}", b.rate);
        }
    }

    #[test]
    fn determinant_continuous_through_critical_radius() {
        let a0 = critical_radius::<f64>();
        let d_crit = conjugate_determinant(a0, 0.0, 2.0, &spec()).unwrap();
        let d_below = conjugate_determinant(a0 - 1e-4, 0.0, 2.0, &spec()).unwrap();
        let d_above = conjugate_determinant(a0 + 1e-4, 0.0, 2.0, &spec()).unwrap();
        assert!((d_below - d_crit).abs() < 1e-3, "below: {d_below} vs {d_crit}");
        assert!((d_above - d_crit).abs() < 1e-3, "above: {d_above} vs {d_crit}");
    }

    #[test]
    fn boundary_guard() {
        assert!(jacobi_coefficient(0.0).is_err());
        assert!(jacobi_coefficient(0.995).is_err());
        assert!(jacobi_basis(-0.1_f64).is_err());
    }
}
