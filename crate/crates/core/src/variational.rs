//! The constrained functional J = A + λL and its Euler-Lagrange machinery.
//!
//! In polar coordinates (curves c(t) = (r(t) cos t, r(t) sin t)) the
//! Lagrangian collapses to
//!
//! ```text
//! h(r, ṙ) = (1/3) ln(3r² + 2) + λ [r²(1-r²) + (1+r²)ṙ²] / [(1-r²)² D],
//! D = √(r²(1-r²) + ṙ²)
//! ```
//!
//! and the Euler-Lagrange equation h_r - d/dt h_ṙ = 0 has the circles r ≡ a
//! as solutions exactly when λ equals the closed-form multiplier
//! [`lambda0`]. The Cartesian route (analytic first derivatives of h,
//! total time derivative by Richardson-extrapolated central differences)
//! is kept as an independent cross-check of the polar closed forms.

use serde::{Deserialize, Serialize};

use crate::curve::{Curve, CurveForm};
use crate::error::{Error, Result};
use crate::measures::berwald_g;
use crate::metric::DEFAULT_EPS_BOUNDARY;
use crate::quad::QuadratureSpec;
use crate::scalar::{cross, dot, Real, Vec2};

/// Lagrange multiplier (area per unit length).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Multiplier<T>(pub T);

/// D² below this is a degenerate polar speed.
pub const DEGENERATE_SPEED_TOL: f64 = 1e-14;

/// |x| below this makes the area integrand's singular coefficient unusable.
const ORIGIN_TOL: f64 = 1e-10;

/// Area integrand f(x, ẋ) = (1/3) [ln(3|x|²+2)/|x|²] (x₁ẋ₂ - x₂ẋ₁).
pub fn area_integrand_f<T: Real>(x: Vec2<T>, v: Vec2<T>) -> Result<T> {
    let rho2 = dot(x, x);
    if rho2 <= T::of(ORIGIN_TOL * ORIGIN_TOL) {
        return Err(Error::Origin { r: rho2.sqrt().to_f64().unwrap_or(0.0) });
    }
    let coeff = (T::of(3.0) * rho2 + T::two()).ln() / (T::of(3.0) * rho2);
    Ok(coeff * cross(x, v))
}

/// Full Lagrangian h = f + λg at a Cartesian point.
pub fn cartesian_h<T: Real>(x: Vec2<T>, v: Vec2<T>, lambda: T) -> Result<T> {
    Ok(area_integrand_f(x, v)? + lambda * berwald_g(x, v)?)
}

/// Polar Lagrangian h(r, ṙ) = (1/3)ln(3r²+2) + λ g(r, ṙ).
pub fn lagrangian_h_polar<T: Real>(r: T, rdot: T, lambda: T) -> Result<T> {
    let d = PolarDerivs::at(r, rdot)?;
    Ok(polar_f(r) + lambda * d.g)
}

fn polar_f<T: Real>(r: T) -> T {
    (T::of(3.0) * r * r + T::two()).ln() / T::of(3.0)
}

fn polar_f_r<T: Real>(r: T) -> T {
    T::two() * r / (T::of(3.0) * r * r + T::two())
}

/// Analytic first and mixed second partials of the polar length integrand
/// g(r, ṙ) = N/(Q²D), N = r²(1-r²) + (1+r²)ṙ².
#[derive(Debug, Clone, Copy)]
pub(crate) struct PolarDerivs<T> {
    pub g: T,
    pub g_r: T,
    /// W = ∂g/∂ṙ = ṙ M / (Q² D³), M = r² + r⁴ - 2r⁶ + (1+r²)ṙ².
    pub w: T,
    pub w_r: T,
    pub w_rd: T,
}

impl<T: Real> PolarDerivs<T> {
    pub fn at(r: T, rdot: T) -> Result<Self> {
        if r <= T::zero() || r >= T::one() {
            return Err(Error::Boundary { r: r.to_f64().unwrap_or(f64::NAN), limit: 1.0 });
        }
        let one = T::one();
        let two = T::two();
        let three = T::of(3.0);
        let four = T::of(4.0);
        let q = one - r * r;
        let d2 = r * r * q + rdot * rdot;
        if d2 <= T::of(DEGENERATE_SPEED_TOL) {
            return Err(Error::DegenerateSpeed { d2: d2.to_f64().unwrap_or(f64::NAN) });
        }
        let d = d2.sqrt();
        let n = r * r * q + (one + r * r) * rdot * rdot;
        let m = r * r + r.powi(4) - two * r.powi(6) + (one + r * r) * rdot * rdot;
        let n_r = two * r * q - two * r.powi(3) + two * r * rdot * rdot;
        let d_r = (r - two * r.powi(3)) / d;
        let m_r = two * r + four * r.powi(3) - T::of(12.0) * r.powi(5) + two * r * rdot * rdot;
        let m_rd = two * (one + r * r) * rdot;
        let d_rd = rdot / d;
        let q2 = q * q;
        let d3 = d2 * d;
        let g = n / (q2 * d);
        let g_r = n_r / (q2 * d) + four * r * n / (q2 * q * d) - n * d_r / (q2 * d2);
        let w = rdot * m / (q2 * d3);
        let w_r = rdot * m_r / (q2 * d3) + four * r * rdot * m / (q2 * q * d3)
            - three * rdot * m * d_r / (q2 * d2 * d2);
        let w_rd = m / (q2 * d3) + rdot * m_rd / (q2 * d3)
            - three * rdot * m * d_rd / (q2 * d2 * d2);
        Ok(PolarDerivs { g, g_r, w, w_r, w_rd })
    }
}

/// Pointwise Euler-Lagrange residual of the polar equation along a curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElResidualProfile<T> {
    pub t: Vec<T>,
    pub residual: Vec<T>,
    pub max_abs: T,
}

/// Left side of the polar Euler-Lagrange equation at (r, ṙ, r̈), the total
/// time derivative expanded by the chain rule.
pub fn el_residual_polar_at<T: Real>(r: T, rdot: T, rddot: T, lambda: T) -> Result<T> {
    let d = PolarDerivs::at(r, rdot)?;
    Ok(polar_f_r(r) + lambda * (d.g_r - d.w_r * rdot - d.w_rd * rddot))
}

/// Residual profile over the quadrature node grid; polar curves only.
pub fn el_residual_polar<T: Real>(
    curve: &Curve<T>,
    lambda: T,
    spec: &QuadratureSpec<T>,
) -> Result<ElResidualProfile<T>> {
    if curve.form() != CurveForm::Polar {
        return Err(Error::config("polar Euler-Lagrange residual needs a polar-fourier curve"));
    }
    spec.validate()?;
    let n = spec.periodic_nodes;
    let mut prof = ElResidualProfile {
        t: Vec::with_capacity(n),
        residual: Vec::with_capacity(n),
        max_abs: T::zero(),
    };
    for j in 0..n {
        let t = T::two() * T::PI() * T::from_usize(j).unwrap() / T::from_usize(n).unwrap();
        let (r, rd, rdd) = curve.radial(t).expect("polar curve");
        let res = el_residual_polar_at(r, rd, rdd, lambda)?;
        prof.max_abs = prof.max_abs.max(res.abs());
        prof.t.push(t);
        prof.residual.push(res);
    }
    Ok(prof)
}

/// First integral C₁ = ṙ ∂h/∂ṙ - h of the polar Euler-Lagrange equation.
pub fn first_integral<T: Real>(r: T, rdot: T, lambda: T) -> Result<T> {
    let d = PolarDerivs::at(r, rdot)?;
    Ok(rdot * lambda * d.w - polar_f(r) - lambda * d.g)
}

/// Closed-form multiplier making circle(a) an extremal:
/// λ₀ = -2a(1-a²)^{5/2} / (6a⁴ + 7a² + 2). Negative on (0, 1).
pub fn lambda0<T: Real>(a: T) -> Result<Multiplier<T>> {
    if a <= T::zero() || a >= T::one() {
        return Err(Error::Boundary { r: a.to_f64().unwrap_or(f64::NAN), limit: 1.0 });
    }
    let a2 = a * a;
    let num = T::two() * (T::one() - a2).powf(T::of(2.5)) * a;
    let den = T::of(6.0) * a2 * a2 + T::of(7.0) * a2 + T::two();
    Ok(Multiplier(-num / den))
}

/// Normality constant C(a) = (1+2a²)/(1-a²)^{5/2}.
pub fn normality_constant<T: Real>(a: T) -> Result<T> {
    check_circle_radius(a)?;
    let a2 = a * a;
    Ok((T::one() + T::two() * a2) / (T::one() - a2).powf(T::of(2.5)))
}

/// Closed-form constraint Euler-Lagrange operator along circle(a):
/// (P₁, P₂) = C(a) (cos t, sin t). Never zero, so circles are normal.
pub fn normality<T: Real>(a: T, t: T) -> Result<Vec2<T>> {
    let c = normality_constant(a)?;
    let (st, ct) = t.sin_cos();
    Ok([c * ct, c * st])
}

/// Second-variation velocity form along circle(a) with λ = λ₀(a):
/// Σ h_ẋᵢẋⱼ yᵢ yⱼ = [λ₀(2a²+1)/(a(1-a²)^{5/2})] (cos t·y₁ + sin t·y₂)².
/// The bracket equals -1/(1+1.5a²), so the form is ≤ 0 with equality exactly
/// on tangent directions.
pub fn second_variation_form<T: Real>(a: T, t: T, y: Vec2<T>) -> Result<T> {
    let coeff = second_variation_coefficient(a)?;
    let (st, ct) = t.sin_cos();
    let radial = ct * y[0] + st * y[1];
    Ok(coeff * radial * radial)
}

pub fn second_variation_coefficient<T: Real>(a: T) -> Result<T> {
    check_circle_radius(a)?;
    let lam0 = lambda0(a)?.0;
    let a2 = a * a;
    Ok(lam0 * (T::two() * a2 + T::one()) / (a * (T::one() - a2).powf(T::of(2.5))))
}

fn check_circle_radius<T: Real>(a: T) -> Result<()> {
    if a <= T::zero() || a >= T::one() - T::of(DEFAULT_EPS_BOUNDARY) {
        return Err(Error::Boundary {
            r: a.to_f64().unwrap_or(f64::NAN),
            limit: 1.0 - DEFAULT_EPS_BOUNDARY,
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Cartesian route: analytic first derivatives, finite differences in time.
// ---------------------------------------------------------------------------

/// Analytic gradient of the length integrand g: (∂g/∂x, ∂g/∂ẋ).
pub fn cartesian_grad_g<T: Real>(x: Vec2<T>, v: Vec2<T>) -> Result<(Vec2<T>, Vec2<T>)> {
    let rho2 = dot(x, x);
    let q = T::one() - rho2;
    if q <= T::zero() {
        return Err(Error::Boundary { r: rho2.sqrt().to_f64().unwrap_or(f64::NAN), limit: 1.0 });
    }
    let v2 = dot(v, v);
    if v2 == T::zero() {
        return Err(Error::ZeroVector);
    }
    let s = dot(x, v);
    let a = (q * v2 + s * s).sqrt();
    let two = T::two();
    let four = T::of(4.0);
    let q2 = q * q;
    let q3 = q2 * q;
    let a2 = a * a;
    let mut gx = [T::zero(); 2];
    let mut gv = [T::zero(); 2];
    for i in 0..2 {
        let a_x = (-x[i] * v2 + s * v[i]) / a;
        let a_v = (q * v[i] + s * x[i]) / a;
        gx[i] = a_x / q2 + four * x[i] * a / q3 + two * s * v[i] / (q2 * a)
            + four * x[i] * s * s / (q3 * a)
            - s * s * a_x / (q2 * a2);
        gv[i] = a_v / q2 + two * s * x[i] / (q2 * a) - s * s * a_v / (q2 * a2);
    }
    Ok((gx, gv))
}

/// Analytic gradient of the area integrand f.
pub fn cartesian_grad_f<T: Real>(x: Vec2<T>, v: Vec2<T>) -> Result<(Vec2<T>, Vec2<T>)> {
    let rho2 = dot(x, x);
    if rho2 <= T::of(ORIGIN_TOL * ORIGIN_TOL) {
        return Err(Error::Origin { r: rho2.sqrt().to_f64().unwrap_or(0.0) });
    }
    let three = T::of(3.0);
    let u = three * rho2 + T::two();
    let c = u.ln() / (three * rho2);
    // dc/d(ρ²)
    let c_u = (three * rho2 / u - u.ln()) / (three * rho2 * rho2);
    let cr = cross(x, v);
    let gx = [
        T::two() * x[0] * c_u * cr + c * v[1],
        T::two() * x[1] * c_u * cr - c * v[0],
    ];
    let gv = [-c * x[1], c * x[0]];
    Ok((gx, gv))
}

/// Analytic gradient of h = f + λg.
pub fn cartesian_grad_h<T: Real>(
    x: Vec2<T>,
    v: Vec2<T>,
    lambda: T,
) -> Result<(Vec2<T>, Vec2<T>)> {
    let (fx, fv) = cartesian_grad_f(x, v)?;
    let (gx, gv) = cartesian_grad_g(x, v)?;
    Ok((
        [fx[0] + lambda * gx[0], fx[1] + lambda * gx[1]],
        [fv[0] + lambda * gv[0], fv[1] + lambda * gv[1]],
    ))
}

/// Richardson-extrapolated central difference d/dt with step h = ε^{1/3}.
pub(crate) fn ddt_richardson<T: Real>(f: impl Fn(T) -> Result<T>, t: T) -> Result<T> {
    let h = T::epsilon().powf(T::one() / T::of(3.0));
    let half = h * T::half();
    let d_h = (f(t + h)? - f(t - h)?) / (T::two() * h);
    let d_h2 = (f(t + half)? - f(t - half)?) / h;
    Ok((T::of(4.0) * d_h2 - d_h) / T::of(3.0))
}

/// Euler-Lagrange operator of an integrand with analytic gradient `grad`,
/// applied along a curve: Pᵢ(t) = L_xᵢ - d/dt L_ẋᵢ.
pub fn el_operator_fd<T: Real>(
    grad: impl Fn(Vec2<T>, Vec2<T>) -> Result<(Vec2<T>, Vec2<T>)> + Copy,
    curve: &Curve<T>,
    t: T,
) -> Result<Vec2<T>> {
    let (gx, _) = grad(curve.position(t), curve.velocity(t))?;
    let mut out = [T::zero(); 2];
    for i in 0..2 {
        let ddt = ddt_richardson(
            |tau| Ok(grad(curve.position(tau), curve.velocity(tau))?.1[i]),
            t,
        )?;
        out[i] = gx[i] - ddt;
    }
    Ok(out)
}

/// Cartesian Euler-Lagrange residual of h along a curve, by the
/// finite-difference route.
pub fn el_residual_cartesian_fd<T: Real>(curve: &Curve<T>, t: T, lambda: T) -> Result<Vec2<T>> {
    el_operator_fd(|x, v| cartesian_grad_h(x, v, lambda), curve, t)
}

/// Constraint Euler-Lagrange operator (P₁, P₂) of g along a curve, by the
/// finite-difference route; the independent check of [`normality`].
pub fn normality_fd<T: Real>(curve: &Curve<T>, t: T) -> Result<Vec2<T>> {
    el_operator_fd(cartesian_grad_g, curve, t)
}

// ---------------------------------------------------------------------------
// Euler-Lagrange dynamics: r̈ solved from the residual, RK4 trajectories.
// ---------------------------------------------------------------------------

/// r̈ from the polar Euler-Lagrange equation (λ ≠ 0; the Legendre factor
/// h_ṙṙ = λ W_ṙ never vanishes for λ < 0).
pub fn el_rddot<T: Real>(r: T, rdot: T, lambda: T) -> Result<T> {
    if lambda == T::zero() {
        return Err(Error::config("Euler-Lagrange dynamics need a nonzero multiplier"));
    }
    let d = PolarDerivs::at(r, rdot)?;
    Ok((polar_f_r(r) + lambda * d.g_r - lambda * d.w_r * rdot) / (lambda * d.w_rd))
}

/// One state (t, r, ṙ) of an integrated Euler-Lagrange trajectory.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ElState<T> {
    pub t: T,
    pub r: T,
    pub rdot: T,
}

/// Classic RK4 integration of the polar Euler-Lagrange equation from
/// (r₀, ṙ₀); fixed step, `steps` samples over [0, t_end].
pub fn integrate_el_polar<T: Real>(
    r0: T,
    rdot0: T,
    lambda: T,
    t_end: T,
    steps: usize,
) -> Result<Vec<ElState<T>>> {
    if steps == 0 {
        return Err(Error::config("integration needs at least one step"));
    }
    let h = t_end / T::from_usize(steps).unwrap();
    let mut out = Vec::with_capacity(steps + 1);
    let mut t = T::zero();
    let mut y = [r0, rdot0];
    out.push(ElState { t, r: y[0], rdot: y[1] });
    let rhs = |y: [T; 2]| -> Result<[T; 2]> { Ok([y[1], el_rddot(y[0], y[1], lambda)?]) };
    for _ in 0..steps {
        let k1 = rhs(y)?;
        let k2 = rhs([y[0] + h * T::half() * k1[0], y[1] + h * T::half() * k1[1]])?;
        let k3 = rhs([y[0] + h * T::half() * k2[0], y[1] + h * T::half() * k2[1]])?;
        let k4 = rhs([y[0] + h * k3[0], y[1] + h * k3[1]])?;
        let sixth = T::one() / T::of(6.0);
        for i in 0..2 {
            y[i] = y[i] + h * sixth * (k1[i] + T::two() * (k2[i] + k3[i]) + k4[i]);
        }
        t += h;
        out.push(ElState { t, r: y[0], rdot: y[1] });
    }
    Ok(out)
}

/// Bundled results of the five sufficiency checks for one candidate circle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VariationalReport<T> {
    pub el_residual_max: T,
    pub first_integral_drift: T,
    pub lambda_used: T,
    pub normality_min: T,
    pub weierstrass_worst: T,
    pub conjugate_free: bool,
    pub second_variation_sign: i8,
}
