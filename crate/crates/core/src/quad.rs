//! 1-D quadrature engines.
//!
//! Two rules cover everything in this crate:
//! * equispaced trapezoid on [0, 2π] — spectrally accurate for smooth
//!   2π-periodic integrands, used for all parameter integrals along closed
//!   curves;
//! * adaptive bisection with an embedded Gauss(7)/Kronrod(15) error estimate
//!   for non-periodic integrals (the Busemann-Hausdorff density quotient, the
//!   conjugate-point determinant rows).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Node counts and tolerances for all integrations.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuadratureSpec<T> {
    /// Equispaced node count for periodic trapezoid sums.
    pub periodic_nodes: usize,
    /// Absolute error target for adaptive integration.
    pub adaptive_tol: T,
    /// Bisection depth cap for adaptive integration.
    pub adaptive_max_depth: usize,
    /// Radial × angular node counts for brute-force 2-D polar grids
    /// (cross-check oracle only).
    pub grid_radial: usize,
    pub grid_angular: usize,
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        QuadratureSpec {
            periodic_nodes: 1024,
            adaptive_tol: T::of(1e-11),
            adaptive_max_depth: 40,
            grid_radial: 2048,
            grid_angular: 2048,
        }
    }
}

impl<T: Real> QuadratureSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if self.periodic_nodes < 64 {
            return Err(Error::config(format!(
                "periodic_nodes = {} < 64",
                self.periodic_nodes
            )));
        }
        if self.adaptive_tol <= T::zero() {
            return Err(Error::config("adaptive tolerance must be positive"));
        }
        Ok(())
    }

    pub fn with_periodic_nodes(mut self, n: usize) -> Self {
        self.periodic_nodes = n;
        self
    }

    pub fn with_adaptive_tol(mut self, tol: T) -> Self {
        self.adaptive_tol = tol;
        self
    }
}

/// Trapezoid sum of a smooth 2π-periodic integrand at the spec's node count.
pub fn integrate_periodic<T: Real>(f: impl Fn(T) -> T, spec: &QuadratureSpec<T>) -> Result<T> {
    spec.validate()?;
    let n = spec.periodic_nodes;
    let h = T::two() * T::PI() / T::from_usize(n).unwrap();
    let mut sum = T::zero();
    for j in 0..n {
        let t = h * T::from_usize(j).unwrap();
        let v = f(t);
        if !v.is_finite() {
            return Err(Error::NonFiniteIntegrand { at: t.to_f64().unwrap_or(f64::NAN) });
        }
        sum += v;
    }
    Ok(sum * h)
}

/// Same trapezoid sum but over caller-supplied node values (one pass when the
/// integrand was already sampled).
pub fn periodic_sum<T: Real>(values: &[T]) -> T {
    let h = T::two() * T::PI() / T::from_usize(values.len()).unwrap();
    let mut sum = T::zero();
    for &v in values {
        sum += v;
    }
    sum * h
}

// Gauss(7)/Kronrod(15) abscissae and weights on [-1, 1] (QUADPACK values).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// One G7/K15 panel: returns (kronrod value, |kronrod - gauss| estimate).
fn gk15_panel<T: Real>(f: &impl Fn(T) -> T, lo: T, hi: T) -> Result<(T, T)> {
    let center = (lo + hi) * T::half();
    let half = (hi - lo) * T::half();
    let fc = eval_finite(f, center)?;
    let mut kronrod = fc * T::of(WGK[7]);
    let mut gauss = fc * T::of(WG[3]);
    for j in 0..7 {
        let x = half * T::of(XGK[j]);
        let f1 = eval_finite(f, center - x)?;
        let f2 = eval_finite(f, center + x)?;
        let fsum = f1 + f2;
        kronrod = kronrod + T::of(WGK[j]) * fsum;
        if j % 2 == 1 {
            gauss = gauss + T::of(WG[j / 2]) * fsum;
        }
    }
    kronrod = kronrod * half;
    gauss = gauss * half;
    Ok((kronrod, (kronrod - gauss).abs()))
}

fn eval_finite<T: Real>(f: &impl Fn(T) -> T, t: T) -> Result<T> {
    let v = f(t);
    if !v.is_finite() {
        return Err(Error::NonFiniteIntegrand { at: t.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(v)
}

/// Adaptive integration of a continuous integrand on [lo, hi] to the spec's
/// absolute tolerance. Globally adaptive: the interval with the worst error
/// estimate is bisected until the summed estimate meets the tolerance.
pub fn integrate_adaptive<T: Real>(
    f: impl Fn(T) -> T,
    lo: T,
    hi: T,
    spec: &QuadratureSpec<T>,
) -> Result<T> {
    spec.validate()?;
    if lo == hi {
        return Ok(T::zero());
    }

    struct Panel<T> {
        lo: T,
        hi: T,
        value: T,
        err: T,
        depth: usize,
    }

    let (value, err) = gk15_panel(&f, lo, hi)?;
    let mut panels = vec![Panel { lo, hi, value, err, depth: 0 }];
    loop {
        let total_err = panels.iter().fold(T::zero(), |acc, p| acc + p.err);
        if total_err <= spec.adaptive_tol {
            return Ok(panels.iter().fold(T::zero(), |acc, p| acc + p.value));
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.err.partial_cmp(&b.1.err).expect("finite error estimates"))
            .map(|(i, _)| i)
            .expect("nonempty panel list");
        let Panel { lo, hi, depth, .. } = panels[worst];
        if depth >= spec.adaptive_max_depth {
            return Err(Error::MaxDepth {
                depth,
                lo: lo.to_f64().unwrap_or(f64::NAN),
                hi: hi.to_f64().unwrap_or(f64::NAN),
            });
        }
        let mid = (lo + hi) * T::half();
        let (lv, le) = gk15_panel(&f, lo, mid)?;
        let (rv, re) = gk15_panel(&f, mid, hi)?;
        panels[worst] = Panel { lo, hi: mid, value: lv, err: le, depth: depth + 1 };
        panels.push(Panel { lo: mid, hi, value: rv, err: re, depth: depth + 1 });
    }
}

/// Adaptive integration with the tolerance rescaled by the integral's
/// magnitude (a one-panel estimate), so very large integrands — e.g. sinh
/// factors over long windows — terminate at the same relative accuracy.
pub fn integrate_adaptive_scaled<T: Real>(
    f: impl Fn(T) -> T,
    lo: T,
    hi: T,
    spec: &QuadratureSpec<T>,
) -> Result<T> {
    let (estimate, _) = gk15_panel(&f, lo, hi)?;
    let scale = estimate.abs().max(T::one());
    let scaled = QuadratureSpec { adaptive_tol: spec.adaptive_tol * scale, ..*spec };
    integrate_adaptive(f, lo, hi, &scaled)
}
