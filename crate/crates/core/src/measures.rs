//! Geometric functionals: Finsler length, Busemann-Hausdorff density and
//! enclosed area.
//!
//! The length integrand is the symmetrized form
//!
//! ```text
//! g(x, ẋ) = [(1-|x|²)|ẋ|² + 2⟨x,ẋ⟩²] / [(1-|x|²)² A],   A = √((1-|x|²)|ẋ|² + ⟨x,ẋ⟩²)
//! ```
//!
//! which differs from F_B(x, ẋ) by an exact differential, so both give the
//! same length on closed curves.
//!
//! Two routes to the enclosed area are kept deliberately:
//! * [`area_line_integral`] — the vector field with coefficient
//!   ln(3ρ²+2)/ρ², singular at the origin; picks up an extra (2π/3)ln 2 per
//!   winding about the origin.
//! * [`area_double_integral`] — the density integral itself. For polar curves
//!   it reduces exactly to (1/3)∮ ln(1 + 1.5 r(θ)²) dθ via the radial
//!   antiderivative; for cartesian curves the equivalent Green field with
//!   coefficient ln(1+1.5ρ²)/ρ² is regular at the origin, so no winding
//!   offset appears.
//!
//! A Euclidean mode swaps in |ẋ| and density 1; it is the classical
//! isoperimetric sanity oracle.

use serde::{Deserialize, Serialize};

use crate::curve::{Curve, CurveForm};
use crate::error::{Error, Result};
use crate::metric::BerwaldMetric;
use crate::quad::{integrate_adaptive, periodic_sum, QuadratureSpec};
use crate::scalar::{cross, dot, Real, Vec2};

/// Points closer to the origin than this make the line-integral field
/// numerically useless.
const ORIGIN_TOL: f64 = 1e-8;

/// Which metric/density pair the functionals use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Berwald,
    Euclidean,
}

impl Geometry {
    /// Length integrand at (x, ẋ).
    pub fn length_integrand<T: Real>(self, x: Vec2<T>, v: Vec2<T>) -> Result<T> {
        match self {
            Geometry::Berwald => berwald_g(x, v),
            Geometry::Euclidean => Ok(dot(v, v).sqrt()),
        }
    }

    /// Area density σ(ρ).
    pub fn density<T: Real>(self, rho: T) -> T {
        match self {
            Geometry::Berwald => bh_density_closed(rho),
            Geometry::Euclidean => T::one(),
        }
    }

    /// Φ(r) = ∫₀^r ρ σ(ρ) dρ.
    pub fn radial_antiderivative<T: Real>(self, r: T) -> T {
        match self {
            Geometry::Berwald => (T::of(1.5) * r * r).ln_1p() / T::of(3.0),
            Geometry::Euclidean => r * r * T::half(),
        }
    }

    /// ψ(ρ²) = Φ(ρ)/ρ², the regular Green-field coefficient; analytic at 0.
    fn area_field<T: Real>(self, rho2: T) -> T {
        match self {
            Geometry::Berwald => {
                let u = T::of(1.5) * rho2;
                if u < T::of(1e-30) {
                    T::half()
                } else {
                    T::half() * u.ln_1p() / u
                }
            }
            Geometry::Euclidean => T::half(),
        }
    }
}

/// Symmetrized Berwald length integrand.
pub fn berwald_g<T: Real>(x: Vec2<T>, v: Vec2<T>) -> Result<T> {
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
    Ok((q * v2 + T::two() * s * s) / (q * q * a))
}

/// Busemann-Hausdorff density by the spherically symmetric quadrature
/// quotient σ(r) = π / ∫₀^π φ(r, r cos t)^(-2) dt.
pub fn bh_density_quadrature<T: Real>(r: T, spec: &QuadratureSpec<T>) -> Result<T> {
    let metric = BerwaldMetric::default();
    metric.check_radius(r)?;
    let denom = integrate_adaptive(
        |t: T| {
            let p = metric.phi(r, r * t.cos()).expect("|r cos t| <= r < r_max");
            T::one() / (p * p)
        },
        T::zero(),
        T::PI(),
        spec,
    )?;
    Ok(T::PI() / denom)
}

/// Closed-form Busemann-Hausdorff density 1/(1 + 1.5 r²).
pub fn bh_density_closed<T: Real>(r: T) -> T {
    T::one() / (T::one() + T::of(1.5) * r * r)
}

/// Finsler length of a closed curve via the symmetrized integrand.
pub fn curve_length<T: Real>(curve: &Curve<T>, spec: &QuadratureSpec<T>) -> Result<T> {
    curve_length_in(Geometry::Berwald, curve, spec)
}

pub fn curve_length_in<T: Real>(
    geometry: Geometry,
    curve: &Curve<T>,
    spec: &QuadratureSpec<T>,
) -> Result<T> {
    spec.validate()?;
    let s = curve.sample(spec.periodic_nodes)?;
    let mut vals = Vec::with_capacity(s.n);
    for j in 0..s.n {
        vals.push(geometry.length_integrand(s.pos[j], s.vel[j])?);
    }
    Ok(periodic_sum(&vals))
}

/// Length via ∮ F_B(c, ċ) dt; equals [`curve_length`] on closed curves (the
/// integrands differ by an exact differential).
pub fn curve_length_via_norm<T: Real>(curve: &Curve<T>, spec: &QuadratureSpec<T>) -> Result<T> {
    spec.validate()?;
    let metric = BerwaldMetric { eps_boundary: T::zero() };
    let s = curve.sample(spec.periodic_nodes)?;
    let mut vals = Vec::with_capacity(s.n);
    for j in 0..s.n {
        vals.push(metric.norm(s.pos[j], s.vel[j])?);
    }
    Ok(periodic_sum(&vals))
}

/// Enclosed Busemann-Hausdorff area by the paper's line integral
/// (1/3)∮ [ln(3ρ²+2)/ρ²] (x₁ẋ₂ - x₂ẋ₁) dt. Sign follows orientation; for a
/// curve winding once about the origin the value exceeds the true area by
/// (2π/3)ln 2.
pub fn area_line_integral<T: Real>(curve: &Curve<T>, spec: &QuadratureSpec<T>) -> Result<T> {
    spec.validate()?;
    let s = curve.sample(spec.periodic_nodes)?;
    let third = T::one() / T::of(3.0);
    let mut vals = Vec::with_capacity(s.n);
    for j in 0..s.n {
        let rho2 = dot(s.pos[j], s.pos[j]);
        if rho2 <= T::of(ORIGIN_TOL * ORIGIN_TOL) {
            return Err(Error::OriginOnCurve { min_dist: rho2.sqrt().to_f64().unwrap_or(0.0) });
        }
        let coeff = third * (T::of(3.0) * rho2 + T::two()).ln() / rho2;
        vals.push(coeff * cross(s.pos[j], s.vel[j]));
    }
    Ok(periodic_sum(&vals))
}

/// Enclosed Busemann-Hausdorff area (the density integral itself).
pub fn area_double_integral<T: Real>(curve: &Curve<T>, spec: &QuadratureSpec<T>) -> Result<T> {
    area_double_integral_in(Geometry::Berwald, curve, spec)
}

pub fn area_double_integral_in<T: Real>(
    geometry: Geometry,
    curve: &Curve<T>,
    spec: &QuadratureSpec<T>,
) -> Result<T> {
    spec.validate()?;
    match curve.form() {
        CurveForm::Polar => {
            let n = spec.periodic_nodes;
            let mut vals = Vec::with_capacity(n);
            for j in 0..n {
                let t = T::two() * T::PI() * T::from_usize(j).unwrap() / T::from_usize(n).unwrap();
                let (r, _, _) = curve.radial(t).expect("polar curve");
                vals.push(geometry.radial_antiderivative(r));
            }
            Ok(periodic_sum(&vals))
        }
        CurveForm::Cartesian => {
            let w = curve.winding_number()?;
            if w.abs() > 1 {
                return Err(Error::UnsupportedRegion {
                    reason: format!("winding number {w} about the origin; curve cannot be simple"),
                });
            }
            let s = curve.sample(spec.periodic_nodes)?;
            let mut vals = Vec::with_capacity(s.n);
            for j in 0..s.n {
                let rho2 = dot(s.pos[j], s.pos[j]);
                vals.push(geometry.area_field(rho2) * cross(s.pos[j], s.vel[j]));
            }
            Ok(periodic_sum(&vals))
        }
    }
}

/// Brute-force 2-D polar-grid evaluation of the enclosed area over
/// {(θ, ρ) : 0 ≤ ρ ≤ r(θ)}; midpoint rule, O(h²). Cross-check oracle for
/// polar curves, never used in optimization.
pub fn area_polar_grid<T: Real>(
    geometry: Geometry,
    curve: &Curve<T>,
    spec: &QuadratureSpec<T>,
) -> Result<T> {
    if curve.form() != CurveForm::Polar {
        return Err(Error::UnsupportedRegion {
            reason: "polar-grid area needs a polar-fourier curve".into(),
        });
    }
    let na = spec.grid_angular;
    let nr = spec.grid_radial;
    let dtheta = T::two() * T::PI() / T::from_usize(na).unwrap();
    let mut total = T::zero();
    for i in 0..na {
        let theta = dtheta * (T::from_usize(i).unwrap() + T::half());
        let (r, _, _) = curve.radial(theta).expect("polar curve");
        let drho = r / T::from_usize(nr).unwrap();
        let mut col = T::zero();
        for j in 0..nr {
            let rho = drho * (T::from_usize(j).unwrap() + T::half());
            col += geometry.density(rho) * rho;
        }
        total += col * drho;
    }
    Ok(total * dtheta)
}

/// Scanline rasterization of the enclosed area on a square grid: the curve is
/// polygonized, each grid row is intersected with the polygon, and the density
/// is integrated exactly in x over the inside intervals. Cross-check oracle
/// with O(h²) accuracy, never used in optimization.
pub fn area_rasterized<T: Real>(geometry: Geometry, curve: &Curve<T>, rows: usize) -> Result<T> {
    let n = crate::curve::VALIDATION_GRID;
    let poly: Vec<Vec2<T>> = (0..n)
        .map(|j| {
            curve.position(T::two() * T::PI() * T::from_usize(j).unwrap() / T::from_usize(n).unwrap())
        })
        .collect();
    let mut y_min = T::infinity();
    let mut y_max = T::neg_infinity();
    for p in &poly {
        y_min = y_min.min(p[1]);
        y_max = y_max.max(p[1]);
    }
    let h = (y_max - y_min) / T::from_usize(rows).unwrap();
    let mut total = T::zero();
    let mut xs: Vec<T> = Vec::new();
    for i in 0..rows {
        let y = y_min + h * (T::from_usize(i).unwrap() + T::half());
        xs.clear();
        for j in 0..n {
            let a = poly[j];
            let b = poly[(j + 1) % n];
            // half-open rule: count crossings of [min(y_a,y_b), max) once
            if (a[1] <= y) != (b[1] <= y) {
                let t = (y - a[1]) / (b[1] - a[1]);
                xs.push(a[0] + t * (b[0] - a[0]));
            }
        }
        xs.sort_by(|p, q| p.partial_cmp(q).expect("finite"));
        let mut k = 0;
        while k + 1 < xs.len() {
            total += density_strip(geometry, xs[k], xs[k + 1], y);
            k += 2;
        }
    }
    Ok(total * h)
}

/// ∫ σ(√(x²+y²)) dx over [x0, x1] at fixed y, in closed form.
fn density_strip<T: Real>(geometry: Geometry, x0: T, x1: T, y: T) -> T {
    match geometry {
        Geometry::Euclidean => x1 - x0,
        Geometry::Berwald => {
            // ∫ dx / (c + 1.5 x²) = atan(x √(1.5/c)) / √(1.5 c),  c = 1 + 1.5 y²
            let c = T::one() + T::of(1.5) * y * y;
            let k = (T::of(1.5) / c).sqrt();
            ((x1 * k).atan() - (x0 * k).atan()) / (T::of(1.5) * c).sqrt()
        }
    }
}

/// One row of the density-scan table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityScanRow<T> {
    pub r: T,
    pub sigma_quadrature: T,
    pub sigma_closed: T,
    pub abs_error: T,
}

/// Quadrature-vs-closed-form density comparison over a radius grid.
pub fn density_scan<T: Real>(
    radii: &[T],
    spec: &QuadratureSpec<T>,
) -> Result<Vec<DensityScanRow<T>>> {
    radii
        .iter()
        .map(|&r| {
            let sigma_quadrature = bh_density_quadrature(r, spec)?;
            let sigma_closed = bh_density_closed(r);
            Ok(DensityScanRow {
                r,
                sigma_quadrature,
                sigma_closed,
                abs_error: (sigma_quadrature - sigma_closed).abs(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::FourierSeries;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn spec() -> QuadratureSpec<f64> {
        QuadratureSpec::default()
    }

    const OFFSET: f64 = 1.4517240602024014; // (2π/3) ln 2

    #[test]
    fn density_at_origin_is_one() {
        assert_relative_eq!(bh_density_quadrature(0.0, &spec()).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(bh_density_closed(0.0), 1.0);
    }

    #[test]
    fn density_quadrature_matches_closed_form() {
        // r = 0.5: 1/(1 + 3/8) = 8/11
        assert_relative_eq!(
            bh_density_quadrature(0.5, &spec()).unwrap(),
            8.0 / 11.0,
            epsilon = 1e-10
        );
        // r = 0.9: 1/2.215
        assert_relative_eq!(
            bh_density_quadrature(0.9, &spec()).unwrap(),
            0.45146726862302483,
            epsilon = 1e-9
        );
    }

    #[test]
    fn density_closed_form_is_total_on_disk() {
        // formula stays finite at r = 1
        assert_relative_eq!(bh_density_closed(1.0), 0.4, max_relative = 1e-15);
    }

    #[test]
    fn density_boundary_guard() {
        assert!(matches!(
            bh_density_quadrature(0.995, &spec()),
            Err(Error::Boundary { .. })
        ));
    }

    #[test]
    fn circle_length_closed_form() {
        // 2π a / (1-a²)^(3/2) at a = 0.5
        let c = Curve::circle(0.5).unwrap();
        assert_relative_eq!(
            curve_length(&c, &spec()).unwrap(),
            4.836798304624581,
            epsilon = 1e-12
        );
    }

    #[test]
    fn small_circle_length_is_euclidean() {
        let a = 1e-4;
        let c = Curve::circle(a).unwrap();
        let len = curve_length(&c, &spec()).unwrap();
        assert_relative_eq!(len / (2.0 * PI * a), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn length_routes_agree_on_closed_curves() {
        let c = Curve::polar(0.5, vec![0.04, -0.02], vec![0.03, 0.01]).unwrap();
        let via_g = curve_length(&c, &spec()).unwrap();
        let via_norm = curve_length_via_norm(&c, &spec()).unwrap();
        assert!((via_g - via_norm).abs() < 1e-9, "{via_g} vs {via_norm}");
    }

    #[test]
    fn length_orientation_invariance() {
        // F_B(x,v) - F_B(x,-v) = 4⟨x,v⟩/(1-|x|²)², an exact differential along
        // any closed loop, so loop length never depends on orientation even
        // though the metric is pointwise non-reversible.
        let c = Curve::circle(0.5).unwrap();
        let rev = c.reversed().unwrap();
        assert_relative_eq!(
            curve_length(&c, &spec()).unwrap(),
            curve_length(&rev, &spec()).unwrap(),
            epsilon = 1e-10
        );

        let off = Curve::cartesian(
            FourierSeries::new(0.3, vec![0.2], vec![0.0]),
            FourierSeries::new(0.0, vec![0.0], vec![0.2]),
        )
        .unwrap();
        let off_fwd = curve_length(&off, &spec()).unwrap();
        let off_bwd = curve_length(&off.reversed().unwrap(), &spec()).unwrap();
        assert_relative_eq!(off_fwd, off_bwd, epsilon = 1e-9);

        // the pointwise asymmetry is still there: F_B(c, ċ) ≠ F_B(c, -ċ)
        let m = BerwaldMetric::<f64>::default();
        let x = off.position(0.3);
        let v = off.velocity(0.3);
        let fwd = m.norm(x, v).unwrap();
        let bwd = m.norm(x, [-v[0], -v[1]]).unwrap();
        assert!((fwd - bwd).abs() > 1e-3, "{fwd} vs {bwd}");
    }

    #[test]
    fn circle_areas_closed_form() {
        let c = Curve::circle(0.5).unwrap();
        // (2π/3) ln(3a²+2) at a = 0.5
        assert_relative_eq!(
            area_line_integral(&c, &spec()).unwrap(),
            2.1186919949958999,
            epsilon = 1e-12
        );
        // (2π/3) ln(1+1.5a²) at a = 0.5
        assert_relative_eq!(
            area_double_integral(&c, &spec()).unwrap(),
            0.6669679347934985,
            epsilon = 1e-12
        );
    }

    #[test]
    fn clockwise_circle_flips_line_integral_sign() {
        let cw = Curve::circle(0.5).unwrap().reversed().unwrap();
        assert_relative_eq!(
            area_line_integral(&cw, &spec()).unwrap(),
            -2.1186919949958999,
            epsilon = 1e-11
        );
    }

    #[test]
    fn small_circle_area_is_euclidean() {
        let a = 1e-4;
        let c = Curve::circle(a).unwrap();
        let area = area_double_integral(&c, &spec()).unwrap();
        assert_relative_eq!(area / (PI * a * a), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn winding_offset_between_area_routes() {
        let c = Curve::polar(0.5, vec![0.1], vec![0.0, 0.05]).unwrap();
        let line = area_line_integral(&c, &spec()).unwrap();
        let double = area_double_integral(&c, &spec()).unwrap();
        assert!((line - double - OFFSET).abs() < 1e-10);
    }

    #[test]
    fn no_offset_for_origin_excluding_curves() {
        let off = Curve::cartesian(
            FourierSeries::new(0.45, vec![0.15, 0.02], vec![0.0]),
            FourierSeries::new(0.1, vec![0.0], vec![0.2]),
        )
        .unwrap();
        assert_eq!(off.winding_number().unwrap(), 0);
        let line = area_line_integral(&off, &spec()).unwrap();
        let double = area_double_integral(&off, &spec()).unwrap();
        assert!((line - double).abs() < 1e-9, "{line} vs {double}");
    }

    #[test]
    fn line_integral_rejects_origin_on_curve() {
        let through = Curve::cartesian(
            FourierSeries::new(0.4, vec![0.4], vec![0.0]),
            FourierSeries::new(0.0, vec![0.0], vec![0.4]),
        )
        .unwrap();
        assert!(matches!(
            area_line_integral(&through, &spec()),
            Err(Error::OriginOnCurve { .. })
        ));
    }

    #[test]
    fn polar_grid_oracle_agrees() {
        let c = Curve::polar(0.5, vec![0.08], vec![-0.05]).unwrap();
        let exact = area_double_integral(&c, &spec()).unwrap();
        let grid = area_polar_grid(Geometry::Berwald, &c, &spec()).unwrap();
        assert!((exact - grid).abs() < 1e-5, "{exact} vs {grid}");
    }

    #[test]
    fn rasterized_oracle_agrees() {
        let c = Curve::polar(0.5, vec![0.08], vec![-0.05]).unwrap();
        let exact = area_double_integral(&c, &spec()).unwrap();
        let raster = area_rasterized(Geometry::Berwald, &c, 4096).unwrap();
        assert!((exact - raster).abs() < 1e-4, "{exact} vs {raster}");

        // origin-excluding cartesian region
        let off = Curve::cartesian(
            FourierSeries::new(0.45, vec![0.15], vec![0.0]),
            FourierSeries::new(0.1, vec![0.0], vec![0.2]),
        )
        .unwrap();
        let exact = area_double_integral(&off, &spec()).unwrap();
        let raster = area_rasterized(Geometry::Berwald, &off, 4096).unwrap();
        assert!((exact - raster).abs() < 1e-4, "{exact} vs {raster}");
    }

    #[test]
    fn euclidean_geometry_sanity() {
        let a = 0.4;
        let c = Curve::circle(a).unwrap();
        let len = curve_length_in(Geometry::Euclidean, &c, &spec()).unwrap();
        let area = area_double_integral_in(Geometry::Euclidean, &c, &spec()).unwrap();
        assert_relative_eq!(len, 2.0 * PI * a, epsilon = 1e-12);
        assert_relative_eq!(area, PI * a * a, epsilon = 1e-12);
        assert_relative_eq!(len * len / (4.0 * PI * area), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn density_scan_rows() {
        let radii: Vec<f64> = (0..10).map(|i| 0.1 * i as f64).collect();
        let rows = density_scan(&radii, &spec()).unwrap();
        assert_eq!(rows.len(), 10);
        for row in &rows {
            assert!(row.abs_error < 1e-9, "r = {}: err = {}", row.r, row.abs_error);
        }
    }

    #[test]
    fn reparametrization_invariance_of_functionals() {
        // same circle image under a tangential reparametrization
        let a = 0.5;
        let reparam = Curve::fit_cartesian(
            |t: f64| {
                let tau = t + 0.1 * t.sin();
                [a * tau.cos(), a * tau.sin()]
            },
            24,
        )
        .unwrap();
        let circle = Curve::circle(a).unwrap();
        let s = spec();
        assert_relative_eq!(
            curve_length(&reparam, &s).unwrap(),
            curve_length(&circle, &s).unwrap(),
            epsilon = 1e-10
        );
        assert_relative_eq!(
            area_double_integral(&reparam, &s).unwrap(),
            area_double_integral(&circle, &s).unwrap(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn length_stable_under_node_count() {
        let c = Curve::circle(0.5).unwrap();
        let l64 = curve_length(&c, &spec().with_periodic_nodes(64)).unwrap();
        let l1024 = curve_length(&c, &spec()).unwrap();
        assert_relative_eq!(l64, l1024, epsilon = 1e-12);
    }
}
