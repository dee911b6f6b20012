//! Numerical toolkit for the isoperimetric problem of the flat Berwald metric
//! on the unit disk, measured with the Busemann-Hausdorff area.
//!
//! The toolkit evaluates the metric and its geometric functionals, runs the
//! classical sufficiency checks for constrained extrema along origin-centered
//! circles (extremality, normality, Weierstrass excess, conjugate points,
//! second variation), and probes for better curves by constrained shape
//! optimization over polar-Fourier curves.
//!
//! All numeric kernels are generic over the scalar type via [`scalar::Real`];
//! the `*64` aliases at the crate root pin the default `f64` instantiation.

pub mod curve;
pub mod error;
pub mod jacobi;
pub mod measures;
pub mod metric;
pub mod quad;
pub mod rng;
pub mod scalar;
pub mod variational;
pub mod weierstrass;

pub use curve::{Curve, CurveForm, CurveSamples, FourierSeries};
pub use error::{Error, Result};
pub use measures::{
    area_double_integral, area_double_integral_in, area_line_integral, area_polar_grid,
    area_rasterized, bh_density_closed, bh_density_quadrature, curve_length, curve_length_in,
    curve_length_via_norm, density_scan, DensityScanRow, Geometry,
};
pub use jacobi::{
    conjugate_determinant, conjugate_determinant_closed, conjugate_scan, constraint_density,
    critical_radius, jacobi_basis, jacobi_coefficient, ClosedFormD, ConjugateScan, JacobiBasis,
    Regime,
};
pub use metric::{finsler_norm, phi, BerwaldMetric, MetricPoint};
pub use quad::{integrate_adaptive, integrate_periodic, QuadratureSpec};
pub use rng::CounterRng;
pub use scalar::Real;
pub use variational::{
    area_integrand_f, el_residual_cartesian_fd, el_residual_polar, first_integral,
    integrate_el_polar, lagrangian_h_polar, lambda0, normality, normality_fd,
    second_variation_form, ElResidualProfile, ElState, Multiplier, VariationalReport,
};
pub use weierstrass::{e_function, e_function_simplified, negativity_scan, EScanReport, EScanSpec};

/// Concrete `f64` instantiations of the main types.
pub type Curve64 = Curve<f64>;
pub type QuadratureSpec64 = QuadratureSpec<f64>;
pub type MetricPoint64 = MetricPoint<f64>;
pub type BerwaldMetric64 = BerwaldMetric<f64>;
