//! Error type shared by all modules.
//!
//! Diagnostic payloads are stored as `f64` regardless of the working scalar so
//! the error type stays non-generic.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Base point too close to the unit-circle boundary where the metric and
    /// all integrands blow up like (1-|x|^2)^-2.
    #[error("point with |x| = {r} violates the boundary guard |x| < {limit}")]
    Boundary { r: f64, limit: f64 },

    /// Invariant |s| <= r of the spherically symmetric variables violated
    /// beyond the floating-point clamp tolerance.
    #[error("metric argument s = {s} outside [-r, r] with r = {r}")]
    Domain { r: f64, s: f64 },

    #[error("tangent vector must be nonzero")]
    ZeroVector,

    #[error("polar radius profile reaches {min_r} (must stay positive)")]
    NonPositiveRadius { min_r: f64 },

    #[error("curve passes within {min_dist} of the origin")]
    OriginOnCurve { min_dist: f64 },

    #[error("winding number {raw} is not within 0.1 of an integer")]
    AmbiguousWinding { raw: f64 },

    #[error("integrand evaluated to a non-finite value at t = {at}")]
    NonFiniteIntegrand { at: f64 },

    #[error("adaptive quadrature exceeded max depth {depth} (interval [{lo}, {hi}])")]
    MaxDepth { depth: usize, lo: f64, hi: f64 },

    /// Evaluation at (or too near) the origin where the area integrand's
    /// coefficient ln(3|x|^2+2)/|x|^2 is singular.
    #[error("operation undefined at the origin (|x| = {r})")]
    Origin { r: f64 },

    #[error("degenerate polar speed: r^2(1-r^2) + rdot^2 = {d2} <= tolerance")]
    DegenerateSpeed { d2: f64 },

    #[error("enclosed region unsupported: {reason}")]
    UnsupportedRegion { reason: String },

    #[error("no feasible curve: {reason}")]
    Infeasible { reason: String },

    #[error("optimizer failed to converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("invalid scan spec: {reason}")]
    Seed { reason: String },

    #[error("invalid configuration: {reason}")]
    Config { reason: String },
}

impl Error {
    pub fn config(reason: impl Into<String>) -> Self {
        Error::Config { reason: reason.into() }
    }

    pub fn infeasible(reason: impl Into<String>) -> Self {
        Error::Infeasible { reason: reason.into() }
    }
}
