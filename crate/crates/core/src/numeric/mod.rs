//! Quadrature, Gauss–Legendre collocation and grid shape tests.

pub mod gauss;
mod grid;
mod quad;
pub mod shape;

use thiserror::Error;

pub use grid::Grid;
pub use quad::{divergence_test, integrate, integrate_tail, DivergenceTest};
pub use shape::{
    at_least_samples, check_at_least, check_convex, check_logconvex, check_monotone,
    convex_samples, log_convex_samples, monotone_samples, Curvature, Direction, ShapeKind,
    ShapeVerdict, Verdict, Witness,
};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum NumericError {
    #[error("quadrature did not converge: estimate {estimate}, achieved error {error:.3e}")]
    NoConvergence { estimate: f64, error: f64 },
    #[error("integrand is not finite at t = {t}")]
    NonFinite { t: f64 },
    #[error("log-shape test needs positive values, got {value} at t = {t}")]
    NonPositive { t: f64, value: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}
