use thiserror::Error;

use crate::expr::ExprError;
use crate::numeric::NumericError;

/// Crate-wide error. The message is prefixed with the module that raised it.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum Error {
    #[error("expr: {0}")]
    Expr(#[from] ExprError),
    #[error("numeric: {0}")]
    Numeric(#[from] NumericError),
    #[error("lifetime: beyond support at t = {t} (survival is zero)")]
    BeyondSupport { t: f64 },
    #[error("lifetime: degenerate residual life at t = {t} (m = {m})")]
    DegenerateResidualLife { t: f64, m: f64 },
    #[error("lifetime: infinite mean: {0}")]
    InfiniteMean(String),
    #[error("lifetime: {0}")]
    Lifetime(String),
    #[error("damrl: covariate rejected by Lemma 1: {0}")]
    LemmaRejected(String),
    #[error("damrl: c + m vanishes at t = {t}")]
    ZeroDenominator { t: f64 },
    #[error("damrl: t = {t} is a breakpoint, analyse each side separately")]
    Breakpoint { t: f64 },
    #[error("ageing: {0}")]
    Inconclusive(String),
    #[error("ageing: implication chain violated: {upstream} {upstream_verdict} but {downstream} fails")]
    ChainViolation {
        upstream: String,
        upstream_verdict: String,
        downstream: String,
    },
    #[error("theorems: {0}")]
    Theorems(String),
    #[error("theorems: search inconclusive: {0}")]
    SearchInconclusive(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
