//! Dynamic additive mean residual life model `m*(t) = c(t) + m(t)`.
//!
//! The crate parses closed-form lifetime and covariate functions, converts
//! between mean residual life, hazard and survival, checks whether a
//! covariate yields a valid lifetime, classifies lifetimes into ageing
//! classes and tests the sufficient conditions under which an ageing class
//! transfers from `X` to `X*`.
//!
//! ```
//! use std::sync::Arc;
//! use damrl_core::ageing::classify;
//! use damrl_core::theorems::cross_validate;
//! use damrl_core::{compose, AgeingClass, CovariateFunction, LifetimeModel, Settings, TheoremId};
//!
//! # fn main() -> damrl_core::Result<()> {
//! let s = Settings::default();
//! let cm = compose(
//!     Arc::new(LifetimeModel::exponential()),
//!     CovariateFunction::parse("exp(-t)")?,
//!     &s,
//!     false,
//! )?;
//! assert!(classify(cm.star(), AgeingClass::Ifr, &s)?.holds());
//! let report = cross_validate(TheoremId::T1, &cm, &s)?;
//! assert!(report.applicable && report.sound);
//! # Ok(())
//! # }
//! ```

// `!(a < b)` is deliberate throughout: NaN must land in the failing branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ageing;
pub mod damrl;
pub mod error;
pub mod export;
pub mod expr;
pub mod lifetime;
pub mod numeric;
pub mod settings;
pub mod theorems;

pub use ageing::{AgeingClass, AgeingVerdict, Classification};
pub use damrl::{compose, hazard_star, hazard_star_derivative_terms, validate_lemma1, ComposedModel, CovariateFunction, Lemma1Report};
pub use error::{Error, Result};
pub use expr::{DerivOrder, PiecewiseExpr, Side};
pub use lifetime::{LifetimeModel, Local, ModelSpec, SpecKind, ValidationReport};
pub use numeric::{Grid, ShapeVerdict, Verdict, Witness};
pub use settings::Settings;
pub use theorems::{TheoremId, TheoremReport};
