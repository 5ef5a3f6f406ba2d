//! The dynamic additive MRL transform `m*(t) = c(t) + m(t)`: composing a
//! base lifetime with a covariate effect, Lemma 1 admissibility, and the
//! composed hazard with its derivative decomposition.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expr::{Dual2, PiecewiseExpr, Side};
use crate::lifetime::LifetimeModel;
use crate::numeric::{
    at_least_samples, divergence_test, monotone_samples, Direction, Grid, ShapeKind, ShapeVerdict, Verdict,
    Witness,
};
use crate::settings::Settings;

/// Relative mismatch tolerated between adjacent pieces of `c`.
pub const CONTINUITY_TOL: f64 = 1e-9;

/// Printed on every report derived from a composition forced past Lemma 1.
pub const TAINT_BANNER: &str = "model may not correspond to any random variable";

/// The time-dependent covariate effect `c(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CovariateFunction {
    c: PiecewiseExpr,
    label: String,
}

impl CovariateFunction {
    pub fn new(c: PiecewiseExpr, label: impl Into<String>) -> Self {
        Self { c, label: label.into() }
    }

    /// Parse a covariate; the source text doubles as the label.
    pub fn parse(src: &str) -> Result<Self> {
        Ok(Self::new(PiecewiseExpr::parse(src)?, src.trim()))
    }

    pub fn zero() -> Self {
        Self::new(PiecewiseExpr::constant(0.0), "0")
    }

    pub fn expr(&self) -> &PiecewiseExpr {
        &self.c
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_identically_zero()
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.c.eval(t)?)
    }

    /// `c`, `c'`, `c''` at `t`, right-sided at breakpoints.
    pub fn dual(&self, t: f64) -> Result<Dual2> {
        Ok(self.c.eval_dual(t, Side::Right)?)
    }
}

impl fmt::Display for CovariateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// Outcome of the heuristic check `∫_0^∞ dt/(c+m) = ∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DivergenceOutcome {
    Divergent,
    ConvergentSuspected,
    SkippedFiniteSupport,
}

impl DivergenceOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            DivergenceOutcome::Divergent => "divergent",
            DivergenceOutcome::ConvergentSuspected => "convergent-suspected",
            DivergenceOutcome::SkippedFiniteSupport => "finite-support: divergence check skipped",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma1Report {
    /// `0 ≤ c + m < ∞` on the grid.
    pub cond_i: ShapeVerdict,
    /// `c` continuous at every breakpoint.
    pub cond_ii: bool,
    /// `(breakpoint, left, right)` values of `c`.
    pub jumps: Vec<(f64, f64, f64)>,
    /// Breakpoints where `c'` jumps (informational only).
    pub slope_jumps: Vec<(f64, f64, f64)>,
    /// `t + c + m` increasing.
    pub cond_iii: ShapeVerdict,
    pub cond_iv: DivergenceOutcome,
    /// Partial integral of `1/(c+m)` up to the divergence horizon.
    pub cond_iv_partial: f64,
    pub overall: bool,
}

impl Lemma1Report {
    /// Short description of the first failing condition.
    pub fn failure(&self) -> Option<String> {
        if !self.cond_i.holds() {
            return Some(format!("(i) 0 <= c+m < inf fails{}", witness_suffix(&self.cond_i)));
        }
        if !self.cond_ii {
            let (t, l, r) = self
                .jumps
                .iter()
                .copied()
                .find(|&(_, l, r)| !joined(l, r))
                .unwrap_or((f64::NAN, f64::NAN, f64::NAN));
            return Some(format!("(ii) c is discontinuous at t = {t} ({l} vs {r})"));
        }
        if !self.cond_iii.holds() {
            return Some(format!("(iii) t+c+m increasing fails{}", witness_suffix(&self.cond_iii)));
        }
        if self.cond_iv == DivergenceOutcome::ConvergentSuspected {
            return Some(format!(
                "(iv) integral of 1/(c+m) appears finite ({:.4} up to the horizon)",
                self.cond_iv_partial
            ));
        }
        None
    }
}

fn witness_suffix(v: &ShapeVerdict) -> String {
    v.witness.map(|w| format!(" at {w}")).unwrap_or_default()
}

fn joined(l: f64, r: f64) -> bool {
    (l - r).abs() <= CONTINUITY_TOL * 1f64.max(l.abs()).max(r.abs())
}

/// A verdict for a condition whose evaluation broke down at `t`.
fn broken(kind: ShapeKind, t: f64, tol: f64) -> ShapeVerdict {
    ShapeVerdict {
        kind,
        verdict: Verdict::Fails,
        witness: Some(Witness {
            t,
            x: None,
            violation: f64::INFINITY,
        }),
        max_violation: f64::INFINITY,
        tolerance: tol,
    }
}

/// `c + m` at every grid node; an error is reported with the node where it occurred.
fn sum_on_grid(base: &LifetimeModel, cov: &CovariateFunction, ts: &[f64]) -> std::result::Result<Vec<f64>, f64> {
    ts.par_iter()
        .map(|&t| match (cov.eval(t), base.mrl_of(t)) {
            (Ok(c), Ok(m)) if (c + m).is_finite() => Ok(c + m),
            _ => Err(t),
        })
        .collect()
}

/// Check the four conditions of Lemma 1 on the base model's analysis grid.
pub fn validate_lemma1(base: &LifetimeModel, cov: &CovariateFunction, settings: &Settings) -> Lemma1Report {
    let tol = settings.tol;
    let jumps = cov.c.continuity_jumps().unwrap_or_default();
    let slope_jumps = cov
        .c
        .derivative_jumps()
        .unwrap_or_default()
        .into_iter()
        .filter(|&(_, l, r)| !joined(l, r))
        .collect();
    let cond_ii = jumps.iter().all(|&(_, l, r)| joined(l, r));

    let grid = base.analysis_grid(settings);
    let (cond_i, cond_iii, min_sum) = match &grid {
        Err(_) => (
            broken(ShapeKind::AtLeast, 0.0, tol),
            broken(ShapeKind::Increasing, 0.0, tol),
            f64::NAN,
        ),
        Ok(g) => {
            let ts = g.nodes();
            match sum_on_grid(base, cov, &ts) {
                Err(t) => (
                    broken(ShapeKind::AtLeast, t, tol),
                    broken(ShapeKind::Increasing, t, tol),
                    f64::NAN,
                ),
                Ok(sums) => {
                    let zeros = vec![0.0; ts.len()];
                    let i = at_least_samples(&ts, &sums, &zeros, tol).expect("grid has nodes");
                    let tm: Vec<f64> = ts.iter().zip(&sums).map(|(t, s)| t + s).collect();
                    let iii = monotone_samples(&ts, &tm, Direction::Increasing, tol).expect("grid has nodes");
                    let min = sums.iter().copied().fold(f64::INFINITY, f64::min);
                    (i, iii, min)
                }
            }
        }
    };

    let (cond_iv, cond_iv_partial) = if min_sum.is_nan() {
        (DivergenceOutcome::ConvergentSuspected, f64::NAN)
    } else if min_sum <= tol {
        (DivergenceOutcome::SkippedFiniteSupport, f64::NAN)
    } else {
        let inv = |t: f64| -> Result<f64> {
            let s = cov.eval(t)? + base.mrl_of(t)?;
            if s <= 0.0 {
                return Err(Error::ZeroDenominator { t });
            }
            Ok(1.0 / s)
        };
        match divergence_test(inv, settings.divergence_horizon, settings.divergence_threshold, 1e-9) {
            Ok(d) if d.divergent => (DivergenceOutcome::Divergent, d.partial),
            Ok(d) => (DivergenceOutcome::ConvergentSuspected, d.partial),
            Err(_) => (DivergenceOutcome::ConvergentSuspected, f64::NAN),
        }
    };

    let overall = cond_i.holds()
        && cond_ii
        && cond_iii.holds()
        && matches!(
            cond_iv,
            DivergenceOutcome::Divergent | DivergenceOutcome::SkippedFiniteSupport
        );
    Lemma1Report {
        cond_i,
        cond_ii,
        jumps,
        slope_jumps,
        cond_iii,
        cond_iv,
        cond_iv_partial,
        overall,
    }
}

/// `X*` together with the pair it was built from.
#[derive(Clone, Debug)]
pub struct ComposedModel {
    base: Arc<LifetimeModel>,
    cov: CovariateFunction,
    star: Arc<LifetimeModel>,
    lemma: Lemma1Report,
    forced: bool,
}

impl ComposedModel {
    pub fn base(&self) -> &Arc<LifetimeModel> {
        &self.base
    }

    pub fn covariate(&self) -> &CovariateFunction {
        &self.cov
    }

    pub fn star(&self) -> &Arc<LifetimeModel> {
        &self.star
    }

    pub fn lemma(&self) -> &Lemma1Report {
        &self.lemma
    }

    /// True when Lemma 1 rejected the pair and the caller forced it through.
    pub fn tainted(&self) -> bool {
        self.forced && !self.lemma.overall
    }

    pub fn banner(&self) -> Option<&'static str> {
        self.tainted().then_some(TAINT_BANNER)
    }

    /// Grid shared by `X` and `X*` (the base's default horizon).
    pub fn grid(&self, settings: &Settings) -> Result<Grid> {
        self.base.analysis_grid(settings)
    }

    /// All breakpoints of `c` and of the base model.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.cov.c.breakpoints();
        b.extend(self.base.breakpoints());
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// Settings with the horizon pinned to the base's, so that both models
    /// are analysed on the same grid.
    pub fn pinned(&self, settings: &Settings) -> Settings {
        Settings {
            horizon: Some(settings.horizon.unwrap_or_else(|| self.base.default_horizon())),
            ..settings.clone()
        }
    }
}

/// Build `X*` from `X` and `c`. A pair rejected by Lemma 1 is an error
/// unless `force` is set, in which case the result is tainted.
pub fn compose(
    base: Arc<LifetimeModel>,
    cov: CovariateFunction,
    settings: &Settings,
    force: bool,
) -> Result<ComposedModel> {
    let lemma = validate_lemma1(&base, &cov, settings);
    if !lemma.overall && !force {
        return Err(Error::LemmaRejected(lemma.failure().unwrap_or_default()));
    }
    let label = format!("{} + c[{}]", base.label(), cov.label());
    let star = if cov.is_zero() {
        Arc::clone(&base)
    } else if let Some(m) = base.mrl_expr() {
        Arc::new(LifetimeModel::from_mrl(cov.c.add(m), label))
    } else {
        Arc::new(LifetimeModel::additive(Arc::clone(&base), cov.c.clone(), label))
    };
    Ok(ComposedModel {
        base,
        cov,
        star,
        lemma,
        forced: force,
    })
}

/// `r*(t) = r(t)·m(t)/(c(t)+m(t)) + c'(t)/(c(t)+m(t))`.
pub fn hazard_star(cm: &ComposedModel, t: f64) -> Result<f64> {
    let b = cm.base.local(t)?;
    let c = cm.cov.dual(t)?;
    let d = c.v + b.m;
    if d == 0.0 {
        return Err(Error::ZeroDenominator { t });
    }
    Ok(b.r * b.m / d + c.d1 / d)
}

/// The four summands of `r*'(t)`:
/// `r'm/(c+m)`, `r(m'c − mc')/(c+m)²`, `(cc'' − c'²)/(c+m)²`, `(mc'' − c'm')/(c+m)²`.
pub fn hazard_star_derivative_terms(cm: &ComposedModel, t: f64) -> Result<[f64; 4]> {
    if t > 0.0 && cm.breakpoints().contains(&t) {
        return Err(Error::Breakpoint { t });
    }
    let b = cm.base.local(t)?;
    let c = cm.cov.dual(t)?;
    let d = c.v + b.m;
    if d == 0.0 {
        return Err(Error::ZeroDenominator { t });
    }
    let d2 = d * d;
    Ok([
        b.dr * b.m / d,
        b.r * (b.dm * c.v - b.m * c.d1) / d2,
        (c.v * c.d2 - c.d1 * c.d1) / d2,
        (b.m * c.d2 - c.d1 * b.dm) / d2,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifetime::SpecKind;

    fn exp_base() -> Arc<LifetimeModel> {
        Arc::new(LifetimeModel::exponential())
    }

    fn cov(src: &str) -> CovariateFunction {
        CovariateFunction::parse(src).unwrap()
    }

    #[test]
    fn example1_is_admissible() {
        let s = Settings::default();
        let rep = validate_lemma1(&exp_base(), &cov("exp(-t)"), &s);
        assert!(rep.overall, "{:?}", rep.failure());
        assert_eq!(rep.cond_iv, DivergenceOutcome::Divergent);
        let cm = compose(exp_base(), cov("exp(-t)"), &s, false).unwrap();
        assert_eq!(cm.star().mrl_of(0.7).unwrap(), 1.0 + (-0.7f64).exp());
        assert!(hazard_star(&cm, 0.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn fast_decay_breaks_condition_iii() {
        let s = Settings::default();
        let rep = validate_lemma1(&exp_base(), &cov("exp(-3*t)"), &s);
        assert!(!rep.overall);
        assert!(rep.cond_i.holds());
        assert_eq!(rep.cond_iii.verdict, Verdict::Fails);
        assert_eq!(rep.cond_iii.witness.unwrap().t, 0.0);
        let err = compose(exp_base(), cov("exp(-3*t)"), &s, false).unwrap_err();
        assert!(err.to_string().contains("(iii)"), "{err}");
        let forced = compose(exp_base(), cov("exp(-3*t)"), &s, true).unwrap();
        assert_eq!(forced.banner(), Some(TAINT_BANNER));
    }

    #[test]
    fn zero_covariate_is_identity() {
        let s = Settings::default();
        let base = exp_base();
        let cm = compose(Arc::clone(&base), CovariateFunction::zero(), &s, false).unwrap();
        assert!(Arc::ptr_eq(cm.star(), &base));
        assert!(cm.banner().is_none());
        for &t in &[0.0, 1.0, 5.0] {
            assert_eq!(hazard_star(&cm, t).unwrap(), 1.0);
        }
    }

    #[test]
    fn counterexample1_closed_forms() {
        let s = Settings::default();
        let base = Arc::new(LifetimeModel::parse(SpecKind::Mrl, "1/(2+t)", "m").unwrap());
        let cm = compose(base, cov("1/(3+t)"), &s, false).unwrap();
        let want = |t: f64| (5.0 + 2.0 * t) / ((2.0 + t) * (3.0 + t));
        assert!((cm.star().mrl_of(1.5).unwrap() - want(1.5)).abs() < 1e-15);
        assert!((hazard_star(&cm, 0.0).unwrap() - 23.0 / 30.0).abs() < 1e-14);
    }

    #[test]
    fn derivative_terms_example1() {
        let cm = compose(exp_base(), cov("exp(-t)"), &Settings::default(), false).unwrap();
        let sum: f64 = hazard_star_derivative_terms(&cm, 1.0).unwrap().iter().sum();
        let e = (-1.0f64).exp();
        assert!((sum - 2.0 * e / (1.0 + e).powi(2)).abs() < 1e-14);
    }

    #[test]
    fn derivative_terms_refuse_breakpoints() {
        let c = cov("t^2 on [0,1); 2*t-1 on [1,inf)");
        let cm = compose(exp_base(), c, &Settings::default(), false).unwrap();
        assert_eq!(
            hazard_star_derivative_terms(&cm, 1.0),
            Err(Error::Breakpoint { t: 1.0 })
        );
        assert!(hazard_star_derivative_terms(&cm, 1.5).is_ok());
    }

    #[test]
    fn discontinuous_covariate_is_rejected() {
        let rep = validate_lemma1(&exp_base(), &cov("1 on [0,1); 2 on [1,inf)"), &Settings::default());
        assert!(!rep.cond_ii);
        assert!(rep.failure().unwrap().starts_with("(ii)"));
    }

    #[test]
    fn hazard_base_uses_additive_star() {
        let s = Settings::default();
        let base = Arc::new(LifetimeModel::parse(SpecKind::Hazard, "2/(1+t) on [0,1); 1 on [1,inf)", "ex2").unwrap());
        let cm = compose(Arc::clone(&base), cov("t/(1+t)"), &s, false).unwrap();
        for &t in &[0.0, 0.5, 1.0, 3.0] {
            let two_term = hazard_star(&cm, t).unwrap();
            let direct = cm.star().hazard_of(t).unwrap();
            assert!((two_term - direct).abs() < 1e-10, "t={t}: {two_term} vs {direct}");
        }
    }
}
