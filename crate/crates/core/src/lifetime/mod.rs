//! Lifetime models given by their mean residual life, hazard or survival,
//! with conversions between the three.
//!
//! The model as given is canonical. Whatever has no closed form is
//! computed on demand and memoized in a spectral table (see `table.rs`).
//! Beyond the table, survival comes from adaptive quadrature of r or 1/m
//! and mean residual life from a march over Gauss–Legendre cells. These
//! slow paths double as oracles for the table in the tests.

mod table;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use once_cell::sync::OnceCell;

use crate::error::{Error, Result};
use crate::expr::{Dual2, PiecewiseExpr, Side};
use crate::numeric::{
    divergence_test, integrate, monotone_samples, Direction, Grid,
};
use crate::settings::{Settings, HORIZON_CAP, HORIZON_START, SURVIVAL_FLOOR};

use table::{Table, TableSource};

/// Most cells a table may use beyond the analysis horizon.
const TABLE_BUDGET: usize = 20_000;
/// Absolute quadrature tolerance per unit length for the slow paths.
const SLOW_TOL: f64 = 1e-12;
/// Cells the outward march may use before declaring the mean infinite.
const MARCH_CELLS: usize = 4000;
const NODES_PER_CELL: usize = table::NODES;

/// Which function a model is specified by.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecKind {
    Mrl,
    Hazard,
    Survival,
}

impl FromStr for SpecKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mrl" => Ok(SpecKind::Mrl),
            "hazard" => Ok(SpecKind::Hazard),
            "survival" => Ok(SpecKind::Survival),
            other => Err(Error::Lifetime(format!(
                "unknown model kind '{other}', expected mrl, hazard or survival"
            ))),
        }
    }
}

impl fmt::Display for SpecKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpecKind::Mrl => "mrl",
            SpecKind::Hazard => "hazard",
            SpecKind::Survival => "survival",
        })
    }
}

#[derive(Clone, Debug)]
pub enum ModelSpec {
    Mrl(PiecewiseExpr),
    Hazard(PiecewiseExpr),
    /// Survival together with its symbolic logarithm.
    Survival {
        survival: PiecewiseExpr,
        log: PiecewiseExpr,
    },
    /// `m(t) = covariate(t) + m_base(t)` for a base without a closed-form MRL.
    Additive {
        covariate: PiecewiseExpr,
        base: Arc<LifetimeModel>,
    },
}

/// MRL, hazard and their first derivatives at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Local {
    pub m: f64,
    pub dm: f64,
    pub r: f64,
    pub dr: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub check: &'static str,
    pub t: Option<f64>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.t {
            Some(t) => write!(f, "{} at t = {t}: {}", self.check, self.detail),
            None => write!(f, "{}: {}", self.check, self.detail),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn accepted(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A nonnegative lifetime with finite mean.
pub struct LifetimeModel {
    spec: ModelSpec,
    label: String,
    horizon: OnceCell<f64>,
    table: OnceCell<Result<Arc<Table>>>,
}

impl fmt::Debug for LifetimeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LifetimeModel")
            .field("label", &self.label)
            .field("spec", &self.spec)
            .finish()
    }
}

fn ln_checked(v: f64, t: f64) -> Result<f64> {
    if v > 0.0 {
        Ok(v.ln())
    } else {
        Err(Error::DegenerateResidualLife { t, m: v })
    }
}

/// Integrate over `[a, b]`, splitting at the given breakpoints.
fn integrate_split<F>(f: F, a: f64, b: f64, cuts: &[f64]) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut edges = vec![a];
    edges.extend(cuts.iter().copied().filter(|&c| c > a && c < b));
    edges.push(b);
    let mut total = 0.0;
    for w in edges.windows(2) {
        let tol = SLOW_TOL * (1.0 + (w[1] - w[0]));
        total += integrate(&f, w[0], w[1], tol)?;
    }
    Ok(total)
}

impl LifetimeModel {
    pub fn new(spec: ModelSpec, label: impl Into<String>) -> Self {
        Self {
            spec,
            label: label.into(),
            horizon: OnceCell::new(),
            table: OnceCell::new(),
        }
    }

    pub fn from_mrl(m: PiecewiseExpr, label: impl Into<String>) -> Self {
        Self::new(ModelSpec::Mrl(m), label)
    }

    pub fn from_hazard(r: PiecewiseExpr, label: impl Into<String>) -> Self {
        Self::new(ModelSpec::Hazard(r), label)
    }

    pub fn from_survival(s: PiecewiseExpr, label: impl Into<String>) -> Self {
        let log = s.log_rewrite();
        Self::new(ModelSpec::Survival { survival: s, log }, label)
    }

    /// `X*` with `m*(t) = c(t) + m_base(t)` when the base has no closed-form
    /// MRL; use [`LifetimeModel::from_mrl`] with the symbolic sum otherwise.
    pub fn additive(base: Arc<LifetimeModel>, covariate: PiecewiseExpr, label: impl Into<String>) -> Self {
        Self::new(ModelSpec::Additive { covariate, base }, label)
    }

    pub fn parse(kind: SpecKind, src: &str, label: impl Into<String>) -> Result<Self> {
        let f = PiecewiseExpr::parse(src)?;
        Ok(match kind {
            SpecKind::Mrl => Self::from_mrl(f, label),
            SpecKind::Hazard => Self::from_hazard(f, label),
            SpecKind::Survival => Self::from_survival(f, label),
        })
    }

    /// The standard exponential, `m ≡ 1`.
    pub fn exponential() -> Self {
        Self::from_mrl(PiecewiseExpr::constant(1.0), "exponential")
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Closed-form MRL expression, if the model has one.
    pub fn mrl_expr(&self) -> Option<&PiecewiseExpr> {
        match &self.spec {
            ModelSpec::Mrl(m) => Some(m),
            _ => None,
        }
    }

    /// Breakpoints of every function the model is built from.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = match &self.spec {
            ModelSpec::Mrl(f) | ModelSpec::Hazard(f) => f.breakpoints(),
            ModelSpec::Survival { survival, .. } => survival.breakpoints(),
            ModelSpec::Additive { covariate, base } => {
                let mut v = covariate.breakpoints();
                v.extend(base.breakpoints());
                v
            }
        };
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    pub fn is_breakpoint(&self, t: f64) -> bool {
        self.breakpoints().contains(&t)
    }

    /// `T` of the default grid: 20, doubled until `S(T) ≤ 1e-8`, at most 1e4.
    pub fn default_horizon(&self) -> f64 {
        *self.horizon.get_or_init(|| {
            let floor = SURVIVAL_FLOOR.ln();
            let mut t = HORIZON_START;
            loop {
                match self.log_survival_slow(t) {
                    Ok(l) if l > floor && t < HORIZON_CAP => t = (2.0 * t).min(HORIZON_CAP),
                    _ => return t,
                }
            }
        })
    }

    pub fn analysis_grid(&self, settings: &Settings) -> Result<Grid> {
        let upper = settings.horizon.unwrap_or_else(|| self.default_horizon());
        Ok(Grid::new(0.0, upper, settings.grid_points)?)
    }

    fn table(&self) -> Result<Arc<Table>> {
        self.table
            .get_or_init(|| {
                let upper = self.default_horizon();
                Table::build(self, upper, HORIZON_CAP.max(upper), TABLE_BUDGET).map(Arc::new)
            })
            .clone()
    }

    /// Upper end of the memoized table (queries beyond it use quadrature).
    pub fn table_upper(&self) -> Result<f64> {
        Ok(self.table()?.upper())
    }

    /// Number of cells in the memoized table.
    pub fn table_cells(&self) -> Result<usize> {
        Ok(self.table()?.cells())
    }

    // ---- closed-form pieces -------------------------------------------------

    fn mrl_dual(&self, m: &PiecewiseExpr, t: f64, side: Side) -> Result<Dual2> {
        Ok(m.eval_dual(t, side)?)
    }

    fn survival_log_dual(&self, log: &PiecewiseExpr, t: f64, side: Side) -> Result<Dual2> {
        use crate::expr::{DomainFault, ExprError};
        match log.eval_dual(t, side) {
            Ok(d) => Ok(d),
            Err(ExprError::Domain {
                fault: DomainFault::LogOfNonPositive(0.0),
                ..
            }) => Err(Error::BeyondSupport { t }),
            Err(e) => Err(e.into()),
        }
    }

    // ---- public conversions ------------------------------------------------

    pub fn mrl_of(&self, t: f64) -> Result<f64> {
        match &self.spec {
            ModelSpec::Mrl(m) => Ok(m.eval(t)?),
            ModelSpec::Additive { covariate, base } => Ok(covariate.eval(t)? + base.mrl_of(t)?),
            ModelSpec::Hazard(_) | ModelSpec::Survival { .. } => {
                if t < 0.0 {
                    return Err(crate::expr::ExprError::NegativeArgument(t).into());
                }
                let tab = self.table()?;
                if t <= tab.upper() {
                    // tabulated whenever the model has no closed form
                    Ok(tab.mrl(t).unwrap_or(f64::NAN))
                } else {
                    self.mrl_slow(t)
                }
            }
        }
    }

    pub fn hazard_of(&self, t: f64) -> Result<f64> {
        match &self.spec {
            ModelSpec::Hazard(r) => Ok(r.eval(t)?),
            ModelSpec::Survival { log, .. } => Ok(-self.survival_log_dual(log, t, Side::Right)?.d1),
            ModelSpec::Mrl(m) => {
                let d = self.mrl_dual(m, t, Side::Right)?;
                if d.v == 0.0 {
                    return Err(Error::DegenerateResidualLife { t, m: d.v });
                }
                Ok((1.0 + d.d1) / d.v)
            }
            ModelSpec::Additive { .. } => Ok(self.local(t)?.r),
        }
    }

    /// `ln S(t)`.
    pub fn log_survival_of(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(crate::expr::ExprError::NegativeArgument(t).into());
        }
        if let ModelSpec::Survival { log, .. } = &self.spec {
            return Ok(self.survival_log_dual(log, t, Side::Right)?.v);
        }
        let tab = self.table()?;
        let top = tab.upper();
        if t <= top {
            return Ok(tab.log_survival(t));
        }
        Ok(tab.log_survival(top) + self.log_survival_increment(top, t)?)
    }

    pub fn survival_of(&self, t: f64) -> Result<f64> {
        self.log_survival_of(t).map(f64::exp)
    }

    /// `H(t) = ∫_0^t r = −ln S(t)`.
    pub fn cumulative_hazard_of(&self, t: f64) -> Result<f64> {
        self.log_survival_of(t).map(|l| -l)
    }

    pub fn mean_of(&self) -> Result<f64> {
        let mean = match &self.spec {
            ModelSpec::Mrl(m) => m.eval(0.0)?,
            ModelSpec::Additive { covariate, base } => covariate.eval(0.0)? + base.mean_of()?,
            _ => self.mrl_of(0.0)?,
        };
        if !mean.is_finite() || mean <= 0.0 {
            return Err(Error::InfiniteMean(format!(
                "{}: E(X) evaluates to {mean}",
                self.label
            )));
        }
        Ok(mean)
    }

    /// MRL, hazard and their derivatives at `t` (right derivatives at breakpoints).
    pub fn local(&self, t: f64) -> Result<Local> {
        match &self.spec {
            ModelSpec::Mrl(m) => {
                let d = self.mrl_dual(m, t, Side::Right)?;
                if d.v == 0.0 {
                    return Err(Error::DegenerateResidualLife { t, m: d.v });
                }
                let r = (1.0 + d.d1) / d.v;
                let dr = (d.d2 * d.v - (1.0 + d.d1) * d.d1) / (d.v * d.v);
                Ok(Local {
                    m: d.v,
                    dm: d.d1,
                    r,
                    dr,
                })
            }
            ModelSpec::Hazard(rf) => {
                let rd = rf.eval_dual(t, Side::Right)?;
                let m = self.mrl_of(t)?;
                Ok(Local {
                    m,
                    dm: rd.v * m - 1.0,
                    r: rd.v,
                    dr: rd.d1,
                })
            }
            ModelSpec::Survival { log, .. } => {
                let l = self.survival_log_dual(log, t, Side::Right)?;
                let m = self.mrl_of(t)?;
                let r = -l.d1;
                Ok(Local {
                    m,
                    dm: r * m - 1.0,
                    r,
                    dr: -l.d2,
                })
            }
            ModelSpec::Additive { covariate, base } => {
                let c = covariate.eval_dual(t, Side::Right)?;
                let b = base.local(t)?;
                let m = c.v + b.m;
                if m == 0.0 {
                    return Err(Error::DegenerateResidualLife { t, m });
                }
                let dm = c.d1 + b.dm;
                let r = (1.0 + dm) / m;
                let dr = (c.d2 + b.dr * b.m + b.r * b.dm) / m - r * dm / m;
                Ok(Local { m, dm, r, dr })
            }
        }
    }

    // ---- slow paths --------------------------------------------------------

    /// `ln S(t)` by direct quadrature from 0, without the table.
    pub fn log_survival_slow(&self, t: f64) -> Result<f64> {
        match &self.spec {
            ModelSpec::Survival { log, .. } => Ok(self.survival_log_dual(log, t, Side::Right)?.v),
            _ => self.log_survival_increment(0.0, t),
        }
    }

    /// `ln S(b) − ln S(a)` by quadrature.
    fn log_survival_increment(&self, a: f64, b: f64) -> Result<f64> {
        let cuts = self.breakpoints();
        match &self.spec {
            ModelSpec::Hazard(r) => Ok(-integrate_split(|u| Ok(r.eval(u)?), a, b, &cuts)?),
            ModelSpec::Survival { log, .. } => Ok(self.survival_log_dual(log, b, Side::Right)?.v
                - self.survival_log_dual(log, a, Side::Right)?.v),
            ModelSpec::Mrl(_) | ModelSpec::Additive { .. } => {
                let inv = |u: f64| -> Result<f64> {
                    let m = self.mrl_of(u)?;
                    if m <= 0.0 {
                        return Err(Error::DegenerateResidualLife { t: u, m });
                    }
                    Ok(1.0 / m)
                };
                let ma = ln_checked(self.mrl_of(a)?, a)?;
                let mb = ln_checked(self.mrl_of(b)?, b)?;
                Ok(ma - mb - integrate_split(inv, a, b, &cuts)?)
            }
        }
    }

    /// `m(t) = ∫_t^∞ S(u)/S(t) du`, for hazard and survival specs.
    ///
    /// Marches Gauss–Legendre cells outward from `t`; cells grow
    /// geometrically but stay shorter than two mean lifetimes at the current
    /// hazard, and stop at breakpoints. The cumulative hazard inside a cell
    /// uses the same collocation matrix as the table.
    pub fn mrl_slow(&self, t: f64) -> Result<f64> {
        let coll = &*table::COLLOCATION;
        let knots: Vec<f64> = self.breakpoints().into_iter().filter(|&k| k > t).collect();
        let mut next_knot = knots.iter().copied();
        let mut stop = next_knot.next().unwrap_or(f64::INFINITY);
        let mut a = t;
        let mut log_rel = 0.0; // ln S(a) − ln S(t)
        let mut total = 0.0;
        let log_t = match &self.spec {
            ModelSpec::Survival { log, .. } => Some(self.survival_log_dual(log, t, Side::Right)?.v),
            ModelSpec::Hazard(_) => None,
            _ => return self.mrl_of(t),
        };
        for _ in 0..MARCH_CELLS {
            let r = self.hazard_of(a).unwrap_or(0.0).max(0.0);
            let mut w = (0.25 * (a - t)).max(0.05 * (1.0 + t));
            if r > 0.0 {
                w = w.min(2.0 / r);
            }
            let b = if stop - a < 1.25 * w { stop } else { a + w };
            let half = 0.5 * (b - a);
            let us: Vec<f64> = coll.nodes.iter().map(|x| a + half * (x + 1.0)).collect();
            let (vals, log_b) = match (&self.spec, log_t) {
                (ModelSpec::Hazard(rf), _) => {
                    let g = us.iter().map(|&u| Ok(rf.eval(u)?)).collect::<Result<Vec<f64>>>()?;
                    let vals: Vec<f64> = (0..NODES_PER_CELL)
                        .map(|j| {
                            let cum: f64 = (0..NODES_PER_CELL).map(|k| coll.left[j][k] * g[k]).sum();
                            (log_rel - half * cum).exp()
                        })
                        .collect();
                    let whole: f64 = coll.weights.iter().zip(&g).map(|(w, v)| w * v).sum();
                    (vals, log_rel - half * whole)
                }
                (ModelSpec::Survival { log, .. }, Some(l0)) => {
                    let rel = |u: f64, side| match self.survival_log_dual(log, u, side) {
                        Ok(d) => Ok(d.v - l0),
                        Err(Error::BeyondSupport { .. }) => Ok(f64::NEG_INFINITY),
                        Err(e) => Err(e),
                    };
                    let vals = us.iter().map(|&u| rel(u, Side::Right).map(f64::exp)).collect::<Result<Vec<f64>>>()?;
                    (vals, rel(b, Side::Left)?)
                }
                _ => unreachable!(),
            };
            let cell: f64 = half * coll.weights.iter().zip(&vals).map(|(w, v)| w * v).sum::<f64>();
            total += cell;
            if b >= stop {
                stop = next_knot.next().unwrap_or(f64::INFINITY);
            }
            a = b;
            log_rel = log_b;
            if !(total.is_finite() && a.is_finite()) || a > 1e200 {
                break;
            }
            // what is left is about S(a)·(one more mean lifetime or cell)
            let rb = self.hazard_of(a).unwrap_or(0.0).max(0.0);
            let reach = if rb > 0.0 { (1.0 / rb).max(b - t) } else { f64::INFINITY };
            if log_rel == f64::NEG_INFINITY || log_rel.exp() * reach <= 1e-16 * total {
                return Ok(total);
            }
        }
        Err(Error::InfiniteMean(format!(
            "{}: residual life at t = {t} does not converge",
            self.label
        )))
    }

    // ---- validation --------------------------------------------------------

    /// Invariant checks on the default grid; an empty violation list means
    /// the model is accepted.
    pub fn validate(&self, settings: &Settings) -> ValidationReport {
        let mut rep = ValidationReport::default();
        let grid = match self.analysis_grid(settings) {
            Ok(g) => g,
            Err(e) => {
                rep.violations.push(Violation {
                    check: "grid",
                    t: None,
                    detail: e.to_string(),
                });
                return rep;
            }
        };
        let ts = grid.nodes();
        let tol = settings.tol;
        match &self.spec {
            ModelSpec::Survival { survival, .. } => self.validate_survival(survival, &ts, tol, &mut rep),
            ModelSpec::Hazard(r) => {
                for &t in &ts {
                    match r.eval(t) {
                        Ok(v) if v >= -tol => {}
                        Ok(v) => {
                            rep.violations.push(Violation {
                                check: "hazard nonnegative",
                                t: Some(t),
                                detail: format!("r = {v}"),
                            });
                            break;
                        }
                        Err(e) => {
                            rep.violations.push(Violation {
                                check: "hazard finite",
                                t: Some(t),
                                detail: e.to_string(),
                            });
                            break;
                        }
                    }
                }
            }
            ModelSpec::Mrl(_) | ModelSpec::Additive { .. } => self.validate_mrl(&ts, settings, &mut rep),
        }
        if !matches!(self.spec, ModelSpec::Hazard(_)) {
            for &t in &ts {
                match self.hazard_of(t) {
                    Ok(v) if v >= -tol => {}
                    Ok(v) => {
                        rep.violations.push(Violation {
                            check: "implied hazard nonnegative",
                            t: Some(t),
                            detail: format!("r = {v}"),
                        });
                        break;
                    }
                    Err(e) => {
                        rep.violations.push(Violation {
                            check: "implied hazard finite",
                            t: Some(t),
                            detail: e.to_string(),
                        });
                        break;
                    }
                }
            }
        }
        if let Err(e) = self.mean_of() {
            rep.violations.push(Violation {
                check: "finite mean",
                t: None,
                detail: e.to_string(),
            });
        }
        rep
    }

    fn validate_survival(&self, s: &PiecewiseExpr, ts: &[f64], tol: f64, rep: &mut ValidationReport) {
        match s.eval(0.0) {
            Ok(v) if (v - 1.0).abs() <= tol => {}
            Ok(v) => rep.violations.push(Violation {
                check: "S(0) = 1",
                t: Some(0.0),
                detail: format!("S(0) = {v}"),
            }),
            Err(e) => rep.violations.push(Violation {
                check: "S(0) = 1",
                t: Some(0.0),
                detail: e.to_string(),
            }),
        }
        let mut vals = Vec::with_capacity(ts.len());
        for &t in ts {
            match s.eval(t) {
                Ok(v) => vals.push(v),
                Err(e) => {
                    rep.violations.push(Violation {
                        check: "survival finite",
                        t: Some(t),
                        detail: e.to_string(),
                    });
                    return;
                }
            }
        }
        if let Ok(v) = monotone_samples(ts, &vals, Direction::Decreasing, tol) {
            if let Some(w) = v.witness {
                rep.violations.push(Violation {
                    check: "survival nonincreasing",
                    t: Some(w.t),
                    detail: format!("S increases by {:.3e}", w.violation),
                });
            }
        }
        let last = *vals.last().unwrap();
        if last > 1e-3 {
            rep.violations.push(Violation {
                check: "survival vanishes at infinity",
                t: ts.last().copied(),
                detail: format!("S = {last} at the end of the grid"),
            });
        }
    }

    fn validate_mrl(&self, ts: &[f64], settings: &Settings, rep: &mut ValidationReport) {
        let mut ms = Vec::with_capacity(ts.len());
        for &t in ts {
            match self.mrl_of(t) {
                Ok(m) if m.is_finite() => ms.push(m),
                Ok(m) => {
                    rep.violations.push(Violation {
                        check: "mrl finite",
                        t: Some(t),
                        detail: format!("m = {m}"),
                    });
                    return;
                }
                Err(e) => {
                    rep.violations.push(Violation {
                        check: "mrl finite",
                        t: Some(t),
                        detail: e.to_string(),
                    });
                    return;
                }
            }
        }
        if let Some((t, m)) = ts.iter().zip(&ms).find(|(_, &m)| m < -settings.tol) {
            rep.violations.push(Violation {
                check: "mrl nonnegative",
                t: Some(*t),
                detail: format!("m = {m}"),
            });
        }
        let tm: Vec<f64> = ts.iter().zip(&ms).map(|(t, m)| t + m).collect();
        if let Ok(v) = monotone_samples(ts, &tm, Direction::Increasing, settings.tol) {
            if let Some(w) = v.witness {
                rep.violations.push(Violation {
                    check: "t + m(t) nondecreasing",
                    t: Some(w.t),
                    detail: format!("decreases by {:.3e}", w.violation),
                });
            }
        }
        if ms.iter().any(|&m| m <= settings.tol) {
            rep.notes.push("finite-support: divergence check skipped".into());
            return;
        }
        let inv = |u: f64| -> Result<f64> { Ok(1.0 / self.mrl_of(u)?) };
        match divergence_test(inv, settings.divergence_horizon, settings.divergence_threshold, 1e-9) {
            Ok(d) if d.divergent => {}
            Ok(d) => rep.violations.push(Violation {
                check: "integral of 1/m diverges",
                t: None,
                detail: format!(
                    "integral up to {} is only {:.4}",
                    settings.divergence_horizon, d.partial
                ),
            }),
            Err(e) => rep.violations.push(Violation {
                check: "integral of 1/m diverges",
                t: None,
                detail: e.to_string(),
            }),
        }
    }
}

impl TableSource for LifetimeModel {
    fn knots(&self) -> Vec<f64> {
        self.breakpoints()
    }

    fn rate(&self, t: f64) -> Option<f64> {
        match &self.spec {
            ModelSpec::Hazard(_) | ModelSpec::Survival { .. } => self.hazard_of(t).ok(),
            _ => None,
        }
    }

    fn integrand(&self, t: f64) -> Result<Option<f64>> {
        match &self.spec {
            ModelSpec::Hazard(r) => Ok(Some(r.eval(t)?)),
            ModelSpec::Survival { .. } => Ok(None),
            ModelSpec::Mrl(_) | ModelSpec::Additive { .. } => {
                let m = self.mrl_of(t)?;
                if m <= 0.0 {
                    return Err(Error::DegenerateResidualLife { t, m });
                }
                Ok(Some(1.0 / m))
            }
        }
    }

    fn log_survival_from(&self, t: f64, at_right_end: bool, cumulative: f64) -> Result<f64> {
        let side = if at_right_end { Side::Left } else { Side::Right };
        match &self.spec {
            ModelSpec::Hazard(_) => Ok(-cumulative),
            ModelSpec::Survival { log, .. } => Ok(self.survival_log_dual(log, t, side)?.v),
            ModelSpec::Mrl(m) => {
                let m0 = ln_checked(m.eval(0.0)?, 0.0)?;
                let mt = ln_checked(m.eval_dual(t, side)?.v, t)?;
                Ok(m0 - mt - cumulative)
            }
            ModelSpec::Additive { covariate, base } => {
                let m0 = ln_checked(covariate.eval(0.0)? + base.mrl_of(0.0)?, 0.0)?;
                let mt = ln_checked(covariate.eval_dual(t, side)?.v + base.mrl_of(t)?, t)?;
                Ok(m0 - mt - cumulative)
            }
        }
    }

    fn needs_mrl(&self) -> bool {
        matches!(self.spec, ModelSpec::Hazard(_) | ModelSpec::Survival { .. })
    }

    fn seed_mrl(&self, upper: f64, _log_s_upper: f64) -> Result<f64> {
        self.mrl_slow(upper)
    }
}
