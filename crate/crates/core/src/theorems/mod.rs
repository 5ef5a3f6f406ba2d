//! Hypothesis checkers for the preservation theorems, the cross-validation
//! "hypotheses hold ⇒ the class transfers", the catalog of worked examples
//! and the counterexample search.

pub mod catalog;
pub mod search;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::ageing::{classify_all_unchecked, AgeingClass, AgeingVerdict, Classification};
use crate::damrl::ComposedModel;
use crate::error::{Error, Result};
use crate::numeric::{
    at_least_samples, convex_samples, log_convex_samples, monotone_samples, Curvature, Direction, Grid, ShapeVerdict,
    Verdict,
};
use crate::settings::Settings;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TheoremId {
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
    T7,
    T8,
    T9,
    T10,
    C7,
    C6,
    C8,
    C9,
}

/// One hypothesis, stated on `c`, `m = m_X` and `g = c'/(c+m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    /// `m/c` monotone (nodes with `c = 0` skipped).
    MOverC(Direction),
    /// `c/m` monotone.
    COverM(Direction),
    CLogConvex,
    CIncreasingConcave,
    /// `c'/(c+m)` monotone.
    G(Direction),
    /// `1 + c/m` log-convex or log-concave.
    OnePlusCOverM(Curvature),
    /// `c/(m(c+m))` monotone.
    H(Direction),
    /// `c/m ≤ c(0)/E(X)` (`Direction::Decreasing`) or `≥` (`Increasing`).
    COverMBound(Direction),
    /// `c'/(c+m) ≥ c'(0)/(c(0)+E(X))` (`Increasing`) or `≤` (`Decreasing`).
    GBound(Direction),
}

fn dir_word(d: Direction) -> &'static str {
    match d {
        Direction::Increasing => "increasing",
        Direction::Decreasing => "decreasing",
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Direction::*;
        match *self {
            Hypothesis::MOverC(d) => write!(f, "m/c {}", dir_word(d)),
            Hypothesis::COverM(d) => write!(f, "c/m {}", dir_word(d)),
            Hypothesis::CLogConvex => f.write_str("c logconvex"),
            Hypothesis::CIncreasingConcave => f.write_str("c increasing and concave"),
            Hypothesis::G(d) => write!(f, "c'/(c+m) {}", dir_word(d)),
            Hypothesis::OnePlusCOverM(Curvature::Convex) => f.write_str("1+c/m logconvex"),
            Hypothesis::OnePlusCOverM(Curvature::Concave) => f.write_str("1+c/m logconcave"),
            Hypothesis::H(d) => write!(f, "c/(m(c+m)) {}", dir_word(d)),
            Hypothesis::COverMBound(Decreasing) => f.write_str("c/m <= c(0)/E(X)"),
            Hypothesis::COverMBound(Increasing) => f.write_str("c/m >= c(0)/E(X)"),
            Hypothesis::GBound(Increasing) => f.write_str("c'/(c+m) >= c'(0)/(c(0)+E(X))"),
            Hypothesis::GBound(Decreasing) => f.write_str("c'/(c+m) <= c'(0)/(c(0)+E(X))"),
        }
    }
}

impl TheoremId {
    pub const ALL: [TheoremId; 14] = [
        TheoremId::T1,
        TheoremId::T2,
        TheoremId::T3,
        TheoremId::T4,
        TheoremId::T5,
        TheoremId::T6,
        TheoremId::T7,
        TheoremId::T8,
        TheoremId::T9,
        TheoremId::T10,
        TheoremId::C7,
        TheoremId::C6,
        TheoremId::C8,
        TheoremId::C9,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::T1 => "T1",
            TheoremId::T2 => "T2",
            TheoremId::T3 => "T3",
            TheoremId::T4 => "T4",
            TheoremId::T5 => "T5",
            TheoremId::T6 => "T6",
            TheoremId::T7 => "T7",
            TheoremId::T8 => "T8",
            TheoremId::T9 => "T9",
            TheoremId::T10 => "T10",
            TheoremId::C7 => "C7",
            TheoremId::C6 => "C6",
            TheoremId::C8 => "C8",
            TheoremId::C9 => "C9",
        }
    }

    /// The class preserved from `X` to `X*`.
    pub fn class(self) -> AgeingClass {
        use AgeingClass::*;
        match self {
            TheoremId::T1 => Ifr,
            TheoremId::T2 => Dfr,
            TheoremId::T3 => Ifra,
            TheoremId::T4 => Dfra,
            TheoremId::T5 => Nbu,
            TheoremId::T6 => Nwu,
            TheoremId::T7 | TheoremId::C7 => Nbufr,
            TheoremId::T8 | TheoremId::C6 => Nwufr,
            TheoremId::T9 | TheoremId::C8 => Nbafr,
            TheoremId::T10 | TheoremId::C9 => Nwafr,
        }
    }

    /// Hypotheses (i) and (ii).
    pub fn hypotheses(self) -> [Hypothesis; 2] {
        use Direction::*;
        use Hypothesis::*;
        match self {
            TheoremId::T1 => [MOverC(Increasing), CLogConvex],
            TheoremId::T2 => [MOverC(Decreasing), CIncreasingConcave],
            TheoremId::T3 => [MOverC(Increasing), G(Increasing)],
            TheoremId::T4 => [MOverC(Decreasing), G(Decreasing)],
            TheoremId::T5 => [OnePlusCOverM(Curvature::Convex), H(Decreasing)],
            TheoremId::T6 => [OnePlusCOverM(Curvature::Concave), H(Increasing)],
            TheoremId::T7 | TheoremId::T9 => [COverMBound(Decreasing), GBound(Increasing)],
            TheoremId::T8 | TheoremId::T10 => [COverMBound(Increasing), GBound(Decreasing)],
            TheoremId::C7 | TheoremId::C8 => [COverM(Decreasing), G(Increasing)],
            TheoremId::C6 | TheoremId::C9 => [COverM(Increasing), G(Decreasing)],
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        Self::ALL
            .iter()
            .copied()
            .find(|id| id.name() == up)
            .ok_or_else(|| Error::Theorems(format!("unknown theorem id '{s}' (expected T1..T10, C6..C9)")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum HypothesisOutcome {
    /// Overall verdict and the shape tests it was combined from.
    Checked { verdict: Verdict, parts: Vec<ShapeVerdict> },
    Inapplicable(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisCheck {
    pub hypothesis: Hypothesis,
    pub outcome: HypothesisOutcome,
}

impl HypothesisCheck {
    pub fn verdict(&self) -> Option<Verdict> {
        match &self.outcome {
            HypothesisOutcome::Checked { verdict, .. } => Some(*verdict),
            HypothesisOutcome::Inapplicable(_) => None,
        }
    }

    /// Holds or boundary.
    pub fn holds(&self) -> bool {
        self.verdict().is_some_and(Verdict::holds)
    }

    pub fn fails(&self) -> bool {
        self.verdict() == Some(Verdict::Fails)
    }

    /// `holds`, `fails`, `boundary` or `inapplicable`.
    pub fn label(&self) -> &'static str {
        self.verdict().map_or("inapplicable", Verdict::as_str)
    }

    /// The first witness among the parts, if any.
    pub fn witness(&self) -> Option<crate::numeric::Witness> {
        match &self.outcome {
            HypothesisOutcome::Checked { parts, .. } => parts.iter().find_map(|p| p.witness),
            HypothesisOutcome::Inapplicable(_) => None,
        }
    }
}

/// `c`, `c'`, `m`, `m'` on a grid, plus the constants at the origin.
#[derive(Clone, Debug)]
pub struct HypothesisData {
    pub ts: Vec<f64>,
    pub c: Vec<f64>,
    pub dc: Vec<f64>,
    pub m: Vec<f64>,
    /// `E(X)`.
    pub mean: f64,
}

impl HypothesisData {
    pub fn sample(cm: &ComposedModel, grid: &Grid) -> Result<Self> {
        let ts = grid.nodes();
        let rows: Vec<(f64, f64, f64)> = ts
            .par_iter()
            .map(|&t| {
                let c = cm.covariate().dual(t)?;
                let m = cm.base().mrl_of(t)?;
                Ok((c.v, c.d1, m))
            })
            .collect::<Result<_>>()?;
        let mean = cm.base().mean_of()?;
        let mut d = HypothesisData {
            ts,
            c: Vec::with_capacity(rows.len()),
            dc: Vec::with_capacity(rows.len()),
            m: Vec::with_capacity(rows.len()),
            mean,
        };
        for (c, dc, m) in rows {
            d.c.push(c);
            d.dc.push(dc);
            d.m.push(m);
        }
        Ok(d)
    }

    fn g(&self) -> Vec<f64> {
        (0..self.ts.len()).map(|k| self.dc[k] / (self.c[k] + self.m[k])).collect()
    }

    fn c_over_m(&self) -> Vec<f64> {
        self.c.iter().zip(&self.m).map(|(c, m)| c / m).collect()
    }

    pub fn check(&self, h: Hypothesis, tol: f64) -> Result<HypothesisCheck> {
        let ts = &self.ts;
        let one = |v: ShapeVerdict| HypothesisOutcome::Checked {
            verdict: v.verdict,
            parts: vec![v],
        };
        let outcome = match h {
            Hypothesis::MOverC(d) => {
                let (tt, ys): (Vec<f64>, Vec<f64>) = (0..ts.len())
                    .filter(|&k| self.c[k] != 0.0)
                    .map(|k| (ts[k], self.m[k] / self.c[k]))
                    .unzip();
                if tt.len() < 2 {
                    HypothesisOutcome::Inapplicable("c vanishes, m/c is undefined".into())
                } else {
                    one(monotone_samples(&tt, &ys, d, tol)?)
                }
            }
            Hypothesis::COverM(d) => one(monotone_samples(ts, &self.c_over_m(), d, tol)?),
            Hypothesis::CLogConvex => {
                if let Some(k) = self.c.iter().position(|&c| !(c > 0.0)) {
                    HypothesisOutcome::Inapplicable(format!(
                        "c must be positive for logconvexity (c = {} at t = {})",
                        self.c[k], ts[k]
                    ))
                } else {
                    one(log_convex_samples(ts, &self.c, Curvature::Convex, tol)?)
                }
            }
            Hypothesis::CIncreasingConcave => {
                let inc = monotone_samples(ts, &self.c, Direction::Increasing, tol)?;
                let conc = convex_samples(ts, &self.c, Curvature::Concave, tol)?;
                let verdict = combine(&[inc.verdict, conc.verdict]);
                HypothesisOutcome::Checked {
                    verdict,
                    parts: vec![inc, conc],
                }
            }
            Hypothesis::G(d) => one(monotone_samples(ts, &self.g(), d, tol)?),
            Hypothesis::OnePlusCOverM(curv) => {
                let ys: Vec<f64> = self.c_over_m().into_iter().map(|v| 1.0 + v).collect();
                one(log_convex_samples(ts, &ys, curv, tol)?)
            }
            Hypothesis::H(d) => {
                let ys: Vec<f64> = (0..ts.len())
                    .map(|k| self.c[k] / (self.m[k] * (self.c[k] + self.m[k])))
                    .collect();
                one(monotone_samples(ts, &ys, d, tol)?)
            }
            Hypothesis::COverMBound(d) => {
                let bound = vec![self.c[0] / self.mean; ts.len()];
                let ratio = self.c_over_m();
                one(match d {
                    Direction::Decreasing => at_least_samples(ts, &bound, &ratio, tol)?,
                    Direction::Increasing => at_least_samples(ts, &ratio, &bound, tol)?,
                })
            }
            Hypothesis::GBound(d) => {
                let bound = vec![self.dc[0] / (self.c[0] + self.mean); ts.len()];
                let g = self.g();
                one(match d {
                    Direction::Increasing => at_least_samples(ts, &g, &bound, tol)?,
                    Direction::Decreasing => at_least_samples(ts, &bound, &g, tol)?,
                })
            }
        };
        Ok(HypothesisCheck { hypothesis: h, outcome })
    }
}

/// Fails if any part fails, boundary if all are boundary, holds otherwise.
fn combine(vs: &[Verdict]) -> Verdict {
    if vs.contains(&Verdict::Fails) {
        Verdict::Fails
    } else if vs.iter().all(|&v| v == Verdict::Boundary) {
        Verdict::Boundary
    } else {
        Verdict::Holds
    }
}

/// Both hypotheses of `id` on the composed model's grid.
pub fn check_hypotheses(id: TheoremId, cm: &ComposedModel, settings: &Settings) -> Result<[HypothesisCheck; 2]> {
    let data = HypothesisData::sample(cm, &cm.grid(settings)?)?;
    let [a, b] = id.hypotheses();
    Ok([data.check(a, settings.tol)?, data.check(b, settings.tol)?])
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoremReport {
    pub id: TheoremId,
    pub hypotheses: [HypothesisCheck; 2],
    pub base: AgeingVerdict,
    pub star: AgeingVerdict,
    /// Base in class and both hypotheses hold.
    pub applicable: bool,
    /// False only when applicable and the star verdict fails.
    pub sound: bool,
    /// The star class holds although some hypothesis fails.
    pub sufficiency_note: bool,
    pub tainted: bool,
}

impl TheoremReport {
    fn assemble(
        id: TheoremId,
        hypotheses: [HypothesisCheck; 2],
        base: &Classification,
        star: &Classification,
        tainted: bool,
    ) -> Self {
        let base = base.get(id.class()).clone();
        let star = star.get(id.class()).clone();
        let applicable = base.holds() && hypotheses.iter().all(HypothesisCheck::holds);
        let sound = !(applicable && star.verdict == Verdict::Fails);
        let sufficiency_note = star.holds() && hypotheses.iter().any(HypothesisCheck::fails);
        Self {
            id,
            hypotheses,
            base,
            star,
            applicable,
            sound,
            sufficiency_note,
            tainted,
        }
    }
}

/// Everything needed to assess every theorem on one composed model.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub data: HypothesisData,
    pub base: Classification,
    pub star: Classification,
    pub tainted: bool,
    pub tol: f64,
}

impl Analysis {
    pub fn new(cm: &ComposedModel, settings: &Settings) -> Result<Self> {
        let settings = cm.pinned(settings);
        let grid = cm.grid(&settings)?;
        let data = HypothesisData::sample(cm, &grid)?;
        let base = classify_all_unchecked(cm.base(), &grid, &settings)?;
        let star = classify_all_unchecked(cm.star(), &grid, &settings)?;
        Ok(Self {
            data,
            base,
            star,
            tainted: cm.tainted(),
            tol: settings.tol,
        })
    }

    pub fn report(&self, id: TheoremId) -> Result<TheoremReport> {
        let [a, b] = id.hypotheses();
        let hyps = [self.data.check(a, self.tol)?, self.data.check(b, self.tol)?];
        Ok(TheoremReport::assemble(id, hyps, &self.base, &self.star, self.tainted))
    }

    pub fn reports(&self) -> Result<Vec<TheoremReport>> {
        TheoremId::ALL.iter().map(|&id| self.report(id)).collect()
    }
}

/// Hypotheses, base and star verdicts for one theorem.
pub fn cross_validate(id: TheoremId, cm: &ComposedModel, settings: &Settings) -> Result<TheoremReport> {
    Analysis::new(cm, settings)?.report(id)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::damrl::{compose, CovariateFunction};
    use crate::lifetime::{LifetimeModel, SpecKind};

    fn composed(kind: SpecKind, base: &str, c: &str) -> ComposedModel {
        let base = Arc::new(LifetimeModel::parse(kind, base, base).unwrap());
        compose(base, CovariateFunction::parse(c).unwrap(), &Settings::default(), false).unwrap()
    }

    #[test]
    fn ids_round_trip() {
        for id in TheoremId::ALL {
            assert_eq!(id.name().parse::<TheoremId>().unwrap(), id);
        }
        assert!("T11".parse::<TheoremId>().is_err());
    }

    #[test]
    fn t1_on_example1() {
        let s = Settings::default();
        let cm = composed(SpecKind::Mrl, "1", "exp(-t)");
        let [i, ii] = check_hypotheses(TheoremId::T1, &cm, &s).unwrap();
        assert_eq!(i.verdict(), Some(Verdict::Holds));
        // ln c is affine
        assert_eq!(ii.verdict(), Some(Verdict::Boundary));
        let rep = cross_validate(TheoremId::T1, &cm, &s).unwrap();
        assert!(rep.applicable, "boundary IFR counts as in class");
        assert!(rep.sound);
        assert_eq!(rep.star.verdict, Verdict::Holds);
    }

    #[test]
    fn t1_on_counterexample1() {
        let s = Settings::default();
        let cm = composed(SpecKind::Mrl, "1/(2+t)", "1/(3+t)");
        let rep = cross_validate(TheoremId::T1, &cm, &s).unwrap();
        assert!(rep.hypotheses[0].fails());
        assert!(rep.hypotheses[1].holds());
        assert!(!rep.applicable);
        assert!(rep.sufficiency_note);
        assert!(rep.sound);
    }

    #[test]
    fn zero_covariate_makes_m_over_c_inapplicable() {
        let cm = composed(SpecKind::Mrl, "1", "0");
        let [i, _] = check_hypotheses(TheoremId::T3, &cm, &Settings::default()).unwrap();
        assert_eq!(i.label(), "inapplicable");
    }
}
