//! Grid classifiers for the twelve ageing classes and the implication
//! chains between them.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lifetime::LifetimeModel;
use crate::numeric::shape::Tally;
use crate::numeric::{at_least_samples, monotone_samples, Direction, Grid, ShapeKind, ShapeVerdict, Verdict, Witness};
use crate::settings::Settings;

/// Largest share of NBU grid points that may be skipped before giving up.
const NBU_SKIP_LIMIT: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AgeingClass {
    Ifr,
    Dfr,
    Ifra,
    Dfra,
    Nbu,
    Nwu,
    Nbufr,
    Nwufr,
    Nbafr,
    Nwafr,
    Dmrl,
    Imrl,
}

impl AgeingClass {
    pub const ALL: [AgeingClass; 12] = [
        AgeingClass::Ifr,
        AgeingClass::Dfr,
        AgeingClass::Ifra,
        AgeingClass::Dfra,
        AgeingClass::Nbu,
        AgeingClass::Nwu,
        AgeingClass::Nbufr,
        AgeingClass::Nwufr,
        AgeingClass::Nbafr,
        AgeingClass::Nwafr,
        AgeingClass::Dmrl,
        AgeingClass::Imrl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AgeingClass::Ifr => "IFR",
            AgeingClass::Dfr => "DFR",
            AgeingClass::Ifra => "IFRA",
            AgeingClass::Dfra => "DFRA",
            AgeingClass::Nbu => "NBU",
            AgeingClass::Nwu => "NWU",
            AgeingClass::Nbufr => "NBUFR",
            AgeingClass::Nwufr => "NWUFR",
            AgeingClass::Nbafr => "NBAFR",
            AgeingClass::Nwafr => "NWAFR",
            AgeingClass::Dmrl => "DMRL",
            AgeingClass::Imrl => "IMRL",
        }
    }

    /// The "worse" counterpart (IFR ↔ DFR, NBU ↔ NWU, DMRL ↔ IMRL, …).
    pub fn dual(self) -> AgeingClass {
        let i = Self::ALL.iter().position(|&c| c == self).unwrap();
        Self::ALL[i ^ 1]
    }

    /// Classes directly implied by membership in `self`.
    pub fn implies(self) -> &'static [AgeingClass] {
        use AgeingClass::*;
        match self {
            Ifr => &[Ifra, Dmrl],
            Ifra => &[Nbu],
            Nbu => &[Nbufr],
            Nbufr => &[Nbafr],
            Dfr => &[Dfra, Imrl],
            Dfra => &[Nwu],
            Nwu => &[Nwufr],
            Nwufr => &[Nwafr],
            Nbafr | Nwafr | Dmrl | Imrl => &[],
        }
    }

    /// Every class implied by `self`, transitively.
    pub fn implied_closure(self) -> Vec<AgeingClass> {
        let mut out = Vec::new();
        let mut stack = self.implies().to_vec();
        while let Some(c) = stack.pop() {
            if !out.contains(&c) {
                out.push(c);
                stack.extend_from_slice(c.implies());
            }
        }
        out.sort();
        out
    }
}

impl fmt::Display for AgeingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AgeingClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        Self::ALL
            .iter()
            .copied()
            .find(|c| c.name() == up)
            .ok_or_else(|| Error::Inconclusive(format!("unknown ageing class '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgeingVerdict {
    pub class: AgeingClass,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub max_violation: f64,
}

impl AgeingVerdict {
    fn from_shape(class: AgeingClass, v: ShapeVerdict) -> Self {
        Self {
            class,
            verdict: v.verdict,
            witness: v.witness,
            max_violation: v.max_violation,
        }
    }

    pub fn holds(&self) -> bool {
        self.verdict.holds()
    }
}

/// Hazard, MRL and log-survival of one model sampled on a grid.
#[derive(Clone, Debug)]
pub struct ModelProfile {
    pub ts: Vec<f64>,
    pub r: Vec<f64>,
    pub m: Vec<f64>,
    pub log_s: Vec<f64>,
}

impl ModelProfile {
    pub fn sample(model: &LifetimeModel, grid: &Grid) -> Result<Self> {
        let ts = grid.nodes();
        let rows: Vec<(f64, f64, f64)> = ts
            .par_iter()
            .map(|&t| Ok((model.hazard_of(t)?, model.mrl_of(t)?, model.log_survival_of(t)?)))
            .collect::<Result<_>>()?;
        let (mut r, mut m, mut log_s) = (Vec::new(), Vec::new(), Vec::new());
        for (a, b, c) in rows {
            r.push(a);
            m.push(b);
            log_s.push(c);
        }
        Ok(Self { ts, r, m, log_s })
    }

    /// `H(t)/t`, continued by `r(0)` at the origin.
    fn average_hazard(&self) -> Vec<f64> {
        self.ts
            .iter()
            .zip(&self.log_s)
            .enumerate()
            .map(|(k, (&t, &l))| if t == 0.0 { self.r[k] } else { -l / t })
            .collect()
    }
}

fn pair(a: AgeingClass, va: ShapeVerdict, b: AgeingClass, vb: ShapeVerdict) -> (AgeingVerdict, AgeingVerdict) {
    (AgeingVerdict::from_shape(a, va), AgeingVerdict::from_shape(b, vb))
}

fn monotone_pair(
    ts: &[f64],
    ys: &[f64],
    up: AgeingClass,
    down: AgeingClass,
    tol: f64,
) -> Result<(AgeingVerdict, AgeingVerdict)> {
    Ok(pair(
        up,
        monotone_samples(ts, ys, Direction::Increasing, tol)?,
        down,
        monotone_samples(ts, ys, Direction::Decreasing, tol)?,
    ))
}

/// `lhs ≥ rhs` for the first class, `lhs ≤ rhs` for the second.
fn bound_pair(
    ts: &[f64],
    lhs: &[f64],
    rhs: &[f64],
    above: AgeingClass,
    below: AgeingClass,
    tol: f64,
) -> Result<(AgeingVerdict, AgeingVerdict)> {
    Ok(pair(
        above,
        at_least_samples(ts, lhs, rhs, tol)?,
        below,
        at_least_samples(ts, rhs, lhs, tol)?,
    ))
}

fn grid_for(model: &LifetimeModel, settings: &Settings) -> Result<Grid> {
    model.analysis_grid(settings)
}

pub fn ifr_dfr(p: &ModelProfile, tol: f64) -> Result<(AgeingVerdict, AgeingVerdict)> {
    monotone_pair(&p.ts, &p.r, AgeingClass::Ifr, AgeingClass::Dfr, tol)
}

pub fn ifra_dfra(p: &ModelProfile, tol: f64) -> Result<(AgeingVerdict, AgeingVerdict)> {
    monotone_pair(&p.ts, &p.average_hazard(), AgeingClass::Ifra, AgeingClass::Dfra, tol)
}

pub fn nbufr_nwufr(p: &ModelProfile, tol: f64) -> Result<(AgeingVerdict, AgeingVerdict)> {
    let r0 = vec![p.r[0]; p.ts.len()];
    bound_pair(&p.ts, &p.r, &r0, AgeingClass::Nbufr, AgeingClass::Nwufr, tol)
}

pub fn nbafr_nwafr(p: &ModelProfile, tol: f64) -> Result<(AgeingVerdict, AgeingVerdict)> {
    let h: Vec<f64> = p.log_s.iter().map(|l| -l).collect();
    let line: Vec<f64> = p.ts.iter().map(|t| t * p.r[0]).collect();
    bound_pair(&p.ts, &h, &line, AgeingClass::Nbafr, AgeingClass::Nwafr, tol)
}

pub fn dmrl_imrl(p: &ModelProfile, tol: f64) -> Result<(AgeingVerdict, AgeingVerdict)> {
    monotone_pair(&p.ts, &p.m, AgeingClass::Imrl, AgeingClass::Dmrl, tol).map(|(i, d)| (d, i))
}

/// NBU/NWU from `D(t,x) = ln S(t+x) − ln S(t) − ln S(x)` on an `n × n` grid over `[0, T/2]²`.
pub fn nbu_nwu(model: &LifetimeModel, horizon: f64, n: usize, tol: f64) -> Result<(AgeingVerdict, AgeingVerdict)> {
    if n < 2 {
        return Err(Error::Inconclusive(format!("NBU grid needs at least 2 points per axis, got {n}")));
    }
    let h = 0.5 * horizon / (n - 1) as f64;
    let logs: Vec<Option<f64>> = (0..2 * n - 1)
        .into_par_iter()
        .map(|k| match model.log_survival_of(k as f64 * h) {
            Ok(l) if l.is_finite() => Ok(Some(l)),
            Ok(_) | Err(Error::BeyondSupport { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let (mut better, mut worse) = (Tally::new(tol), Tally::new(tol));
    let mut skipped = 0usize;
    for i in 0..n {
        for j in 0..n {
            let (Some(a), Some(b), Some(c)) = (logs[i + j], logs[i], logs[j]) else {
                skipped += 1;
                continue;
            };
            let d = a - b - c;
            let scale = a.abs().max(b.abs()).max(c.abs());
            let (t, x) = (i as f64 * h, j as f64 * h);
            better.push(t, Some(x), d, scale);
            worse.push(t, Some(x), -d, scale);
        }
    }
    if skipped as f64 > NBU_SKIP_LIMIT * (n * n) as f64 {
        return Err(Error::Inconclusive(format!(
            "NBU test skipped {skipped} of {} points where the survival vanishes",
            n * n
        )));
    }
    Ok((
        AgeingVerdict::from_shape(AgeingClass::Nbu, better.finish(ShapeKind::AtLeast)),
        AgeingVerdict::from_shape(AgeingClass::Nwu, worse.finish(ShapeKind::AtLeast)),
    ))
}

/// Verdicts for all twelve classes, in [`AgeingClass::ALL`] order.
#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub verdicts: Vec<AgeingVerdict>,
}

impl Classification {
    pub fn get(&self, class: AgeingClass) -> &AgeingVerdict {
        self.verdicts.iter().find(|v| v.class == class).expect("all classes present")
    }

    pub fn verdict(&self, class: AgeingClass) -> Verdict {
        self.get(class).verdict
    }

    /// First `upstream holds ∧ downstream fails` pair, if any.
    pub fn chain_violation(&self) -> Option<(AgeingClass, AgeingClass)> {
        for v in &self.verdicts {
            if v.verdict != Verdict::Holds {
                continue;
            }
            for down in v.class.implied_closure() {
                if self.verdict(down) == Verdict::Fails {
                    return Some((v.class, down));
                }
            }
        }
        None
    }
}

/// One class on an explicit grid.
pub fn classify_on(model: &LifetimeModel, class: AgeingClass, grid: &Grid, settings: &Settings) -> Result<AgeingVerdict> {
    let all = classify_all_on(model, grid, settings, Some(class))?;
    Ok(all.into_iter().find(|v| v.class == class).expect("requested class computed"))
}

pub fn classify(model: &LifetimeModel, class: AgeingClass, settings: &Settings) -> Result<AgeingVerdict> {
    classify_on(model, class, &grid_for(model, settings)?, settings)
}

fn classify_all_on(
    model: &LifetimeModel,
    grid: &Grid,
    settings: &Settings,
    only: Option<AgeingClass>,
) -> Result<Vec<AgeingVerdict>> {
    let tol = settings.tol;
    let wants = |a: AgeingClass| only.is_none_or(|c| c == a || c == a.dual());
    let nbu_only = only.is_some_and(|c| matches!(c, AgeingClass::Nbu | AgeingClass::Nwu));
    let mut out = Vec::with_capacity(12);
    if !nbu_only {
        let p = ModelProfile::sample(model, grid)?;
        type Pair = fn(&ModelProfile, f64) -> Result<(AgeingVerdict, AgeingVerdict)>;
        let pairs: [(AgeingClass, Pair); 5] = [
            (AgeingClass::Ifr, ifr_dfr),
            (AgeingClass::Ifra, ifra_dfra),
            (AgeingClass::Nbufr, nbufr_nwufr),
            (AgeingClass::Nbafr, nbafr_nwafr),
            (AgeingClass::Dmrl, dmrl_imrl),
        ];
        for (class, f) in pairs {
            if wants(class) {
                let (a, b) = f(&p, tol)?;
                out.push(a);
                out.push(b);
            }
        }
    }
    if wants(AgeingClass::Nbu) {
        let (a, b) = nbu_nwu(model, grid.upper(), settings.nbu_points, tol)?;
        out.push(a);
        out.push(b);
    }
    out.sort_by_key(|v| v.class);
    Ok(out)
}

/// All twelve classes without the chain check.
pub fn classify_all_unchecked(model: &LifetimeModel, grid: &Grid, settings: &Settings) -> Result<Classification> {
    Ok(Classification {
        verdicts: classify_all_on(model, grid, settings, None)?,
    })
}

/// All twelve classes on `grid`; a broken implication chain is an error.
pub fn classify_all_on_grid(model: &LifetimeModel, grid: &Grid, settings: &Settings) -> Result<Classification> {
    let c = classify_all_unchecked(model, grid, settings)?;
    if let Some((up, down)) = c.chain_violation() {
        return Err(Error::ChainViolation {
            upstream: up.to_string(),
            upstream_verdict: c.verdict(up).as_str().to_string(),
            downstream: down.to_string(),
        });
    }
    Ok(c)
}

/// All twelve classes on the model's default grid.
pub fn classify_all(model: &LifetimeModel, settings: &Settings) -> Result<Classification> {
    classify_all_on_grid(model, &grid_for(model, settings)?, settings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifetime::SpecKind;
    use AgeingClass::*;

    fn model(kind: SpecKind, src: &str) -> LifetimeModel {
        LifetimeModel::parse(kind, src, src).unwrap()
    }

    #[test]
    fn duals_and_chains() {
        for c in AgeingClass::ALL {
            assert_eq!(c.dual().dual(), c);
            assert_ne!(c.dual(), c);
        }
        assert_eq!(Ifr.implied_closure(), vec![Ifra, Nbu, Nbufr, Nbafr, Dmrl]);
        assert_eq!(Dfr.implied_closure(), vec![Dfra, Nwu, Nwufr, Nwafr, Imrl]);
        assert_eq!("nbafr".parse::<AgeingClass>().unwrap(), Nbafr);
    }

    #[test]
    fn exponential_is_boundary_everywhere() {
        let c = classify_all(&LifetimeModel::exponential(), &Settings::default()).unwrap();
        for v in &c.verdicts {
            assert_eq!(v.verdict, Verdict::Boundary, "{}", v.class);
        }
    }

    #[test]
    fn example2_base_is_in_every_worse_class() {
        let m = model(SpecKind::Hazard, "2/(1+t) on [0,1); 1 on [1,inf)");
        let c = classify_all(&m, &Settings::default()).unwrap();
        for class in [Dfr, Dfra, Nwu, Nwufr, Nwafr, Imrl] {
            assert_eq!(c.verdict(class), Verdict::Holds, "{class}");
            assert_eq!(c.verdict(class.dual()), Verdict::Fails, "{}", class.dual());
        }
    }

    #[test]
    fn explicit_mrl_shapes() {
        let s = Settings::default();
        assert_eq!(classify(&model(SpecKind::Mrl, "1/(2+t)"), Dmrl, &s).unwrap().verdict, Verdict::Holds);
        let inc = model(SpecKind::Mrl, "1+t");
        assert_eq!(classify(&inc, Imrl, &s).unwrap().verdict, Verdict::Holds);
        assert_eq!(classify(&inc, Dmrl, &s).unwrap().verdict, Verdict::Fails);
    }

    #[test]
    fn nbu_witness_is_two_dimensional() {
        let m = model(SpecKind::Mrl, "1+t");
        let (nbu, nwu) = nbu_nwu(&m, 20.0, 50, 1e-9).unwrap();
        assert_eq!(nwu.verdict, Verdict::Holds);
        let w = nbu.witness.unwrap();
        assert!(w.x.is_some());
        assert!(w.t > 0.0);
    }

    #[test]
    fn chain_violation_is_detected() {
        let mut c = classify_all(&LifetimeModel::exponential(), &Settings::default()).unwrap();
        for v in c.verdicts.iter_mut() {
            v.verdict = match v.class {
                Ifr => Verdict::Holds,
                Nbu => Verdict::Fails,
                _ => Verdict::Boundary,
            };
        }
        assert_eq!(c.chain_violation(), Some((Ifr, Nbu)));
    }
}
