//! Seeded random search over parametric covariate families, and the
//! soundness sweep over random (base, covariate) pairs.
//!
//! All parameters are drawn up front from one ChaCha stream, then evaluated
//! in parallel and collected in draw order, so a seed fixes the output.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Analysis, HypothesisCheck, HypothesisData, TheoremId, TheoremReport};
use crate::ageing::{classify_on, AgeingVerdict};
use crate::damrl::{compose, CovariateFunction};
use crate::error::{Error, Result};
use crate::lifetime::{LifetimeModel, SpecKind};
use crate::numeric::Verdict;
use crate::settings::Settings;

#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
}

impl Param {
    pub fn new(name: &str, lo: f64, hi: f64) -> Self {
        Self {
            name: name.to_string(),
            lo,
            hi,
        }
    }
}

/// A DSL template with `{name}` placeholders and uniform parameter ranges.
#[derive(Clone, Debug, PartialEq)]
pub struct Family {
    pub name: String,
    /// How the instantiated template specifies a base model; ignored for covariates.
    pub kind: SpecKind,
    pub template: String,
    pub params: Vec<Param>,
}

impl Family {
    pub fn new(name: &str, kind: SpecKind, template: &str, params: Vec<Param>) -> Self {
        Self {
            name: name.to_string(),
            kind,
            template: template.to_string(),
            params,
        }
    }

    pub fn covariate(name: &str, template: &str, params: Vec<Param>) -> Self {
        Self::new(name, SpecKind::Mrl, template, params)
    }

    /// Check that every placeholder has a range and every range is used.
    pub fn validate(&self) -> Result<()> {
        for p in &self.params {
            if !(p.lo <= p.hi) || !p.lo.is_finite() || !p.hi.is_finite() {
                return Err(Error::Theorems(format!(
                    "family '{}': parameter {} has invalid range [{}, {}]",
                    self.name, p.name, p.lo, p.hi
                )));
            }
            if !self.template.contains(&format!("{{{}}}", p.name)) {
                return Err(Error::Theorems(format!(
                    "family '{}': parameter {} does not appear in the template",
                    self.name, p.name
                )));
            }
        }
        let filled = self.instantiate(&vec![1.0; self.params.len()]);
        if filled.contains('{') || filled.contains('}') {
            return Err(Error::Theorems(format!(
                "family '{}': template has a placeholder without a range",
                self.name
            )));
        }
        Ok(())
    }

    pub fn instantiate(&self, theta: &[f64]) -> String {
        let mut s = self.template.clone();
        for (p, v) in self.params.iter().zip(theta) {
            s = s.replace(&format!("{{{}}}", p.name), &format!("({v})"));
        }
        s
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.params
            .iter()
            .map(|p| if p.lo == p.hi { p.lo } else { rng.gen_range(p.lo..p.hi) })
            .collect()
    }
}

/// Covariate families used by the sweep.
pub fn covariate_families() -> Vec<Family> {
    vec![
        Family::covariate(
            "exp_decay",
            "{a}*exp(-{b}*t)",
            vec![Param::new("a", 0.1, 2.0), Param::new("b", 0.1, 2.0)],
        ),
        Family::covariate("saturating", "t/({a}+t)", vec![Param::new("a", 0.5, 5.0)]),
        Family::covariate("inverse", "1/({a}+t)", vec![Param::new("a", 1.0, 5.0)]),
        Family::covariate("bump", "1/({a}+t^2)", vec![Param::new("a", 1.0, 4.0)]),
        Family::covariate(
            "linear",
            "{a}+{b}*t",
            vec![Param::new("a", 0.0, 2.0), Param::new("b", 0.0, 2.0)],
        ),
    ]
}

/// Base families used by the sweep.
pub fn base_families() -> Vec<Family> {
    vec![
        Family::new("exponential", SpecKind::Mrl, "1", vec![]),
        Family::new("inverse_mrl", SpecKind::Mrl, "1/({a}+t)", vec![Param::new("a", 1.0, 4.0)]),
        Family::new("linear_mrl", SpecKind::Mrl, "{a}+t", vec![Param::new("a", 0.5, 3.0)]),
        Family::new(
            "example2",
            SpecKind::Hazard,
            super::catalog::EXAMPLE2_HAZARD.1,
            vec![],
        ),
    ]
}

fn build(base: &Family, cov: &Family, theta: &[f64]) -> Result<(Arc<LifetimeModel>, CovariateFunction)> {
    let nb = base.params.len();
    let bsrc = base.instantiate(&theta[..nb]);
    let model = LifetimeModel::parse(base.kind, &bsrc, bsrc.clone())?;
    let c = CovariateFunction::parse(&cov.instantiate(&theta[nb..]))?;
    Ok((Arc::new(model), c))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchSpec {
    pub id: TheoremId,
    /// Hypothesis to drop: 1 for (i), 2 for (ii).
    pub drop: usize,
    pub base: Family,
    pub family: Family,
    pub trials: usize,
    pub seed: u64,
}

/// An admissible sample: Lemma 1 accepts, the dropped hypothesis fails, the
/// other holds and the base is in the class.
#[derive(Clone, Debug, PartialEq)]
pub struct Finding {
    pub trial: usize,
    pub theta: Vec<f64>,
    pub lemma1: bool,
    pub hypotheses: [String; 2],
    pub base_verdict: Verdict,
    pub star_verdict: Verdict,
    pub star: AgeingVerdict,
}

impl Finding {
    /// The class survived although a hypothesis failed.
    pub fn star_holds(&self) -> bool {
        self.star_verdict.holds()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SearchDiagnostics {
    pub trials: usize,
    pub lemma_rejected: usize,
    pub dropped_not_failing: usize,
    pub other_not_holding: usize,
    pub base_not_in_class: usize,
    pub errors: usize,
    pub first_error: Option<String>,
}

impl std::fmt::Display for SearchDiagnostics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} trials: {} rejected by Lemma 1, {} with the dropped hypothesis not failing, \
             {} with the other hypothesis not holding, {} with the base outside the class, {} errors",
            self.trials,
            self.lemma_rejected,
            self.dropped_not_failing,
            self.other_not_holding,
            self.base_not_in_class,
            self.errors
        )?;
        if let Some(e) = &self.first_error {
            write!(f, " (first: {e})")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub spec: SearchSpec,
    /// Column names for `theta`, base parameters first.
    pub columns: Vec<String>,
    pub findings: Vec<Finding>,
    pub diagnostics: SearchDiagnostics,
}

impl SearchOutcome {
    /// Findings where the star class still holds.
    pub fn sufficiency(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.star_holds())
    }

    /// Findings where the star class fails.
    pub fn necessity(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| !f.star_holds())
    }
}

enum Trial {
    Rejected,
    DroppedNotFailing,
    OtherNotHolding,
    BaseOutside,
    Found(Finding),
    Broken(String),
}

fn run_trial(spec: &SearchSpec, trial: usize, theta: &[f64], settings: &Settings) -> Trial {
    let go = || -> Result<Trial> {
        let (base, c) = build(&spec.base, &spec.family, theta)?;
        let cm = match compose(base, c, settings, false) {
            Ok(cm) => cm,
            Err(Error::LemmaRejected(_)) => return Ok(Trial::Rejected),
            Err(e) => return Err(e),
        };
        let pinned = cm.pinned(settings);
        let grid = cm.grid(&pinned)?;
        let data = HypothesisData::sample(&cm, &grid)?;
        let hyps = spec.id.hypotheses();
        let checks: Vec<HypothesisCheck> = hyps.iter().map(|&h| data.check(h, pinned.tol)).collect::<Result<_>>()?;
        let dropped = &checks[spec.drop - 1];
        let other = &checks[2 - spec.drop];
        if !dropped.fails() {
            return Ok(Trial::DroppedNotFailing);
        }
        if !other.holds() {
            return Ok(Trial::OtherNotHolding);
        }
        let class = spec.id.class();
        let b = classify_on(cm.base(), class, &grid, &pinned)?;
        if !b.holds() {
            return Ok(Trial::BaseOutside);
        }
        let s = classify_on(cm.star(), class, &grid, &pinned)?;
        Ok(Trial::Found(Finding {
            trial,
            theta: theta.to_vec(),
            lemma1: true,
            hypotheses: [checks[0].label().to_string(), checks[1].label().to_string()],
            base_verdict: b.verdict,
            star_verdict: s.verdict,
            star: s,
        }))
    };
    go().unwrap_or_else(|e| Trial::Broken(e.to_string()))
}

/// Sample the family, keep the admissible draws and classify the star model.
pub fn search_counterexample(spec: &SearchSpec, settings: &Settings) -> Result<SearchOutcome> {
    if !(spec.drop == 1 || spec.drop == 2) {
        return Err(Error::Theorems(format!("hypothesis to drop must be 1 or 2, got {}", spec.drop)));
    }
    spec.base.validate()?;
    spec.family.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let thetas: Vec<Vec<f64>> = (0..spec.trials)
        .map(|_| {
            let mut t = spec.base.draw(&mut rng);
            t.extend(spec.family.draw(&mut rng));
            t
        })
        .collect();
    let results: Vec<Trial> = thetas
        .par_iter()
        .enumerate()
        .map(|(i, th)| run_trial(spec, i, th, settings))
        .collect();

    let mut diagnostics = SearchDiagnostics {
        trials: spec.trials,
        ..Default::default()
    };
    let mut findings = Vec::new();
    for r in results {
        match r {
            Trial::Rejected => diagnostics.lemma_rejected += 1,
            Trial::DroppedNotFailing => diagnostics.dropped_not_failing += 1,
            Trial::OtherNotHolding => diagnostics.other_not_holding += 1,
            Trial::BaseOutside => diagnostics.base_not_in_class += 1,
            Trial::Broken(e) => {
                diagnostics.errors += 1;
                diagnostics.first_error.get_or_insert(e);
            }
            Trial::Found(f) => findings.push(f),
        }
    }
    if findings.is_empty() {
        return Err(Error::SearchInconclusive(diagnostics.to_string()));
    }
    let columns = spec
        .base
        .params
        .iter()
        .map(|p| format!("base_{}", p.name))
        .chain(spec.family.params.iter().map(|p| format!("c_{}", p.name)))
        .collect();
    Ok(SearchOutcome {
        spec: spec.clone(),
        columns,
        findings,
        diagnostics,
    })
}

/// One sample of the soundness sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSample {
    pub index: usize,
    pub base_family: String,
    pub base: String,
    pub covariate_family: String,
    pub covariate: String,
    pub reports: Vec<TheoremReport>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub seed: u64,
    pub samples: Vec<SweepSample>,
    /// Candidates drawn but rejected by Lemma 1.
    pub rejected: usize,
    /// Candidates whose analysis failed, with the error.
    pub errors: Vec<(String, String, String)>,
}

impl SweepReport {
    /// `(sample index, theorem)` for every report with `sound = false`.
    pub fn violations(&self) -> Vec<(usize, TheoremId)> {
        self.samples
            .iter()
            .flat_map(|s| s.reports.iter().filter(|r| !r.sound).map(move |r| (s.index, r.id)))
            .collect()
    }

    /// Number of (sample, theorem) pairs where the theorem applied.
    pub fn applicable(&self) -> usize {
        self.samples
            .iter()
            .map(|s| s.reports.iter().filter(|r| r.applicable).count())
            .sum()
    }
}

enum SweepTrial {
    Rejected,
    Broken(String),
    Done(Vec<TheoremReport>),
}

/// Draw `samples` Lemma-1-admissible pairs from the built-in families and
/// cross-validate all fourteen theorems on each.
pub fn soundness_sweep(samples: usize, seed: u64, settings: &Settings) -> Result<SweepReport> {
    let bases = base_families();
    let covs = covariate_families();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SweepReport {
        seed,
        samples: Vec::with_capacity(samples),
        rejected: 0,
        errors: Vec::new(),
    };
    let max_draws = 20 * samples.max(1);
    let mut drawn = 0;
    while out.samples.len() < samples && drawn < max_draws {
        let batch = (2 * (samples - out.samples.len())).min(max_draws - drawn);
        let draws: Vec<(usize, usize, Vec<f64>)> = (0..batch)
            .map(|_| {
                let b = rng.gen_range(0..bases.len());
                let c = rng.gen_range(0..covs.len());
                let mut th = bases[b].draw(&mut rng);
                th.extend(covs[c].draw(&mut rng));
                (b, c, th)
            })
            .collect();
        drawn += batch;
        let results: Vec<SweepTrial> = draws
            .par_iter()
            .map(|(b, c, th)| {
                let go = || -> Result<SweepTrial> {
                    let (base, cov) = build(&bases[*b], &covs[*c], th)?;
                    let cm = match compose(base, cov, settings, false) {
                        Ok(cm) => cm,
                        Err(Error::LemmaRejected(_)) => return Ok(SweepTrial::Rejected),
                        Err(e) => return Err(e),
                    };
                    Ok(SweepTrial::Done(Analysis::new(&cm, settings)?.reports()?))
                };
                go().unwrap_or_else(|e| SweepTrial::Broken(e.to_string()))
            })
            .collect();
        for ((b, c, th), r) in draws.into_iter().zip(results) {
            let nb = bases[b].params.len();
            let base_src = bases[b].instantiate(&th[..nb]);
            let cov_src = covs[c].instantiate(&th[nb..]);
            match r {
                SweepTrial::Rejected => out.rejected += 1,
                SweepTrial::Broken(e) => out.errors.push((base_src, cov_src, e)),
                SweepTrial::Done(reports) if out.samples.len() < samples => out.samples.push(SweepSample {
                    index: out.samples.len(),
                    base_family: bases[b].name.clone(),
                    base: base_src,
                    covariate_family: covs[c].name.clone(),
                    covariate: cov_src,
                    reports,
                }),
                SweepTrial::Done(_) => {}
            }
        }
    }
    if out.samples.len() < samples {
        return Err(Error::SearchInconclusive(format!(
            "only {} of {samples} sweep samples were admissible after {drawn} draws",
            out.samples.len()
        )));
    }
    Ok(out)
}
