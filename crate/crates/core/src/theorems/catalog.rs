//! Worked examples, counterexamples and remarks, each with the claims made
//! about it, recomputed by the classifiers and hypothesis checkers.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use super::{Analysis, TheoremId};
use crate::ageing::AgeingClass;
use crate::damrl::{compose, ComposedModel, CovariateFunction};
use crate::error::Result;
use crate::expr::{PiecewiseExpr, Side};
use crate::lifetime::{LifetimeModel, SpecKind};
use crate::numeric::Verdict;
use crate::settings::Settings;

/// Largest relative difference tolerated between a printed closed form and
/// the recomputed quantity.
const PRINTED_TOL: f64 = 1e-9;

pub const EXPONENTIAL: (SpecKind, &str) = (SpecKind::Mrl, "1");
/// Hazard `2/(1+t)` on `[0,1]`, then 1.
pub const EXAMPLE2_HAZARD: (SpecKind, &str) = (SpecKind::Hazard, "2/(1+t) on [0,1); 1 on [1,inf)");
pub const CE3_SURVIVAL: (SpecKind, &str) = (
    SpecKind::Survival,
    "(1+t^2)/(1+t)^3*exp(t-t^2/2) on [0,1); 1/4*exp(1-t/2) on [1,inf)",
);
const MRL_INV_2T: (SpecKind, &str) = (SpecKind::Mrl, "1/(2+t)");
const MRL_1T: (SpecKind, &str) = (SpecKind::Mrl, "1+t");

/// `(1+t)²` on `[0,1]`, then `4t`.
pub const C_SQUARE_THEN_LINEAR: &str = "(1+t)^2 on [0,1); 4*t on [1,inf)";
/// `t²` on `[0,1]`, then `2t−1`.
pub const C_PARABOLA_THEN_TANGENT: &str = "t^2 on [0,1); 2*t-1 on [1,inf)";
const C_THREE_PIECE: &str = "t on [0,1/2); 1/4+t^2 on [1/2,1); 2*t-3/4 on [1,inf)";
const C_REMARK_T1: &str = "1/(2+t)^2 on [0,1); 1/(3*(2+t^2)) on [1,inf)";
const C_RATIO: &str = "(1+t)/(2+t)";
const C_BUMP: &str = "1/(2+t^2)";

/// What a claim is about.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Subject {
    Lemma1,
    /// Hypothesis (i) is index 1, (ii) is index 2.
    Hypothesis(TheoremId, usize),
    Base(AgeingClass),
    Star(AgeingClass),
    /// `c'` has no jump at any breakpoint.
    CovariateSmooth,
    /// Every star verdict equals the base verdict.
    StarEqualsBase,
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Lemma1 => f.write_str("Lemma 1"),
            Subject::Hypothesis(id, i) => write!(f, "{id} hyp ({})", if *i == 1 { "i" } else { "ii" }),
            Subject::Base(c) => write!(f, "base {c}"),
            Subject::Star(c) => write!(f, "star {c}"),
            Subject::CovariateSmooth => f.write_str("c' continuous"),
            Subject::StarEqualsBase => f.write_str("star verdicts = base verdicts"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expected {
    Accept,
    Reject,
    /// Holds, boundary accepted.
    Holds,
    Fails,
    /// Exactly boundary.
    Boundary,
    True,
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Expected::Accept => "accept",
            Expected::Reject => "reject",
            Expected::Holds => "holds",
            Expected::Fails => "fails",
            Expected::Boundary => "boundary",
            Expected::True => "true",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fact {
    pub subject: Subject,
    pub expected: Expected,
    pub locator: &'static str,
}

/// A closed form printed alongside an example, compared with the recomputed
/// `c/(m(c+m))`. Disagreement is a finding, never a failure.
#[derive(Clone, Debug, PartialEq)]
pub struct PrintedForm {
    pub quantity: &'static str,
    pub source: &'static str,
    pub locator: &'static str,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub locator: &'static str,
    pub base: (SpecKind, &'static str),
    pub covariate: &'static str,
    pub facts: Vec<Fact>,
    pub printed: Option<PrintedForm>,
}

impl CatalogEntry {
    pub fn base_model(&self) -> Result<LifetimeModel> {
        LifetimeModel::parse(self.base.0, self.base.1, self.name)
    }

    pub fn compose(&self, settings: &Settings) -> Result<ComposedModel> {
        let base = Arc::new(self.base_model()?);
        // Lemma 1 is itself one of the facts, so never refuse here.
        compose(base, CovariateFunction::parse(self.covariate)?, settings, true)
    }
}

fn fact(subject: Subject, expected: Expected, locator: &'static str) -> Fact {
    Fact {
        subject,
        expected,
        locator,
    }
}

fn hyp(id: TheoremId, i: usize, expected: Expected, locator: &'static str) -> Fact {
    fact(Subject::Hypothesis(id, i), expected, locator)
}

fn star(class: AgeingClass, expected: Expected, locator: &'static str) -> Fact {
    fact(Subject::Star(class), expected, locator)
}

fn base(class: AgeingClass, expected: Expected, locator: &'static str) -> Fact {
    fact(Subject::Base(class), expected, locator)
}

fn entry(
    name: &'static str,
    locator: &'static str,
    base: (SpecKind, &'static str),
    covariate: &'static str,
    facts: Vec<Fact>,
) -> CatalogEntry {
    CatalogEntry {
        name,
        locator,
        base,
        covariate,
        facts,
        printed: None,
    }
}

/// The built-in catalog, in a fixed order.
pub fn load_catalog() -> Vec<CatalogEntry> {
    use AgeingClass::*;
    use Expected::*;
    use TheoremId::*;

    let ex1 = "Example 1";
    let mut out = vec![
        entry(
            "example1",
            ex1,
            EXPONENTIAL,
            "exp(-t)",
            vec![
                fact(Subject::Lemma1, Accept, ex1),
                hyp(T1, 1, Holds, ex1),
                hyp(T1, 2, Holds, ex1),
                star(Ifr, Holds, ex1),
                hyp(T3, 1, Holds, "Remark after Theorem 3"),
                hyp(T3, 2, Holds, "Remark after Theorem 3"),
                star(Ifra, Holds, "Remark after Theorem 3"),
                hyp(T5, 1, Holds, "Remark after Theorem 5"),
                hyp(T5, 2, Holds, "Remark after Theorem 5"),
                star(Nbu, Holds, "Remark after Theorem 5"),
                hyp(T7, 1, Holds, "Remark after Corollary on NBUFR"),
                hyp(T7, 2, Holds, "Remark after Corollary on NBUFR"),
                hyp(C7, 1, Holds, "Remark after Corollary on NBUFR"),
                hyp(C7, 2, Holds, "Remark after Corollary on NBUFR"),
                star(Nbufr, Holds, "Remark after Corollary on NBUFR"),
                hyp(T9, 1, Holds, "Remark after Corollary on NBAFR"),
                hyp(T9, 2, Holds, "Remark after Corollary on NBAFR"),
                hyp(C8, 1, Holds, "Remark after Corollary on NBAFR"),
                hyp(C8, 2, Holds, "Remark after Corollary on NBAFR"),
                star(Nbafr, Holds, "Remark after Corollary on NBAFR"),
                star(Dmrl, Holds, "Proof of Theorem 1"),
            ],
        ),
        entry(
            "counterexample1",
            "Counterexample after Theorem 1",
            MRL_INV_2T,
            "1/(3+t)",
            vec![
                fact(Subject::Lemma1, Accept, "Counterexample after Theorem 1"),
                base(Ifr, Holds, "Counterexample after Theorem 1"),
                hyp(T1, 1, Fails, "Counterexample after Theorem 1"),
                hyp(T1, 2, Holds, "Counterexample after Theorem 1"),
                star(Ifr, Holds, "Counterexample after Theorem 1"),
                hyp(T3, 1, Fails, "Remark after Theorem 3"),
                star(Ifra, Holds, "Remark after Theorem 3"),
            ],
        ),
        entry(
            "remark_t1_ii",
            "Remark after Theorem 1",
            EXPONENTIAL,
            C_REMARK_T1,
            vec![
                fact(Subject::Lemma1, Accept, "Remark after Theorem 1"),
                hyp(T1, 1, Holds, "Remark after Theorem 1"),
                hyp(T1, 2, Fails, "Remark after Theorem 1"),
                star(Ifr, Holds, "Remark after Theorem 1"),
                fact(Subject::CovariateSmooth, True, "Remark after Theorem 1"),
            ],
        ),
        entry(
            "example2",
            "Example 2",
            EXAMPLE2_HAZARD,
            "t/(1+t)",
            vec![
                fact(Subject::Lemma1, Accept, "Example 2"),
                base(Dfr, Holds, "Example 2"),
                hyp(T2, 1, Holds, "Example 2"),
                hyp(T2, 2, Holds, "Example 2"),
                star(Dfr, Holds, "Example 2"),
            ],
        ),
        entry(
            "remark_t2_i",
            "Remark after Theorem 2",
            EXAMPLE2_HAZARD,
            C_RATIO,
            vec![
                hyp(T2, 1, Fails, "Remark after Theorem 2"),
                star(Dfr, Holds, "Remark after Theorem 2"),
            ],
        ),
        entry(
            "remark_t2_ii",
            "Remark after Theorem 2",
            EXAMPLE2_HAZARD,
            C_SQUARE_THEN_LINEAR,
            vec![
                hyp(T2, 2, Fails, "Remark after Theorem 2"),
                star(Dfr, Holds, "Remark after Theorem 2"),
            ],
        ),
        entry(
            "remark_t4_application",
            "Remark after Theorem 4",
            EXPONENTIAL,
            C_SQUARE_THEN_LINEAR,
            vec![
                hyp(T4, 1, Holds, "Remark after Theorem 4"),
                hyp(T4, 2, Holds, "Remark after Theorem 4"),
                star(Dfra, Holds, "Remark after Theorem 4"),
            ],
        ),
        entry(
            "remark_t4_i",
            "Second remark after Theorem 4",
            EXAMPLE2_HAZARD,
            C_RATIO,
            vec![
                hyp(T4, 1, Fails, "Second remark after Theorem 4"),
                star(Dfra, Holds, "Second remark after Theorem 4"),
            ],
        ),
        entry(
            "remark_t4_ii",
            "Second remark after Theorem 4",
            EXAMPLE2_HAZARD,
            C_THREE_PIECE,
            vec![
                fact(Subject::Lemma1, Accept, "Second remark after Theorem 4"),
                hyp(T4, 2, Fails, "Second remark after Theorem 4"),
                star(Dfra, Holds, "Second remark after Theorem 4"),
            ],
        ),
        entry(
            "remark_necessity",
            "Remarks after Theorems 3, 5, 7 and 9",
            EXPONENTIAL,
            C_BUMP,
            vec![
                fact(Subject::Lemma1, Accept, "Remark after Theorem 3"),
                hyp(T3, 2, Fails, "Remark after Theorem 3"),
                star(Ifra, Fails, "Remark after Theorem 3"),
                hyp(T5, 1, Fails, "Remark after Theorem 5"),
                star(Nbu, Fails, "Remark after Theorem 5"),
                hyp(T7, 2, Fails, "Second remark after Theorem 7"),
                star(Nbufr, Fails, "Second remark after Theorem 7"),
                hyp(T9, 2, Fails, "Remark after Theorem 9"),
                star(Nbafr, Fails, "Remark after Theorem 9"),
            ],
        ),
        entry(
            "remark_t5_ii",
            "Remark after Theorem 5",
            MRL_INV_2T,
            "1/(2+t)",
            vec![
                base(Nbu, Holds, "Remark after Theorem 5"),
                hyp(T5, 1, Boundary, "Remark after Theorem 5"),
                hyp(T5, 2, Fails, "Remark after Theorem 5"),
                star(Nbu, Holds, "Remark after Theorem 5"),
            ],
        ),
        entry(
            "remark_t6_application",
            "Remark after Theorem 6",
            EXPONENTIAL,
            "t/(1+t)",
            vec![
                hyp(T6, 1, Holds, "Remark after Theorem 6"),
                hyp(T6, 2, Holds, "Remark after Theorem 6"),
                star(Nwu, Holds, "Remark after Theorem 6"),
            ],
        ),
        CatalogEntry {
            printed: Some(PrintedForm {
                quantity: "c/(m(c+m))",
                source: "16*t^2*(1+t^2)^2*exp(2*t-t^2)/((4*(1+t)*exp(t-t^2/2)+(1+t)^3*exp(1/2))\
                         *(4*t^2*(1+t^2)*exp(t-t^2/2)+4*(1+t)*exp(t-t^2/2)+(1+t)^3*exp(1/2))) on [0,1); \
                         (2*t-1)/(2*(2*t+1)) on [1,inf)",
                locator: "Counterexample after Theorem 6",
            }),
            ..entry(
                "counterexample3",
                "Counterexample after Theorem 6",
                CE3_SURVIVAL,
                C_PARABOLA_THEN_TANGENT,
                vec![
                    fact(Subject::Lemma1, Accept, "Counterexample after Theorem 6"),
                    base(Nwu, Holds, "Counterexample after Theorem 6"),
                    hyp(T6, 1, Fails, "Counterexample after Theorem 6"),
                    hyp(T6, 2, Holds, "Counterexample after Theorem 6"),
                    star(Nwu, Holds, "Counterexample after Theorem 6"),
                ],
            )
        },
        entry(
            "remark_t6_ii",
            "Remark after the counterexample to Theorem 6",
            MRL_1T,
            "t",
            vec![
                base(Nwu, Holds, "Remark after the counterexample to Theorem 6"),
                hyp(T6, 2, Fails, "Remark after the counterexample to Theorem 6"),
                star(Nwu, Holds, "Remark after the counterexample to Theorem 6"),
            ],
        ),
        entry(
            "remark_t7_i",
            "First remark after Theorem 7",
            MRL_INV_2T,
            "1/(3+t)",
            vec![
                base(Nbufr, Holds, "First remark after Theorem 7"),
                hyp(T7, 1, Fails, "First remark after Theorem 7"),
                star(Nbufr, Holds, "First remark after Theorem 7"),
            ],
        ),
        entry(
            "example_t8",
            "Example after Theorem 8",
            EXAMPLE2_HAZARD,
            C_SQUARE_THEN_LINEAR,
            vec![
                base(Nwufr, Holds, "Example after Theorem 8"),
                hyp(T8, 1, Holds, "Example after Theorem 8"),
                hyp(T8, 2, Holds, "Example after Theorem 8"),
                star(Nwufr, Holds, "Example after Theorem 8"),
                hyp(C6, 1, Holds, "Remark after Corollary on NWUFR"),
                hyp(C6, 2, Holds, "Remark after Corollary on NWUFR"),
            ],
        ),
        entry(
            "counterexample_t8_i",
            "Counterexample after Theorem 8",
            EXAMPLE2_HAZARD,
            C_RATIO,
            vec![
                hyp(T8, 1, Fails, "Counterexample after Theorem 8"),
                star(Nwufr, Holds, "Counterexample after Theorem 8"),
            ],
        ),
        entry(
            "counterexample_t8_ii",
            "Counterexample after Theorem 8",
            EXAMPLE2_HAZARD,
            C_PARABOLA_THEN_TANGENT,
            vec![
                fact(Subject::Lemma1, Accept, "Counterexample after Theorem 8"),
                hyp(T8, 2, Fails, "Counterexample after Theorem 8"),
                star(Nwufr, Fails, "Counterexample after Theorem 8"),
            ],
        ),
        entry(
            "remark_t9_i",
            "Remark after Theorem 9",
            MRL_INV_2T,
            "1/(3+t)",
            vec![
                base(Nbafr, Holds, "Remark after Theorem 9"),
                hyp(T9, 1, Fails, "Remark after Theorem 9"),
                star(Nbafr, Holds, "Remark after Theorem 9"),
            ],
        ),
        entry(
            "remark_t10_application",
            "Remark after Theorem 10",
            EXAMPLE2_HAZARD,
            C_SQUARE_THEN_LINEAR,
            vec![
                base(Nwafr, Holds, "Final example"),
                hyp(T10, 1, Holds, "Remark after Theorem 10"),
                hyp(T10, 2, Holds, "Remark after Theorem 10"),
                hyp(C9, 1, Holds, "Final example"),
                hyp(C9, 2, Holds, "Final example"),
                star(Nwafr, Holds, "Final example"),
            ],
        ),
        entry(
            "remark_t10_i",
            "Second remark after Theorem 10",
            EXAMPLE2_HAZARD,
            C_RATIO,
            vec![
                hyp(T10, 1, Fails, "Second remark after Theorem 10"),
                star(Nwafr, Holds, "Second remark after Theorem 10"),
            ],
        ),
        entry(
            "remark_t10_ii",
            "Second remark after Theorem 10",
            EXAMPLE2_HAZARD,
            C_PARABOLA_THEN_TANGENT,
            vec![
                hyp(T10, 2, Fails, "Second remark after Theorem 10"),
                star(Nwafr, Fails, "Second remark after Theorem 10"),
            ],
        ),
        entry(
            "identity",
            "Identity transform",
            EXAMPLE2_HAZARD,
            "0",
            vec![
                fact(Subject::Lemma1, Accept, "Identity transform"),
                fact(Subject::StarEqualsBase, True, "Identity transform"),
            ],
        ),
    ];
    out.shrink_to_fit();
    out
}

/// One checked fact.
#[derive(Clone, Debug, PartialEq)]
pub struct FactResult {
    pub entry: &'static str,
    pub locator: &'static str,
    pub subject: Subject,
    pub expected: Expected,
    pub computed: String,
    pub pass: bool,
}

/// Informational comparison with a printed closed form.
#[derive(Clone, Debug, PartialEq)]
pub struct Finding {
    pub entry: &'static str,
    pub locator: &'static str,
    pub description: String,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct CatalogReport {
    pub rows: Vec<FactResult>,
    pub findings: Vec<Finding>,
}

impl CatalogReport {
    pub fn mismatches(&self) -> Vec<&FactResult> {
        self.rows.iter().filter(|r| !r.pass).collect()
    }

    pub fn entries(&self) -> usize {
        let mut names: Vec<&str> = self.rows.iter().map(|r| r.entry).collect();
        names.dedup();
        names.len()
    }
}

fn matches(expected: Expected, v: Verdict) -> bool {
    match expected {
        Expected::Holds => v.holds(),
        Expected::Fails => v == Verdict::Fails,
        Expected::Boundary => v == Verdict::Boundary,
        _ => false,
    }
}

fn check_fact(f: &Fact, cm: &ComposedModel, an: &Analysis) -> Result<(String, bool)> {
    Ok(match f.subject {
        Subject::Lemma1 => {
            let ok = cm.lemma().overall;
            let computed = if ok { "accept" } else { "reject" };
            let pass = matches!((f.expected, ok), (Expected::Accept, true) | (Expected::Reject, false));
            (computed.to_string(), pass)
        }
        Subject::Hypothesis(id, i) => {
            let h = an.data.check(id.hypotheses()[i - 1], an.tol)?;
            let pass = h.verdict().is_some_and(|v| matches(f.expected, v));
            let mut computed = h.label().to_string();
            if let Some(w) = h.witness() {
                computed.push_str(&format!(" ({w})"));
            }
            (computed, pass)
        }
        Subject::Base(c) | Subject::Star(c) => {
            let v = if matches!(f.subject, Subject::Base(_)) {
                an.base.get(c)
            } else {
                an.star.get(c)
            };
            let mut computed = v.verdict.as_str().to_string();
            if let Some(w) = v.witness {
                computed.push_str(&format!(" ({w})"));
            }
            (computed, matches(f.expected, v.verdict))
        }
        Subject::CovariateSmooth => {
            let smooth = cm.lemma().slope_jumps.is_empty();
            (smooth.to_string(), smooth == (f.expected == Expected::True))
        }
        Subject::StarEqualsBase => {
            let same = an
                .base
                .verdicts
                .iter()
                .zip(&an.star.verdicts)
                .all(|(a, b)| a.class == b.class && a.verdict == b.verdict);
            (same.to_string(), same == (f.expected == Expected::True))
        }
    })
}

fn compare_printed(p: &PrintedForm, cm: &ComposedModel, settings: &Settings) -> Result<(bool, f64)> {
    let printed = PiecewiseExpr::parse(p.source)?;
    let grid = cm.grid(&cm.pinned(settings))?;
    let mut worst = 0.0f64;
    for t in grid.nodes() {
        let c = cm.covariate().eval(t)?;
        let m = cm.base().mrl_of(t)?;
        let ours = c / (m * (c + m));
        let theirs = printed.eval_dual(t, Side::Right)?.v;
        worst = worst.max((ours - theirs).abs() / 1f64.max(ours.abs()));
    }
    Ok((worst <= PRINTED_TOL, worst))
}

fn verify_entry(e: &CatalogEntry, settings: &Settings) -> Result<(Vec<FactResult>, Vec<Finding>)> {
    let cm = e.compose(settings)?;
    let an = Analysis::new(&cm, settings)?;
    let mut rows = Vec::with_capacity(e.facts.len());
    for f in &e.facts {
        let (computed, pass) = check_fact(f, &cm, &an)?;
        rows.push(FactResult {
            entry: e.name,
            locator: f.locator,
            subject: f.subject,
            expected: f.expected,
            computed,
            pass,
        });
    }
    let mut findings = Vec::new();
    for (t, l, r) in &cm.lemma().slope_jumps {
        findings.push(Finding {
            entry: e.name,
            locator: e.locator,
            description: format!("c' jumps at t = {t}: {l} vs {r}"),
            agrees: true,
        });
    }
    if let Some(p) = &e.printed {
        let (agrees, worst) = compare_printed(p, &cm, settings)?;
        findings.push(Finding {
            entry: e.name,
            locator: p.locator,
            description: format!(
                "printed {} {} the recomputed one (max relative difference {worst:.2e})",
                p.quantity,
                if agrees { "agrees with" } else { "differs from" }
            ),
            agrees,
        });
    }
    Ok((rows, findings))
}

/// Check every fact of every entry. Entries run in parallel; the report
/// keeps catalog order.
pub fn verify_entries(entries: &[CatalogEntry], settings: &Settings) -> Result<CatalogReport> {
    let parts: Vec<(Vec<FactResult>, Vec<Finding>)> = entries
        .par_iter()
        .map(|e| verify_entry(e, settings))
        .collect::<Result<_>>()?;
    let mut report = CatalogReport::default();
    for (rows, findings) in parts {
        report.rows.extend(rows);
        report.findings.extend(findings);
    }
    Ok(report)
}

pub fn verify_catalog(settings: &Settings) -> Result<CatalogReport> {
    verify_entries(&load_catalog(), settings)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_shape() {
        let c = load_catalog();
        assert!(c.len() >= 15);
        assert!(c.iter().map(|e| e.facts.len()).sum::<usize>() >= 40);
        let mut names: Vec<_> = c.iter().map(|e| e.name).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), c.len(), "entry names are unique");
        for e in &c {
            PiecewiseExpr::parse(e.base.1).unwrap();
            PiecewiseExpr::parse(e.covariate).unwrap();
        }
    }

    #[test]
    fn example1_alone_passes() {
        let entries: Vec<_> = load_catalog().into_iter().filter(|e| e.name == "example1").collect();
        let rep = verify_entries(&entries, &Settings::default()).unwrap();
        assert!(rep.mismatches().is_empty(), "{:#?}", rep.mismatches());
    }

    #[test]
    fn tampered_fact_is_reported() {
        let mut entries: Vec<_> = load_catalog().into_iter().filter(|e| e.name == "example1").collect();
        let f = entries[0]
            .facts
            .iter_mut()
            .find(|f| f.subject == Subject::Star(AgeingClass::Ifr))
            .unwrap();
        f.expected = Expected::Fails;
        let rep = verify_entries(&entries, &Settings::default()).unwrap();
        let bad = rep.mismatches();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].subject, Subject::Star(AgeingClass::Ifr));
        assert!(bad[0].computed.starts_with("holds"));
    }
}
