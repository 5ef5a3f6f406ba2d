//! CSV writers. Floats are printed as `{:.14e}` (15 significant digits) so
//! that identical inputs always give identical bytes.

use std::io::Write;

use rayon::prelude::*;

use crate::ageing::{AgeingVerdict, Classification};
use crate::damrl::ComposedModel;
use crate::error::{Error, Result};
use crate::lifetime::LifetimeModel;
use crate::numeric::{Grid, Witness};
use crate::theorems::catalog::CatalogReport;
use crate::theorems::TheoremReport;
use crate::theorems::search::{SearchOutcome, SweepReport};

pub const CURVE_HEADER: [&str; 7] = ["t", "m", "r", "S", "m_star", "r_star", "S_star"];

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.14e}")
    }
}

// Past the end of a finite support the curves are undefined, not an error.
fn or_nan(r: Result<f64>) -> Result<f64> {
    match r {
        Err(Error::BeyondSupport { .. }) | Err(Error::DegenerateResidualLife { .. }) => Ok(f64::NAN),
        other => other,
    }
}

fn triple(model: &LifetimeModel, t: f64) -> Result<[f64; 3]> {
    Ok([
        or_nan(model.mrl_of(t))?,
        or_nan(model.hazard_of(t))?,
        or_nan(model.survival_of(t))?,
    ])
}

/// Rows `(t, m, r, S, m*, r*, S*)` at the grid nodes.
pub fn curve_rows(cm: &ComposedModel, grid: &Grid) -> Result<Vec<[f64; 7]>> {
    grid.nodes()
        .par_iter()
        .map(|&t| {
            let [m, r, s] = triple(cm.base(), t)?;
            let [ms, rs, ss] = triple(cm.star(), t)?;
            Ok([t, m, r, s, ms, rs, ss])
        })
        .collect()
}

pub fn write_curves<W: Write>(cm: &ComposedModel, grid: &Grid, out: W) -> Result<()> {
    let rows = curve_rows(cm, grid)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CURVE_HEADER)?;
    for row in rows {
        w.write_record(row.iter().map(|&x| fmt_f64(x)))?;
    }
    w.flush()?;
    Ok(())
}

fn witness_fields(w: Option<Witness>) -> [String; 2] {
    match w {
        Some(w) => [fmt_f64(w.t), w.x.map(fmt_f64).unwrap_or_default()],
        None => [String::new(), String::new()],
    }
}

fn verdict_record(prefix: &str, v: &AgeingVerdict) -> Vec<String> {
    let [wt, wx] = witness_fields(v.witness);
    vec![
        prefix.to_string(),
        v.class.name().to_string(),
        v.verdict.to_string(),
        wt,
        wx,
        fmt_f64(v.max_violation),
    ]
}

/// One row per class, for one or more labelled classifications.
pub fn write_classifications<W: Write>(items: &[(&str, &Classification)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["model", "class", "verdict", "witness_t", "witness_x", "max_violation"])?;
    for (label, c) in items {
        for v in &c.verdicts {
            w.write_record(verdict_record(label, v))?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_catalog<W: Write>(report: &CatalogReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["entry", "locator", "subject", "expected", "computed", "pass"])?;
    for r in &report.rows {
        w.write_record([
            r.entry.to_string(),
            r.locator.to_string(),
            r.subject.to_string(),
            r.expected.to_string(),
            r.computed.clone(),
            r.pass.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Columns: one per parameter, then `lemma1, hyp1, hyp2, base_verdict, star_verdict`.
pub fn write_findings<W: Write>(outcome: &SearchOutcome, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<&str> = outcome
        .columns
        .iter()
        .map(String::as_str)
        .chain(["lemma1", "hyp1", "hyp2", "base_verdict", "star_verdict"])
        .collect();
    w.write_record(&header)?;
    for f in &outcome.findings {
        let rec: Vec<String> = f
            .theta
            .iter()
            .map(|&x| fmt_f64(x))
            .chain([
                if f.lemma1 { "accept" } else { "reject" }.to_string(),
                f.hypotheses[0].clone(),
                f.hypotheses[1].clone(),
                f.base_verdict.to_string(),
                f.star_verdict.to_string(),
            ])
            .collect();
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_reports<W: Write>(reports: &[TheoremReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_HEADER)?;
    for r in reports {
        w.write_record(report_fields(r))?;
    }
    w.flush()?;
    Ok(())
}

const REPORT_HEADER: [&str; 9] = [
    "theorem",
    "hyp1",
    "hyp2",
    "base_verdict",
    "star_verdict",
    "applicable",
    "sound",
    "sufficiency_note",
    "tainted",
];

fn report_fields(r: &TheoremReport) -> [String; 9] {
    [
        r.id.to_string(),
        r.hypotheses[0].label().to_string(),
        r.hypotheses[1].label().to_string(),
        r.base.verdict.to_string(),
        r.star.verdict.to_string(),
        r.applicable.to_string(),
        r.sound.to_string(),
        r.sufficiency_note.to_string(),
        r.tainted.to_string(),
    ]
}

/// One row per (sample, theorem).
pub fn write_sweep<W: Write>(report: &SweepReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<&str> = ["sample", "base", "covariate"].into_iter().chain(REPORT_HEADER).collect();
    w.write_record(&header)?;
    for s in &report.samples {
        for r in &s.reports {
            let head = [s.index.to_string(), s.base.clone(), s.covariate.clone()];
            w.write_record(head.into_iter().chain(report_fields(r)))?;
        }
    }
    w.flush()?;
    Ok(())
}
