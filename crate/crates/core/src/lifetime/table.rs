//! Piecewise spectral table of log-survival and mean residual life.
//!
//! `[0, upper]` is cut into cells that never straddle a breakpoint. On each
//! cell the integrand of the cumulative integral is collocated at
//! Gauss–Legendre nodes, so cumulative integrals are exact for the degree-11
//! interpolant. The mean residual life of hazard- and survival-specified
//! models comes from the backward recurrence
//! `m(x) = ∫_x^b e^{L(u)−L(x)} du + e^{L(b)−L(x)} m(b)`, seeded at `upper`.

use once_cell::sync::Lazy;
use rayon::prelude::*;

use crate::error::Result;
use crate::numeric::gauss::{barycentric_eval, Collocation};

/// Gauss–Legendre nodes per cell.
pub(crate) const NODES: usize = 12;
const CLOSED: usize = NODES + 2;

pub(crate) static COLLOCATION: Lazy<Collocation> = Lazy::new(|| Collocation::new(NODES));

/// Largest cell width at `a` when no rate limit applies.
pub(crate) fn base_width(a: f64) -> f64 {
    0.05 * (1.0 + a)
}

/// What the table builder needs from a model.
pub(crate) trait TableSource: Sync {
    /// Breakpoints of every function involved, ascending.
    fn knots(&self) -> Vec<f64>;
    /// Local decay rate (the hazard) limiting the cell width, if relevant.
    fn rate(&self, t: f64) -> Option<f64>;
    /// Integrand whose running integral from 0 feeds the log-survival
    /// (`None` when the log-survival has a closed form).
    fn integrand(&self, t: f64) -> Result<Option<f64>>;
    /// Log-survival at `t` given the running integral up to `t`.
    /// `at_right_end` asks for the left limit at a cell's right knot.
    fn log_survival_from(&self, t: f64, at_right_end: bool, cumulative: f64) -> Result<f64>;
    /// Whether the MRL has to be tabulated (no closed form).
    fn needs_mrl(&self) -> bool;
    /// MRL at `upper`, seeding the backward recurrence.
    fn seed_mrl(&self, upper: f64, log_s_upper: f64) -> Result<f64>;
}

#[derive(Debug)]
pub(crate) struct Table {
    /// `cells` knots, `knots[i]..knots[i+1]` is cell `i`.
    knots: Vec<f64>,
    /// `CLOSED` log-survival values per cell.
    log_s: Vec<f64>,
    /// `CLOSED` MRL values per cell, when tabulated.
    mrl: Option<Vec<f64>>,
}

impl Table {
    pub(crate) fn upper(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let n = self.knots.len() - 1;
        let i = self.knots.partition_point(|&k| k <= t).saturating_sub(1).min(n - 1);
        let (a, b) = (self.knots[i], self.knots[i + 1]);
        (i, 2.0 * (t - a) / (b - a) - 1.0)
    }

    fn interpolate(&self, vals: &[f64], t: f64) -> f64 {
        let (i, x) = self.locate(t);
        let c = &*COLLOCATION;
        barycentric_eval(
            &c.closed_nodes,
            &c.closed_weights,
            &vals[i * CLOSED..(i + 1) * CLOSED],
            x,
        )
    }

    pub(crate) fn log_survival(&self, t: f64) -> f64 {
        self.interpolate(&self.log_s, t)
    }

    pub(crate) fn mrl(&self, t: f64) -> Option<f64> {
        self.mrl.as_ref().map(|m| self.interpolate(m, t))
    }

    pub(crate) fn cells(&self) -> usize {
        self.knots.len() - 1
    }

    /// Build on `[0, upper]`, extending towards `extend_to` while the cell
    /// count stays under `budget`.
    pub(crate) fn build<S: TableSource>(
        src: &S,
        upper: f64,
        extend_to: f64,
        budget: usize,
    ) -> Result<Table> {
        let knots = place_knots(src, upper, extend_to, budget);
        let coll = &*COLLOCATION;
        let cells = knots.len() - 1;

        // Integrand at the Gauss nodes of every cell, cell by cell in parallel.
        let per_cell: Vec<(Vec<f64>, f64)> = (0..cells)
            .into_par_iter()
            .map(|i| -> Result<(Vec<f64>, f64)> {
                let (a, b) = (knots[i], knots[i + 1]);
                let half = 0.5 * (b - a);
                let mut g = Vec::with_capacity(NODES);
                for &x in &coll.nodes {
                    g.push(src.integrand(a + half * (x + 1.0))?.unwrap_or(0.0));
                }
                let whole: f64 = half * coll.weights.iter().zip(&g).map(|(w, v)| w * v).sum::<f64>();
                Ok((g, whole))
            })
            .collect::<Result<_>>()?;

        // Running cumulative integral at each cell's left knot.
        let mut start = Vec::with_capacity(cells);
        let mut acc = 0.0;
        for (_, whole) in &per_cell {
            start.push(acc);
            acc += whole;
        }

        let log_rows: Vec<[f64; CLOSED]> = (0..cells)
            .into_par_iter()
            .map(|i| -> Result<[f64; CLOSED]> {
                let (a, b) = (knots[i], knots[i + 1]);
                let half = 0.5 * (b - a);
                let g = &per_cell[i].0;
                let mut row = [0.0; CLOSED];
                row[0] = src.log_survival_from(a, false, start[i])?;
                for j in 0..NODES {
                    let cum: f64 = start[i] + half * (0..NODES).map(|k| coll.left[j][k] * g[k]).sum::<f64>();
                    let t = a + half * (coll.nodes[j] + 1.0);
                    row[j + 1] = src.log_survival_from(t, false, cum)?;
                }
                row[CLOSED - 1] = src.log_survival_from(b, true, start[i] + per_cell[i].1)?;
                Ok(row)
            })
            .collect::<Result<_>>()?;
        let log_s: Vec<f64> = log_rows.iter().flatten().copied().collect();

        let mrl = if src.needs_mrl() {
            let top = *knots.last().unwrap();
            let mut next = src.seed_mrl(top, log_rows[cells - 1][CLOSED - 1])?;
            let mut out = vec![0.0; cells * CLOSED];
            for i in (0..cells).rev() {
                let half = 0.5 * (knots[i + 1] - knots[i]);
                let l = &log_rows[i];
                let lb = l[CLOSED - 1];
                let row = &mut out[i * CLOSED..(i + 1) * CLOSED];
                row[CLOSED - 1] = next;
                for j in 0..NODES {
                    let lj = l[j + 1];
                    let inner: f64 = (0..NODES)
                        .map(|k| coll.right[j][k] * (l[k + 1] - lj).exp())
                        .sum();
                    row[j + 1] = half * inner + (lb - lj).exp() * next;
                }
                let la = l[0];
                let inner: f64 = (0..NODES)
                    .map(|k| coll.weights[k] * (l[k + 1] - la).exp())
                    .sum();
                row[0] = half * inner + (lb - la).exp() * next;
                next = row[0];
            }
            Some(out)
        } else {
            None
        };

        Ok(Table { knots, log_s, mrl })
    }
}

fn place_knots<S: TableSource>(src: &S, upper: f64, extend_to: f64, budget: usize) -> Vec<f64> {
    let mut fixed: Vec<f64> = src
        .knots()
        .into_iter()
        .filter(|&k| k > 0.0 && k < extend_to)
        .collect();
    fixed.push(extend_to.max(upper));
    let mut knots = vec![0.0];
    let mut a = 0.0;
    let mut fi = 0;
    while fi < fixed.len() {
        if a >= upper && knots.len() > budget {
            break;
        }
        let stop = fixed[fi];
        let mut w = base_width(a);
        if let Some(r) = src.rate(a) {
            let r2 = src.rate((a + w).min(stop)).unwrap_or(r);
            let rmax = r.max(r2);
            if rmax > 0.0 && rmax.is_finite() {
                w = w.min(1.0 / rmax);
            }
        }
        let w = w.max(1e-6 * (1.0 + a));
        let b = if stop - a < 1.25 * w { stop } else { a + w };
        knots.push(b);
        a = b;
        if b >= stop {
            fi += 1;
        }
    }
    knots
}
