//! Grid-based shape tests with an explicit "boundary" outcome.
//!
//! Every test compares a discrepancy `d` against the threshold
//! `tol·max(1, |values involved|)`. If every `|d|` is within threshold the
//! verdict is [`Verdict::Boundary`]; otherwise any violation beyond the
//! threshold is [`Verdict::Fails`] (witness at the first one), else
//! [`Verdict::Holds`].

use std::fmt;

use rayon::prelude::*;

use super::{Grid, NumericError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Holds,
    Fails,
    Boundary,
}

impl Verdict {
    /// Holds in the non-strict sense (boundary counts).
    pub fn holds(self) -> bool {
        !matches!(self, Verdict::Fails)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Boundary => "boundary",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ShapeKind {
    Increasing,
    Decreasing,
    Convex,
    Concave,
    LogConvex,
    LogConcave,
    /// `lhs ≥ rhs` pointwise.
    AtLeast,
}

impl ShapeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ShapeKind::Increasing => "increasing",
            ShapeKind::Decreasing => "decreasing",
            ShapeKind::Convex => "convex",
            ShapeKind::Concave => "concave",
            ShapeKind::LogConvex => "logconvex",
            ShapeKind::LogConcave => "logconcave",
            ShapeKind::AtLeast => "nonnegative",
        }
    }
}

/// Where a shape test was violated (or came closest to it).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Witness {
    pub t: f64,
    /// Second coordinate for two-dimensional tests.
    pub x: Option<f64>,
    pub violation: f64,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.x {
            Some(x) => write!(f, "(t={:.6}, x={:.6}) by {:.3e}", self.t, x, self.violation),
            None => write!(f, "t={:.6} by {:.3e}", self.t, self.violation),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShapeVerdict {
    pub kind: ShapeKind,
    pub verdict: Verdict,
    /// First violation beyond tolerance; present exactly when the test fails.
    pub witness: Option<Witness>,
    /// Largest violation in the violating direction (0 if none).
    pub max_violation: f64,
    pub tolerance: f64,
}

impl ShapeVerdict {
    pub fn holds(&self) -> bool {
        self.verdict.holds()
    }
}

/// Accumulates discrepancies, positive meaning "violates".
pub(crate) struct Tally {
    tol: f64,
    all_small: bool,
    first: Option<Witness>,
    max_violation: f64,
}

impl Tally {
    pub(crate) fn new(tol: f64) -> Self {
        Self {
            tol,
            all_small: true,
            first: None,
            max_violation: 0.0,
        }
    }

    /// `d` is the signed discrepancy (positive = violation), `scale` the
    /// magnitude of the values involved.
    pub(crate) fn push(&mut self, t: f64, x: Option<f64>, d: f64, scale: f64) {
        let thr = self.tol * scale.max(1.0);
        if d.abs() > thr {
            self.all_small = false;
        }
        if d > self.max_violation {
            self.max_violation = d;
        }
        if d > thr && self.first.is_none() {
            self.first = Some(Witness { t, x, violation: d });
        }
    }

    pub(crate) fn finish(self, kind: ShapeKind) -> ShapeVerdict {
        let verdict = if self.all_small {
            Verdict::Boundary
        } else if self.first.is_some() {
            Verdict::Fails
        } else {
            Verdict::Holds
        };
        ShapeVerdict {
            kind,
            verdict,
            witness: if verdict == Verdict::Fails { self.first } else { None },
            max_violation: self.max_violation,
            tolerance: self.tol,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Curvature {
    Convex,
    Concave,
}

fn check_lengths(ts: &[f64], ys: &[f64], min: usize) -> Result<(), NumericError> {
    if ts.len() != ys.len() {
        return Err(NumericError::InvalidGrid(format!(
            "{} nodes but {} values",
            ts.len(),
            ys.len()
        )));
    }
    if ts.len() < min {
        return Err(NumericError::InvalidGrid(format!(
            "shape test needs at least {min} nodes, got {}",
            ts.len()
        )));
    }
    Ok(())
}

/// Monotonicity of sampled values; the witness is the left node of the
/// first violating pair.
pub fn monotone_samples(
    ts: &[f64],
    ys: &[f64],
    dir: Direction,
    tol: f64,
) -> Result<ShapeVerdict, NumericError> {
    check_lengths(ts, ys, 2)?;
    let mut tally = Tally::new(tol);
    for k in 0..ys.len() - 1 {
        let diff = ys[k + 1] - ys[k];
        let d = match dir {
            Direction::Increasing => -diff,
            Direction::Decreasing => diff,
        };
        tally.push(ts[k], None, d, ys[k].abs().max(ys[k + 1].abs()));
    }
    let kind = match dir {
        Direction::Increasing => ShapeKind::Increasing,
        Direction::Decreasing => ShapeKind::Decreasing,
    };
    Ok(tally.finish(kind))
}

/// Convexity by divided differences; reduces to `y0 − 2y1 + y2` on a
/// uniform grid. The witness is the middle node.
pub fn convex_samples(
    ts: &[f64],
    ys: &[f64],
    curv: Curvature,
    tol: f64,
) -> Result<ShapeVerdict, NumericError> {
    check_lengths(ts, ys, 3)?;
    let mut tally = Tally::new(tol);
    for k in 0..ys.len() - 2 {
        let s0 = (ys[k + 1] - ys[k]) / (ts[k + 1] - ts[k]);
        let s1 = (ys[k + 2] - ys[k + 1]) / (ts[k + 2] - ts[k + 1]);
        let d2 = (s1 - s0) * (ts[k + 2] - ts[k]) / 2.0;
        let d = match curv {
            Curvature::Convex => -d2,
            Curvature::Concave => d2,
        };
        let scale = ys[k].abs().max(ys[k + 1].abs()).max(ys[k + 2].abs());
        tally.push(ts[k + 1], None, d, scale);
    }
    let kind = match curv {
        Curvature::Convex => ShapeKind::Convex,
        Curvature::Concave => ShapeKind::Concave,
    };
    Ok(tally.finish(kind))
}

/// Log-convexity (or log-concavity): the convexity test applied to `ln y`.
pub fn log_convex_samples(
    ts: &[f64],
    ys: &[f64],
    curv: Curvature,
    tol: f64,
) -> Result<ShapeVerdict, NumericError> {
    check_lengths(ts, ys, 3)?;
    let mut logs = Vec::with_capacity(ys.len());
    for (&t, &y) in ts.iter().zip(ys) {
        if !(y > 0.0) {
            return Err(NumericError::NonPositive { t, value: y });
        }
        logs.push(y.ln());
    }
    let mut v = convex_samples(ts, &logs, curv, tol)?;
    v.kind = match curv {
        Curvature::Convex => ShapeKind::LogConvex,
        Curvature::Concave => ShapeKind::LogConcave,
    };
    Ok(v)
}

/// Pointwise `lhs ≥ rhs`.
pub fn at_least_samples(
    ts: &[f64],
    lhs: &[f64],
    rhs: &[f64],
    tol: f64,
) -> Result<ShapeVerdict, NumericError> {
    check_lengths(ts, lhs, 1)?;
    check_lengths(ts, rhs, 1)?;
    let mut tally = Tally::new(tol);
    for k in 0..ts.len() {
        tally.push(ts[k], None, rhs[k] - lhs[k], lhs[k].abs().max(rhs[k].abs()));
    }
    Ok(tally.finish(ShapeKind::AtLeast))
}

/// Evaluate `f` at every grid node (in parallel, results in node order).
pub fn sample<F, E>(f: F, grid: &Grid) -> Result<(Vec<f64>, Vec<f64>), E>
where
    F: Fn(f64) -> Result<f64, E> + Sync,
    E: Send,
{
    let ts = grid.nodes();
    let ys = ts.par_iter().map(|&t| f(t)).collect::<Result<Vec<_>, E>>()?;
    Ok((ts, ys))
}

pub fn check_monotone<F, E>(f: F, grid: &Grid, dir: Direction, tol: f64) -> Result<ShapeVerdict, E>
where
    F: Fn(f64) -> Result<f64, E> + Sync,
    E: Send + From<NumericError>,
{
    let (ts, ys) = sample(f, grid)?;
    Ok(monotone_samples(&ts, &ys, dir, tol)?)
}

pub fn check_convex<F, E>(f: F, grid: &Grid, curv: Curvature, tol: f64) -> Result<ShapeVerdict, E>
where
    F: Fn(f64) -> Result<f64, E> + Sync,
    E: Send + From<NumericError>,
{
    let (ts, ys) = sample(f, grid)?;
    Ok(convex_samples(&ts, &ys, curv, tol)?)
}

pub fn check_logconvex<F, E>(f: F, grid: &Grid, curv: Curvature, tol: f64) -> Result<ShapeVerdict, E>
where
    F: Fn(f64) -> Result<f64, E> + Sync,
    E: Send + From<NumericError>,
{
    let (ts, ys) = sample(f, grid)?;
    Ok(log_convex_samples(&ts, &ys, curv, tol)?)
}

pub fn check_at_least<F, G, E>(lhs: F, rhs: G, grid: &Grid, tol: f64) -> Result<ShapeVerdict, E>
where
    F: Fn(f64) -> Result<f64, E> + Sync,
    G: Fn(f64) -> Result<f64, E> + Sync,
    E: Send + From<NumericError>,
{
    let (ts, l) = sample(lhs, grid)?;
    let (_, r) = sample(rhs, grid)?;
    Ok(at_least_samples(&ts, &l, &r, tol)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    type R = Result<f64, NumericError>;

    fn grid(a: f64, b: f64) -> Grid {
        Grid::new(a, b, 2001).unwrap()
    }

    #[test]
    fn monotone_examples() {
        let g = grid(0.0, 10.0);
        let v = check_monotone(|t| -> R { Ok(t) }, &g, Direction::Increasing, 1e-9).unwrap();
        assert_eq!(v.verdict, Verdict::Holds);
        let g20 = grid(0.0, 20.0);
        let logistic = |t: f64| -> R { Ok((1.0 - (-t).exp()) / (1.0 + (-t).exp())) };
        let v = check_monotone(logistic, &g20, Direction::Increasing, 1e-9).unwrap();
        assert_eq!(v.verdict, Verdict::Holds);
        let v = check_monotone(|_| -> R { Ok(1.0) }, &g, Direction::Increasing, 1e-9).unwrap();
        assert_eq!(v.verdict, Verdict::Boundary);
        let v = check_monotone(|t| -> R { Ok((t - 3.0).powi(2)) }, &g, Direction::Decreasing, 1e-9)
            .unwrap();
        assert_eq!(v.verdict, Verdict::Fails);
        let w = v.witness.unwrap();
        assert!((w.t - 3.0).abs() < 0.01);
    }

    #[test]
    fn convexity_examples() {
        let g = grid(0.0, 10.0);
        // ln e^{-t} is affine: boundary, which counts as logconvex
        let v = check_logconvex(|t| -> R { Ok((-t).exp()) }, &g, Curvature::Convex, 1e-9).unwrap();
        assert_eq!(v.verdict, Verdict::Boundary);
        assert!(v.holds());
        let v = check_convex(|t| -> R { Ok(t / (1.0 + t)) }, &g, Curvature::Concave, 1e-9).unwrap();
        assert_eq!(v.verdict, Verdict::Holds);
        let v = check_convex(|t| -> R { Ok(2.0 * t - 1.0) }, &g, Curvature::Convex, 1e-9).unwrap();
        assert_eq!(v.verdict, Verdict::Boundary);
        let v = check_convex(|t| -> R { Ok(2.0 * t - 1.0) }, &g, Curvature::Concave, 1e-9).unwrap();
        assert_eq!(v.verdict, Verdict::Boundary);
    }

    #[test]
    fn logconvex_failure_for_inverse_quadratic() {
        // d²/dt² ln(1/(2+t²)) = −(4−2t²)/(2+t²)², negative for t < √2
        let g = grid(0.0, 3.0);
        let v = check_logconvex(|t| -> R { Ok(1.0 / (2.0 + t * t)) }, &g, Curvature::Convex, 1e-9)
            .unwrap();
        assert_eq!(v.verdict, Verdict::Fails);
        let w = v.witness.unwrap();
        assert!(w.t < 2f64.sqrt());
        assert!(w.violation > v.tolerance);
    }

    #[test]
    fn log_variant_rejects_nonpositive() {
        let g = grid(0.0, 1.0);
        let e = check_logconvex(|t| -> R { Ok(t) }, &g, Curvature::Convex, 1e-9).unwrap_err();
        assert!(matches!(e, NumericError::NonPositive { t, .. } if t == 0.0));
    }

    #[test]
    fn sign_test() {
        let g = grid(0.0, 5.0);
        let v = check_at_least(|t| -> R { Ok(t) }, |_| -> R { Ok(0.0) }, &g, 1e-9).unwrap();
        assert_eq!(v.verdict, Verdict::Holds);
        let v = check_at_least(|t| -> R { Ok(t) }, |_| -> R { Ok(1.0) }, &g, 1e-9).unwrap();
        assert_eq!(v.verdict, Verdict::Fails);
        assert_eq!(v.witness.unwrap().t, 0.0);
    }
}
