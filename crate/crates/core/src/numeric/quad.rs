//! Adaptive Simpson quadrature on finite and semi-infinite intervals.

use super::NumericError;

const INITIAL_PANELS: usize = 8;
const MAX_DEPTH: u32 = 48;
const MAX_EVALUATIONS: usize = 4_000_000;
/// Stand-in for `s = 1` in the tail map, where `u` is infinite.
const TAIL_END: f64 = 1.0 - 1e-12;

struct Simpson<'f, F> {
    f: &'f mut F,
    evaluations: usize,
    /// Error estimate of panels that hit the depth or budget limit.
    unresolved: f64,
}

impl<F, E> Simpson<'_, F>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<NumericError>,
{
    fn eval(&mut self, x: f64) -> Result<f64, E> {
        self.evaluations += 1;
        let v = (self.f)(x)?;
        if !v.is_finite() {
            return Err(NumericError::NonFinite { t: x }.into());
        }
        Ok(v)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        &mut self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64, E> {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let flm = self.eval(lm)?;
        let frm = self.eval(rm)?;
        let h = b - a;
        let left = h / 12.0 * (fa + 4.0 * flm + fm);
        let right = h / 12.0 * (fm + 4.0 * frm + fb);
        let both = left + right;
        let delta = both - whole;
        // roundoff floor keeps refinement from chasing the last ulp
        let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
        if delta.abs() <= 15.0 * tol.max(floor) {
            return Ok(both + delta / 15.0);
        }
        if depth == 0 || self.evaluations > MAX_EVALUATIONS || m <= a || m >= b {
            self.unresolved += delta.abs() / 15.0;
            return Ok(both + delta / 15.0);
        }
        let l = self.refine(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
        let r = self.refine(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
        Ok(l + r)
    }
}

/// Result of a quadrature together with bookkeeping.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Error estimate left in panels that could not be refined further.
    pub unresolved: f64,
    pub evaluations: usize,
}

fn simpson_panels<F, E>(f: &mut F, a: f64, b: f64, tol: f64) -> Result<Quadrature, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<NumericError>,
{
    let mut s = Simpson {
        f,
        evaluations: 0,
        unresolved: 0.0,
    };
    let h = (b - a) / INITIAL_PANELS as f64;
    let mut total = 0.0;
    let mut fa = s.eval(a)?;
    for k in 0..INITIAL_PANELS {
        let pa = a + k as f64 * h;
        let pb = if k + 1 == INITIAL_PANELS { b } else { pa + h };
        let pm = 0.5 * (pa + pb);
        let fm = s.eval(pm)?;
        let fb = s.eval(pb)?;
        let whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
        total += s.refine(pa, pb, fa, fm, fb, whole, tol / INITIAL_PANELS as f64, MAX_DEPTH)?;
        fa = fb;
    }
    Ok(Quadrature {
        value: total,
        unresolved: s.unresolved,
        evaluations: s.evaluations,
    })
}

fn finish<E: From<NumericError>>(q: Quadrature, tol: f64) -> Result<f64, E> {
    if q.unresolved > tol {
        return Err(NumericError::NoConvergence {
            estimate: q.value,
            error: q.unresolved,
        }
        .into());
    }
    Ok(q.value)
}

/// `∫_a^b f` to absolute tolerance `tol`. An infinite `b` is handled by
/// [`integrate_tail`] with unit scale.
pub fn integrate<F, E>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<NumericError>,
{
    if b.is_infinite() {
        return integrate_tail(f, a, 1.0, tol);
    }
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return integrate(f, b, a, tol).map(|v: f64| -v);
    }
    let q = simpson_panels(&mut f, a, b, tol)?;
    finish(q, tol)
}

/// `∫_a^∞ f` through `u = a + σ·s/(1−s)`, `s ∈ [0, 1)`.
///
/// `sigma` should be the length scale on which `f` decays; the integrand in
/// `s` is then smooth and vanishes (or stays bounded) at `s = 1`.
pub fn integrate_tail<F, E>(mut f: F, a: f64, sigma: f64, tol: f64) -> Result<f64, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<NumericError>,
{
    let mut g = |s: f64| -> Result<f64, E> {
        let s = s.min(TAIL_END);
        let one_minus = 1.0 - s;
        let u = a + sigma * s / one_minus;
        let v = f(u)?;
        if v == 0.0 {
            return Ok(0.0);
        }
        Ok(v * sigma / (one_minus * one_minus))
    };
    let q = simpson_panels(&mut g, 0.0, 1.0, tol)?;
    finish(q, tol)
}

/// Outcome of the heuristic divergence test for `∫_0^∞ f`.
#[derive(Clone, Debug, PartialEq)]
pub struct DivergenceTest {
    pub divergent: bool,
    /// `∫_0^horizon f`.
    pub partial: f64,
    /// Increments over `[0,1], [1,10], [10,100], …`.
    pub decades: Vec<f64>,
}

/// Heuristic test whether `∫_0^∞ f = ∞` for a nonnegative `f`.
///
/// Divergent when the integral up to `horizon` exceeds `threshold`, or when
/// the last decade contributes at least 0.9 of the previous one (growth no
/// slower than logarithmic).
pub fn divergence_test<F, E>(
    mut f: F,
    horizon: f64,
    threshold: f64,
    tol: f64,
) -> Result<DivergenceTest, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<NumericError>,
{
    let mut edges = vec![0.0, 1.0];
    while *edges.last().unwrap() < horizon {
        let next = (edges.last().unwrap() * 10.0).min(horizon);
        edges.push(next);
    }
    let mut decades = Vec::with_capacity(edges.len() - 1);
    for w in edges.windows(2) {
        let rel_tol = tol * (1.0 + w[1]);
        decades.push(integrate(&mut f, w[0], w[1], rel_tol)?);
    }
    let partial: f64 = decades.iter().sum();
    let n = decades.len();
    let decade_ratio = if n >= 3 && decades[n - 2] > 0.0 {
        decades[n - 1] / decades[n - 2]
    } else {
        0.0
    };
    Ok(DivergenceTest {
        divergent: partial > threshold || decade_ratio >= 0.9,
        partial,
        decades,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    type R = Result<f64, NumericError>;

    #[test]
    fn exponential_tail() {
        let v: f64 = integrate(|u| -> R { Ok((-u).exp()) }, 0.0, f64::INFINITY, 1e-9).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn log_two() {
        let v: f64 = integrate(|u| -> R { Ok(1.0 / (1.0 + u)) }, 0.0, 1.0, 1e-12).unwrap();
        assert!((v - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn cubic_is_exact() {
        let f = |u: f64| -> R { Ok(3.0 * u * u * u - u * u + 2.0) };
        let v: f64 = integrate(f, -1.0, 2.0, 1e-12).unwrap();
        let exact = 0.75 * 16.0 - 8.0 / 3.0 + 4.0 - (0.75 + 1.0 / 3.0 - 2.0);
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn heavy_tail_with_scale() {
        // ∫_{1000}^∞ du/(1+u)^2 = 1/1001
        let v: f64 = integrate_tail(|u| -> R { Ok((1.0 + u).powi(-2)) }, 1000.0, 1001.0, 1e-14).unwrap();
        assert!((v - 1.0 / 1001.0).abs() < 1e-13);
    }

    #[test]
    fn divergence_examples() {
        let logistic = |u: f64| -> R { Ok(1.0 / (1.0 + (-u).exp())) };
        let d = divergence_test(logistic, 1e6, 1e4, 1e-9).unwrap();
        assert!(d.divergent);
        assert!(d.partial >= 1e5);
        let harmonic = |u: f64| -> R { Ok(1.0 / (1.0 + 2.0 * u)) };
        assert!(divergence_test(harmonic, 1e6, 1e4, 1e-9).unwrap().divergent);
        let square = |u: f64| -> R { Ok((1.0 + u).powi(-2)) };
        let d = divergence_test(square, 1e6, 1e4, 1e-9).unwrap();
        assert!(!d.divergent);
        assert!((d.partial - (1.0 - 1.0 / 1_000_001.0)).abs() < 1e-6);
    }

    #[test]
    fn non_convergence_is_reported() {
        let spike = |u: f64| -> R { Ok(1.0 / u.abs().sqrt().max(1e-300)) };
        let r: Result<f64, NumericError> = integrate(spike, -1.0, 1.0, 1e-15);
        match r {
            Err(NumericError::NoConvergence { estimate, error }) => {
                assert!(estimate.is_finite() && error > 0.0);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
