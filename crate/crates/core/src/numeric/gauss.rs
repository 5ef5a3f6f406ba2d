//! Gauss–Legendre rules and per-cell spectral integration.

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like initial guess, then Newton on P_n
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        dp = if d != 0.0 { d } else { dp };
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Barycentric weights for interpolation through `xs`.
pub fn barycentric_weights(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .enumerate()
        .map(|(k, &xk)| {
            let prod: f64 = xs
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &xj)| xk - xj)
                .product();
            1.0 / prod
        })
        .collect()
}

/// Evaluate the interpolant through `(xs, ys)` at `x`.
pub fn barycentric_eval(xs: &[f64], bw: &[f64], ys: &[f64], x: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..xs.len() {
        let d = x - xs[k];
        if d == 0.0 {
            return ys[k];
        }
        let c = bw[k] / d;
        num += c * ys[k];
        den += c;
    }
    num / den
}

/// Collocation data shared by every table cell.
#[derive(Clone, Debug)]
pub struct Collocation {
    /// Gauss–Legendre nodes on `[-1, 1]`.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `left[j][i] = ∫_{-1}^{x_j} ℓ_i`, `ℓ_i` the Lagrange basis on the nodes.
    pub left: Vec<Vec<f64>>,
    /// `right[j][i] = ∫_{x_j}^{1} ℓ_i`.
    pub right: Vec<Vec<f64>>,
    /// Nodes `[-1, x_1, .., x_n, 1]` used for interpolation inside a cell.
    pub closed_nodes: Vec<f64>,
    pub closed_weights: Vec<f64>,
}

impl Collocation {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        let basis_w = barycentric_weights(&nodes);
        let mut left = vec![vec![0.0; n]; n];
        let mut right = vec![vec![0.0; n]; n];
        let mut unit = vec![0.0; n];
        for j in 0..n {
            let xj = nodes[j];
            let half = 0.5 * (xj + 1.0);
            for i in 0..n {
                unit.iter_mut().for_each(|u| *u = 0.0);
                unit[i] = 1.0;
                // ℓ_i has degree n−1, so the n-point rule on [-1, x_j] is exact
                let s: f64 = nodes
                    .iter()
                    .zip(&weights)
                    .map(|(&z, &w)| {
                        let x = -1.0 + half * (z + 1.0);
                        w * barycentric_eval(&nodes, &basis_w, &unit, x)
                    })
                    .sum();
                left[j][i] = half * s;
                right[j][i] = weights[i] - left[j][i];
            }
        }
        let mut closed_nodes = Vec::with_capacity(n + 2);
        closed_nodes.push(-1.0);
        closed_nodes.extend_from_slice(&nodes);
        closed_nodes.push(1.0);
        let closed_weights = barycentric_weights(&closed_nodes);
        Self {
            nodes,
            weights,
            left,
            right,
            closed_nodes,
            closed_weights,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}
