/// First horizon tried when choosing the analysis grid.
pub const HORIZON_START: f64 = 20.0;
/// Largest horizon the automatic choice will reach.
pub const HORIZON_CAP: f64 = 1e4;
/// The horizon doubles until the survival drops to this level.
pub const SURVIVAL_FLOOR: f64 = 1e-8;

/// Numerical knobs shared by every analysis.
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    /// Nodes of the analysis grid on `[0, T]`.
    pub grid_points: usize,
    /// Fixed `T`; `None` picks it from the base survival.
    pub horizon: Option<f64>,
    /// Shape-test tolerance (relative to `max(1, |f|)`).
    pub tol: f64,
    /// Nodes per axis of the two-dimensional NBU grid on `[0, T/2]²`.
    pub nbu_points: usize,
    /// Upper limit for the divergence heuristic.
    pub divergence_horizon: f64,
    /// The divergence heuristic fires when the partial integral exceeds this.
    pub divergence_threshold: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            grid_points: 2001,
            horizon: None,
            tol: 1e-9,
            nbu_points: 200,
            divergence_horizon: 1e6,
            divergence_threshold: 1e4,
        }
    }
}
