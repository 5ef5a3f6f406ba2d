use super::NumericError;

/// Uniform grid `lower + k·(upper−lower)/(points−1)`, `k = 0..points`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    lower: f64,
    upper: f64,
    points: usize,
}

impl Grid {
    pub fn new(lower: f64, upper: f64, points: usize) -> Result<Self, NumericError> {
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(NumericError::InvalidGrid(format!(
                "need finite lower < upper, got [{lower}, {upper}]"
            )));
        }
        if points < 2 {
            return Err(NumericError::InvalidGrid(format!(
                "need at least 2 points, got {points}"
            )));
        }
        Ok(Self {
            lower,
            upper,
            points,
        })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        (self.upper - self.lower) / (self.points - 1) as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        if k + 1 == self.points {
            // exact right end, no accumulated rounding
            return self.upper;
        }
        self.lower + k as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.node(k)).collect()
    }
}
