use num_traits::Signed;

use super::Grid;
use crate::error::{Error, Result};
use crate::rational::{to_f64, Q};

/// Samples of `(|x|² + δ²)^{-b/2}` on the fundamental cell (not periodized).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightField {
    pub grid: Grid,
    pub b: Q,
    pub delta: f64,
    pub values: Vec<f64>,
}

pub fn weight(grid: &Grid, b: &Q, delta: f64) -> Result<WeightField> {
    if !b.is_positive() {
        return Err(Error::InvalidParams(format!("weight exponent b must be positive (got {b})")));
    }
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::InvalidParams(format!("regularization delta must be >= 0 (got {delta})")));
    }
    if delta == 0.0 && grid.has_origin_node() {
        return Err(Error::Singularity);
    }
    let half_b = to_f64(b) / 2.0;
    let d2 = delta * delta;
    let values = (0..grid.len())
        .map(|i| {
            let x = grid.position(i);
            (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + d2).powf(-half_b)
        })
        .collect();
    Ok(WeightField { grid: *grid, b: b.clone(), delta, values })
}

impl WeightField {
    /// The weight multiplied by `c` (used to switch the nonlinearity off).
    pub fn scaled(&self, c: f64) -> WeightField {
        WeightField { values: self.values.iter().map(|w| w * c).collect(), ..self.clone() }
    }
}
