//! Grid estimates of parabolic Hausdorff content and time slicing.

mod content;
mod cover;
pub(crate) mod grid;
mod slice;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{invalid, Result};

pub use content::{par_content, par_content_weighted, WeightFn};
pub use cover::{par_grid_cover, ParabolicBox};
pub use slice::{restrict_to_slab, slice_at_time};

/// Normalization used by every content value.
pub const CONVENTION: &str = "alpha(s) * (par_diam / 2)^s";

/// `alpha(s) = pi^(s/2) / Gamma(s/2 + 1)`, the volume of the unit ball for integer `s`.
pub fn alpha(s: f64) -> f64 {
    std::f64::consts::PI.powf(0.5 * s) / gamma(0.5 * s + 1.0)
}

/// Dyadic ladder `2^-j0, ..., 2^-j1`.
pub fn dyadic_ladder(j0: i32, j1: i32) -> Vec<f64> {
    (j0..=j1).map(|j| 2f64.powi(-j)).collect()
}

/// Default ladder `2^-3 .. 2^-9`.
pub fn default_ladder() -> Vec<f64> {
    dyadic_ladder(3, 9)
}

pub(crate) fn validate_ladder(ladder: &[f64]) -> Result<()> {
    if ladder.is_empty() {
        return Err(invalid("ladder", "must be nonempty"));
    }
    if ladder.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
        return Err(invalid("ladder", "scales must be positive"));
    }
    if ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid("ladder", "must be strictly decreasing"));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderEntry {
    pub delta: f64,
    pub value: f64,
}

/// Grid content of a set along a ladder of scales.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub s: f64,
    pub convention: String,
    pub ladder: Vec<LadderEntry>,
    pub extrapolated: f64,
}

impl MeasureEstimate {
    /// Builds an estimate, extrapolating the last two values to `delta -> 0`
    /// under first-order convergence (clamped at zero).
    pub fn from_values(s: f64, ladder: &[f64], values: &[f64]) -> Self {
        let entries: Vec<LadderEntry> = ladder
            .iter()
            .zip(values)
            .map(|(&delta, &value)| LadderEntry { delta, value })
            .collect();
        let extrapolated = match entries.len() {
            0 => 0.0,
            1 => entries[0].value,
            n => {
                let (a, b) = (&entries[n - 2], &entries[n - 1]);
                let q = a.delta / b.delta;
                ((q * b.value - a.value) / (q - 1.0)).max(0.0)
            }
        };
        Self {
            s,
            convention: CONVENTION.to_string(),
            ladder: entries,
            extrapolated,
        }
    }

    /// Value at the finest scale.
    pub fn finest(&self) -> f64 {
        self.ladder.last().map_or(0.0, |e| e.value)
    }

    /// Relative change between the last two ladder values.
    pub fn last_step_change(&self) -> f64 {
        let n = self.ladder.len();
        if n < 2 {
            return 0.0;
        }
        let (a, b) = (self.ladder[n - 2].value, self.ladder[n - 1].value);
        if b == 0.0 {
            return if a == 0.0 { 0.0 } else { f64::INFINITY };
        }
        ((b - a) / b).abs()
    }

    pub fn to_csv(&self, path: &std::path::Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["delta", "value"])?;
        for e in &self.ladder {
            w.write_record([e.delta.to_string(), e.value.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}
