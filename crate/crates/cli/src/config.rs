use std::path::Path;

use anyhow::{bail, Context, Result};
use pgmt_core::flow::{CurveSpec, FlowOptions};
use pgmt_core::measure::dyadic_ladder;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub flow: FlowConfig,
    /// Vertex count for every curve of the registry runs.
    pub registry_vertices: usize,
    pub ladder: LadderConfig,
    pub coarea: CoareaConfig,
    pub monotonicity: MonotonicityConfig,
    pub tracks: TracksConfig,
    pub translator: TranslatorConfig,
    pub tolerances: Tolerances,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowConfig {
    pub curve: CurveSpec,
    pub vertices: usize,
    pub options: FlowOptions,
}

/// Dyadic ladder `2^-min_exponent .. 2^-max_exponent`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LadderConfig {
    pub min_exponent: i32,
    pub max_exponent: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoareaConfig {
    pub time_nodes: usize,
    /// Finest exponent for calibration boxes in `R^{1,2}`.
    pub k2_max_exponent: i32,
    /// Finest exponents of the map checks for `k = 1` and `k = 2`.
    pub map_max_exponent: [i32; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonotonicityConfig {
    pub samples: usize,
    pub center_spacing: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TracksConfig {
    /// Vertices and snapshots of the analytic shrinking-circle track.
    pub circle_vertices: usize,
    pub circle_snapshots: usize,
    pub lambdas: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TranslatorConfig {
    pub r0: f64,
    /// Values of `eps / r0`, decreasing.
    pub eps_ratios: Vec<f64>,
    pub steps: usize,
    pub lambdas: Vec<f64>,
    pub grim_reaper_eps: f64,
    pub grim_reaper_samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub circle_tau: f64,
    pub ellipse_tau: f64,
    pub area_rate: f64,
    pub time_segment: f64,
    pub spatial_null: f64,
    pub coarea_spread: f64,
    pub area_formula: f64,
    pub volume: f64,
    pub monotone: f64,
    pub self_shrinker: f64,
    pub route: f64,
    pub scaling_exponent: f64,
    pub el_residual: f64,
    pub grim_reaper: f64,
    pub scaling_covariance: f64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 7,
            flow: FlowConfig::default(),
            registry_vertices: 256,
            ladder: LadderConfig::default(),
            coarea: CoareaConfig::default(),
            monotonicity: MonotonicityConfig::default(),
            tracks: TracksConfig::default(),
            translator: TranslatorConfig::default(),
            tolerances: Tolerances::default(),
        }
    }
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            curve: CurveSpec::Circle { r0: 1.0 },
            vertices: 256,
            options: FlowOptions::default(),
        }
    }
}

impl Default for LadderConfig {
    fn default() -> Self {
        Self {
            min_exponent: 3,
            max_exponent: 9,
        }
    }
}

impl Default for CoareaConfig {
    fn default() -> Self {
        Self {
            time_nodes: 64,
            k2_max_exponent: 6,
            map_max_exponent: [7, 5],
        }
    }
}

impl Default for MonotonicityConfig {
    fn default() -> Self {
        Self {
            samples: 40,
            center_spacing: 0.1,
        }
    }
}

impl Default for TracksConfig {
    fn default() -> Self {
        Self {
            circle_vertices: 64,
            circle_snapshots: 64,
            lambdas: vec![0.5, 2.0],
        }
    }
}

impl Default for TranslatorConfig {
    fn default() -> Self {
        Self {
            r0: 1.0,
            eps_ratios: vec![0.2, 0.1, 0.05],
            steps: 2000,
            lambdas: vec![0.5, 2.0],
            grim_reaper_eps: 0.1,
            grim_reaper_samples: 1001,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            circle_tau: 0.01,
            ellipse_tau: 0.02,
            area_rate: 0.01,
            time_segment: 0.005,
            spatial_null: 1e-2,
            coarea_spread: 0.1,
            area_formula: 0.05,
            volume: 0.02,
            monotone: 1e-3,
            self_shrinker: 1e-3,
            route: 0.1,
            scaling_exponent: 0.03,
            el_residual: 1e-6,
            grim_reaper: 1e-8,
            scaling_covariance: 1e-6,
        }
    }
}

impl Tolerances {
    fn values(&self) -> [f64; 15] {
        [
            self.circle_tau,
            self.ellipse_tau,
            self.area_rate,
            self.time_segment,
            self.spatial_null,
            self.coarea_spread,
            self.area_formula,
            self.volume,
            self.monotone,
            self.self_shrinker,
            self.route,
            self.scaling_exponent,
            self.el_residual,
            self.grim_reaper,
            self.scaling_covariance,
        ]
    }
}

impl Config {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn ladder(&self) -> Vec<f64> {
        dyadic_ladder(self.ladder.min_exponent, self.ladder.max_exponent)
    }

    pub fn validate(&self) -> Result<()> {
        if self.tolerances.values().iter().any(|t| !(*t > 0.0)) {
            bail!("all tolerances must be positive");
        }
        if self.ladder.max_exponent <= self.ladder.min_exponent {
            bail!("ladder needs max_exponent > min_exponent");
        }
        let [k1, k2] = self.coarea.map_max_exponent;
        if k1 <= self.ladder.min_exponent
            || k2 <= self.ladder.min_exponent
            || self.coarea.k2_max_exponent <= self.ladder.min_exponent
        {
            bail!("every ladder needs at least two scales");
        }
        if self.flow.vertices < 8 || self.registry_vertices < 8 {
            bail!("flows need at least 8 vertices");
        }
        if self.monotonicity.samples < 20 {
            bail!("monotonicity needs at least 20 sample times");
        }
        if self.translator.eps_ratios.is_empty()
            || self.translator.eps_ratios.iter().any(|e| !(*e > 0.0))
        {
            bail!("eps_ratios must be positive");
        }
        Ok(())
    }
}
