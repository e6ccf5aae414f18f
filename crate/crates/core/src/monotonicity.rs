//! Gaussian density along flow histories and the extinction-time bounds.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::flow::{FlowHistory, PolygonalCurve};
use crate::quadrature::gl5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianDensitySeries {
    pub center: Vec<f64>,
    pub final_time: f64,
    pub samples: Vec<(f64, f64)>,
}

impl GaussianDensitySeries {
    pub fn to_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["t", "theta"])?;
        for (t, v) in &self.samples {
            w.write_record([t.to_string(), v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotoneReport {
    pub max_increase: f64,
    pub max_relative_increase: f64,
    pub rel_tol: f64,
    pub verdict: bool,
}

/// Backward heat kernel integral of a curve (`k = 1`) about `(p, tau0)` at time `t`.
pub fn curve_density(curve: &PolygonalCurve, p: &[f64], tau0: f64, t: f64) -> Result<f64> {
    let s = tau0 - t;
    if !(s > 0.0) {
        return Err(invalid("t", format!("must be below the final time {tau0}")));
    }
    if p.len() != curve.dim() {
        return Err(invalid("p", "center dimension differs from the curve"));
    }
    let norm = (4.0 * PI * s).sqrt();
    let n = curve.len();
    let mut total = 0.0;
    for i in 0..curve.num_edges() {
        let (a, b) = (curve.point(i), curve.point((i + 1) % n));
        let len = a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y).powi(2))
            .sum::<f64>()
            .sqrt();
        let f = |u: f64| {
            let r2: f64 = a
                .iter()
                .zip(b)
                .zip(p)
                .map(|((x, y), c)| (x + u * (y - x) - c).powi(2))
                .sum();
            (-r2 / (4.0 * s)).exp()
        };
        total += len * gl5(f, 0.0, 1.0);
    }
    Ok(total / norm)
}

/// Gaussian density of the flow at time `t`, using the linearly
/// interpolated curve between the bracketing snapshots.
pub fn gaussian_density(history: &FlowHistory, p: &[f64], tau0: f64, t: f64) -> Result<f64> {
    if t >= tau0 {
        return Err(invalid("t", format!("must be below the final time {tau0}")));
    }
    curve_density(&history.curve_at(t)?, p, tau0, t)
}

/// `count` equally spaced times in `[0, t_max]`, where `t_max` is the
/// smaller of the last stored time and `fraction * tau0`.
pub fn sample_times(history: &FlowHistory, tau0: f64, fraction: f64, count: usize) -> Vec<f64> {
    let t_max = history.last().t.min(fraction * tau0);
    (0..count)
        .map(|j| t_max * j as f64 / (count - 1).max(1) as f64)
        .collect()
}

pub fn density_series(
    history: &FlowHistory,
    p: &[f64],
    tau0: f64,
    times: &[f64],
) -> Result<GaussianDensitySeries> {
    let samples = times
        .iter()
        .map(|&t| Ok((t, gaussian_density(history, p, tau0, t)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(GaussianDensitySeries {
        center: p.to_vec(),
        final_time: tau0,
        samples,
    })
}

/// Checks that consecutive values never increase by more than
/// `rel_tol` times the earlier value.
pub fn check_monotone_series(samples: &[(f64, f64)], rel_tol: f64) -> MonotoneReport {
    let mut max_increase: f64 = 0.0;
    let mut max_rel: f64 = 0.0;
    let mut verdict = true;
    for w in samples.windows(2) {
        let inc = w[1].1 - w[0].1;
        max_increase = max_increase.max(inc);
        if w[0].1 > 0.0 {
            max_rel = max_rel.max(inc / w[0].1);
        }
        if inc > rel_tol * w[0].1 {
            verdict = false;
        }
    }
    MonotoneReport {
        max_increase,
        max_relative_increase: max_rel,
        rel_tol,
        verdict,
    }
}

/// Monotonicity check on `count >= 20` sample times below `tau0`.
pub fn check_monotone(
    history: &FlowHistory,
    p: &[f64],
    tau0: f64,
    count: usize,
) -> Result<(GaussianDensitySeries, MonotoneReport)> {
    if count < 20 {
        return Err(invalid("count", "need at least 20 sample times"));
    }
    let times = sample_times(history, tau0, 0.95, count);
    let series = density_series(history, p, tau0, &times)?;
    let report = check_monotone_series(&series.samples, 1e-3);
    Ok((series, report))
}

/// `3 x 3` grid of centers spaced by `spacing` about `origin`.
pub fn center_grid(origin: &[f64], spacing: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(9);
    for i in -1..=1 {
        for j in -1..=1 {
            let mut c = origin.to_vec();
            c[0] += i as f64 * spacing;
            if c.len() > 1 {
                c[1] += j as f64 * spacing;
            }
            out.push(c);
        }
    }
    out
}

/// `mass0^(2/k) / (4 pi)`
pub fn extinction_upper_bound(mass0: f64, k: usize) -> Result<f64> {
    if !(mass0 > 0.0) || k == 0 {
        return Err(invalid("mass0", "mass and dimension must be positive"));
    }
    Ok(mass0.powf(2.0 / k as f64) / (4.0 * PI))
}

/// `(filling_mass / mass0)^2`
pub fn extinction_lower_bound(filling_mass: f64, mass0: f64) -> Result<f64> {
    if !(filling_mass > 0.0 && mass0 > 0.0) {
        return Err(invalid("mass", "masses must be positive"));
    }
    Ok((filling_mass / mass0).powi(2))
}
