//! Co-area and area formula experiments on polyhedral space-time sets.

mod maps;

use std::f64::consts::FRAC_PI_4;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{kuhn_box, PolyhedralChain};
use crate::measure::{
    dyadic_ladder, par_content_weighted, slice_at_time, LadderEntry, MeasureEstimate, WeightFn,
};
use crate::quadrature::integrate_simplex;

pub use maps::{
    area_formula_check, horizontal_jacobian, map_registry, registry_names, volume_estimate_check,
    HorizontalJacobianField, VerticalMap,
};

/// Default number of Simpson intervals in time.
pub const DEFAULT_TIME_NODES: usize = 64;

/// Ladder used by the map checks: `2^-3 .. 2^-7` for `k = 1`, and
/// `2^-3 .. 2^-5` for larger `k`.
pub fn check_ladder(k: usize) -> Vec<f64> {
    if k <= 1 {
        dyadic_ladder(3, 7)
    } else {
        dyadic_ladder(3, 5)
    }
}

/// Outcome of one comparison between two sides of an identity or estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub ladder: Vec<LadderEntry>,
    pub verdict: bool,
}

impl CheckReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Slice dimension `k` of a set: its own dimension when it sits at one
/// time, one less otherwise.
pub fn slice_dim(set: &PolyhedralChain) -> usize {
    match set.time_extent() {
        Some((a, b)) if b > a => set.dim().saturating_sub(1),
        _ => set.dim(),
    }
}

/// Product box `[0, t] x [0, lens[0]] x ... ` in `R^{1,k}`, Kuhn
/// triangulated with `cells` intervals per axis.
pub fn product_box(t: f64, lens: &[f64], cells: usize) -> Result<PolyhedralChain> {
    let mut hi = vec![t];
    hi.extend_from_slice(lens);
    kuhn_box(&vec![0.0; hi.len()], &hi, cells, true)
}

/// Weighted parabolic content of dimension `k + 2`.
pub fn coarea_lhs(set: &PolyhedralChain, g: WeightFn, ladder: &[f64]) -> Result<MeasureEstimate> {
    let k = slice_dim(set);
    par_content_weighted(set, (k + 2) as f64, ladder, g)
}

/// `int_{M_t} g dH^k` over the slice at time `t`.
pub fn slice_integral(set: &PolyhedralChain, g: WeightFn, t: f64) -> Result<f64> {
    let slice = slice_at_time(set, t)?;
    let mut total = 0.0;
    for s in slice.simplices() {
        let pts = slice.simplex_points(s);
        let v = integrate_simplex(&pts, |p| {
            let mut q = Vec::with_capacity(p.len() + 1);
            q.push(t);
            q.extend(p.iter());
            g(&q)
        })?;
        total += s.mult as f64 * v;
    }
    Ok(total)
}

/// `(pi/4) int (int_{M_t} g dH^k) dt` by composite Simpson with `n_t`
/// intervals over the time extent; zero for sets at a single time.
pub fn coarea_rhs(set: &PolyhedralChain, g: WeightFn, n_t: usize) -> Result<f64> {
    if !set.time_flag() {
        return Err(Error::MissingTimeFlag);
    }
    if n_t < 2 {
        return Err(invalid("n_t", "need at least 2 time intervals"));
    }
    let (a, b) = match set.time_extent() {
        Some((a, b)) if b > a => (a, b),
        _ => return Ok(0.0),
    };
    let n = n_t + n_t % 2;
    let h = (b - a) / n as f64;
    let values = (0..=n)
        .into_par_iter()
        .map(|i| slice_integral(set, g, a + h * i as f64))
        .collect::<Result<Vec<f64>>>()?;
    let sum: f64 = values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * v
        })
        .sum();
    Ok(FRAC_PI_4 * sum * h / 3.0)
}

/// `lhs / rhs`, the empirical co-area constant.
pub fn coarea_ratio(
    set: &PolyhedralChain,
    g: WeightFn,
    ladder: &[f64],
    n_t: usize,
) -> Result<CheckReport> {
    let rhs = coarea_rhs(set, g, n_t)?;
    if !(rhs > 0.0) {
        return Err(Error::DegenerateRatio);
    }
    let lhs = coarea_lhs(set, g, ladder)?;
    let ratio = lhs.extrapolated / rhs;
    Ok(CheckReport {
        check: "coarea_ratio".into(),
        lhs: lhs.extrapolated,
        rhs,
        ratio,
        ladder: lhs.ladder,
        verdict: ratio.is_finite() && ratio > 0.0,
    })
}

/// Calibration of the co-area constant on product boxes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub k: usize,
    /// `(time length, spatial lengths, ratio)` per box.
    pub boxes: Vec<(f64, Vec<f64>, f64)>,
    pub mean: f64,
    /// `(max - min) / mean`
    pub spread: f64,
}

/// Box shapes used for calibration in `R^{1,k}`.
pub fn calibration_boxes(k: usize) -> Vec<(f64, Vec<f64>)> {
    let shapes: [(f64, f64, f64); 6] = [
        (1.0, 1.0, 1.0),
        (0.5, 2.0, 1.0),
        (2.0, 0.5, 1.5),
        (0.25, 1.0, 0.5),
        (1.0, 3.0, 2.0),
        (1.5, 0.75, 0.25),
    ];
    shapes
        .iter()
        .map(|&(t, a, b)| (t, [a, b, 1.0][..k.min(3)].to_vec()))
        .collect()
}

pub fn calibrate(k: usize, ladder: &[f64], n_t: usize) -> Result<Calibration> {
    if k == 0 || k > 2 {
        return Err(invalid("k", "calibration supports k = 1 or 2"));
    }
    let one = |_: &[f64]| 1.0;
    let boxes = calibration_boxes(k)
        .into_iter()
        .map(|(t, lens)| {
            let set = product_box(t, &lens, 1)?;
            let r = coarea_ratio(&set, &one, ladder, n_t)?;
            Ok((t, lens, r.ratio))
        })
        .collect::<Result<Vec<_>>>()?;
    let vals: Vec<f64> = boxes.iter().map(|b| b.2).collect();
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let spread = relative_spread(&vals);
    Ok(Calibration {
        k,
        boxes,
        mean,
        spread,
    })
}

/// Relative spread `(max - min) / mean` of a list of values.
pub fn relative_spread(values: &[f64]) -> f64 {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let hi = values.iter().cloned().fold(f64::MIN, f64::max);
    let lo = values.iter().cloned().fold(f64::MAX, f64::min);
    (hi - lo) / mean
}
