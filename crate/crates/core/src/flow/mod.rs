//! Curve shortening flow of closed polygonal curves.

mod curve;
mod registry;
mod step;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use curve::PolygonalCurve;
pub use registry::{circle, default_registry, ellipse, fourier_circle, rounded_rect, CurveSpec};
pub use step::{resample, step, step_open};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowOptions {
    /// `dt = dt_factor * (min edge)^2`
    pub dt_factor: f64,
    /// Resample by arclength every this many steps (0 disables).
    pub resample_every: usize,
    /// Store a snapshot every this many steps.
    pub snapshot_stride: usize,
    pub max_steps: usize,
    /// Stop once the diameter falls below this fraction of the initial one.
    pub extinction_ratio: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            dt_factor: 0.25,
            resample_every: 10,
            snapshot_stride: 50,
            max_steps: 2_000_000,
            extinction_ratio: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub curve: PolygonalCurve,
    pub length: f64,
}

/// Time-stamped curves of one flow run with its extinction time.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowHistory {
    pub snapshots: Vec<Snapshot>,
    pub tau: f64,
    /// Signed shoelace area of the initial curve (planar runs only).
    pub enclosed_area0: Option<f64>,
    /// False once a planar self-intersection was seen.
    pub embedded: bool,
    pub steps: usize,
}

#[derive(Serialize)]
struct SnapshotRow {
    t: f64,
    length: f64,
    area: Option<f64>,
    diameter: f64,
}

impl FlowHistory {
    pub fn initial(&self) -> &Snapshot {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().expect("history has snapshots")
    }

    pub fn mass0(&self) -> f64 {
        self.initial().length
    }

    /// Analytic history of the shrinking circle `r(t) = sqrt(r0^2 - 2t)` as
    /// regular `n`-gons at radii `r0 (1 - j / snapshots)`.
    pub fn shrinking_circle(r0: f64, n: usize, snapshots: usize) -> Result<Self> {
        if snapshots == 0 {
            return Err(invalid("snapshots", "must be positive"));
        }
        let snaps = (0..snapshots)
            .map(|j| {
                let r = r0 * (1.0 - j as f64 / snapshots as f64);
                let curve = circle(r, n)?;
                Ok(Snapshot {
                    t: 0.5 * (r0 * r0 - r * r),
                    length: curve.length(),
                    curve,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let area = snaps[0].curve.signed_area();
        Ok(Self {
            snapshots: snaps,
            tau: 0.5 * r0 * r0,
            enclosed_area0: area,
            embedded: true,
            steps: 0,
        })
    }

    /// History with every curve scaled by `lambda` and times by `lambda^2`.
    pub fn scaled(&self, lambda: f64) -> Self {
        let l2 = lambda * lambda;
        Self {
            snapshots: self
                .snapshots
                .iter()
                .map(|s| Snapshot {
                    t: s.t * l2,
                    curve: s.curve.scaled(lambda),
                    length: s.length * lambda,
                })
                .collect(),
            tau: self.tau * l2,
            enclosed_area0: self.enclosed_area0.map(|a| a * l2),
            embedded: self.embedded,
            steps: self.steps,
        }
    }

    /// Snapshot curve at time `t` by linear interpolation of corresponding
    /// vertices between the bracketing snapshots.
    pub fn curve_at(&self, t: f64) -> Result<PolygonalCurve> {
        let snaps = &self.snapshots;
        let first = &snaps[0];
        let last = self.last();
        if t < first.t || t > last.t {
            return Err(invalid("t", format!("{t} outside the stored range")));
        }
        let j = snaps.partition_point(|s| s.t <= t).saturating_sub(1);
        if j + 1 >= snaps.len() {
            return Ok(last.curve.clone());
        }
        let (a, b) = (&snaps[j], &snaps[j + 1]);
        let s = (t - a.t) / (b.t - a.t);
        a.curve
            .lerp(&b.curve, s)
            .ok_or(Error::CorrespondenceBroken(j, j + 1))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "tau": self.tau,
            "enclosed_area0": self.enclosed_area0,
            "embedded": self.embedded,
            "steps": self.steps,
            "snapshots": self.snapshots.iter().map(|s| serde_json::json!({
                "t": s.t,
                "length": s.length,
                "vertices": s.curve.points(),
            })).collect::<Vec<_>>(),
        })
    }

    /// Per-snapshot CSV: `t, length, area, diameter`.
    pub fn to_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for s in &self.snapshots {
            w.serialize(SnapshotRow {
                t: s.t,
                length: s.length,
                area: s.curve.signed_area(),
                diameter: s.curve.diameter(),
            })?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs curve shortening flow until the curve shrinks below
/// `extinction_ratio` times its initial diameter. The extinction time adds
/// the remaining lifetime `diam^2 / 8` of a circle of the final diameter.
pub fn run_to_extinction(initial: &PolygonalCurve, opts: &FlowOptions) -> Result<FlowHistory> {
    if !initial.is_closed() || initial.len() < 8 {
        return Err(invalid(
            "curve",
            "needs a closed curve with at least 8 vertices",
        ));
    }
    if !(opts.dt_factor > 0.0) || opts.snapshot_stride == 0 || !(opts.extinction_ratio > 0.0) {
        return Err(invalid(
            "options",
            "dt_factor, snapshot_stride, extinction_ratio must be positive",
        ));
    }
    let n = initial.len();
    let planar = initial.dim() == 2;
    let threshold = opts.extinction_ratio * initial.diameter();
    let mut history = FlowHistory {
        snapshots: vec![Snapshot {
            t: 0.0,
            curve: initial.clone(),
            length: initial.length(),
        }],
        tau: 0.0,
        enclosed_area0: initial.signed_area(),
        embedded: !(planar && initial.self_intersects()),
        steps: 0,
    };
    let mut curve = initial.clone();
    let mut t = 0.0;
    loop {
        if curve.diameter_bound() < threshold {
            let d = curve.diameter();
            if d < threshold {
                if history.last().t < t {
                    history.snapshots.push(Snapshot {
                        t,
                        length: curve.length(),
                        curve: curve.clone(),
                    });
                }
                history.tau = t + d * d / 8.0;
                return Ok(history);
            }
        }
        if history.steps >= opts.max_steps {
            history.tau = t;
            return Err(Error::NoExtinction {
                steps: history.steps,
                time: t,
                partial: Box::new(history),
            });
        }
        let dt = opts.dt_factor * curve.min_edge().powi(2);
        curve = step(&curve, dt)?;
        t += dt;
        history.steps += 1;
        if opts.resample_every > 0 && history.steps.is_multiple_of(opts.resample_every) {
            curve = resample(&curve, n);
        }
        if history.steps.is_multiple_of(opts.snapshot_stride) {
            if planar && history.embedded && curve.self_intersects() {
                history.embedded = false;
            }
            history.snapshots.push(Snapshot {
                t,
                length: curve.length(),
                curve: curve.clone(),
            });
        }
    }
}

/// Measured vertical speed of the lowest point of the grim reaper
/// `y = t - log cos x` on `|x| <= pi/2 - margin`, with endpoints moved along
/// the exact solution, over the time interval `[0, t_end]`.
pub fn grim_reaper_speed(margin: f64, n: usize, t_end: f64, dt: f64) -> Result<f64> {
    use std::f64::consts::FRAC_PI_2;
    if !(margin > 0.0 && margin < FRAC_PI_2) || n < 5 || n.is_multiple_of(2) {
        return Err(invalid(
            "grim reaper",
            "need 0 < margin < pi/2 and odd n >= 5",
        ));
    }
    let x_end = FRAC_PI_2 - margin;
    let pts: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let x = -x_end + 2.0 * x_end * i as f64 / (n - 1) as f64;
            vec![x, -x.cos().ln()]
        })
        .collect();
    let mut curve = PolygonalCurve::open(&pts)?;
    let mid = n / 2;
    let y0 = curve.point(mid)[1];
    let steps = (t_end / dt).ceil() as usize;
    let dt = t_end / steps as f64;
    let y_end = -x_end.cos().ln();
    for k in 1..=steps {
        let t = k as f64 * dt;
        curve = step_open(&curve, dt, &[-x_end, t + y_end], &[x_end, t + y_end])?;
    }
    Ok((curve.point(mid)[1] - y0) / t_end)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_circle_extinction() {
        let h = run_to_extinction(&circle(1.0, 128).unwrap(), &FlowOptions::default()).unwrap();
        assert!((h.tau - 0.5).abs() < 0.005, "tau = {}", h.tau);
        assert!(h.embedded);
        for w in h.snapshots.windows(2) {
            assert!(w[1].t > w[0].t);
            assert!(w[1].length < w[0].length + 1e-9);
        }
    }

    #[test]
    fn shrinking_circle_history_is_exact() {
        let h = FlowHistory::shrinking_circle(1.0, 32, 8).unwrap();
        assert_eq!(h.snapshots.len(), 8);
        assert_eq!(h.tau, 0.5);
        let s = &h.snapshots[4];
        let r = (1.0 - 2.0 * s.t).sqrt();
        assert!((s.curve.point(0)[0] - r).abs() < 1e-14);
    }

    #[test]
    fn curve_at_interpolates() {
        let h = FlowHistory::shrinking_circle(1.0, 16, 4).unwrap();
        let (a, b) = (&h.snapshots[1], &h.snapshots[2]);
        let mid = h.curve_at(0.5 * (a.t + b.t)).unwrap();
        let x = 0.5 * (a.curve.point(0)[0] + b.curve.point(0)[0]);
        assert!((mid.point(0)[0] - x).abs() < 1e-14);
        assert!(h.curve_at(-1.0).is_err());
    }

    #[test]
    fn grim_reaper_translates_at_unit_speed() {
        let v = grim_reaper_speed(0.3, 201, 0.2, 1e-4).unwrap();
        assert!((v - 1.0).abs() < 0.01, "speed {v}");
    }
}
