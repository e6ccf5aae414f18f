use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A point `(t, x)` of space-time `R^{1,n}`.
///
/// The same type carries the height coordinate `z` of the elliptic
/// regularization, which plays the role of time after rescaling.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceTimePoint {
    pub t: f64,
    pub x: DVector<f64>,
}

impl SpaceTimePoint {
    pub fn new(t: f64, x: impl Into<Vec<f64>>) -> Self {
        Self {
            t,
            x: DVector::from_vec(x.into()),
        }
    }

    /// Builds a point from packed coordinates, coordinate 0 being time.
    pub fn from_coords(coords: &[f64]) -> Self {
        Self {
            t: coords[0],
            x: DVector::from_column_slice(&coords[1..]),
        }
    }

    pub fn to_coords(&self) -> DVector<f64> {
        let mut c = DVector::zeros(self.x.len() + 1);
        c[0] = self.t;
        c.rows_mut(1, self.x.len()).copy_from(&self.x);
        c
    }

    pub fn spatial_dim(&self) -> usize {
        self.x.len()
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.iter().all(|v| v.is_finite())
    }
}

/// Parabolic distance `max(sqrt|t - s|, |x - y|)`.
pub fn par_dist(p: &SpaceTimePoint, q: &SpaceTimePoint) -> Result<f64> {
    if p.x.len() != q.x.len() {
        return Err(Error::DimensionMismatch {
            expected: p.x.len(),
            got: q.x.len(),
        });
    }
    Ok((p.t - q.t).abs().sqrt().max((&p.x - &q.x).norm()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingKind {
    /// `(t, x) -> (l^2 t, l x)`
    Parabolic,
    /// `(t, x) -> (l t, l x)`
    Euclidean,
    /// `(z, x) -> (e z, x)`
    Cylindrical,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingMap {
    kind: ScalingKind,
    parameter: f64,
}

impl ScalingMap {
    pub fn new(kind: ScalingKind, parameter: f64) -> Result<Self> {
        if !(parameter > 0.0 && parameter.is_finite()) {
            return Err(invalid(
                "parameter",
                format!("must be positive, got {parameter}"),
            ));
        }
        Ok(Self { kind, parameter })
    }

    pub fn parabolic(lambda: f64) -> Result<Self> {
        Self::new(ScalingKind::Parabolic, lambda)
    }

    pub fn euclidean(lambda: f64) -> Result<Self> {
        Self::new(ScalingKind::Euclidean, lambda)
    }

    pub fn cylindrical(epsilon: f64) -> Result<Self> {
        Self::new(ScalingKind::Cylindrical, epsilon)
    }

    pub fn kind(&self) -> ScalingKind {
        self.kind
    }

    pub fn parameter(&self) -> f64 {
        self.parameter
    }

    /// Factors applied to the time and space coordinates.
    pub fn factors(&self) -> (f64, f64) {
        let l = self.parameter;
        match self.kind {
            ScalingKind::Parabolic => (l * l, l),
            ScalingKind::Euclidean => (l, l),
            ScalingKind::Cylindrical => (l, 1.0),
        }
    }

    pub fn apply(&self, p: &SpaceTimePoint) -> SpaceTimePoint {
        let (ft, fx) = self.factors();
        SpaceTimePoint {
            t: ft * p.t,
            x: &p.x * fx,
        }
    }
}

pub fn apply_scaling(map: &ScalingMap, p: &SpaceTimePoint) -> SpaceTimePoint {
    map.apply(p)
}
