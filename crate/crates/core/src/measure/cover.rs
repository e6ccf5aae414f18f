use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::grid::scan_rows;
use crate::error::{invalid, Error, Result};
use crate::geometry::PolyhedralChain;

/// Cell `[t0, t0 + h] x prod [c_i, c_i + w]` of the parabolic grid, `h = w^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParabolicBox {
    pub t0: f64,
    pub h: f64,
    pub corner: Vec<f64>,
    pub w: f64,
}

impl ParabolicBox {
    /// `max(sqrt(h), w * sqrt(n))`
    pub fn par_diam(&self) -> f64 {
        self.h
            .sqrt()
            .max(self.w * (self.corner.len() as f64).sqrt())
    }

    pub fn center(&self) -> Vec<f64> {
        let mut c = vec![self.t0 + 0.5 * self.h];
        c.extend(self.corner.iter().map(|x| x + 0.5 * self.w));
        c
    }
}

/// Every cell of the dyadic parabolic grid at scale `delta` meeting the set.
pub fn par_grid_cover(set: &PolyhedralChain, delta: f64) -> Result<Vec<ParabolicBox>> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(invalid("delta", format!("must be positive, got {delta}")));
    }
    if !set.time_flag() {
        return Err(Error::MissingTimeFlag);
    }
    let n = set.spatial_dim();
    let mut steps = vec![delta; n + 1];
    steps[0] = delta * delta;
    let mut cells: BTreeSet<Vec<i64>> = BTreeSet::new();
    for s in set.simplices() {
        let pts: Vec<Vec<f64>> = set
            .simplex_points(s)
            .iter()
            .map(|p| p.iter().copied().collect())
            .collect();
        scan_rows(&pts, &steps, &mut |prefix, a, b| {
            for i in a..=b {
                let mut key = prefix.to_vec();
                key.push(i);
                cells.insert(key);
            }
        });
    }
    Ok(cells
        .into_iter()
        .map(|key| ParabolicBox {
            t0: key[0] as f64 * steps[0],
            h: steps[0],
            corner: key[1..].iter().map(|&i| i as f64 * delta).collect(),
            w: delta,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(ambient: usize, pts: &[&[f64]]) -> PolyhedralChain {
        let mut c = PolyhedralChain::new(pts.len() - 1, ambient, true);
        for p in pts {
            c.add_vertex_slice(p).unwrap();
        }
        c.push_simplex((0..pts.len()).collect(), 1).unwrap();
        c
    }

    #[test]
    fn time_segment_gives_m_squared_boxes() {
        let seg = chain(1, &[&[0.0], &[1.0]]);
        for m in [2usize, 4, 8, 16] {
            let boxes = par_grid_cover(&seg, 1.0 / m as f64).unwrap();
            assert_eq!(boxes.len(), m * m);
        }
    }

    #[test]
    fn point_gives_one_box() {
        let p = chain(3, &[&[0.3, 0.2, 0.7]]);
        assert_eq!(par_grid_cover(&p, 0.125).unwrap().len(), 1);
        let q = chain(3, &[&[0.0, 0.0, 0.0]]);
        assert_eq!(par_grid_cover(&q, 0.125).unwrap().len(), 1);
    }

    #[test]
    fn spatial_segment_gives_m_boxes() {
        let seg = chain(2, &[&[0.0, 0.0], &[0.0, 1.0]]);
        for m in [4usize, 8, 32] {
            assert_eq!(par_grid_cover(&seg, 1.0 / m as f64).unwrap().len(), m);
        }
    }

    #[test]
    fn rejects_bad_delta_and_missing_flag() {
        let seg = chain(1, &[&[0.0], &[1.0]]);
        assert!(par_grid_cover(&seg, 0.0).is_err());
        let mut flat = PolyhedralChain::new(0, 1, false);
        flat.add_vertex_slice(&[0.0]).unwrap();
        assert!(matches!(
            par_grid_cover(&flat, 0.1),
            Err(Error::MissingTimeFlag)
        ));
    }

    #[test]
    fn box_diameter() {
        let b = ParabolicBox {
            t0: 0.0,
            h: 0.01,
            corner: vec![0.0, 0.0],
            w: 0.1,
        };
        assert!((b.par_diam() - 0.1 * 2f64.sqrt()).abs() < 1e-15);
    }
}
