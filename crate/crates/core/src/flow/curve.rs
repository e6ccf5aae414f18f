use nalgebra::DVector;

use crate::error::{invalid, Result};
use crate::geometry::PolyhedralChain;

/// Polygonal curve in `R^n`, stored as packed coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonalCurve {
    dim: usize,
    closed: bool,
    coords: Vec<f64>,
}

impl PolygonalCurve {
    pub fn closed(points: &[Vec<f64>]) -> Result<Self> {
        Self::build(points, true)
    }

    pub fn open(points: &[Vec<f64>]) -> Result<Self> {
        Self::build(points, false)
    }

    fn build(points: &[Vec<f64>], closed: bool) -> Result<Self> {
        if points.len() < 3 {
            return Err(invalid("points", "a curve needs at least 3 vertices"));
        }
        let dim = points[0].len();
        if dim == 0 || points.iter().any(|p| p.len() != dim) {
            return Err(invalid(
                "points",
                "vertices must share a positive dimension",
            ));
        }
        if points.iter().flatten().any(|c| !c.is_finite()) {
            return Err(invalid("points", "coordinates must be finite"));
        }
        Ok(Self {
            dim,
            closed,
            coords: points.concat(),
        })
    }

    pub(crate) fn from_packed(dim: usize, closed: bool, coords: Vec<f64>) -> Self {
        Self {
            dim,
            closed,
            coords,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        self.coords.chunks(self.dim).map(|c| c.to_vec()).collect()
    }

    pub fn num_edges(&self) -> usize {
        if self.closed {
            self.len()
        } else {
            self.len() - 1
        }
    }

    /// Length of the edge from vertex `i` to its successor.
    pub fn edge_len(&self, i: usize) -> f64 {
        let j = (i + 1) % self.len();
        dist(self.point(i), self.point(j))
    }

    pub fn length(&self) -> f64 {
        (0..self.num_edges()).map(|i| self.edge_len(i)).sum()
    }

    pub fn min_edge(&self) -> f64 {
        (0..self.num_edges())
            .map(|i| self.edge_len(i))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn centroid(&self) -> Vec<f64> {
        let n = self.len() as f64;
        let mut c = vec![0.0; self.dim];
        for p in self.coords.chunks(self.dim) {
            for (a, b) in c.iter_mut().zip(p) {
                *a += b / n;
            }
        }
        c
    }

    /// Twice the largest distance to the vertex centroid, an upper bound for
    /// the diameter.
    pub fn diameter_bound(&self) -> f64 {
        let c = self.centroid();
        2.0 * self
            .coords
            .chunks(self.dim)
            .map(|p| dist(p, &c))
            .fold(0.0, f64::max)
    }

    pub fn diameter(&self) -> f64 {
        let n = self.len();
        let mut d: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                d = d.max(dist(self.point(i), self.point(j)));
            }
        }
        d
    }

    /// Signed shoelace area of a planar closed curve.
    pub fn signed_area(&self) -> Option<f64> {
        if self.dim != 2 || !self.closed {
            return None;
        }
        let n = self.len();
        let mut a = 0.0;
        for i in 0..n {
            let p = self.point(i);
            let q = self.point((i + 1) % n);
            a += p[0] * q[1] - q[0] * p[1];
        }
        Some(0.5 * a)
    }

    /// Whether two non-adjacent edges of a planar curve intersect.
    pub fn self_intersects(&self) -> bool {
        if self.dim != 2 {
            return false;
        }
        let m = self.num_edges();
        let n = self.len();
        for i in 0..m {
            let (a, b) = (self.point(i), self.point((i + 1) % n));
            for j in i + 2..m {
                if self.closed && i == 0 && j == m - 1 {
                    continue;
                }
                let (c, d) = (self.point(j), self.point((j + 1) % n));
                if segments_cross(a, b, c, d) {
                    return true;
                }
            }
        }
        false
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            dim: self.dim,
            closed: self.closed,
            coords: self.coords.iter().map(|c| c * lambda).collect(),
        }
    }

    /// The curve as an oriented 1-chain.
    pub fn to_chain(&self) -> Result<PolyhedralChain> {
        let mut c = PolyhedralChain::new(1, self.dim, false);
        for p in self.coords.chunks(self.dim) {
            c.add_vertex(DVector::from_column_slice(p))?;
        }
        let n = self.len();
        for i in 0..self.num_edges() {
            c.try_push_simplex(vec![i, (i + 1) % n], 1)?;
        }
        Ok(c)
    }

    /// Linear interpolation `(1 - s) self + s other` of corresponding vertices.
    pub fn lerp(&self, other: &Self, s: f64) -> Option<Self> {
        if self.coords.len() != other.coords.len() || self.dim != other.dim {
            return None;
        }
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + s * (b - a))
            .collect();
        Some(Self::from_packed(self.dim, self.closed, coords))
    }
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn orient(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn segments_cross(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> bool {
    let (d1, d2) = (orient(c, d, a), orient(c, d, b));
    let (d3, d4) = (orient(a, b, c), orient(a, b, d));
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> PolygonalCurve {
        PolygonalCurve::closed(&[
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ])
        .unwrap()
    }

    #[test]
    fn square_measurements() {
        let s = square();
        assert_eq!(s.length(), 4.0);
        assert_eq!(s.signed_area(), Some(1.0));
        assert!((s.diameter() - 2f64.sqrt()).abs() < 1e-15);
        assert!(s.diameter_bound() >= s.diameter());
        assert!(!s.self_intersects());
        assert!(s.to_chain().unwrap().boundary().unwrap().is_empty());
    }

    #[test]
    fn bowtie_self_intersects() {
        let b = PolygonalCurve::closed(&[
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
        ])
        .unwrap();
        assert!(b.self_intersects());
    }

    #[test]
    fn rejects_short_or_ragged_input() {
        assert!(PolygonalCurve::closed(&[vec![0.0], vec![1.0]]).is_err());
        assert!(PolygonalCurve::closed(&[vec![0.0, 0.0], vec![1.0], vec![0.0, 1.0]]).is_err());
    }
}
