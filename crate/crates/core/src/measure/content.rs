//! Parabolic content by intrinsic grid covers.
//!
//! Each simplex is covered in its own vertical chart: a simplex whose time
//! coordinate varies lies in a plane `{(t, Qy + vt + c)}` with `Q`
//! orthonormal and `v` orthogonal to the range of `Q`, and the chart
//! coordinates are `(t, Q^T x)`. A fixed-time simplex is charted at its time
//! by `Q^T x`. Charts differ from the ambient space by a shear and an
//! isometry, which leave parabolic measure unchanged. Simplices sharing a
//! chart are merged row by row so their common faces are not counted twice.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::grid::scan_rows;
use super::{alpha, validate_ladder, MeasureEstimate};
use crate::error::{invalid, Error, Result};
use crate::geometry::PolyhedralChain;

/// Weight `g(t, x)` on packed space-time coordinates.
pub type WeightFn<'a> = &'a (dyn Fn(&[f64]) -> f64 + Sync);

const TIME_TOL: f64 = 1e-12;
const GS_TOL: f64 = 1e-8;
const KEY_SCALE: f64 = 1e9;
/// Largest chart dimension (grid prefix length) supported by row merging.
const MAX_PREFIX: usize = 4;

struct Chart {
    spatial: bool,
    q: DMatrix<f64>,
    v: DVector<f64>,
    offset: DVector<f64>,
    t0: f64,
}

impl Chart {
    /// Chart dimension count excluding time.
    fn dim(&self) -> usize {
        self.q.ncols()
    }

    fn to_chart(&self, p: &DVector<f64>) -> Vec<f64> {
        let x = p.rows(1, p.len() - 1);
        let y = self.q.transpose() * x;
        let mut c = Vec::with_capacity(y.len() + 1);
        c.push(p[0]);
        c.extend(y.iter());
        c
    }

    /// Writes the ambient point of chart coordinates `(t, y)` into `out`.
    fn to_ambient(&self, t: f64, y: &[f64], out: &mut [f64]) {
        let n = self.offset.len();
        let tt = if self.spatial { self.t0 } else { t };
        out[0] = tt;
        for i in 0..n {
            let mut xi = self.offset[i] + if self.spatial { 0.0 } else { self.v[i] * tt };
            for (j, yj) in y.iter().enumerate() {
                xi += self.q[(i, j)] * yj;
            }
            out[i + 1] = xi;
        }
    }

    fn key(&self, mult: i64) -> Vec<i64> {
        let n = self.offset.len();
        let proj = &self.q * self.q.transpose();
        let quant = |x: f64| (x * KEY_SCALE).round() as i64;
        let mut key = vec![self.spatial as i64, self.q.ncols() as i64, mult];
        key.extend(proj.iter().map(|&x| quant(x)));
        key.extend(self.v.iter().map(|&x| quant(x)));
        key.extend(self.offset.iter().map(|&x| quant(x)));
        if self.spatial {
            key.push(quant(self.t0));
        }
        debug_assert_eq!(proj.len(), n * n);
        key
    }
}

/// Orthonormal basis of the span of `vectors`, made canonical by
/// orthonormalizing the columns of the orthogonal projector onto the span.
fn canonical_basis(vectors: &[DVector<f64>], n: usize) -> DMatrix<f64> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for b in &basis {
            w -= b * b.dot(&w);
        }
        let norm = w.norm();
        if norm > GS_TOL * v.norm().max(1e-300) {
            basis.push(w / norm);
        }
    }
    let m = basis.len();
    if m == 0 {
        return DMatrix::zeros(n, 0);
    }
    if m == n {
        return DMatrix::identity(n, n);
    }
    let b = DMatrix::from_columns(&basis);
    let proj = &b * b.transpose();
    let mut q: Vec<DVector<f64>> = Vec::new();
    for i in 0..n {
        if q.len() == m {
            break;
        }
        let mut w: DVector<f64> = proj.column(i).into_owned();
        for b in &q {
            w -= b * b.dot(&w);
        }
        let norm = w.norm();
        if norm > 1e-6 {
            q.push(w / norm);
        }
    }
    DMatrix::from_columns(&q)
}

fn chart_of(points: &[&DVector<f64>]) -> Chart {
    let n = points[0].len() - 1;
    let p0 = points[0];
    let edges: Vec<DVector<f64>> = points[1..].iter().map(|p| *p - p0).collect();
    let spatial_part = |e: &DVector<f64>| -> DVector<f64> { e.rows(1, n).into_owned() };
    let scale = edges
        .iter()
        .map(|e| e.norm())
        .fold(0.0, f64::max)
        .max(1e-300);
    let pivot = edges
        .iter()
        .enumerate()
        .max_by(|a, b| a.1[0].abs().total_cmp(&b.1[0].abs()))
        .map(|(i, _)| i);
    match pivot {
        Some(j) if edges[j][0].abs() > TIME_TOL * scale => {
            let ej = &edges[j];
            let horizontal: Vec<DVector<f64>> = edges
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, e)| spatial_part(&(e - ej * (e[0] / ej[0]))))
                .collect();
            let q = canonical_basis(&horizontal, n);
            let u = spatial_part(ej) / ej[0];
            let proj = &q * q.transpose();
            let v = &u - &proj * &u;
            let x0 = spatial_part(p0);
            let offset = &x0 - &proj * &x0 - &v * p0[0];
            Chart {
                spatial: false,
                q,
                v,
                offset,
                t0: 0.0,
            }
        }
        _ => {
            let horizontal: Vec<DVector<f64>> = edges.iter().map(spatial_part).collect();
            let q = canonical_basis(&horizontal, n);
            let proj = &q * q.transpose();
            let x0 = spatial_part(p0);
            let offset = &x0 - &proj * &x0;
            Chart {
                spatial: true,
                q,
                v: DVector::zeros(n),
                offset,
                t0: p0[0],
            }
        }
    }
}

struct Group {
    chart: Chart,
    mult: i64,
    members: Vec<Vec<Vec<f64>>>,
}

fn prepare(set: &PolyhedralChain) -> Result<Vec<Group>> {
    let mut index: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    let mut groups: Vec<Group> = Vec::new();
    for s in set.simplices() {
        let pts = set.simplex_points(s);
        let chart = chart_of(&pts);
        if chart.dim() > MAX_PREFIX {
            return Err(invalid(
                "set",
                "simplices of dimension above 5 are not supported",
            ));
        }
        let coords: Vec<Vec<f64>> = pts.iter().map(|p| chart.to_chart(p)).collect();
        let key = chart.key(s.mult);
        match index.get(&key) {
            Some(&g) => groups[g].members.push(coords),
            None => {
                index.insert(key, groups.len());
                groups.push(Group {
                    chart,
                    mult: s.mult,
                    members: vec![coords],
                });
            }
        }
    }
    Ok(groups)
}

fn union_len(mut runs: Vec<(i64, i64)>, mut visit: impl FnMut(i64, i64)) {
    runs.sort_unstable();
    let mut cur: Option<(i64, i64)> = None;
    for (a, b) in runs {
        cur = match cur {
            Some((c, d)) if a <= d + 1 => Some((c, d.max(b))),
            Some((c, d)) => {
                visit(c, d);
                Some((a, b))
            }
            None => Some((a, b)),
        };
    }
    if let Some((c, d)) = cur {
        visit(c, d);
    }
}

fn group_sum(group: &Group, delta: f64, weight: Option<WeightFn>) -> f64 {
    let m = group.chart.dim();
    let mut steps = vec![delta; m + 1];
    steps[0] = delta * delta;
    let ambient = group.chart.offset.len() + 1;
    let mut buf = vec![0.0; ambient];
    let mut y = vec![0.0; m];
    let mut run_total = |prefix: &[i64], a: i64, b: i64| -> f64 {
        match weight {
            None => (b - a + 1) as f64,
            Some(g) => {
                let t = (prefix[0] as f64 + 0.5) * steps[0];
                for (j, &i) in prefix[1..].iter().enumerate() {
                    y[j] = (i as f64 + 0.5) * delta;
                }
                let mut acc = 0.0;
                for i in a..=b {
                    if m > 0 {
                        y[m - 1] = (i as f64 + 0.5) * delta;
                    }
                    group.chart.to_ambient(t, &y, &mut buf);
                    acc += g(&buf);
                }
                acc
            }
        }
    };
    let mut total = 0.0;
    if group.members.len() == 1 {
        scan_rows(&group.members[0], &steps, &mut |prefix, a, b| {
            total += run_total(prefix, a, b);
        });
    } else {
        let mut rows: Vec<([i64; MAX_PREFIX], i64, i64)> = Vec::new();
        for pts in &group.members {
            scan_rows(pts, &steps, &mut |prefix, a, b| {
                let mut key = [0i64; MAX_PREFIX];
                key[..prefix.len()].copy_from_slice(prefix);
                rows.push((key, a, b));
            });
        }
        rows.sort_unstable();
        let mut start = 0;
        while start < rows.len() {
            let key = rows[start].0;
            let mut end = start;
            while end < rows.len() && rows[end].0 == key {
                end += 1;
            }
            let runs: Vec<(i64, i64)> = rows[start..end].iter().map(|r| (r.1, r.2)).collect();
            union_len(runs, |a, b| total += run_total(&key[..m], a, b));
            start = end;
        }
    }
    total
}

fn content_at(groups: &[Group], s: f64, delta: f64, weight: Option<WeightFn>) -> f64 {
    let per_group: Vec<f64> = groups
        .par_iter()
        .map(|g| {
            let d = g.chart.dim() as f64;
            let diam = delta * d.sqrt().max(1.0);
            let cell = alpha(s) * (0.5 * diam).powf(s);
            let sum = if g.chart.dim() == 0 {
                time_only_sum(g, delta, weight)
            } else {
                group_sum(g, delta, weight)
            };
            g.mult as f64 * cell * sum
        })
        .collect();
    per_group.iter().sum()
}

fn time_only_sum(group: &Group, delta: f64, weight: Option<WeightFn>) -> f64 {
    let h = delta * delta;
    let ambient = group.chart.offset.len() + 1;
    let mut buf = vec![0.0; ambient];
    let mut runs = Vec::new();
    for pts in &group.members {
        scan_rows(pts, &[h], &mut |_, a, b| runs.push((a, b)));
    }
    let mut total = 0.0;
    union_len(runs, |a, b| match weight {
        None => total += (b - a + 1) as f64,
        Some(g) => {
            for i in a..=b {
                group.chart.to_ambient((i as f64 + 0.5) * h, &[], &mut buf);
                total += g(&buf);
            }
        }
    });
    total
}

fn check_set(set: &PolyhedralChain, ladder: &[f64]) -> Result<()> {
    validate_ladder(ladder)?;
    if !set.time_flag() {
        return Err(Error::MissingTimeFlag);
    }
    Ok(())
}

/// Multiplicity-weighted parabolic content of dimension `s` along `ladder`.
pub fn par_content(set: &PolyhedralChain, s: f64, ladder: &[f64]) -> Result<MeasureEstimate> {
    check_set(set, ladder)?;
    let groups = prepare(set)?;
    let values: Vec<f64> = ladder
        .iter()
        .map(|&d| content_at(&groups, s, d, None))
        .collect();
    Ok(MeasureEstimate::from_values(s, ladder, &values))
}

/// Content with each cell additionally weighted by `weight` at its center.
pub fn par_content_weighted(
    set: &PolyhedralChain,
    s: f64,
    ladder: &[f64],
    weight: WeightFn,
) -> Result<MeasureEstimate> {
    check_set(set, ladder)?;
    let groups = prepare(set)?;
    let values: Vec<f64> = ladder
        .iter()
        .map(|&d| content_at(&groups, s, d, Some(weight)))
        .collect();
    Ok(MeasureEstimate::from_values(s, ladder, &values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ScalingMap;
    use crate::measure::dyadic_ladder;
    use std::f64::consts::PI;

    fn box_chain(t: f64, l: f64) -> PolyhedralChain {
        let mut c = PolyhedralChain::new(2, 2, true);
        for p in [[0.0, 0.0], [t, 0.0], [t, l], [0.0, l]] {
            c.add_vertex_slice(&p).unwrap();
        }
        c.push_simplex(vec![0, 1, 2], 1).unwrap();
        c.push_simplex(vec![0, 2, 3], 1).unwrap();
        c
    }

    #[test]
    fn time_segment_is_pi_over_four() {
        let mut seg = PolyhedralChain::new(1, 1, true);
        seg.add_vertex_slice(&[0.0]).unwrap();
        seg.add_vertex_slice(&[1.0]).unwrap();
        seg.push_simplex(vec![0, 1], 1).unwrap();
        let est = par_content(&seg, 2.0, &dyadic_ladder(3, 6)).unwrap();
        for e in &est.ladder {
            assert!((e.value - PI / 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn product_box_matches_cell_count() {
        // T L / delta^3 cells of content alpha(3) (delta/2)^3
        let est = par_content(&box_chain(1.0, 0.5), 3.0, &[0.125, 0.0625]).unwrap();
        for e in &est.ladder {
            assert!((e.value - PI / 6.0 * 0.5).abs() < 1e-12, "{}", e.value);
        }
    }

    #[test]
    fn tilted_plane_agrees_with_flat_chart() {
        // (t, x) -> (t, x, 0.5 x + 0.3 t): horizontal length factor sqrt(1.25)
        let mut c = PolyhedralChain::new(2, 3, true);
        for (t, x) in [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)] {
            c.add_vertex_slice(&[t, x, 0.5 * x + 0.3 * t]).unwrap();
        }
        c.push_simplex(vec![0, 1, 2], 1).unwrap();
        c.push_simplex(vec![0, 2, 3], 1).unwrap();
        let est = par_content(&c, 3.0, &dyadic_ladder(5, 7)).unwrap();
        let exact = PI / 6.0 * 1.25f64.sqrt();
        assert!(
            (est.extrapolated - exact).abs() / exact < 0.01,
            "{}",
            est.extrapolated
        );
    }

    #[test]
    fn parabolic_scaling_with_rescaled_ladder() {
        let c = box_chain(0.75, 0.6);
        let ladder = dyadic_ladder(4, 6);
        let base = par_content(&c, 3.0, &ladder).unwrap();
        let map = ScalingMap::parabolic(2.0).unwrap();
        let scaled_ladder: Vec<f64> = ladder.iter().map(|d| 2.0 * d).collect();
        let scaled = par_content(&c.scaled(&map), 3.0, &scaled_ladder).unwrap();
        for (a, b) in base.ladder.iter().zip(&scaled.ladder) {
            assert!((b.value / a.value - 8.0).abs() < 1e-9);
        }
    }

    #[test]
    fn weight_at_cell_centers() {
        let c = box_chain(1.0, 1.0);
        let w = |p: &[f64]| p[0];
        let est = par_content_weighted(&c, 3.0, &[0.0625], &w).unwrap();
        assert!((est.finest() - PI / 12.0).abs() < 1e-12);
    }

    #[test]
    fn multiplicity_scales_content() {
        let mut c = PolyhedralChain::new(2, 2, true);
        for p in [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]] {
            c.add_vertex_slice(&p).unwrap();
        }
        let mut plain = c.clone();
        c.push_simplex(vec![0, 1, 2], -3).unwrap();
        plain.push_simplex(vec![0, 1, 2], 1).unwrap();
        let a = par_content(&c, 3.0, &[0.125]).unwrap().finest();
        let b = par_content(&plain, 3.0, &[0.125]).unwrap().finest();
        assert!((a - 3.0 * b).abs() < 1e-12);
    }
}
