//! Exact enumeration of axis-aligned grid cells meeting a convex polytope.
//!
//! The polytope is the convex hull of a point set. Cells are visited as
//! rows: every coordinate but the last is fixed, and the last coordinate
//! runs over an inclusive index interval.

/// Tolerance on grid-index coordinates for touching faces.
const IDX_TOL: f64 = 1e-9;
/// Absolute tolerance on slab membership tests.
const PLANE_TOL: f64 = 1e-12;

/// Inclusive range of cell indices for the interval `[lo, hi]` at step `h`.
///
/// Cells that only touch the interval at a face are dropped, except that
/// an interval lying entirely on a grid plane keeps the cell above it.
pub(crate) fn index_range(lo: f64, hi: f64, h: f64) -> (i64, i64) {
    let a = (lo / h + IDX_TOL).floor() as i64;
    let b = (hi / h - IDX_TOL).ceil() as i64 - 1;
    (a, b.max(a))
}

/// Calls `row(prefix, lo, hi)` for every row of cells meeting `conv(points)`.
/// `steps[i]` is the grid step along coordinate `i`; grids are anchored at 0.
pub(crate) fn scan_rows<F>(points: &[Vec<f64>], steps: &[f64], row: &mut F)
where
    F: FnMut(&[i64], i64, i64),
{
    if points.is_empty() || steps.is_empty() {
        return;
    }
    let mut prefix = Vec::with_capacity(steps.len());
    recurse(points.to_vec(), steps, &mut prefix, row);
}

fn recurse<F>(points: Vec<Vec<f64>>, steps: &[f64], prefix: &mut Vec<i64>, row: &mut F)
where
    F: FnMut(&[i64], i64, i64),
{
    match steps.len() {
        1 => {
            let (lo, hi) = min_max(points.iter().map(|p| p[0]));
            let (a, b) = index_range(lo, hi, steps[0]);
            row(prefix, a, b);
        }
        2 => scan_plane(&points, steps[0], steps[1], prefix, row),
        _ => {
            let h = steps[0];
            let (lo, hi) = min_max(points.iter().map(|p| p[0]));
            let (a, b) = index_range(lo, hi, h);
            for i in a..=b {
                let (s0, s1) = (i as f64 * h, (i + 1) as f64 * h);
                let clipped = clip_slab(&points, s0, s1);
                if clipped.is_empty() {
                    continue;
                }
                prefix.push(i);
                recurse(clipped, &steps[1..], prefix, row);
                prefix.pop();
            }
        }
    }
}

fn min_max(it: impl Iterator<Item = f64>) -> (f64, f64) {
    it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

/// Points of `conv(points) ∩ {s0 <= p[0] <= s1}` whose hull is that set,
/// with coordinate 0 dropped.
fn clip_slab(points: &[Vec<f64>], s0: f64, s1: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for p in points {
        if p[0] >= s0 - PLANE_TOL && p[0] <= s1 + PLANE_TOL {
            out.push(p[1..].to_vec());
        }
    }
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            for c in [s0, s1] {
                let (dp, dq) = (p[0] - c, q[0] - c);
                if dp * dq < 0.0 {
                    let s = dp / (dp - dq);
                    out.push(
                        p[1..]
                            .iter()
                            .zip(&q[1..])
                            .map(|(a, b)| a + s * (b - a))
                            .collect(),
                    );
                }
            }
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    out.dedup();
    out
}

/// Convex hull of planar points, counter-clockwise, collinear points removed.
pub(crate) fn hull2d(points: &[Vec<f64>]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    if hull.len() < 2 {
        // all points coincide up to rounding
        return vec![pts[0]];
    }
    hull
}

fn scan_plane<F>(points: &[Vec<f64>], h0: f64, h1: f64, prefix: &mut Vec<i64>, row: &mut F)
where
    F: FnMut(&[i64], i64, i64),
{
    let hull = hull2d(points);
    let (lo, hi) = min_max(hull.iter().map(|p| p[0]));
    let (a, b) = index_range(lo, hi, h0);
    let n = hull.len();
    for i in a..=b {
        let (s0, s1) = (i as f64 * h0, (i + 1) as f64 * h0);
        let mut ylo = f64::INFINITY;
        let mut yhi = f64::NEG_INFINITY;
        for p in &hull {
            if p[0] >= s0 - PLANE_TOL && p[0] <= s1 + PLANE_TOL {
                ylo = ylo.min(p[1]);
                yhi = yhi.max(p[1]);
            }
        }
        if n >= 2 {
            for j in 0..n {
                let p = hull[j];
                let q = hull[(j + 1) % n];
                for c in [s0, s1] {
                    let (dp, dq) = (p[0] - c, q[0] - c);
                    if dp * dq < 0.0 {
                        let y = p[1] + dp / (dp - dq) * (q[1] - p[1]);
                        ylo = ylo.min(y);
                        yhi = yhi.max(y);
                    }
                }
            }
        }
        if ylo > yhi {
            continue;
        }
        let (c, d) = index_range(ylo, yhi, h1);
        prefix.push(i);
        row(prefix, c, d);
        prefix.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(points: &[Vec<f64>], steps: &[f64]) -> i64 {
        let mut n = 0;
        scan_rows(points, steps, &mut |_, a, b| n += b - a + 1);
        n
    }

    #[test]
    fn index_range_rules() {
        assert_eq!(index_range(0.0, 1.0, 0.25), (0, 3));
        assert_eq!(index_range(0.0, 0.0, 0.25), (0, 0));
        assert_eq!(index_range(0.25, 0.25, 0.25), (1, 1));
        assert_eq!(index_range(0.1, 0.3, 0.25), (0, 1));
    }

    #[test]
    fn unit_square_as_two_triangles() {
        let a = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]];
        let b = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
        // each triangle meets the 8 diagonal cells plus its half
        assert_eq!(count(&a, &[0.125, 0.125]), 36);
        assert_eq!(count(&b, &[0.125, 0.125]), 36);
    }

    #[test]
    fn triangle_in_space_counts_like_plane() {
        let tri = vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
        ];
        let mut n = 0;
        scan_rows(&tri, &[0.25, 0.25, 0.25], &mut |_, a, b| n += b - a + 1);
        assert_eq!(
            n,
            count(
                &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
                &[0.25, 0.25]
            )
        );
    }

    #[test]
    fn tetra_cell_count_matches_brute_force() {
        let tet = vec![
            vec![0.05, 0.1, 0.0],
            vec![0.9, 0.2, 0.1],
            vec![0.3, 0.8, 0.2],
            vec![0.4, 0.3, 0.95],
        ];
        let h = 0.1;
        let n = count(&tet, &[h, h, h]);
        // brute force: a cell meets the tetra iff an LP is feasible; sample densely instead
        let mut hit = std::collections::HashSet::new();
        let m = 60;
        for i in 0..=m {
            for j in 0..=m - i {
                for k in 0..=m - i - j {
                    let l = m - i - j - k;
                    let w = [i, j, k, l].map(|v| v as f64 / m as f64);
                    let p: Vec<f64> = (0..3)
                        .map(|c| (0..4).map(|v| w[v] * tet[v][c]).sum())
                        .collect();
                    hit.insert([
                        (p[0] / h).floor() as i64,
                        (p[1] / h).floor() as i64,
                        (p[2] / h).floor() as i64,
                    ]);
                }
            }
        }
        assert!(n as usize >= hit.len());
        assert!((n as usize) < hit.len() + hit.len() / 5);
    }
}
