use super::curve::PolygonalCurve;
use crate::error::{invalid, Result};

/// Solves a tridiagonal system in place (`a` sub, `b` main, `c` super).
fn thomas(a: &[f64], b: &[f64], c: &[f64], r: &mut [f64]) {
    let n = b.len();
    let mut cp = vec![0.0; n];
    let mut beta = b[0];
    r[0] /= beta;
    for i in 1..n {
        cp[i] = c[i - 1] / beta;
        beta = b[i] - a[i] * cp[i];
        r[i] = (r[i] - a[i] * r[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        r[i] -= cp[i + 1] * r[i + 1];
    }
}

/// Cyclic tridiagonal solve via Sherman-Morrison. `a[0]` couples row 0 to
/// the last unknown and `c[n-1]` couples the last row to unknown 0.
pub(crate) fn solve_cyclic(a: &[f64], b: &[f64], c: &[f64], rhs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = b.len();
    let alpha = c[n - 1];
    let beta = a[0];
    let gamma = -b[0];
    let mut bb = b.to_vec();
    bb[0] = b[0] - gamma;
    bb[n - 1] = b[n - 1] - alpha * beta / gamma;
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = alpha;
    thomas(a, &bb, c, &mut u);
    let denom = 1.0 + u[0] + beta * u[n - 1] / gamma;
    rhs.iter()
        .map(|r| {
            let mut x = r.clone();
            thomas(a, &bb, c, &mut x);
            let fact = (x[0] + beta * x[n - 1] / gamma) / denom;
            x.iter().zip(&u).map(|(xi, ui)| xi - fact * ui).collect()
        })
        .collect()
}

/// Coefficients of `x - dt * L x` for the arclength Laplacian at vertex `i`
/// with incoming edge `hm` and outgoing edge `hp`.
fn row(dt: f64, hm: f64, hp: f64) -> (f64, f64, f64) {
    let w = 2.0 / (hm + hp);
    (
        -dt * w / hm,
        1.0 + dt * w * (1.0 / hm + 1.0 / hp),
        -dt * w / hp,
    )
}

/// One semi-implicit curve shortening step of a closed curve: the
/// arclength Laplacian is frozen at the current curve and applied
/// implicitly to the new positions.
pub fn step(curve: &PolygonalCurve, dt: f64) -> Result<PolygonalCurve> {
    if !(dt > 0.0) {
        return Err(invalid("dt", "must be positive"));
    }
    if !curve.is_closed() || curve.len() < 8 {
        return Err(invalid(
            "curve",
            "needs a closed curve with at least 8 vertices",
        ));
    }
    let n = curve.len();
    let dim = curve.dim();
    let h: Vec<f64> = (0..n).map(|i| curve.edge_len(i)).collect();
    if h.iter().any(|&e| e <= 0.0) {
        return Err(invalid("curve", "coincident vertices"));
    }
    let (mut a, mut b, mut c) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for i in 0..n {
        let hm = h[(i + n - 1) % n];
        (a[i], b[i], c[i]) = row(dt, hm, h[i]);
    }
    let rhs: Vec<Vec<f64>> = (0..dim)
        .map(|k| (0..n).map(|i| curve.point(i)[k]).collect())
        .collect();
    let sol = solve_cyclic(&a, &b, &c, &rhs);
    let mut coords = vec![0.0; n * dim];
    for (k, col) in sol.iter().enumerate() {
        for i in 0..n {
            coords[i * dim + k] = col[i];
        }
    }
    Ok(PolygonalCurve::from_packed(dim, true, coords))
}

/// Semi-implicit step of an open curve whose endpoints are moved to
/// `first` and `last`.
pub fn step_open(
    curve: &PolygonalCurve,
    dt: f64,
    first: &[f64],
    last: &[f64],
) -> Result<PolygonalCurve> {
    if !(dt > 0.0) {
        return Err(invalid("dt", "must be positive"));
    }
    if curve.is_closed() {
        return Err(invalid("curve", "expected an open curve"));
    }
    let n = curve.len();
    let dim = curve.dim();
    let m = n - 2;
    let h: Vec<f64> = (0..n - 1).map(|i| curve.edge_len(i)).collect();
    let (mut a, mut b, mut c) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    let mut ends = (0.0, 0.0);
    for j in 0..m {
        let i = j + 1;
        let (lo, mid, hi) = row(dt, h[i - 1], h[i]);
        a[j] = lo;
        b[j] = mid;
        c[j] = hi;
        if j == 0 {
            ends.0 = lo;
        }
        if j == m - 1 {
            ends.1 = hi;
        }
    }
    let mut coords = vec![0.0; n * dim];
    coords[..dim].copy_from_slice(first);
    coords[(n - 1) * dim..].copy_from_slice(last);
    for k in 0..dim {
        let mut r: Vec<f64> = (1..n - 1).map(|i| curve.point(i)[k]).collect();
        r[0] -= ends.0 * first[k];
        r[m - 1] -= ends.1 * last[k];
        thomas(&a, &b, &c, &mut r);
        for j in 0..m {
            coords[(j + 1) * dim + k] = r[j];
        }
    }
    Ok(PolygonalCurve::from_packed(dim, false, coords))
}

/// Resamples a closed curve to `n` vertices equally spaced in arclength
/// along its Catmull-Rom interpolant, keeping vertex 0 in place.
pub fn resample(curve: &PolygonalCurve, n: usize) -> PolygonalCurve {
    let m = curve.len();
    let dim = curve.dim();
    let mut cum = vec![0.0; m + 1];
    for i in 0..m {
        cum[i + 1] = cum[i] + curve.edge_len(i);
    }
    let total = cum[m];
    let p = |i: isize| curve.point(i.rem_euclid(m as isize) as usize);
    let mut coords = Vec::with_capacity(n * dim);
    let mut seg = 0usize;
    for j in 0..n {
        let s = total * j as f64 / n as f64;
        while seg + 1 < m && cum[seg + 1] <= s {
            seg += 1;
        }
        let h = cum[seg + 1] - cum[seg];
        let u = if h > 0.0 { (s - cum[seg]) / h } else { 0.0 };
        let i = seg as isize;
        let (p0, p1, p2, p3) = (p(i - 1), p(i), p(i + 1), p(i + 2));
        let (u2, u3) = (u * u, u * u * u);
        for k in 0..dim {
            let v = 0.5
                * (2.0 * p1[k]
                    + (p2[k] - p0[k]) * u
                    + (2.0 * p0[k] - 5.0 * p1[k] + 4.0 * p2[k] - p3[k]) * u2
                    + (3.0 * p1[k] - p0[k] - 3.0 * p2[k] + p3[k]) * u3);
            coords.push(v);
        }
    }
    PolygonalCurve::from_packed(dim, true, coords)
}
