use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};
use crate::geometry::PolyhedralChain;

const TOL: f64 = 1e-12;

/// Point where the segment `pq` meets `{t = c}`, computed from a canonical
/// endpoint order so shared edges give bit-identical points.
pub(crate) fn edge_crossing(p: &DVector<f64>, q: &DVector<f64>, c: f64) -> DVector<f64> {
    let (a, b) = if p.as_slice() <= q.as_slice() {
        (p, q)
    } else {
        (q, p)
    };
    let s = (c - a[0]) / (b[0] - a[0]);
    let mut x = a + (b - a) * s;
    x[0] = c;
    x
}

#[derive(Clone, Copy, PartialEq)]
enum Side {
    Above,
    Below,
}

fn empty_slice(track: &PolyhedralChain) -> PolyhedralChain {
    PolyhedralChain::new(track.dim() - 1, track.ambient() - 1, false)
}

/// The time slice of a space-time chain as a chain in space.
///
/// Faces lying in `{time = t}` are attributed to the simplices above them,
/// except at the top of the time extent where the simplices below are used.
/// Slices are oriented so that, for a track `T`, the boundary of `T`
/// restricted to `{time < s}` is `T_0 - T_s`.
pub fn slice_at_time(track: &PolyhedralChain, t: f64) -> Result<PolyhedralChain> {
    if !track.time_flag() {
        return Err(Error::MissingTimeFlag);
    }
    if track.dim() == 0 {
        return Err(invalid("dim", "slicing needs dim >= 1"));
    }
    let Some((lo, hi)) = track.time_extent() else {
        return Ok(empty_slice(track));
    };
    if t < lo - TOL || t > hi + TOL || lo == hi {
        return Ok(empty_slice(track));
    }
    let side = if (t - hi).abs() <= TOL {
        Side::Below
    } else {
        Side::Above
    };
    slice_with(track, t, side)
}

fn slice_with(track: &PolyhedralChain, t: f64, side: Side) -> Result<PolyhedralChain> {
    let d = track.dim();
    let verts = track.vertices();
    let mut out = empty_slice(track);
    let mut on_plane: HashMap<usize, usize> = HashMap::new();
    let mut crossings: HashMap<(usize, usize), usize> = HashMap::new();
    for s in track.simplices() {
        let times: Vec<f64> = s.verts.iter().map(|&i| verts[i][0]).collect();
        let tmin = times.iter().copied().fold(f64::INFINITY, f64::min);
        let tmax = times.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let take = match side {
            Side::Above => tmin <= t + TOL && tmax > t + TOL,
            Side::Below => tmin < t - TOL && tmax >= t - TOL,
        };
        if !take {
            continue;
        }
        // slice points: (ambient point, output index)
        let mut pts: Vec<(DVector<f64>, usize)> = Vec::new();
        for (a, &i) in s.verts.iter().enumerate() {
            if (times[a] - t).abs() <= TOL {
                let idx = match on_plane.get(&i) {
                    Some(&k) => k,
                    None => {
                        let k =
                            out.add_vertex(verts[i].rows(1, verts[i].len() - 1).into_owned())?;
                        on_plane.insert(i, k);
                        k
                    }
                };
                let mut p = verts[i].clone();
                p[0] = t;
                pts.push((p, idx));
            }
        }
        for a in 0..s.verts.len() {
            for b in a + 1..s.verts.len() {
                let (da, db) = (times[a] - t, times[b] - t);
                if da.abs() <= TOL || db.abs() <= TOL || da * db >= 0.0 {
                    continue;
                }
                let (i, j) = (s.verts[a], s.verts[b]);
                let key = (i.min(j), i.max(j));
                let p = edge_crossing(&verts[i], &verts[j], t);
                let idx = match crossings.get(&key) {
                    Some(&k) => k,
                    None => {
                        let k = out.add_vertex(p.rows(1, p.len() - 1).into_owned())?;
                        crossings.insert(key, k);
                        k
                    }
                };
                pts.push((p, idx));
            }
        }
        if pts.len() < d {
            continue;
        }
        let simplex_pts = track.simplex_points(s);
        let edges = DMatrix::from_columns(
            &simplex_pts[1..]
                .iter()
                .map(|p| *p - simplex_pts[0])
                .collect::<Vec<_>>(),
        );
        let argmin = (0..times.len())
            .min_by(|&a, &b| times[a].total_cmp(&times[b]))
            .unwrap();
        let argmax = (0..times.len())
            .max_by(|&a, &b| times[a].total_cmp(&times[b]))
            .unwrap();
        let up = simplex_pts[argmax] - simplex_pts[argmin];
        for piece in pieces(&pts, d) {
            let mut cols: Vec<DVector<f64>> = piece[1..]
                .iter()
                .map(|&k| &pts[k].0 - &pts[piece[0]].0)
                .collect();
            cols.push(up.clone());
            let m = edges.transpose() * DMatrix::from_columns(&cols);
            let det = m.determinant();
            if det == 0.0 {
                continue;
            }
            let sign = if det > 0.0 { 1 } else { -1 };
            let ids: Vec<usize> = piece.iter().map(|&k| pts[k].1).collect();
            out.try_push_simplex(ids, sign * s.coefficient())?;
        }
    }
    Ok(out)
}

/// Splits the slice point set of one simplex into `(d-1)`-simplices,
/// returned as index lists into `pts`.
fn pieces(pts: &[(DVector<f64>, usize)], d: usize) -> Vec<Vec<usize>> {
    match d {
        1 => vec![vec![0]],
        2 => {
            let mut best = (0, 1, -1.0);
            for a in 0..pts.len() {
                for b in a + 1..pts.len() {
                    let dist = (&pts[a].0 - &pts[b].0).norm();
                    if dist > best.2 {
                        best = (a, b, dist);
                    }
                }
            }
            vec![vec![best.0, best.1]]
        }
        3 => {
            // convex polygon in a plane: sort by angle about the centroid
            let n = pts.len();
            let c = pts
                .iter()
                .fold(DVector::zeros(pts[0].0.len()), |acc, p| acc + &p.0)
                / n as f64;
            let e1 = (0..n)
                .map(|i| &pts[i].0 - &c)
                .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                .unwrap();
            let e1 = &e1 / e1.norm();
            let mut e2 = DVector::zeros(c.len());
            for p in pts {
                let w = &p.0 - &c;
                let w = &w - &e1 * e1.dot(&w);
                if w.norm() > e2.norm() {
                    e2 = w;
                }
            }
            if e2.norm() == 0.0 {
                return Vec::new();
            }
            let e2 = &e2 / e2.norm();
            let mut order: Vec<(f64, usize)> = (0..n)
                .map(|i| {
                    let w = &pts[i].0 - &c;
                    (w.dot(&e2).atan2(w.dot(&e1)), i)
                })
                .collect();
            order.sort_by(|a, b| a.0.total_cmp(&b.0));
            (1..n - 1)
                .map(|k| vec![order[0].1, order[k].1, order[k + 1].1])
                .collect()
        }
        _ => Vec::new(),
    }
}

/// The part of a space-time chain (dimension 1 or 2) with time in `[a, b]`.
pub fn restrict_to_slab(track: &PolyhedralChain, a: f64, b: f64) -> Result<PolyhedralChain> {
    if !track.time_flag() {
        return Err(Error::MissingTimeFlag);
    }
    let d = track.dim();
    if d == 0 || d > 2 {
        return Err(invalid(
            "dim",
            "slab restriction supports dimensions 1 and 2",
        ));
    }
    let mut out = PolyhedralChain::new(d, track.ambient(), true);
    if !(b > a) {
        return Ok(out);
    }
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut add = |out: &mut PolyhedralChain, p: &DVector<f64>| -> Result<usize> {
        let key: Vec<u64> = p.iter().map(|c| (c + 0.0).to_bits()).collect();
        if let Some(&k) = index.get(&key) {
            return Ok(k);
        }
        let k = out.add_vertex(p.clone())?;
        index.insert(key, k);
        Ok(k)
    };
    for s in track.simplices() {
        let poly: Vec<DVector<f64>> = track.simplex_points(s).into_iter().cloned().collect();
        let closed = d == 2;
        let poly = clip_half(&poly, a, true, closed);
        let poly = clip_half(&poly, b, false, closed);
        if poly.len() < d + 1 {
            continue;
        }
        let ids: Vec<usize> = poly
            .iter()
            .map(|p| add(&mut out, p))
            .collect::<Result<_>>()?;
        if d == 1 {
            out.try_push_simplex(vec![ids[0], ids[1]], s.coefficient())?;
        } else {
            for k in 1..ids.len() - 1 {
                out.try_push_simplex(vec![ids[0], ids[k], ids[k + 1]], s.coefficient())?;
            }
        }
    }
    Ok(out)
}

/// Sutherland–Hodgman clip of an ordered vertex list against `t >= c`
/// (`keep_above`) or `t <= c`.
fn clip_half(poly: &[DVector<f64>], c: f64, keep_above: bool, closed: bool) -> Vec<DVector<f64>> {
    let inside = |p: &DVector<f64>| if keep_above { p[0] >= c } else { p[0] <= c };
    let n = poly.len();
    let mut out = Vec::new();
    let edges = if closed { n } else { n - 1 };
    if !closed && n > 0 && inside(&poly[0]) {
        out.push(poly[0].clone());
    }
    for i in 0..edges {
        let p = &poly[i];
        let q = &poly[(i + 1) % n];
        match (inside(p), inside(q)) {
            (true, true) => out.push(q.clone()),
            (true, false) => out.push(edge_crossing(p, q, c)),
            (false, true) => {
                out.push(edge_crossing(p, q, c));
                out.push(q.clone());
            }
            (false, false) => {}
        }
    }
    out
}
