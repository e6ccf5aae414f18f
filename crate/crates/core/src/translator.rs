//! Rotationally symmetric translators of the weighted area functional
//! `(1/eps) int e^{-z/eps} dA` spanning a circle, and their rescaled slices.
//!
//! The profile is a graph `z = u(r)` over the disc of radius `r0`. Its
//! Euler–Lagrange equation is
//! `u'' / W^3 + u' / (r W) + 1 / (eps W) = 0` with `W = sqrt(1 + u'^2)`,
//! regular at the tip where `u = h - r^2/(4 eps) - r^4/(128 eps^3) + ...`.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::PolyhedralChain;
use crate::quadrature::integrate_simplex;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TranslatorOptions {
    /// Uniform radial steps between the tip and the boundary.
    pub steps: usize,
    /// Tolerance on `u(r0) = 0`.
    pub boundary_tol: f64,
}

impl Default for TranslatorOptions {
    fn default() -> Self {
        Self {
            steps: 2000,
            boundary_tol: 1e-10,
        }
    }
}

/// Profile of the translator on a uniform radial grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranslatorProfile {
    pub epsilon: f64,
    pub r0: f64,
    /// Heights increasing from `0` at the boundary to the tip height.
    pub z: Vec<f64>,
    /// Radii `r(z)`, from `r0` down to `0`.
    pub r: Vec<f64>,
    pub tip_height: f64,
    pub bisection_steps: usize,
}

impl TranslatorProfile {
    /// `(r, u(r))` in increasing `r`.
    fn graph(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.r.iter().rev().copied().collect(),
            self.z.iter().rev().copied().collect(),
        )
    }

    fn dr(&self) -> f64 {
        self.r0 / (self.r.len() - 1) as f64
    }

    pub fn to_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["z", "r"])?;
        for (z, r) in self.z.iter().zip(&self.r) {
            w.write_record([z.to_string(), r.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn rhs(r: f64, w: f64, eps: f64) -> f64 {
    -(1.0 + w * w) * (w / r + 1.0 / eps)
}

/// `u(r) - u(0)` on the uniform grid, by RK4 started from the tip series.
fn shoot(r0: f64, eps: f64, steps: usize) -> Vec<f64> {
    let dr = r0 / steps as f64;
    let mut u = vec![0.0; steps + 1];
    let e3 = eps.powi(3);
    let r = dr;
    u[1] = -r * r / (4.0 * eps) - r.powi(4) / (128.0 * e3);
    let mut w = -r / (2.0 * eps) - r.powi(3) / (32.0 * e3);
    for i in 1..steps {
        let r = i as f64 * dr;
        let (u0, w0) = (u[i], w);
        let k1 = (w0, rhs(r, w0, eps));
        let w1 = w0 + 0.5 * dr * k1.1;
        let k2 = (w1, rhs(r + 0.5 * dr, w1, eps));
        let w2 = w0 + 0.5 * dr * k2.1;
        let k3 = (w2, rhs(r + 0.5 * dr, w2, eps));
        let w3 = w0 + dr * k3.1;
        let k4 = (w3, rhs(r + dr, w3, eps));
        u[i + 1] = u0 + dr / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        w = w0 + dr / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    }
    u
}

/// Shoots from the tip and bisects on the tip height until the profile
/// meets the boundary circle at height zero.
pub fn solve_profile(r0: f64, eps: f64, opts: &TranslatorOptions) -> Result<TranslatorProfile> {
    if !(r0 > 0.0 && eps > 0.0) || opts.steps < 8 {
        return Err(invalid(
            "translator",
            "need r0, eps > 0 and at least 8 steps",
        ));
    }
    if eps > 0.25 * r0 {
        return Err(Error::NoBracket(format!(
            "eps = {eps} exceeds r0/4 = {}, no cap forms",
            0.25 * r0
        )));
    }
    let shape = shoot(r0, eps, opts.steps);
    let drop = shape[opts.steps];
    let boundary = |h: f64| h + drop;
    let (mut lo, mut hi) = (0.0, r0 * r0 / eps);
    if boundary(lo) > 0.0 || boundary(hi) < 0.0 {
        return Err(Error::NoBracket(format!("tip height outside [0, {hi}]")));
    }
    let mut h = 0.5 * (lo + hi);
    let mut count = 0;
    while boundary(h).abs() > opts.boundary_tol && count < 200 {
        if boundary(h) > 0.0 {
            hi = h;
        } else {
            lo = h;
        }
        h = 0.5 * (lo + hi);
        count += 1;
    }
    let dr = r0 / opts.steps as f64;
    let z: Vec<f64> = shape.iter().rev().map(|s| h + s).collect();
    let r: Vec<f64> = (0..=opts.steps).rev().map(|i| i as f64 * dr).collect();
    Ok(TranslatorProfile {
        epsilon: eps,
        r0,
        z,
        r,
        tip_height: h,
        bisection_steps: count,
    })
}

/// Five-point first and second differences at interior index `i`.
fn fd(u: &[f64], i: usize, h: f64) -> (f64, f64) {
    let (a, b, c, d, e) = (u[i - 2], u[i - 1], u[i], u[i + 1], u[i + 2]);
    let d1 = (a - 8.0 * b + 8.0 * d - e) / (12.0 * h);
    let d2 = (-a + 16.0 * b - 30.0 * c + 16.0 * d - e) / (12.0 * h * h);
    (d1, d2)
}

/// Sup norm of `u''/W^3 + u'/(rW) + 1/(eps W)` over interior grid points.
pub fn el_residual(profile: &TranslatorProfile) -> f64 {
    let (r, u) = profile.graph();
    let h = profile.dr();
    let eps = profile.epsilon;
    (2..r.len() - 2)
        .map(|i| {
            let (d1, d2) = fd(&u, i, h);
            let w = (1.0 + d1 * d1).sqrt();
            (d2 / w.powi(3) + d1 / (r[i] * w) + 1.0 / (eps * w)).abs()
        })
        .fold(0.0, f64::max)
}

/// Sup norm of the curve residual `f''/W^3 + 1/(eps W)` of the grim reaper
/// `f(x) = eps log cos(x/eps)` on `|x| <= x_max`, by the same five-point
/// differences with `n` samples.
pub fn grim_reaper_residual(eps: f64, x_max: f64, n: usize) -> Result<f64> {
    if !(eps > 0.0) || !(x_max > 0.0 && x_max < 0.5 * PI * eps) || n < 5 {
        return Err(invalid(
            "grim reaper",
            "need 0 < x_max < pi eps / 2 and n >= 5",
        ));
    }
    let h = 2.0 * x_max / (n - 1) as f64;
    let f: Vec<f64> = (-2..n as i64 + 2)
        .map(|i| {
            let x = -x_max + i as f64 * h;
            eps * (x / eps).cos().ln()
        })
        .collect();
    Ok((2..n + 2)
        .map(|i| {
            let (d1, d2) = fd(&f, i, h);
            let w = (1.0 + d1 * d1).sqrt();
            (d2 / w.powi(3) + 1.0 / (eps * w)).abs()
        })
        .fold(0.0, f64::max))
}

fn subdivide(points: &[&DVector<f64>], m: usize) -> Vec<Vec<DVector<f64>>> {
    let p = |a: f64, b: f64| -> DVector<f64> {
        points[0] + (points[1] - points[0]) * a + (points[2] - points[0]) * b
    };
    let mf = m as f64;
    match points.len() {
        2 => (0..m)
            .map(|i| {
                let d = points[1] - points[0];
                vec![
                    points[0] + &d * (i as f64 / mf),
                    points[0] + &d * ((i + 1) as f64 / mf),
                ]
            })
            .collect(),
        3 => {
            let mut out = Vec::with_capacity(m * m);
            for i in 0..m {
                for j in 0..m - i {
                    let (a, b) = (i as f64 / mf, j as f64 / mf);
                    let s = 1.0 / mf;
                    out.push(vec![p(a, b), p(a + s, b), p(a, b + s)]);
                    if i + j + 1 < m {
                        out.push(vec![p(a + s, b), p(a + s, b + s), p(a, b + s)]);
                    }
                }
            }
            out
        }
        _ => vec![points.iter().map(|q| (*q).clone()).collect()],
    }
}

/// `(1/eps) int e^{-z/eps} dA` over the chain, `z` being the first
/// coordinate. Segments and triangles are subdivided until their height
/// range is at most `eps/2` before degree-5 quadrature.
pub fn i_eps_functional(chain: &PolyhedralChain, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(invalid("eps", "must be positive"));
    }
    if !chain.time_flag() {
        return Err(Error::MissingTimeFlag);
    }
    let f = |p: &DVector<f64>| (-p[0] / eps).exp() / eps;
    let mut total = 0.0;
    for s in chain.simplices() {
        let pts = chain.simplex_points(s);
        let (lo, hi) = pts
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
                (a.min(p[0]), b.max(p[0]))
            });
        let m = (((hi - lo) / (0.5 * eps)).ceil() as usize).max(1);
        let mut part = 0.0;
        for piece in subdivide(&pts, m) {
            let refs: Vec<&DVector<f64>> = piece.iter().collect();
            part += integrate_simplex(&refs, f)?;
        }
        total += s.mult as f64 * part;
    }
    Ok(total)
}

/// Surface of revolution of the profile in `R^{1,2}` (height first) with
/// `rings` radial rings and `segments` angular sectors.
pub fn tessellate(
    profile: &TranslatorProfile,
    rings: usize,
    segments: usize,
) -> Result<PolyhedralChain> {
    if rings == 0 || segments < 3 {
        return Err(invalid("tessellation", "need rings >= 1 and segments >= 3"));
    }
    let (r, u) = profile.graph();
    let steps = r.len() - 1;
    let mut chain = PolyhedralChain::new(2, 3, true);
    let tip = chain.add_vertex(DVector::from_vec(vec![u[0], 0.0, 0.0]))?;
    let mut prev: Option<usize> = None;
    for j in 1..=rings {
        let i = (j * steps) / rings;
        let base = chain.vertices().len();
        for s in 0..segments {
            let a = 2.0 * PI * s as f64 / segments as f64;
            chain.add_vertex(DVector::from_vec(vec![
                u[i],
                r[i] * a.cos(),
                r[i] * a.sin(),
            ]))?;
        }
        for s in 0..segments {
            let s1 = (s + 1) % segments;
            match prev {
                None => {
                    chain.try_push_simplex(vec![tip, base + s, base + s1], 1)?;
                }
                Some(p) => {
                    chain.try_push_simplex(vec![p + s, base + s, base + s1], 1)?;
                    chain.try_push_simplex(vec![p + s, base + s1, p + s1], 1)?;
                }
            }
        }
        prev = Some(base);
    }
    Ok(chain)
}

/// Slices `(eps z, r)` of the rescaled track.
pub fn rescaled_slices(profile: &TranslatorProfile) -> Vec<(f64, f64)> {
    profile
        .z
        .iter()
        .zip(&profile.r)
        .map(|(z, r)| (profile.epsilon * z, *r))
        .collect()
}

/// `sup |r_eps(t) - sqrt(max(0, r0^2 - 2t))|` over the slices.
pub fn slice_error(profile: &TranslatorProfile) -> f64 {
    let r0 = profile.r0;
    rescaled_slices(profile)
        .iter()
        .map(|(t, r)| (r - (r0 * r0 - 2.0 * t).max(0.0).sqrt()).abs())
        .fold(0.0, f64::max)
}

pub fn slices_to_csv(profile: &TranslatorProfile, path: &Path) -> Result<()> {
    let r0 = profile.r0;
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "r_eps", "r_exact", "error"])?;
    for (t, r) in rescaled_slices(profile) {
        let exact = (r0 * r0 - 2.0 * t).max(0.0).sqrt();
        w.write_record([
            t.to_string(),
            r.to_string(),
            exact.to_string(),
            (r - exact).abs().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub lambda: f64,
    /// Largest `|z_lambda - lambda z|` over the tip height `lambda h`.
    pub profile_error: f64,
    /// Largest deviation of the rescaled slices from `eta_lambda` of the
    /// original slices, relative to `lambda^2 eps h`.
    pub slice_error: f64,
    pub verdict: bool,
}

/// Solves the `(lambda r0, lambda eps)` problem independently and compares
/// it with the scaled original profile.
pub fn check_scaling_covariance(
    profile: &TranslatorProfile,
    lambda: f64,
    opts: &TranslatorOptions,
) -> Result<ScalingReport> {
    if !(lambda > 0.0) {
        return Err(invalid("lambda", "must be positive"));
    }
    let opts = TranslatorOptions {
        steps: profile.r.len() - 1,
        ..opts.clone()
    };
    let big = solve_profile(lambda * profile.r0, lambda * profile.epsilon, &opts)?;
    let scale_z = lambda * profile.tip_height;
    let mut profile_error: f64 = 0.0;
    for i in 0..big.z.len() {
        profile_error = profile_error.max((big.z[i] - lambda * profile.z[i]).abs() / scale_z);
        profile_error =
            profile_error.max((big.r[i] - lambda * profile.r[i]).abs() / (lambda * profile.r0));
    }
    let (a, b) = (rescaled_slices(profile), rescaled_slices(&big));
    let l2 = lambda * lambda;
    let t_scale = l2 * profile.epsilon * profile.tip_height;
    let mut slice_err: f64 = 0.0;
    for ((t, r), (tb, rb)) in a.iter().zip(&b) {
        slice_err = slice_err.max((tb - l2 * t).abs() / t_scale);
        slice_err = slice_err.max((rb - lambda * r).abs() / (lambda * profile.r0));
    }
    Ok(ScalingReport {
        lambda,
        profile_error,
        slice_error: slice_err,
        verdict: profile_error <= 1e-6 && slice_err <= 1e-6,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceEntry {
    pub epsilon: f64,
    pub tip_height: f64,
    /// `eps * h`, the rescaled extinction time.
    pub rescaled_height: f64,
    pub el_residual: f64,
    pub slice_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub r0: f64,
    pub entries: Vec<ConvergenceEntry>,
    /// Ratios of consecutive slice errors.
    pub factors: Vec<f64>,
    pub non_increasing: bool,
}

/// Profiles over a decreasing ladder of `eps` values.
pub fn convergence_report(
    r0: f64,
    eps_ladder: &[f64],
    opts: &TranslatorOptions,
) -> Result<ConvergenceReport> {
    let entries = eps_ladder
        .iter()
        .map(|&eps| {
            let p = solve_profile(r0, eps, opts)?;
            Ok(ConvergenceEntry {
                epsilon: eps,
                tip_height: p.tip_height,
                rescaled_height: eps * p.tip_height,
                el_residual: el_residual(&p),
                slice_error: slice_error(&p),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let factors: Vec<f64> = entries
        .windows(2)
        .map(|w| w[1].slice_error / w[0].slice_error)
        .collect();
    let non_increasing = factors.iter().all(|&f| f <= 1.0);
    Ok(ConvergenceReport {
        r0,
        entries,
        factors,
        non_increasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::kuhn_box;

    fn cube_at(z0: f64, k: usize) -> PolyhedralChain {
        kuhn_box(&vec![0.0; k], &vec![1.0; k], 2, false)
            .unwrap()
            .map_vertices(k + 1, true, |v| {
                let mut p = vec![z0];
                p.extend(v.iter());
                DVector::from_vec(p)
            })
            .unwrap()
    }

    #[test]
    fn functional_on_flat_pieces() {
        let eps = 0.3;
        for k in 1..=2 {
            let v = i_eps_functional(&cube_at(0.0, k), eps).unwrap();
            assert!((v - 1.0 / eps).abs() < 1e-13);
            let v = i_eps_functional(&cube_at(0.7, k), eps).unwrap();
            assert!((v - (-0.7f64 / eps).exp() / eps).abs() < 1e-13);
        }
    }

    #[test]
    fn functional_on_vertical_ray() {
        let eps = 0.05;
        let mut c = PolyhedralChain::new(1, 2, true);
        c.add_vertex(DVector::from_vec(vec![0.0, 0.3])).unwrap();
        c.add_vertex(DVector::from_vec(vec![40.0 * eps, 0.3]))
            .unwrap();
        c.push_simplex(vec![0, 1], 1).unwrap();
        assert!((i_eps_functional(&c, eps).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tip_series_and_boundary() {
        let p = solve_profile(1.0, 0.1, &TranslatorOptions::default()).unwrap();
        assert_eq!(p.r[0], 1.0);
        assert!(p.z[0].abs() < 1e-10);
        assert_eq!(*p.r.last().unwrap(), 0.0);
        assert!(p.z.windows(2).all(|w| w[1] > w[0]));
        assert!(el_residual(&p) < 1e-6);
    }

    #[test]
    fn large_eps_has_no_bracket() {
        assert!(matches!(
            solve_profile(1.0, 0.3, &TranslatorOptions::default()),
            Err(Error::NoBracket(_))
        ));
    }

    #[test]
    fn grim_reaper_control() {
        assert!(grim_reaper_residual(0.1, 0.12, 1001).unwrap() < 1e-8);
        // the reflected curve -eps log cos(x/eps) solves the opposite-sign equation
        let eps: f64 = 0.1;
        let x: f64 = 0.05;
        let w = 1.0 / (x / eps).cos();
        let f2 = 1.0 / (eps * (x / eps).cos().powi(2));
        assert!((f2 / w.powi(3) - 1.0 / (eps * w)).abs() < 1e-12);
    }

    #[test]
    fn disc_competitor_is_worse() {
        let (r0, eps) = (1.0, 0.1);
        let p = solve_profile(r0, eps, &TranslatorOptions::default()).unwrap();
        let v = i_eps_functional(&tessellate(&p, 100, 64).unwrap(), eps).unwrap();
        assert!(v <= PI * r0 * r0 / eps);
    }

    #[test]
    fn unit_lambda_is_identity() {
        let o = TranslatorOptions {
            steps: 500,
            ..Default::default()
        };
        let p = solve_profile(1.0, 0.1, &o).unwrap();
        let r = check_scaling_covariance(&p, 1.0, &o).unwrap();
        assert_eq!(r.profile_error, 0.0);
        assert!(r.verdict);
    }
}
