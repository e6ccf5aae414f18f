use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::curve::PolygonalCurve;
use super::step::resample;
use crate::error::{invalid, Result};

/// Regular `n`-gon inscribed in the circle of radius `r` about the origin,
/// counter-clockwise, vertex 0 on the positive x axis.
pub fn circle(r: f64, n: usize) -> Result<PolygonalCurve> {
    if !(r > 0.0) {
        return Err(invalid("r0", "must be positive"));
    }
    let pts: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / n as f64;
            vec![r * a.cos(), r * a.sin()]
        })
        .collect();
    PolygonalCurve::closed(&pts)
}

fn from_polar_dense<F: Fn(f64) -> [f64; 2]>(f: F, n: usize) -> Result<PolygonalCurve> {
    let dense = 16 * n;
    let pts: Vec<Vec<f64>> = (0..dense)
        .map(|i| f(2.0 * PI * i as f64 / dense as f64).to_vec())
        .collect();
    Ok(resample(&PolygonalCurve::closed(&pts)?, n))
}

/// Ellipse with semi-axes `a`, `b`, vertices equally spaced in arclength.
pub fn ellipse(a: f64, b: f64, n: usize) -> Result<PolygonalCurve> {
    if !(a > 0.0 && b > 0.0) {
        return Err(invalid("axes", "must be positive"));
    }
    from_polar_dense(|t| [a * t.cos(), b * t.sin()], n)
}

/// Rectangle `width x height` centered at the origin with corners rounded
/// to radius `radius`; `radius = height / 2` gives a stadium.
pub fn rounded_rect(width: f64, height: f64, radius: f64, n: usize) -> Result<PolygonalCurve> {
    if !(radius > 0.0 && 2.0 * radius <= width.min(height)) {
        return Err(invalid("radius", "must be positive and fit the rectangle"));
    }
    let (sx, sy) = (width - 2.0 * radius, height - 2.0 * radius);
    let perimeter = 2.0 * (sx + sy) + 2.0 * PI * radius;
    // pieces: right side, top-right arc, top, top-left arc, left, bottom-left arc, bottom, bottom-right arc
    let (hx, hy) = (0.5 * sx, 0.5 * sy);
    let at = |mut s: f64| -> [f64; 2] {
        let arc = 0.5 * PI * radius;
        let corners = [(hx, hy), (-hx, hy), (-hx, -hy), (hx, -hy)];
        let sides = [sy, sx, sy, sx];
        // start at the middle of the right side
        s = (s + 0.5 * sy).rem_euclid(perimeter);
        for k in 0..4 {
            let (cx, cy) = corners[k];
            let base = 0.5 * PI * k as f64;
            if s <= sides[k] {
                let u = s - 0.5 * sides[k];
                return match k {
                    0 => [hx + radius, u],
                    1 => [-u, hy + radius],
                    2 => [-hx - radius, -u],
                    _ => [u, -hy - radius],
                };
            }
            s -= sides[k];
            if s <= arc {
                let a = base + s / radius;
                return [cx + radius * a.cos(), cy + radius * a.sin()];
            }
            s -= arc;
        }
        [hx + radius, -hy]
    };
    let pts: Vec<Vec<f64>> = (0..n)
        .map(|i| at(perimeter * i as f64 / n as f64).to_vec())
        .collect();
    PolygonalCurve::closed(&pts)
}

/// Star-shaped perturbation `r0 (1 + sum a_k cos(k theta + phi_k))` of a
/// circle, `k = 2..=modes+1`, with coefficients drawn from `seed`.
pub fn fourier_circle(
    r0: f64,
    amplitude: f64,
    modes: usize,
    seed: u64,
    n: usize,
) -> Result<PolygonalCurve> {
    if !(r0 > 0.0) || !(0.0..0.5).contains(&amplitude) {
        return Err(invalid("amplitude", "must lie in [0, 0.5) with r0 > 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms: Vec<(usize, f64, f64)> = (0..modes)
        .map(|j| {
            let k = j + 2;
            let a = amplitude * rng.gen_range(-1.0..1.0) / k as f64;
            let phi = rng.gen_range(0.0..2.0 * PI);
            (k, a, phi)
        })
        .collect();
    let total: f64 = terms.iter().map(|t| t.1.abs()).sum();
    let norm = if total > amplitude && total > 0.0 {
        amplitude / total
    } else {
        1.0
    };
    from_polar_dense(
        |t| {
            let r = r0
                * (1.0
                    + terms
                        .iter()
                        .map(|&(k, a, phi)| norm * a * (k as f64 * t + phi).cos())
                        .sum::<f64>());
            [r * t.cos(), r * t.sin()]
        },
        n,
    )
}

/// Named initial curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveSpec {
    Circle {
        r0: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    RoundedRect {
        width: f64,
        height: f64,
        radius: f64,
    },
    Fourier {
        r0: f64,
        amplitude: f64,
        modes: usize,
        seed: u64,
    },
}

impl CurveSpec {
    pub fn build(&self, n: usize) -> Result<PolygonalCurve> {
        match *self {
            CurveSpec::Circle { r0 } => circle(r0, n),
            CurveSpec::Ellipse { a, b } => ellipse(a, b, n),
            CurveSpec::RoundedRect {
                width,
                height,
                radius,
            } => rounded_rect(width, height, radius, n),
            CurveSpec::Fourier {
                r0,
                amplitude,
                modes,
                seed,
            } => fourier_circle(r0, amplitude, modes, seed, n),
        }
    }

    pub fn name(&self) -> String {
        match *self {
            CurveSpec::Circle { r0 } => format!("circle(r0={r0})"),
            CurveSpec::Ellipse { a, b } => format!("ellipse(a={a},b={b})"),
            CurveSpec::RoundedRect {
                width,
                height,
                radius,
            } => format!("rounded_rect({width}x{height},r={radius})"),
            CurveSpec::Fourier { r0, seed, .. } => format!("fourier(r0={r0},seed={seed})"),
        }
    }
}

/// The default suite of embedded planar initial curves.
pub fn default_registry(seed: u64) -> Vec<CurveSpec> {
    vec![
        CurveSpec::Circle { r0: 1.0 },
        CurveSpec::Ellipse { a: 2.0, b: 1.0 },
        CurveSpec::Ellipse { a: 1.5, b: 0.5 },
        CurveSpec::RoundedRect {
            width: 2.0,
            height: 2.0,
            radius: 0.3,
        },
        CurveSpec::RoundedRect {
            width: 3.0,
            height: 1.0,
            radius: 0.5,
        },
        CurveSpec::Fourier {
            r0: 1.0,
            amplitude: 0.3,
            modes: 4,
            seed,
        },
        CurveSpec::Fourier {
            r0: 1.0,
            amplitude: 0.35,
            modes: 6,
            seed: seed.wrapping_add(1),
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ellipse_area_and_spacing() {
        let e = ellipse(2.0, 1.0, 256).unwrap();
        let area = e.signed_area().unwrap();
        assert!((area - 2.0 * PI).abs() / (2.0 * PI) < 1e-3);
        let (lo, hi) = (
            e.min_edge(),
            (0..256).map(|i| e.edge_len(i)).fold(0.0, f64::max),
        );
        assert!(hi / lo < 1.01);
    }

    #[test]
    fn rounded_rect_area() {
        let (w, h, r) = (2.0, 2.0, 0.3);
        let c = rounded_rect(w, h, r, 400).unwrap();
        let exact = w * h - (4.0 - PI) * r * r;
        assert!((c.signed_area().unwrap() - exact).abs() / exact < 1e-3);
        assert!(!c.self_intersects());
    }

    #[test]
    fn fourier_is_seeded_and_embedded() {
        let a = fourier_circle(1.0, 0.3, 4, 9, 128).unwrap();
        let b = fourier_circle(1.0, 0.3, 4, 9, 128).unwrap();
        assert_eq!(a, b);
        assert!(!a.self_intersects());
        assert!(a.signed_area().unwrap() > 0.0);
    }

    #[test]
    fn spec_round_trip() {
        for spec in default_registry(3) {
            let json = serde_json::to_string(&spec).unwrap();
            let back: CurveSpec = serde_json::from_str(&json).unwrap();
            assert_eq!(back, spec);
            assert_eq!(spec.build(64).unwrap().len(), 64);
        }
    }
}
