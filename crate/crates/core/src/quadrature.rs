//! Fixed quadrature rules on intervals and simplices.

use nalgebra::DVector;

use crate::error::{invalid, Result};
use crate::geometry::simplex_volume;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Result<(&'static [f64], &'static [f64])> {
    const X3: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
    const W3: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    const X5: [f64; 5] = [
        -0.906_179_845_938_664,
        -0.538_469_310_105_683,
        0.0,
        0.538_469_310_105_683,
        0.906_179_845_938_664,
    ];
    const W5: [f64; 5] = [
        0.236_926_885_056_189_1,
        0.478_628_670_499_366_5,
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
    ];
    match n {
        3 => Ok((&X3, &W3)),
        5 => Ok((&X5, &W5)),
        _ => Err(invalid(
            "n",
            format!("no Gauss-Legendre rule with {n} nodes"),
        )),
    }
}

/// Five-point Gauss–Legendre integral of `f` over `[a, b]`.
pub fn gl5<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let (x, w) = gauss_legendre(5).expect("rule exists");
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    x.iter()
        .zip(w)
        .map(|(xi, wi)| wi * f(mid + half * xi))
        .sum::<f64>()
        * half
}

/// Composite Simpson rule with `n` intervals (rounded up to even).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let c = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += c * f(a + h * i as f64);
    }
    acc * h / 3.0
}

// Degree-5 seven-point rule on the reference triangle (barycentric, weights sum to 1).
const TRI7: [([f64; 3], f64); 7] = {
    const A1: f64 = 0.059_715_871_789_769_82;
    const B1: f64 = 0.470_142_064_105_115_1;
    const A2: f64 = 0.797_426_985_353_087_3;
    const B2: f64 = 0.101_286_507_323_456_3;
    const W0: f64 = 0.225;
    const W1: f64 = 0.132_394_152_788_506_2;
    const W2: f64 = 0.125_939_180_544_827_1;
    [
        ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], W0),
        ([A1, B1, B1], W1),
        ([B1, A1, B1], W1),
        ([B1, B1, A1], W1),
        ([A2, B2, B2], W2),
        ([B2, A2, B2], W2),
        ([B2, B2, A2], W2),
    ]
};

// Degree-3 five-point rule on the reference tetrahedron (weights sum to 1).
const TET5: [([f64; 4], f64); 5] = [
    ([0.25, 0.25, 0.25, 0.25], -0.8),
    ([0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0], 0.45),
    ([1.0 / 6.0, 0.5, 1.0 / 6.0, 1.0 / 6.0], 0.45),
    ([1.0 / 6.0, 1.0 / 6.0, 0.5, 1.0 / 6.0], 0.45),
    ([1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 0.5], 0.45),
];

/// Integral of `f` against Euclidean measure over the simplex spanned by
/// `points` (0 to 3 dimensional; exact for polynomials of degree 3 or more).
pub fn integrate_simplex<F>(points: &[&DVector<f64>], f: F) -> Result<f64>
where
    F: Fn(&DVector<f64>) -> f64,
{
    let vol = simplex_volume(points);
    let combo = |bary: &[f64]| -> DVector<f64> {
        let mut p = points[0] * bary[0];
        for (q, b) in points[1..].iter().zip(&bary[1..]) {
            p += *q * *b;
        }
        p
    };
    let value = match points.len() {
        1 => f(points[0]),
        2 => {
            let (x, w) = gauss_legendre(5)?;
            x.iter()
                .zip(w)
                .map(|(xi, wi)| {
                    let s = 0.5 * (1.0 + xi);
                    0.5 * wi * f(&combo(&[1.0 - s, s]))
                })
                .sum::<f64>()
                * vol
        }
        3 => TRI7.iter().map(|(b, w)| w * f(&combo(b))).sum::<f64>() * vol,
        4 => TET5.iter().map(|(b, w)| w * f(&combo(b))).sum::<f64>() * vol,
        k => {
            return Err(invalid(
                "points",
                format!("no simplex rule for {k} vertices"),
            ))
        }
    };
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl5_integrates_degree_nine() {
        let v = gl5(|x| x.powi(9) + x.powi(8), -1.0, 1.0);
        assert!((v - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let v = simpson(|x| x * x * x - x, 0.0, 2.0, 4);
        assert!((v - 2.0).abs() < 1e-13);
    }

    #[test]
    fn triangle_rule_degree_five() {
        let a = DVector::from_vec(vec![0.0, 0.0]);
        let b = DVector::from_vec(vec![1.0, 0.0]);
        let c = DVector::from_vec(vec![0.0, 1.0]);
        // int x^2 y^3 over unit triangle = 2! 3! / 7! = 12/5040
        let v = integrate_simplex(&[&a, &b, &c], |p| p[0].powi(2) * p[1].powi(3)).unwrap();
        assert!((v - 12.0 / 5040.0).abs() < 1e-15);
    }

    #[test]
    fn tetra_rule_degree_three() {
        let o = DVector::from_vec(vec![0.0, 0.0, 0.0]);
        let e: Vec<DVector<f64>> = (0..3)
            .map(|i| {
                let mut v = DVector::zeros(3);
                v[i] = 1.0;
                v
            })
            .collect();
        // int x y z over unit tetra = 1/720
        let v = integrate_simplex(&[&o, &e[0], &e[1], &e[2]], |p| p[0] * p[1] * p[2]).unwrap();
        assert!((v - 1.0 / 720.0).abs() < 1e-15);
    }
}
