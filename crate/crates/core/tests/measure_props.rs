use std::f64::consts::PI;

use pgmt_core::coarea::{calibrate, relative_spread};
use pgmt_core::flow::FlowHistory;
use pgmt_core::measure::{dyadic_ladder, par_content};
use pgmt_core::track::build_track;
use pgmt_core::PolyhedralChain;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Ruled surface between a random star-shaped polygon at `t = 0` and a
/// shifted, rescaled copy at `t = t1`.
fn random_loft(rng: &mut ChaCha8Rng) -> PolyhedralChain {
    let n = 12;
    let t1 = rng.gen_range(0.1..0.6);
    let scale = rng.gen_range(0.3..1.0);
    let shift = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
    let radii: Vec<f64> = (0..n).map(|_| rng.gen_range(0.4..0.8)).collect();
    let mut c = PolyhedralChain::new(2, 3, true);
    for (i, r) in radii.iter().enumerate() {
        let a = 2.0 * PI * i as f64 / n as f64;
        let (x, y) = (r * a.cos(), r * a.sin());
        c.add_vertex_slice(&[0.0, x, y]).unwrap();
        c.add_vertex_slice(&[t1, shift[0] + scale * x, shift[1] + scale * y])
            .unwrap();
    }
    for i in 0..n {
        let j = (i + 1) % n;
        let (a0, b0, a1, b1) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
        c.push_simplex(vec![a0, a1, b1], 1).unwrap();
        c.push_simplex(vec![a0, b1, b0], 1).unwrap();
    }
    c
}

#[test]
fn content_bounded_by_euclidean_mass() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ladder = dyadic_ladder(3, 7);
    let mut ratios = Vec::new();
    for _ in 0..10 {
        let loft = random_loft(&mut rng);
        let est = par_content(&loft, 3.0, &ladder).unwrap();
        ratios.push(est.finest() / loft.mass());
    }
    for r in &ratios {
        assert!(*r > 0.0 && *r < 1.0, "ratios {ratios:?}");
    }
}

#[test]
fn parabolic_dilation_of_circle_track() {
    let track = build_track(&FlowHistory::shrinking_circle(1.0, 64, 32).unwrap()).unwrap();
    let ladder = dyadic_ladder(3, 8);
    let base = par_content(&track.chain, 3.0, &ladder)
        .unwrap()
        .extrapolated;
    for lambda in [0.5, 2.0, 3.0] {
        let scaled = track.scaled(lambda).unwrap();
        let v = par_content(&scaled.chain, 3.0, &ladder)
            .unwrap()
            .extrapolated;
        let ratio = v / base / lambda.powi(3);
        assert!((ratio - 1.0).abs() < 0.02, "lambda {lambda}: {ratio}");
    }
}

#[test]
fn top_dimensional_boxes_are_proportional() {
    let cal = calibrate(1, &dyadic_ladder(3, 9), 64).unwrap();
    assert!(cal.boxes.len() >= 5);
    assert!(cal.spread < 0.02, "spread {}", cal.spread);
    let cal2 = calibrate(2, &dyadic_ladder(3, 6), 16).unwrap();
    assert!(cal2.spread < 0.02, "spread {}", cal2.spread);
    // content / (T L^k) = alpha(k+2) (sqrt(k)/2)^(k+2) per unit cell
    let per_cell = |k: f64| {
        let s = k + 2.0;
        let alpha = PI.powf(s / 2.0) / statrs::function::gamma::gamma(s / 2.0 + 1.0);
        alpha * (k.sqrt() / 2.0).powf(s)
    };
    let ratios: Vec<f64> = cal
        .boxes
        .iter()
        .map(|b| b.2 * PI / 4.0 / per_cell(1.0))
        .collect();
    assert!(relative_spread(&ratios) < 0.02);
}

#[test]
fn ladders_converge() {
    let ladder = dyadic_ladder(3, 9);
    let mut seg = PolyhedralChain::new(1, 1, true);
    seg.add_vertex_slice(&[0.0]).unwrap();
    seg.add_vertex_slice(&[1.0]).unwrap();
    seg.push_simplex(vec![0, 1], 1).unwrap();
    assert!(par_content(&seg, 2.0, &ladder).unwrap().last_step_change() < 0.01);
    let track = build_track(&FlowHistory::shrinking_circle(1.0, 64, 32).unwrap()).unwrap();
    let est = par_content(&track.chain, 3.0, &dyadic_ladder(3, 8)).unwrap();
    // first-order on curved sets: compare consecutive extrapolants instead
    let v: Vec<f64> = est.ladder.iter().map(|e| e.value).collect();
    let n = v.len();
    let (e1, e2) = (2.0 * v[n - 2] - v[n - 3], 2.0 * v[n - 1] - v[n - 2]);
    assert!(((e1 - e2) / e2).abs() < 0.01, "{:?}", est.ladder);
    let square = pgmt_core::coarea::product_box(1.0, &[1.0], 1).unwrap();
    assert!(
        par_content(&square, 3.0, &ladder)
            .unwrap()
            .last_step_change()
            < 0.01
    );
}
