use std::f64::consts::PI;

use pgmt_core::coarea::calibrate;
use pgmt_core::flow::{ellipse, run_to_extinction, FlowHistory, FlowOptions};
use pgmt_core::measure::dyadic_ladder;
use pgmt_core::monotonicity::{center_grid, check_monotone};
use pgmt_core::track::{build_track, check_projection_bounds, check_isoperimetric, check_track_measure};
use pgmt_core::translator::{
    check_scaling_covariance, convergence_report, grim_reaper_residual, solve_profile, TranslatorOptions,
};

fn ellipse_history() -> FlowHistory {
    run_to_extinction(&ellipse(2.0, 1.0, 128).unwrap(), &FlowOptions::default()).unwrap()
}

#[test]
fn ellipse_density_and_projection() {
    let h = ellipse_history();
    for p in center_grid(&h.last().curve.centroid(), 0.1) {
        let (_, r) = check_monotone(&h, &p, h.tau, 30).unwrap();
        assert!(r.verdict, "center {p:?}: {r:?}");
    }
    let track = build_track(&h).unwrap();
    let (a, b) = track.time_extent;
    for end in [0.5 * (a + b), b] {
        for r in check_projection_bounds(&track, a, end).unwrap() {
            assert!(r.verdict, "{r:?}");
        }
    }
    let tb = check_isoperimetric(&h).unwrap();
    assert!(tb.verdict);
    // nested curves sweep the enclosed area exactly once
    let area = h.enclosed_area0.unwrap();
    assert!(
        (tb.mass.lhs / area - 1.0).abs() < 0.01,
        "swept {}",
        tb.mass.lhs
    );
    let l0 = h.mass0();
    assert!((tb.mass.rhs - l0 * l0 / (4.0 * PI).sqrt()).abs() < 1e-9);
    assert!(tb.mass.rhs > 26.0 && tb.mass.rhs < 27.0);
}

#[test]
fn circle_isoperimetric_instance() {
    let h = FlowHistory::shrinking_circle(1.0, 512, 64).unwrap();
    let tb = check_isoperimetric(&h).unwrap();
    assert!(tb.verdict && tb.boundary_matches);
    // inscribed polygon of a disc: area (n/2) sin(2 pi / n)
    let disc = 256.0 * (2.0 * PI / 512.0).sin();
    assert!((tb.mass.lhs - disc).abs() < 1e-9, "{}", tb.mass.lhs);
    let l0 = 1024.0 * (PI / 512.0).sin();
    assert!((tb.mass.rhs - l0 * l0 / (4.0 * PI).sqrt()).abs() < 1e-9);
    assert!((tb.mass.rhs - 2.0 * PI.powf(1.5)).abs() < 1e-3);
}

#[test]
fn circle_track_measure_route() {
    let ladder = dyadic_ladder(3, 7);
    let c1 = calibrate(1, &ladder, 32).unwrap().mean;
    let track = build_track(&FlowHistory::shrinking_circle(1.0, 64, 32).unwrap()).unwrap();
    let c = check_track_measure(&track, c1, &ladder, 32).unwrap();
    assert!(c.bound_holds);
    assert!((c.route_ratio - 1.0).abs() < 0.1, "{}", c.route_ratio);
    // c1 (pi/4) int_0^{1/2} 2 pi sqrt(1 - 2t) dt
    let closed = c1 * PI * PI / 6.0;
    assert!((c.route_mu / closed - 1.0).abs() < 0.01);
}

#[test]
fn translator_family() {
    let opts = TranslatorOptions::default();
    let conv = convergence_report(1.0, &[0.2, 0.1, 0.05], &opts).unwrap();
    assert!(conv.non_increasing, "{:?}", conv.factors);
    for e in &conv.entries {
        assert!(e.el_residual < 1e-6);
        assert!(e.rescaled_height > 0.0);
    }
    assert!(grim_reaper_residual(0.1, 0.12, 1001).unwrap() < 1e-8);
    let p = solve_profile(1.0, 0.1, &opts).unwrap();
    for lambda in [0.5, 2.0] {
        let s = check_scaling_covariance(&p, lambda, &opts).unwrap();
        assert!(s.profile_error <= 1e-6 && s.slice_error <= 1e-6, "{s:?}");
    }
    assert!(solve_profile(1.0, 0.3, &opts).is_err());
}
