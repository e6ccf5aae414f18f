//! Acceptance run: one line per criterion, nonzero exit on any failure.

use std::f64::consts::{E, PI};
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DVector;
use pgmt_core::coarea::{
    area_formula_check, calibrate, coarea_lhs, coarea_ratio, map_registry, product_box,
    registry_names, relative_spread, volume_estimate_check,
};
use pgmt_core::flow::{
    circle, default_registry, ellipse, run_to_extinction, FlowHistory, FlowOptions,
};
use pgmt_core::geometry::{kuhn_box, PolyhedralChain};
use pgmt_core::measure::{default_ladder, dyadic_ladder, par_content};
use pgmt_core::monotonicity::{
    center_grid, check_monotone, extinction_lower_bound, extinction_upper_bound,
};
use pgmt_core::track::{
    build_track, check_projection_bounds, check_isoperimetric, check_track_measure, scaling_exponent,
    SpaceTimeTrack,
};
use pgmt_core::translator::{
    check_scaling_covariance, convergence_report, grim_reaper_residual, solve_profile, TranslatorOptions,
};
use pgmt_core::{Error, Result};

type Outcome = Result<(bool, String)>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);
type Weight = Box<dyn Fn(&[f64]) -> f64 + Sync>;

const TIME_NODES: usize = 64;
const SEED: u64 = 7;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn spatial_square(t0: f64) -> Result<PolyhedralChain> {
    kuhn_box(&[0.0, 0.0], &[1.0, 1.0], 1, false)?
        .map_vertices(3, true, |v| DVector::from_vec(vec![t0, v[0], v[1]]))
}

fn circle_track() -> Result<SpaceTimeTrack> {
    build_track(&FlowHistory::shrinking_circle(1.0, 64, 64)?)
}

fn registry_histories() -> Result<Vec<(String, FlowHistory)>> {
    default_registry(SEED)
        .into_iter()
        .map(|spec| {
            let h = run_to_extinction(&spec.build(256)?, &FlowOptions::default())?;
            Ok((spec.name(), h))
        })
        .collect()
}

fn time_segment_content() -> Outcome {
    let mut seg = PolyhedralChain::new(1, 1, true);
    seg.add_vertex_slice(&[0.0])?;
    seg.add_vertex_slice(&[1.0])?;
    seg.push_simplex(vec![0, 1], 1)?;
    let est = par_content(&seg, 2.0, &default_ladder())?;
    let err = rel(est.finest(), PI / 4.0);
    Ok((
        err <= 0.005,
        format!(
            "value {:.6} vs pi/4, relative error {err:.2e}",
            est.finest()
        ),
    ))
}

fn spatial_null() -> Outcome {
    let est = par_content(&spatial_square(0.0)?, 3.0, &default_ladder())?;
    let proportional = est.ladder.windows(2).all(|w| {
        let r = (w[0].value / w[1].value) / (w[0].delta / w[1].delta);
        (r - 1.0).abs() <= 0.1
    });
    Ok((
        proportional && est.extrapolated < 1e-2,
        format!(
            "finest {:.3e}, extrapolated {:.3e}, linear in delta: {proportional}",
            est.finest(),
            est.extrapolated
        ),
    ))
}

fn weights() -> Vec<Weight> {
    vec![
        Box::new(|_: &[f64]| 1.0),
        Box::new(|p: &[f64]| p[0]),
        Box::new(|p: &[f64]| p[1..].iter().map(|x| x * x).sum::<f64>().sqrt()),
    ]
}

fn coarea_constancy() -> Outcome {
    let ladder = default_ladder();
    let tilted = product_box(1.0, &[1.0], 1)?.map_vertices(3, true, |v| {
        DVector::from_vec(vec![v[0], v[1], 0.5 * v[1] + 0.3 * v[0]])
    })?;
    let sets = [
        product_box(1.0, &[1.0], 1)?,
        product_box(0.5, &[2.0], 1)?,
        tilted,
        map_registry("graph")?.image()?,
        circle_track()?.chain,
    ];
    let mut ratios = Vec::new();
    for set in &sets {
        for w in weights() {
            ratios.push(coarea_ratio(set, w.as_ref(), &ladder, TIME_NODES)?.ratio);
        }
    }
    let spread = relative_spread(&ratios);
    let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
    let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
    // a spatial set must have vanishing slices and vanishing content
    let sq = spatial_square(0.25)?;
    let one = |_: &[f64]| 1.0;
    let degenerate = matches!(
        coarea_ratio(&sq, &one, &ladder, TIME_NODES),
        Err(Error::DegenerateRatio)
    ) && coarea_lhs(&sq, &one, &ladder)?.extrapolated < 1e-2;
    Ok((
        spread < 0.1 && degenerate,
        format!(
            "{} ratios in [{lo:.4}, {hi:.4}], spread {spread:.4}, spatial set null: {degenerate}",
            ratios.len()
        ),
    ))
}

fn map_ladder(k: usize) -> Vec<f64> {
    dyadic_ladder(3, if k == 1 { 7 } else { 5 })
}

fn area_formula() -> Outcome {
    let ws: Vec<Weight> = vec![
        Box::new(|_: &[f64]| 1.0),
        Box::new(|p: &[f64]| 1.0 + p[0] + p[1..].iter().map(|x| x * x).sum::<f64>().sqrt()),
    ];
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    let mut fold_rejected = false;
    for name in registry_names() {
        let map = map_registry(name)?;
        map.validate(1000, SEED)?;
        for w in &ws {
            match area_formula_check(&map, w.as_ref(), &map_ladder(map.k)) {
                Ok(r) => {
                    worst = worst.max((r.ratio - 1.0).abs());
                    checked += 1;
                }
                Err(Error::NotInjective(_)) if name == "fold" => fold_rejected = true,
                Err(e) => return Err(e),
            }
        }
    }
    Ok((
        worst <= 0.05 && fold_rejected,
        format!("{checked} map/weight pairs, worst |ratio - 1| = {worst:.4}, fold rejected: {fold_rejected}"),
    ))
}

fn volume_estimate() -> Outcome {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut shear = f64::NAN;
    for name in registry_names() {
        let map = map_registry(name)?;
        let v = volume_estimate_check(&map, &map_ladder(map.k))?;
        ok &= v.lhs <= v.rhs * 1.02;
        worst = worst.max(v.ratio);
        if name == "shear" {
            shear = v.ratio;
        }
    }
    let equality = (shear - 1.0).abs() <= 0.02;
    Ok((
        ok && equality,
        format!("largest lhs/rhs {worst:.4}, shear ratio {shear:.4}"),
    ))
}

fn extinction_laws() -> Outcome {
    let opts = FlowOptions::default();
    let c = run_to_extinction(&circle(1.0, 256)?, &opts)?.tau;
    let e = run_to_extinction(&ellipse(2.0, 1.0, 256)?, &opts)?.tau;
    let (ec, ee) = (rel(c, 0.5), rel(e, 1.0));
    Ok((
        ec <= 0.01 && ee <= 0.02,
        format!("circle tau {c:.5} (error {ec:.2e}), ellipse tau {e:.5} (error {ee:.2e})"),
    ))
}

fn squeeze(runs: &[(String, FlowHistory)]) -> Outcome {
    let mut ok = runs.len() >= 6;
    let mut lines = Vec::new();
    for (name, h) in runs {
        let lower = extinction_lower_bound(h.enclosed_area0.unwrap_or(0.0).abs(), h.mass0())?;
        let upper = extinction_upper_bound(h.mass0(), 1)?;
        ok &= h.embedded && lower <= h.tau && h.tau <= upper;
        lines.push(format!("{name} {lower:.3}<={:.3}<={upper:.3}", h.tau));
    }
    Ok((ok, lines.join("; ")))
}

fn monotonicity(runs: &[(String, FlowHistory)]) -> Outcome {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for (_, h) in runs {
        for p in center_grid(&h.last().curve.centroid(), 0.1) {
            let (_, r) = check_monotone(h, &p, h.tau, 40)?;
            ok &= r.verdict;
            worst = worst.max(r.max_relative_increase);
        }
    }
    let (name, h) = &runs[0];
    assert!(name.starts_with("circle"));
    let (series, _) = check_monotone(h, &h.last().curve.centroid(), h.tau, 40)?;
    let expected = (2.0 * PI / E).sqrt();
    let dev = series
        .samples
        .iter()
        .map(|s| (s.1 - expected).abs())
        .fold(0.0, f64::max);
    Ok((
        ok && dev <= 1e-3,
        format!("{} histories x 9 centers, worst relative increase {worst:.2e}, circle deviation {dev:.2e}", runs.len()),
    ))
}

fn projections(runs: &[(String, FlowHistory)]) -> Outcome {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for (_, h) in runs {
        let track = build_track(h)?;
        let (a, b) = track.time_extent;
        for end in [0.5 * (a + b), b] {
            for r in check_projection_bounds(&track, a, end)? {
                ok &= r.verdict;
                worst = worst.max(r.ratio);
            }
        }
        let tb = check_isoperimetric(h)?;
        ok &= tb.verdict;
        worst = worst.max(tb.mass.ratio);
    }
    let tb = check_isoperimetric(&FlowHistory::shrinking_circle(1.0, 512, 64)?)?;
    let rhs = 2.0 * PI.powf(1.5);
    let circle_ok = tb.verdict && rel(tb.mass.lhs, PI) < 1e-4 && rel(tb.mass.rhs, rhs) < 1e-4;
    Ok((
        ok && circle_ok,
        format!(
            "largest lhs/rhs {worst:.4}; circle {:.6} <= {:.6} (pi, 2 pi^1.5 = {rhs:.6})",
            tb.mass.lhs, tb.mass.rhs
        ),
    ))
}

fn measure_route() -> Outcome {
    let ladder = default_ladder();
    let c1 = calibrate(1, &ladder, TIME_NODES)?.mean;
    let track = circle_track()?;
    let c = check_track_measure(&track, c1, &ladder, TIME_NODES)?;
    // c1 (pi/4) int_0^{1/2} 2 pi sqrt(1 - 2t) dt = c1 pi^2 / 6
    let closed = c1 * PI * PI / 6.0;
    let err = rel(c.mu.extrapolated, closed);
    let mut ok = c.bound_holds && err <= 0.1 && (c.route_ratio - 1.0).abs() <= 0.1;
    let mut exps = Vec::new();
    for lambda in [0.5, 2.0] {
        let e = scaling_exponent(&track, lambda, &ladder)?;
        ok &= rel(e, 3.0) <= 0.03;
        exps.push(format!("{e:.4}"));
    }
    Ok((
        ok,
        format!(
            "mu {:.4}, route {closed:.4} (error {err:.3}), bound {:.4}, exponents {}",
            c.mu.extrapolated,
            c.bound_constant * track.mass0.powi(3),
            exps.join(", ")
        ),
    ))
}

fn translator() -> Outcome {
    let opts = TranslatorOptions::default();
    let eps = [0.2, 0.1, 0.05];
    let conv = convergence_report(1.0, &eps, &opts)?;
    let el = conv
        .entries
        .iter()
        .map(|e| e.el_residual)
        .fold(0.0, f64::max);
    let gr = grim_reaper_residual(0.1, 0.12, 1001)?;
    let mut scaling: f64 = 0.0;
    for &e in &eps {
        let p = solve_profile(1.0, e, &opts)?;
        for lambda in [0.5, 2.0] {
            let s = check_scaling_covariance(&p, lambda, &opts)?;
            scaling = scaling.max(s.profile_error).max(s.slice_error);
        }
    }
    let errs: Vec<String> = conv
        .entries
        .iter()
        .map(|e| format!("{:.4}", e.slice_error))
        .collect();
    Ok((
        el < 1e-6 && gr < 1e-8 && conv.non_increasing && scaling <= 1e-6,
        format!(
            "residual {el:.2e}, grim reaper {gr:.2e}, slice errors [{}], scaling {scaling:.2e}",
            errs.join(", ")
        ),
    ))
}

fn main() -> ExitCode {
    let runs = match registry_histories() {
        Ok(r) => r,
        Err(e) => {
            println!("flow registry failed: {e}");
            return ExitCode::FAILURE;
        }
    };
    let criteria: Vec<Criterion> = vec![
        ("time segment content", Box::new(time_segment_content)),
        ("spatial null", Box::new(spatial_null)),
        ("co-area ratio constancy", Box::new(coarea_constancy)),
        ("area formula", Box::new(area_formula)),
        ("volume estimate", Box::new(volume_estimate)),
        ("extinction laws", Box::new(extinction_laws)),
        ("extinction squeeze", Box::new(|| squeeze(&runs))),
        ("density monotonicity", Box::new(|| monotonicity(&runs))),
        ("projected mass bounds", Box::new(|| projections(&runs))),
        ("track measure route", Box::new(measure_route)),
        ("translator", Box::new(translator)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {}: {} {name} ({detail}) [{:.1}s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
