use std::f64::consts::PI;
use std::path::Path;

use anyhow::{anyhow, Result};
use nalgebra::DVector;
use pgmt_core::coarea::{
    area_formula_check, calibrate, coarea_ratio, map_registry, product_box, registry_names,
    relative_spread, volume_estimate_check, Calibration,
};
use pgmt_core::flow::{run_to_extinction, CurveSpec, FlowHistory, PolygonalCurve};
use pgmt_core::geometry::{kuhn_box, PolyhedralChain};
use pgmt_core::measure::{dyadic_ladder, par_content, MeasureEstimate};
use pgmt_core::monotonicity::{
    center_grid, check_monotone, extinction_lower_bound, extinction_upper_bound,
};
use pgmt_core::report::{write_csv, Report};
use pgmt_core::track::{
    build_track, check_projection_bounds, check_isoperimetric, check_track_measure, scaling_exponent,
};
use pgmt_core::translator::{
    check_scaling_covariance, convergence_report, grim_reaper_residual, i_eps_functional, slices_to_csv,
    solve_profile, tessellate, TranslatorOptions,
};
use pgmt_core::Error;
use rayon::prelude::*;
use serde_json::json;

use crate::config::Config;

pub const SUITES: [&str; 9] = [
    "flow",
    "measure",
    "coarea",
    "area-formula",
    "monotonicity",
    "tracks",
    "translator",
    "calibrate",
    "all",
];

pub fn run_suite(name: &str, cfg: &Config, out: &Path) -> Result<Report> {
    let config = serde_json::to_value(cfg)?;
    let mut report = Report::new(name, cfg.seed, config);
    if name == "all" {
        for suite in &SUITES[..SUITES.len() - 1] {
            let mut part = Report::new(suite, cfg.seed, json!(null));
            run_into(suite, cfg, out, &mut part)?;
            for mut c in part.checks {
                c.name = format!("{suite}/{}", c.name);
                report.checks.push(c);
            }
        }
    } else {
        run_into(name, cfg, out, &mut report)?;
    }
    Ok(report)
}

fn run_into(name: &str, cfg: &Config, out: &Path, report: &mut Report) -> Result<()> {
    match name {
        "flow" => flow(cfg, out, report),
        "measure" => measure(cfg, out, report),
        "coarea" => coarea(cfg, out, report),
        "area-formula" => area_formula(cfg, out, report),
        "monotonicity" => monotonicity(cfg, out, report),
        "tracks" => tracks(cfg, out, report),
        "translator" => translator(cfg, out, report),
        "calibrate" => calibration(cfg, out, report).map(|_| ()),
        other => Err(anyhow!(
            "unknown suite `{other}`; expected one of {SUITES:?}"
        )),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn ladder_csv(path: &Path, est: &MeasureEstimate) -> Result<()> {
    est.to_csv(path)?;
    Ok(())
}

/// Worst relative deviation of `dA/dt` from `-2 pi` between snapshots.
fn area_rate_error(h: &FlowHistory) -> Option<f64> {
    let mut worst: f64 = 0.0;
    for w in h.snapshots.windows(2) {
        let a = w[0].curve.signed_area()?;
        let b = w[1].curve.signed_area()?;
        let rate = (b - a) / (w[1].t - w[0].t);
        worst = worst.max(rel(rate, -2.0 * PI));
    }
    Some(worst)
}

fn flow(cfg: &Config, out: &Path, report: &mut Report) -> Result<()> {
    let spec = &cfg.flow.curve;
    let curve = spec.build(cfg.flow.vertices)?;
    let h = run_to_extinction(&curve, &cfg.flow.options)?;
    h.to_csv(&out.join("flow.csv"))?;
    let tol = &cfg.tolerances;
    report.push(
        "extinction_time",
        h.tau > 0.0 && h.embedded,
        json!({"curve": spec.name(), "tau": h.tau, "steps": h.steps,
               "snapshots": h.snapshots.len(), "embedded": h.embedded}),
    )?;
    let expected = match *spec {
        CurveSpec::Circle { r0 } => Some((0.5 * r0 * r0, tol.circle_tau)),
        CurveSpec::Ellipse { a, b } => Some((a * b, tol.ellipse_tau)),
        _ => None,
    };
    if let Some((tau, t)) = expected {
        let err = rel(h.tau, tau);
        report.push(
            "extinction_law",
            err <= t,
            json!({"measured": h.tau, "expected": tau, "relative_error": err, "tolerance": t}),
        )?;
    }
    if let Some(err) = area_rate_error(&h) {
        report.push(
            "area_rate",
            err <= tol.area_rate,
            json!({"expected": -2.0 * PI, "max_relative_error": err, "tolerance": tol.area_rate}),
        )?;
    }
    let mono = h
        .snapshots
        .windows(2)
        .all(|w| w[1].length <= w[0].length + 1e-9);
    report.push(
        "length_nonincreasing",
        mono,
        json!({"snapshots": h.snapshots.len()}),
    )?;
    squeeze(&h, &spec.name(), report)?;
    Ok(())
}

fn squeeze(h: &FlowHistory, name: &str, report: &mut Report) -> Result<()> {
    let upper = extinction_upper_bound(h.mass0(), 1)?;
    if let Some(area) = h.enclosed_area0 {
        let lower = extinction_lower_bound(area.abs(), h.mass0())?;
        report.push(
            format!("extinction_squeeze[{name}]"),
            lower <= h.tau && h.tau <= upper,
            json!({"lower": lower, "tau": h.tau, "upper": upper}),
        )?;
    } else {
        report.push(
            format!("extinction_upper[{name}]"),
            h.tau <= upper,
            json!({"tau": h.tau, "upper": upper}),
        )?;
    }
    Ok(())
}

fn time_segment() -> Result<PolyhedralChain> {
    let mut seg = PolyhedralChain::new(1, 1, true);
    seg.add_vertex(DVector::from_vec(vec![0.0]))?;
    seg.add_vertex(DVector::from_vec(vec![1.0]))?;
    seg.push_simplex(vec![0, 1], 1)?;
    Ok(seg)
}

/// `{t0} x [0,1]^2` in `R^{1,2}`.
fn spatial_square(t0: f64) -> Result<PolyhedralChain> {
    Ok(kuhn_box(&[0.0, 0.0], &[1.0, 1.0], 1, false)?
        .map_vertices(3, true, |v| DVector::from_vec(vec![t0, v[0], v[1]]))?)
}

fn measure(cfg: &Config, out: &Path, report: &mut Report) -> Result<()> {
    let ladder = cfg.ladder();
    let tol = &cfg.tolerances;
    let seg = par_content(&time_segment()?, 2.0, &ladder)?;
    ladder_csv(&out.join("measure_time_segment.csv"), &seg)?;
    let err = rel(seg.finest(), PI / 4.0);
    report.push(
        "time_segment",
        err <= tol.time_segment,
        json!({"finest": seg.finest(), "expected": PI / 4.0, "relative_error": err,
               "delta": ladder.last(), "estimate": seg}),
    )?;
    let sq = par_content(&spatial_square(0.0)?, 3.0, &ladder)?;
    ladder_csv(&out.join("measure_spatial_square.csv"), &sq)?;
    let proportional = sq.ladder.windows(2).all(|w| {
        let ratio = (w[0].value / w[1].value) / (w[0].delta / w[1].delta);
        (ratio - 1.0).abs() <= 0.1
    });
    report.push(
        "spatial_null",
        proportional && sq.extrapolated < tol.spatial_null,
        json!({"extrapolated": sq.extrapolated, "proportional_to_delta": proportional,
               "estimate": sq}),
    )?;
    Ok(())
}

fn calibration(cfg: &Config, out: &Path, report: &mut Report) -> Result<Calibration> {
    let n_t = cfg.coarea.time_nodes;
    let c1 = calibrate(1, &cfg.ladder(), n_t)?;
    let c2 = calibrate(
        2,
        &dyadic_ladder(cfg.ladder.min_exponent, cfg.coarea.k2_max_exponent),
        n_t,
    )?;
    let mut rows = Vec::new();
    for cal in [&c1, &c2] {
        for (t, lens, ratio) in &cal.boxes {
            let lens: Vec<String> = lens.iter().map(|l| l.to_string()).collect();
            rows.push(vec![
                cal.k.to_string(),
                t.to_string(),
                lens.join(" "),
                ratio.to_string(),
            ]);
        }
        report.push(
            format!("calibration[k={}]", cal.k),
            cal.spread < cfg.tolerances.coarea_spread,
            cal,
        )?;
    }
    write_csv(
        &out.join("calibration.csv"),
        &["k", "time_length", "spatial_lengths", "ratio"],
        rows,
    )?;
    Ok(c1)
}

type Weight = Box<dyn Fn(&[f64]) -> f64 + Sync>;

fn weights() -> Vec<(&'static str, Weight)> {
    vec![
        ("1", Box::new(|_: &[f64]| 1.0)),
        ("t", Box::new(|p: &[f64]| p[0])),
        (
            "|x|",
            Box::new(|p: &[f64]| p[1..].iter().map(|x| x * x).sum::<f64>().sqrt()),
        ),
    ]
}

fn circle_track(cfg: &Config) -> Result<pgmt_core::track::SpaceTimeTrack> {
    let h = FlowHistory::shrinking_circle(
        1.0,
        cfg.tracks.circle_vertices,
        cfg.tracks.circle_snapshots,
    )?;
    Ok(build_track(&h)?)
}

fn coarea(cfg: &Config, out: &Path, report: &mut Report) -> Result<()> {
    let ladder = cfg.ladder();
    let n_t = cfg.coarea.time_nodes;
    let tilted = product_box(1.0, &[1.0], 1)?.map_vertices(3, true, |v| {
        DVector::from_vec(vec![v[0], v[1], 0.5 * v[1] + 0.3 * v[0]])
    })?;
    let sets: Vec<(&str, PolyhedralChain)> = vec![
        ("box[1x1]", product_box(1.0, &[1.0], 1)?),
        ("box[0.5x2]", product_box(0.5, &[2.0], 1)?),
        ("tilted_plane", tilted),
        ("graph(t,x,tx)", map_registry("graph")?.image()?),
        ("circle_track", circle_track(cfg)?.chain),
    ];
    let ws = weights();
    let jobs: Vec<(usize, usize)> = (0..sets.len())
        .flat_map(|s| (0..ws.len()).map(move |w| (s, w)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(s, w)| coarea_ratio(&sets[s].1, ws[w].1.as_ref(), &ladder, n_t))
        .collect::<std::result::Result<Vec<_>, Error>>()?;
    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    for (&(s, w), r) in jobs.iter().zip(&results) {
        ratios.push(r.ratio);
        rows.push(vec![
            sets[s].0.to_string(),
            ws[w].0.to_string(),
            r.lhs.to_string(),
            r.rhs.to_string(),
            r.ratio.to_string(),
        ]);
    }
    write_csv(
        &out.join("coarea.csv"),
        &["set", "weight", "lhs", "rhs", "ratio"],
        rows,
    )?;
    let spread = relative_spread(&ratios);
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    report.push(
        "coarea_ratio_constancy",
        spread < cfg.tolerances.coarea_spread,
        json!({"mean": mean, "spread": spread, "tolerance": cfg.tolerances.coarea_spread,
               "reports": results}),
    )?;
    let sq = spatial_square(0.25)?;
    let one = |_: &[f64]| 1.0;
    let degenerate = matches!(
        coarea_ratio(&sq, &one, &ladder, n_t),
        Err(Error::DegenerateRatio)
    );
    let lhs = pgmt_core::coarea::coarea_lhs(&sq, &one, &ladder)?;
    report.push(
        "spatial_set_both_sides_vanish",
        degenerate && lhs.extrapolated < cfg.tolerances.spatial_null,
        json!({"rhs_is_zero": degenerate, "lhs": lhs}),
    )?;
    Ok(())
}

fn area_formula(cfg: &Config, out: &Path, report: &mut Report) -> Result<()> {
    let tol = &cfg.tolerances;
    let ws: Vec<(&str, Weight)> = vec![
        ("1", Box::new(|_: &[f64]| 1.0)),
        (
            "1+t+|x|",
            Box::new(|p: &[f64]| 1.0 + p[0] + p[1..].iter().map(|x| x * x).sum::<f64>().sqrt()),
        ),
    ];
    let mut area_rows = Vec::new();
    let mut vol_rows = Vec::new();
    for name in registry_names() {
        let map = map_registry(name)?;
        map.validate(1000, cfg.seed)?;
        let ladder = dyadic_ladder(
            cfg.ladder.min_exponent,
            cfg.coarea.map_max_exponent[(map.k - 1).min(1)],
        );
        let vol = volume_estimate_check(&map, &ladder)?;
        let holds = vol.lhs <= vol.rhs * (1.0 + tol.volume);
        vol_rows.push(vec![
            name.to_string(),
            vol.lhs.to_string(),
            vol.rhs.to_string(),
            vol.ratio.to_string(),
        ]);
        report.push(format!("volume_estimate[{name}]"), holds, &vol)?;
        if name == "shear" || (map.lipschitz_horizontal == 1.0 && map.lipschitz_full == 1.0) {
            report.push(
                format!("volume_equality[{name}]"),
                (vol.ratio - 1.0).abs() <= tol.volume,
                json!({"ratio": vol.ratio, "tolerance": tol.volume}),
            )?;
        }
        for (wn, w) in &ws {
            match area_formula_check(&map, w.as_ref(), &ladder) {
                Ok(r) => {
                    area_rows.push(vec![
                        name.to_string(),
                        wn.to_string(),
                        r.lhs.to_string(),
                        r.rhs.to_string(),
                        r.ratio.to_string(),
                    ]);
                    let ok = (r.ratio - 1.0).abs() <= tol.area_formula;
                    report.push(format!("area_formula[{name},g={wn}]"), ok, &r)?;
                }
                Err(Error::NotInjective(msg)) => {
                    report.push(
                        format!("non_injective_rejected[{name},g={wn}]"),
                        name == "fold",
                        json!({"message": msg}),
                    )?;
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    write_csv(
        &out.join("area_formula.csv"),
        &["map", "weight", "lhs", "rhs", "ratio"],
        area_rows,
    )?;
    write_csv(
        &out.join("volume_estimate.csv"),
        &["map", "lhs", "rhs", "ratio"],
        vol_rows,
    )?;
    Ok(())
}

fn registry_histories(cfg: &Config) -> Result<Vec<(CurveSpec, FlowHistory)>> {
    let specs = pgmt_core::flow::default_registry(cfg.seed);
    let runs = specs
        .par_iter()
        .map(|spec| {
            let curve: PolygonalCurve = spec.build(cfg.registry_vertices)?;
            run_to_extinction(&curve, &cfg.flow.options)
        })
        .collect::<std::result::Result<Vec<_>, Error>>()?;
    Ok(specs.into_iter().zip(runs).collect())
}

fn monotonicity(cfg: &Config, out: &Path, report: &mut Report) -> Result<()> {
    let tol = &cfg.tolerances;
    let runs = registry_histories(cfg)?;
    let mut rows = Vec::new();
    for (spec, h) in &runs {
        let origin = h.last().curve.centroid();
        let mut worst: f64 = 0.0;
        let mut ok = true;
        for p in center_grid(&origin, cfg.monotonicity.center_spacing) {
            let (series, _) = check_monotone(h, &p, h.tau, cfg.monotonicity.samples)?;
            let r = pgmt_core::monotonicity::check_monotone_series(&series.samples, tol.monotone);
            worst = worst.max(r.max_relative_increase);
            ok &= r.verdict;
            for (t, v) in &series.samples {
                rows.push(vec![
                    spec.name(),
                    p[0].to_string(),
                    p[1].to_string(),
                    t.to_string(),
                    v.to_string(),
                ]);
            }
        }
        report.push(
            format!("density_nonincreasing[{}]", spec.name()),
            ok,
            json!({"centers": 9, "max_relative_increase": worst, "tolerance": tol.monotone}),
        )?;
        if let CurveSpec::Circle { .. } = spec {
            let (series, _) = check_monotone(h, &origin, h.tau, cfg.monotonicity.samples)?;
            let expected = (2.0 * PI / std::f64::consts::E).sqrt();
            let dev = series
                .samples
                .iter()
                .map(|s| (s.1 - expected).abs())
                .fold(0.0, f64::max);
            report.push(
                "self_shrinker_density",
                dev <= tol.self_shrinker,
                json!({"expected": expected, "max_deviation": dev, "tolerance": tol.self_shrinker}),
            )?;
        }
    }
    write_csv(
        &out.join("monotonicity.csv"),
        &["curve", "center_x", "center_y", "t", "theta"],
        rows,
    )?;
    Ok(())
}

fn tracks(cfg: &Config, out: &Path, report: &mut Report) -> Result<()> {
    let tol = &cfg.tolerances;
    let runs = registry_histories(cfg)?;
    let mut rows = Vec::new();
    for (spec, h) in &runs {
        let name = spec.name();
        squeeze(h, &name, report)?;
        let track = build_track(h)?;
        let (a, b) = track.time_extent;
        for (label, end) in [("half", 0.5 * (a + b)), ("full", b)] {
            for r in check_projection_bounds(&track, a, end)? {
                rows.push(vec![
                    name.clone(),
                    format!("{}[{label}]", r.check),
                    r.lhs.to_string(),
                    r.rhs.to_string(),
                ]);
                report.push(format!("{}[{name},{label}]", r.check), r.verdict, &r)?;
            }
        }
        let tb = check_isoperimetric(h)?;
        rows.push(vec![
            name.clone(),
            "isoperimetric".into(),
            tb.mass.lhs.to_string(),
            tb.mass.rhs.to_string(),
        ]);
        report.push(format!("isoperimetric[{name}]"), tb.verdict, &tb)?;
    }
    write_csv(
        &out.join("tracks.csv"),
        &["curve", "check", "lhs", "rhs"],
        rows,
    )?;

    let ladder = cfg.ladder();
    let c1 = calibrate(1, &ladder, cfg.coarea.time_nodes)?.mean;
    let track = circle_track(cfg)?;
    let c = check_track_measure(&track, c1, &ladder, cfg.coarea.time_nodes)?;
    let route_ok = (c.route_ratio - 1.0).abs() <= tol.route;
    report.push("track_measure", c.bound_holds && route_ok, &c)?;
    // int_0^{1/2} 2 pi sqrt(1 - 2t) dt = 2 pi / 3 for the unit circle
    let closed_form = c1 * (PI / 4.0) * (2.0 * PI / 3.0);
    let err = rel(c.mu.extrapolated, closed_form);
    report.push(
        "track_measure_closed_form",
        err <= tol.route,
        json!({"mu": c.mu.extrapolated, "route": closed_form, "c1": c1, "relative_error": err}),
    )?;
    for &lambda in &cfg.tracks.lambdas {
        let e = scaling_exponent(&track, lambda, &ladder)?;
        let err = rel(e, 3.0);
        report.push(
            format!("track_measure_scaling[lambda={lambda}]"),
            err <= tol.scaling_exponent,
            json!({"exponent": e, "expected": 3.0, "relative_error": err}),
        )?;
    }
    Ok(())
}

fn translator(cfg: &Config, out: &Path, report: &mut Report) -> Result<()> {
    let tc = &cfg.translator;
    let tol = &cfg.tolerances;
    let opts = TranslatorOptions {
        steps: tc.steps,
        ..Default::default()
    };
    let eps: Vec<f64> = tc.eps_ratios.iter().map(|e| e * tc.r0).collect();
    let conv = convergence_report(tc.r0, &eps, &opts)?;
    let rows: Vec<Vec<String>> = conv
        .entries
        .iter()
        .map(|e| {
            vec![
                e.epsilon.to_string(),
                e.tip_height.to_string(),
                e.rescaled_height.to_string(),
                e.el_residual.to_string(),
                e.slice_error.to_string(),
            ]
        })
        .collect();
    write_csv(
        &out.join("translator_convergence.csv"),
        &[
            "epsilon",
            "tip_height",
            "rescaled_height",
            "el_residual",
            "slice_error",
        ],
        rows,
    )?;
    let worst = conv
        .entries
        .iter()
        .map(|e| e.el_residual)
        .fold(0.0, f64::max);
    report.push(
        "euler_lagrange_residual",
        worst < tol.el_residual,
        json!({"max_residual": worst, "tolerance": tol.el_residual}),
    )?;
    report.push("slice_error_nonincreasing", conv.non_increasing, &conv)?;
    let gr = grim_reaper_residual(
        tc.grim_reaper_eps,
        1.2 * tc.grim_reaper_eps,
        tc.grim_reaper_samples,
    )?;
    report.push(
        "grim_reaper_residual",
        gr < tol.grim_reaper,
        json!({"residual": gr, "tolerance": tol.grim_reaper}),
    )?;
    for &e in &eps {
        let p = solve_profile(tc.r0, e, &opts)?;
        p.to_csv(&out.join(format!("profile_eps{e}.csv")))?;
        slices_to_csv(&p, &out.join(format!("slices_eps{e}.csv")))?;
        for &lambda in &tc.lambdas {
            let s = check_scaling_covariance(&p, lambda, &opts)?;
            let ok = s.profile_error <= tol.scaling_covariance && s.slice_error <= tol.scaling_covariance;
            report.push(format!("scaling_covariance[eps={e},lambda={lambda}]"), ok, &s)?;
        }
        let surface = tessellate(&p, 200, 128)?;
        let value = i_eps_functional(&surface, e)?;
        let disc = PI * tc.r0 * tc.r0 / e;
        report.push(
            format!("disc_competitor[eps={e}]"),
            value <= disc,
            json!({"translator": value, "flat_disc": disc}),
        )?;
        let refined = [tc.steps / 4, tc.steps / 2, tc.steps]
            .iter()
            .map(|&steps| {
                let q = solve_profile(
                    tc.r0,
                    e,
                    &TranslatorOptions {
                        steps,
                        ..opts.clone()
                    },
                )?;
                i_eps_functional(&tessellate(&q, 200, 128)?, e)
            })
            .collect::<std::result::Result<Vec<_>, Error>>()?;
        let ok = refined.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-8));
        report.push(
            format!("functional_under_refinement[eps={e}]"),
            ok,
            json!({"values": refined}),
        )?;
    }
    Ok(())
}
