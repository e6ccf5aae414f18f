//! `pgmt <suite> [--config file] [--out dir] [--seed n] [flags]`
//!
//! Runs one experiment suite, writes `report.json` and CSV tables into the
//! output directory and exits with status 0 iff every verdict passes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::Parser;
use pgmt_core::flow::CurveSpec;
use pgmt_core::report::emit_report;

use config::Config;

/// Environment variable that overrides the default output directory.
const OUT_ENV: &str = "PGMT_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "pgmt",
    version,
    about = "Parabolic measure and curve shortening flow experiments"
)]
struct Cli {
    /// flow, measure, coarea, area-formula, monotonicity, tracks,
    /// translator, calibrate or all
    suite: String,
    /// JSON configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Initial curve: circle, ellipse, rounded-rect or fourier.
    #[arg(long)]
    curve: Option<String>,
    #[arg(long)]
    r0: Option<f64>,
    /// Ellipse semi-axes.
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long)]
    height: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    amplitude: Option<f64>,
    #[arg(long)]
    modes: Option<usize>,
    /// Vertex count of the flowed curve.
    #[arg(long)]
    vertices: Option<usize>,
    /// Coarsest ladder exponent `j` in `delta = 2^-j`.
    #[arg(long)]
    ladder_min: Option<i32>,
    /// Finest ladder exponent.
    #[arg(long)]
    ladder_max: Option<i32>,
    #[arg(long)]
    time_nodes: Option<usize>,
    /// Comma-separated `eps / r0` values for the translator suite.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    #[arg(long)]
    steps: Option<usize>,
}

fn curve_from_flags(cli: &Cli, current: &CurveSpec) -> Result<CurveSpec> {
    let kind = match &cli.curve {
        Some(k) => k.as_str(),
        None => match current {
            CurveSpec::Circle { .. } => "circle",
            CurveSpec::Ellipse { .. } => "ellipse",
            CurveSpec::RoundedRect { .. } => "rounded-rect",
            CurveSpec::Fourier { .. } => "fourier",
        },
    };
    let same = cli.curve.is_none();
    let spec = match (kind, current) {
        ("circle", CurveSpec::Circle { r0 }) if same => CurveSpec::Circle {
            r0: cli.r0.unwrap_or(*r0),
        },
        ("circle", _) => CurveSpec::Circle {
            r0: cli.r0.unwrap_or(1.0),
        },
        ("ellipse", CurveSpec::Ellipse { a, b }) if same => CurveSpec::Ellipse {
            a: cli.a.unwrap_or(*a),
            b: cli.b.unwrap_or(*b),
        },
        ("ellipse", _) => CurveSpec::Ellipse {
            a: cli.a.unwrap_or(2.0),
            b: cli.b.unwrap_or(1.0),
        },
        (
            "rounded-rect",
            CurveSpec::RoundedRect {
                width,
                height,
                radius,
            },
        ) if same => CurveSpec::RoundedRect {
            width: cli.width.unwrap_or(*width),
            height: cli.height.unwrap_or(*height),
            radius: cli.radius.unwrap_or(*radius),
        },
        ("rounded-rect", _) => CurveSpec::RoundedRect {
            width: cli.width.unwrap_or(2.0),
            height: cli.height.unwrap_or(2.0),
            radius: cli.radius.unwrap_or(0.3),
        },
        (
            "fourier",
            CurveSpec::Fourier {
                r0,
                amplitude,
                modes,
                seed,
            },
        ) if same => CurveSpec::Fourier {
            r0: cli.r0.unwrap_or(*r0),
            amplitude: cli.amplitude.unwrap_or(*amplitude),
            modes: cli.modes.unwrap_or(*modes),
            seed: *seed,
        },
        ("fourier", _) => CurveSpec::Fourier {
            r0: cli.r0.unwrap_or(1.0),
            amplitude: cli.amplitude.unwrap_or(0.3),
            modes: cli.modes.unwrap_or(4),
            seed: cli.seed.unwrap_or(7),
        },
        (other, _) => bail!("unknown curve `{other}`"),
    };
    Ok(spec)
}

/// Defaults, then the config file, then flags.
fn resolve(cli: &Cli) -> Result<Config> {
    let mut cfg = match &cli.config {
        Some(path) => Config::from_file(path)?,
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.flow.curve = curve_from_flags(cli, &cfg.flow.curve)?;
    if let Some(n) = cli.vertices {
        cfg.flow.vertices = n;
    }
    if let Some(j) = cli.ladder_min {
        cfg.ladder.min_exponent = j;
    }
    if let Some(j) = cli.ladder_max {
        cfg.ladder.max_exponent = j;
    }
    if let Some(n) = cli.time_nodes {
        cfg.coarea.time_nodes = n;
    }
    if let Some(eps) = &cli.eps {
        cfg.translator.eps_ratios = eps.clone();
    }
    if let Some(steps) = cli.steps {
        cfg.translator.steps = steps;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<bool> {
    if !suites::SUITES.contains(&cli.suite.as_str()) {
        bail!(
            "unknown suite `{}`; expected one of {:?}",
            cli.suite,
            suites::SUITES
        );
    }
    let cfg = resolve(cli)?;
    let out = cli
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("pgmt-out"));
    std::fs::create_dir_all(&out)?;
    let report = suites::run_suite(&cli.suite, &cfg, &out)?;
    let path = emit_report(&report, &out)?;
    for c in &report.checks {
        println!("{} {}", if c.verdict { "PASS" } else { "FAIL" }, c.name);
    }
    println!("report: {}", path.display());
    Ok(report.all_pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
