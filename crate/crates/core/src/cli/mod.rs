//! Subcommands of the `ovalbound` binary. Each returns a [`RunReport`];
//! with `--out DIR` the report and any CSV data are written into `DIR`.

pub mod report;
pub mod verify;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::analytic;
use crate::bounds::{self, InfMaxOptions};
use crate::curve::{FourierCurve, DEFAULT_EPS_CONVEX};
use crate::error::Error;
use crate::projection;
use crate::spectral::{self, SpectralOptions};

pub use report::{Check, RunReport};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "OVALBOUND_THREADS";

#[derive(Debug, Parser)]
#[command(name = "ovalbound", version, about = "Eigenvalue lower bounds for closed convex curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimize max(B1, B2) over the (ν̃, Δ) rectangle.
    EvalBounds {
        /// Coarse grid points per axis.
        #[arg(long, default_value_t = bounds::DEFAULT_COARSE)]
        grid: usize,
        /// Argmin movement at which refinement stops.
        #[arg(long, default_value_t = bounds::DEFAULT_REFINE_TOL)]
        tol: f64,
        /// Output directory for report.json and bounds_grid.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the closed-form pipeline and its tangent checks.
    Analytic {
        /// Points per tangent-check grid.
        #[arg(long, default_value_t = 10_000)]
        grid: usize,
        /// Output directory for report.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ground-state energy of a curve given as JSON coefficients.
    Lambda {
        /// Curve file, e.g. {"a": {"3": 0.1}}.
        curve: PathBuf,
        /// Galerkin modes M (basis size 2M + 1).
        #[arg(long, default_value_t = spectral::DEFAULT_MODES)]
        modes: usize,
        /// Arc-length samples for the inverted curve.
        #[arg(long, default_value_t = 1024)]
        points: usize,
        /// Also write the energy projections I(t) to projection.csv.
        #[arg(long)]
        projections: bool,
        /// Output directory for report.json and projection.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every property suite on seeded random inputs.
    Verify {
        /// Seed for every random stream.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Random curves per curve-based suite.
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// Random parameter draws per sampling suite.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Output directory for report.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Thread cap from [`THREADS_ENV`], if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

pub fn run(cli: &Cli) -> Result<RunReport, Error> {
    match &cli.command {
        Command::EvalBounds { grid, tol, out } => cmd_eval_bounds(*grid, *tol, out.as_deref()),
        Command::Analytic { grid, out } => cmd_analytic(*grid, out.as_deref()),
        Command::Lambda {
            curve,
            modes,
            points,
            projections,
            out,
        } => cmd_lambda(curve, *modes, *points, *projections, out.as_deref()),
        Command::Verify {
            seed,
            n,
            samples,
            out,
        } => cmd_verify(*seed, *n, *samples, out.as_deref()),
    }
}

pub fn cmd_eval_bounds(grid: usize, tol: f64, out: Option<&Path>) -> Result<RunReport, Error> {
    let mut report = RunReport::new("eval-bounds");
    report.input("grid", grid);
    report.input("tol", tol);
    report.input("levels", bounds::DEFAULT_LEVELS);
    report.tolerance("delta_margin", bounds::DELTA_MARGIN);
    report.tolerance("refine_tol", tol);
    report.tolerance("reference_band", 5e-4);
    report.tolerance("crossing_gap", 1e-3);

    let surface = bounds::optimize_infmax_with(InfMaxOptions {
        n_coarse: grid,
        refine_tol: tol,
        ..InfMaxOptions::default()
    })?;
    report.output("value", surface.value);
    report.output("argmin", surface.argmin);
    report.output("coarse_min", surface.coarse_min);
    report.output("levels_run", surface.levels_run);
    report.output("evaluations", surface.evaluations);
    report.output("crude_bound", bounds::crude_bound());

    report.check(Check::within("value_near_0.8246", (surface.value - 0.8246).abs(), 5e-4));
    report.check(Check::within(
        "argmin_on_crossing",
        (surface.argmin.b1 - surface.argmin.b2).abs(),
        1e-3,
    ));
    report.check(Check::flag(
        "refined_not_above_coarse",
        surface.value <= surface.coarse_min.bmax,
    ));

    if let Some(dir) = out {
        let csv = report::csv_string(["nu_tilde", "delta", "b1", "b2", "bmax"], surface.rows());
        report::write_file(&dir.join("bounds_grid.csv"), csv.as_bytes())?;
        report.write(dir)?;
    }
    Ok(report)
}

pub fn cmd_analytic(grid: usize, out: Option<&Path>) -> Result<RunReport, Error> {
    let mut report = RunReport::new("analytic");
    report.input("grid", grid);
    report.tolerance("slack", analytic::SLACK_TOL);
    report.tolerance("cubic_residual", 1e-9);
    report.tolerance("delta_min_band", 1e-3);
    report.tolerance("delta0_band", 1e-3);
    report.tolerance("final_value_band", 5e-4);

    let delta_min = analytic::compute_delta_min();
    let tangents = analytic::tangent_majorant_checks(grid)?;
    let pipeline = analytic::cardano_min()?;

    report.output("delta_min", delta_min);
    report.output("pipeline", &pipeline);
    report.output("tangent_checks", &tangents.checks);
    report.output("exceeds_0.81", pipeline.final_value > analytic::TARGET);

    report.check(Check::within("delta_min_near_1.196", (delta_min - 1.196).abs(), 1e-3));
    report.check(Check::within("delta0_near_1.386", (pipeline.delta0 - 1.386).abs(), 1e-3));
    report.check(Check::within(
        "final_value_near_0.8166",
        (pipeline.final_value - 0.8166).abs(),
        5e-4,
    ));
    report.check(Check::from_margin(
        "final_value_exceeds_0.81",
        pipeline.final_value - analytic::TARGET,
    ));
    report.check(Check::within("cubic_residual", pipeline.cubic_residual.abs(), 1e-9));
    report.check(Check::from_margin("discriminant_negative", -pipeline.discriminant));
    for c in &tangents.checks {
        report.check(Check::from_margin(
            format!("tangent_{}", c.name),
            c.min_slack + analytic::SLACK_TOL,
        ));
        if let Some(s) = c.tangency_slack {
            report.check(Check::within(
                format!("tangent_{}_touches", c.name),
                s.abs(),
                analytic::SLACK_TOL,
            ));
        }
    }

    if let Some(dir) = out {
        report.write(dir)?;
    }
    Ok(report)
}

pub fn cmd_lambda(
    curve_path: &Path,
    modes: usize,
    points: usize,
    projections: bool,
    out: Option<&Path>,
) -> Result<RunReport, Error> {
    let text = fs::read_to_string(curve_path).map_err(|source| Error::Io {
        path: curve_path.display().to_string(),
        source,
    })?;
    let curve = FourierCurve::from_json(&text)?;
    let mut report = RunReport::new("lambda");
    report.input("curve", curve.to_file());
    report.input("modes", modes);
    report.input("points", points);
    report.input("projections", projections);
    report.tolerance("eps_convex", DEFAULT_EPS_CONVEX);
    report.tolerance("spectral_rtol", spectral::DEFAULT_RTOL);
    report.tolerance("residual", 1e-8);
    report.tolerance("closure", 1e-8);

    let validation = curve.validate(DEFAULT_EPS_CONVEX)?;
    let sampled = curve.invert_phi(points)?;
    let solution = spectral::ground_state_with(
        &sampled,
        SpectralOptions {
            n_modes: modes,
            ..SpectralOptions::default()
        },
    )?;
    let (cx, cy) = sampled.closure_residuals();
    let winding = sampled.winding();

    report.output("lambda", solution.lambda);
    report.output("lambda_refined", solution.lambda_refined);
    report.output("residual", solution.residual);
    report.output("validation", validation);
    report.output("closure_residuals", [cx, cy]);
    report.output("winding", winding);

    report.check(Check::within("residual", solution.residual, 1e-8));
    report.check(Check::within("closure_cos", cx.abs(), 1e-8));
    report.check(Check::within("closure_sin", cy.abs(), 1e-8));
    report.check(Check::within("winding", (winding - std::f64::consts::TAU).abs(), 1e-8));

    let mut projection_csv = None;
    if projections {
        let data = projection::build_projection(&sampled, &solution.psi, projection::DEFAULT_ANGLES)?;
        let shape = projection::classify_i(&data)?;
        let point = projection::lambda_equal_point(&data)?;
        report.output("energy", data.energy());
        report.output("i_shape", shape);
        report.output("lambda_point", point);
        report.check(Check::within(
            "lambda_point_matches_lambda",
            (point.value - solution.lambda).abs(),
            1e-6,
        ));
        projection_csv = Some(report::csv_string(["t", "i"], projection::i_rows(&data)));
    }

    if let Some(dir) = out {
        if let Some(csv) = projection_csv {
            report::write_file(&dir.join("projection.csv"), csv.as_bytes())?;
        }
        report.write(dir)?;
    }
    Ok(report)
}

pub fn cmd_verify(seed: u64, n: usize, samples: usize, out: Option<&Path>) -> Result<RunReport, Error> {
    let mut report = RunReport::new("verify");
    report.input("seed", seed);
    report.input("n", n);
    report.input("samples", samples);
    let config = verify::VerifyConfig {
        seed,
        n_curves: n.max(1),
        n_samples: samples.max(1),
    };
    for (key, value) in verify::tolerances() {
        report.tolerance(key, value);
    }
    let outcomes = verify::run_all(&config);
    for outcome in outcomes {
        match outcome.result {
            Ok(checks) => {
                for c in checks {
                    report.check(Check {
                        name: format!("{}.{}", outcome.label, c.name),
                        ..c
                    });
                }
            }
            Err(e) => {
                report.check(Check::flag(format!("{}.error", outcome.label), false));
                report.output(&format!("{}.error", outcome.label), e.to_string());
            }
        }
    }
    report.output("checks_total", report.checks.len());
    report.output("checks_failed", report.failures());
    if let Some(dir) = out {
        report.write(dir)?;
    }
    Ok(report)
}
