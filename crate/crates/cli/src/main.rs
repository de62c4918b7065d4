//! Command-line interface for the two-patch commuter SIR model.

mod error;
mod figures;
mod report;
mod scenario;
mod sweep;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use commuter_sir::{
    approx_threshold, eta, integrate, minimize_threshold, StateVector, ThresholdReport,
    GROUP_LABELS,
};
use serde::Serialize;

use error::CliError;
use figures::write_figure_files;
use scenario::load_scenario;
use sweep::{fmt_sig12, parse_grid, run_sweep, write_sweep_csv};

#[derive(Parser)]
#[command(
    name = "commuter-sir",
    version,
    about = "Two-patch SIR commuter model: epidemic thresholds, minimization, simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the exact threshold report of a scenario as JSON
    Threshold {
        /// Scenario file (flat JSON object)
        scenario: PathBuf,
    },
    /// Evaluate exact and approximate thresholds over a (p1, p2) grid
    Sweep {
        scenario: PathBuf,
        /// Grid resolution as P1xP2 (defaults to the file's sweep block,
        /// then 201x201)
        #[arg(long)]
        grid: Option<String>,
        /// Output directory for sweep.csv, figure.csv and figure.svg
        #[arg(long)]
        out: PathBuf,
    },
    /// Find the commuter proportions minimizing the threshold
    Minimize {
        scenario: PathBuf,
    },
    /// Integrate the 18-compartment dynamics and write the trajectory
    Simulate {
        scenario: PathBuf,
        /// Fraction of each group seeded into the infected compartment
        #[arg(long, default_value_t = 1e-6)]
        seed_fraction: f64,
        /// Integration horizon (time units)
        #[arg(long)]
        t_end: f64,
        /// Trajectory CSV path
        #[arg(long)]
        out: PathBuf,
    },
    /// Recompute the bundled experiment tables and figure data
    ReproducePaper {
        /// Output directory for the report, tables and figures
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Serialize)]
struct ThresholdJson {
    r1: f64,
    r2: f64,
    eta1: f64,
    eta2: f64,
    q11: f64,
    q12: f64,
    q21: f64,
    q22: f64,
    r12_explicit: f64,
    r12_eigen: f64,
    alpha: f64,
    r12_tilde: f64,
    alpha_tilde: f64,
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct MinimizeJson {
    n1c_star: f64,
    n2c_star: f64,
    p1_star: f64,
    p2_star: f64,
    r12_min: f64,
    r12_min_approx: f64,
    outbreak_avoidable: bool,
    n1c_at_lower: bool,
    n1c_at_upper: bool,
    n2c_at_upper: bool,
    warnings: Vec<String>,
}

fn cmd_threshold(path: &Path) -> Result<(), CliError> {
    let loaded = load_scenario(path)?;
    let sc = &loaded.scenario;
    let report = ThresholdReport::for_scenario(sc)?;
    let (r1, r2) = sc.epidemic().intrinsic_reproduction();
    let e = eta(sc.mobility());
    let (r12_tilde, alpha_tilde) = approx_threshold(sc)?;
    let json = ThresholdJson {
        r1,
        r2,
        eta1: e.eta1,
        eta2: e.eta2,
        q11: report.reduced.q11,
        q12: report.reduced.q12,
        q21: report.reduced.q21,
        q22: report.reduced.q22,
        r12_explicit: report.r12_explicit,
        r12_eigen: report.r12_eigen,
        alpha: report.alpha,
        r12_tilde,
        alpha_tilde,
        warnings: loaded.warnings,
    };
    println!("{}", serde_json::to_string_pretty(&json).expect("serializable"));
    Ok(())
}

fn cmd_sweep(path: &Path, grid: Option<&str>, out: &Path) -> Result<(), CliError> {
    let loaded = load_scenario(path)?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    let (p1_points, p2_points) = match grid {
        Some(spec) => parse_grid(spec)?,
        None => loaded
            .sweep
            .map(|s| (s.p1_points, s.p2_points))
            .unwrap_or((201, 201)),
    };
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    // Normalized copy of the inputs next to the results; reloads bit-exactly.
    let copy = scenario::ScenarioFile::from_scenario(&loaded.scenario);
    let copy_path = out.join("scenario.json");
    let copy_json = serde_json::to_string_pretty(&copy)
        .map_err(|e| CliError::Validation(format!("cannot serialize scenario: {e}")))?;
    fs::write(&copy_path, copy_json).map_err(|e| CliError::io(&copy_path, e))?;
    let sweep = run_sweep(&loaded.scenario, p1_points, p2_points)?;
    write_sweep_csv(&sweep, &out.join("sweep.csv"))?;
    write_figure_files(
        &sweep,
        &out.join("figure.csv"),
        &out.join("figure.svg"),
        "threshold vs p1 (one curve per p2)",
    )?;
    println!(
        "swept {p1_points}x{p2_points} grid: max |r12_tilde - r12_exact| = {}",
        fmt_sig12(sweep.max_gap())
    );
    Ok(())
}

fn cmd_minimize(path: &Path) -> Result<(), CliError> {
    let loaded = load_scenario(path)?;
    let sc = &loaded.scenario;
    let min = minimize_threshold(sc)?;
    let json = MinimizeJson {
        n1c_star: min.n1c_star,
        n2c_star: min.n2c_star,
        p1_star: 1.0 - min.n1c_star / sc.population().n1(),
        p2_star: 1.0 - min.n2c_star / sc.population().n2(),
        r12_min: min.r12_min,
        r12_min_approx: min.r12_min_approx,
        outbreak_avoidable: min.r12_min < 1.0,
        n1c_at_lower: min.boundary.n1c_at_lower,
        n1c_at_upper: min.boundary.n1c_at_upper,
        n2c_at_upper: min.boundary.n2c_at_upper,
        warnings: loaded.warnings,
    };
    println!("{}", serde_json::to_string_pretty(&json).expect("serializable"));
    Ok(())
}

fn cmd_simulate(
    path: &Path,
    seed_fraction: f64,
    t_end: f64,
    out: &Path,
) -> Result<(), CliError> {
    let loaded = load_scenario(path)?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    let sc = &loaded.scenario;
    let initial = StateVector::seeded(sc, seed_fraction)?;
    let traj = integrate(
        sc,
        &initial,
        t_end,
        commuter_sir::simulate::DEFAULT_REL_TOL,
        commuter_sir::simulate::DEFAULT_ABS_TOL,
    )?;

    let mut csv = String::from("t");
    for compartment in ["S", "I", "R"] {
        for label in GROUP_LABELS {
            let _ = write!(csv, ",{compartment}_{label}");
        }
    }
    csv.push('\n');
    for (t, state) in traj.iter() {
        let _ = write!(csv, "{}", fmt_sig12(t));
        for block in [&state.s, &state.i, &state.r] {
            for v in block {
                let _ = write!(csv, ",{}", fmt_sig12(*v));
            }
        }
        csv.push('\n');
    }
    fs::write(out, csv).map_err(|e| CliError::io(out, e))?;

    let peak = traj
        .iter()
        .map(|(_, s)| s.total_infected())
        .fold(0.0f64, f64::max);
    let (t_last, last) = traj.last();
    println!(
        "integrated to t = {t_last}: {} samples, peak total infected {}, final total infected {}",
        traj.len(),
        fmt_sig12(peak),
        fmt_sig12(last.total_infected())
    );
    Ok(())
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Threshold { scenario } => cmd_threshold(scenario),
        Command::Sweep { scenario, grid, out } => cmd_sweep(scenario, grid.as_deref(), out),
        Command::Minimize { scenario } => cmd_minimize(scenario),
        Command::Simulate { scenario, seed_fraction, t_end, out } => {
            cmd_simulate(scenario, *seed_fraction, *t_end, out)
        }
        Command::ReproducePaper { out } => report::reproduce_paper(out).map(|_| ()),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code())
        }
    }
}
