//! `zonalflow` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use zonalflow::check::run_checks;
use zonalflow::io::{parse_scenario, parse_weather, write_results, ScenarioError, WeatherError};
use zonalflow::{simulate, Scenario};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "zonalflow", version, about = "Multizone airflow network simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario over a weather series and write CSV results.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        weather: PathBuf,
        /// Output directory, created if missing.
        #[arg(long)]
        out: PathBuf,
        /// Override the scenario's reference density, kg/m³.
        #[arg(long = "rho-ref")]
        rho_ref: Option<f64>,
        /// Override the residual tolerance, kg/s.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Run the built-in validation cases.
    Check,
    /// Print the canonical network of a scenario.
    Describe {
        #[arg(long)]
        scenario: PathBuf,
    },
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    fn invalid(message: impl Into<String>) -> Self {
        Self { code: EXIT_INVALID, message: message.into() }
    }
}

fn load_scenario(path: &Path) -> Result<Scenario, Failure> {
    parse_scenario(path).map_err(|e| match e {
        ScenarioError::Io(io) => Failure::usage(format!("{}: {io}", path.display())),
        other => Failure::invalid(format!("{}: {other}", path.display())),
    })
}

fn with_overrides(scenario: Scenario, rho_ref: Option<f64>, tolerance: Option<f64>) -> Result<Scenario, Failure> {
    if rho_ref.is_none() && tolerance.is_none() {
        return Ok(scenario);
    }
    let mut options = scenario.options;
    if let Some(t) = tolerance {
        options.residual_tolerance = t;
    }
    options.validate().map_err(|e| Failure::usage(format!("--tolerance: {e}")))?;
    let rho = rho_ref.unwrap_or(scenario.rho_ref);
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Failure::usage(format!("--rho-ref must be a positive number (got {rho})")));
    }
    let schedules: Vec<Vec<f64>> = scenario.zone_temperature_schedules().iter().map(|s| s.to_vec()).collect();
    Scenario::new(scenario.description().clone(), rho, options, &schedules, scenario.vent_density)
        .map_err(|e| Failure::invalid(e.to_string()))
}

fn run_simulate(
    scenario: &Path,
    weather: &Path,
    out_dir: &Path,
    rho_ref: Option<f64>,
    tolerance: Option<f64>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    if !weather.is_file() {
        return Err(Failure::usage(format!("{}: weather file not found", weather.display())));
    }
    let scenario = with_overrides(load_scenario(scenario)?, rho_ref, tolerance)?;
    let series = parse_weather(weather).map_err(|e| match e {
        WeatherError::Io(io) => Failure::usage(format!("{}: {io}", weather.display())),
        other => Failure::invalid(format!("{}: {other}", weather.display())),
    })?;
    let results = simulate(&scenario, &series).map_err(|e| Failure::invalid(e.to_string()))?;
    write_results(&scenario, &results, out_dir).map_err(|e| Failure::usage(e.to_string()))?;

    let failed: Vec<String> = results
        .iter()
        .filter(|r| !r.report.converged)
        .map(|r| r.timestamp.format("%Y-%m-%dT%H:%M:%S").to_string())
        .collect();
    let iterations: usize = results.iter().map(|r| r.report.iterations).sum();
    let _ = writeln!(
        out,
        "{} steps, {iterations} iterations, {} not converged; results in {}",
        results.len(),
        failed.len(),
        out_dir.display()
    );
    for t in failed {
        let _ = writeln!(out, "  not converged: {t}");
    }
    Ok(())
}

fn run_check(out: &mut dyn Write) -> Result<(), Failure> {
    let checks = run_checks();
    for c in &checks {
        let _ = writeln!(out, "{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let _ = writeln!(out, "{} of {} checks passed", checks.len() - failed, checks.len());
    if failed > 0 {
        return Err(Failure::invalid(format!("{failed} check(s) failed")));
    }
    Ok(())
}

fn run_describe(path: &Path, out: &mut dyn Write) -> Result<(), Failure> {
    let scenario = load_scenario(path)?;
    let net = scenario.network();
    let _ = writeln!(out, "rho_ref {} kg/m³, vent density {}", scenario.rho_ref, scenario.vent_density.keyword());
    let _ = writeln!(out, "zones ({}):", net.zone_count());
    for (z, temps) in net.zones().iter().zip(scenario.zone_temperature_schedules()) {
        let (lo, hi) = temps.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), t| (a.min(*t), b.max(*t)));
        let range = if lo == hi { format!("{lo} °C") } else { format!("{lo}..{hi} °C") };
        let _ = writeln!(out, "  {:>3} {:<16} ref {:.4} m  {range}", z.id, z.name, z.reference_height);
    }
    let _ = writeln!(out, "elements ({}):", net.elements().len());
    for e in net.elements() {
        let cp = e.cp_table.as_ref().map_or("-", |t| t.name());
        let _ = writeln!(
            out,
            "  {:>3} {} src {:>3}  {:>2} -> {:<2} z {:.4} m  K {:.6}  n {}  cp {cp}",
            e.id,
            e.kind.tag(),
            e.source_id,
            e.zone_a,
            e.zone_b,
            e.elevation,
            e.permeability,
            e.exponent
        );
    }
    let _ = writeln!(out, "vents ({}):", net.vents().len());
    for v in net.vents() {
        let peak = v.schedule.iter().copied().fold(0.0, f64::max);
        let _ = writeln!(out, "  zone {:>3}  VMC  peak {peak} m³/h", v.zone);
    }
    Ok(())
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let result = match cli.command {
        Command::Simulate { scenario, weather, out: dir, rho_ref, tolerance } => {
            run_simulate(&scenario, &weather, &dir, rho_ref, tolerance, out)
        }
        Command::Check => run_check(out),
        Command::Describe { scenario } => run_describe(&scenario, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
