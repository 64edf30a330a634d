//! CSV output of a simulation run.
//!
//! Numbers are written in shortest round-trip form, so reading a file back
//! gives the exact `f64` values that were solved.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDateTime;

use crate::engine::{Scenario, StepResult, VentDensity};
use crate::io::weather::{format_timestamp, parse_timestamp};
use crate::network::{density, EXTERIOR};

pub const PRESSURES_FILE: &str = "pressures.csv";
pub const FLOWS_FILE: &str = "flows.csv";
pub const SOLVER_FILE: &str = "solver.csv";
pub const README_FILE: &str = "README.md";

#[derive(Debug, thiserror::Error)]
pub enum ResultsError {
    #[error("no results to write")]
    Empty,
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}, line {line}: {message}")]
    Parse { path: PathBuf, line: u64, message: String },
}

/// One row of `flows.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowRow {
    pub timestamp: NaiveDateTime,
    pub element_id: usize,
    /// `PO`, `GO` or `VMC`.
    pub kind: String,
    /// Id of the opening or vent in the scenario file.
    pub source_id: usize,
    pub zone_a: usize,
    pub zone_b: usize,
    /// Signed, positive from `zone_a` to `zone_b`.
    pub mass_flow: f64,
    pub volume_flow: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverRow {
    pub timestamp: NaiveDateTime,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    pub damping_events: usize,
    pub cold_restart: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PressureRow {
    pub timestamp: NaiveDateTime,
    pub pressures: Vec<f64>,
}

const README: &str = "\
# Simulation output

All timestamps are local ISO-8601 date-times copied from the weather file.
Numbers are written with full precision.

## pressures.csv

| column | unit | meaning |
|---|---|---|
| timestamp | | time step |
| zone_<id> | Pa | gauge reference pressure of zone `<id>` at its reference height |

## flows.csv

One row per flow element and per mechanical vent at each time step.

| column | unit | meaning |
|---|---|---|
| timestamp | | time step |
| element_id | | canonical element index; vents are numbered after the openings |
| kind | | `PO` small opening, `GO` half of a decomposed large opening, `VMC` mechanical extraction |
| source_id | | opening id or extracted zone id as written in the scenario |
| zone_a, zone_b | | endpoints, 0 is the exterior |
| mass_flow_kg_s | kg/s | signed flow, positive from zone_a to zone_b |
| volume_flow_m3_h | m³/h | mass flow divided by the density of the air it comes from |

For openings the volume flow uses the density of the upstream node (the
exterior or a zone) at its current temperature. For vents it uses the density
that converted the scheduled rate into mass flow (`vent_density` in the
scenario), so the column reproduces the schedule. This choice affects
reporting only, never the solve.

## solver.csv

| column | unit | meaning |
|---|---|---|
| timestamp | | time step |
| iterations | | Newton iterations, including those of a failed warm start |
| residual | kg/s | largest absolute zone mass balance at the returned pressures |
| converged | | `true` when the residual met the tolerance |
| damping_events | | line-search step halvings |
| cold_start | | `true` when a failed warm start was retried from the linear initialization |
";

/// Shortest round-trip form, in exponent notation for very small or large
/// magnitudes.
pub fn format_number(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !a.is_finite() {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ResultsError + '_ {
    move |source| ResultsError::Io { path: path.to_path_buf(), source }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> ResultsError + '_ {
    move |source| ResultsError::Csv { path: path.to_path_buf(), source }
}

fn write_csv(path: &Path, header: &[String], rows: impl Iterator<Item = Vec<String>>) -> Result<(), ResultsError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Flow rows for one step.
pub fn flow_rows(scenario: &Scenario, result: &StepResult) -> Vec<FlowRow> {
    let network = scenario.network();
    let bs = &result.boundary;
    let node_density = |node: usize| {
        let t = if node == EXTERIOR { bs.exterior_temperature } else { bs.zone_temperatures[node - 1] };
        density(t, scenario.rho_ref)
    };
    let mut rows: Vec<FlowRow> = network
        .elements()
        .iter()
        .zip(&result.element_flows)
        .map(|(e, &m)| {
            let source = if m >= 0.0 { e.zone_a } else { e.zone_b };
            FlowRow {
                timestamp: result.timestamp,
                element_id: e.id,
                kind: e.kind.tag().to_string(),
                source_id: e.source_id,
                zone_a: e.zone_a,
                zone_b: e.zone_b,
                mass_flow: m,
                volume_flow: m / node_density(source) * 3600.0,
            }
        })
        .collect();
    let first = network.elements().len() + 1;
    let hour = chrono::Timelike::hour(&result.timestamp) as usize;
    for (i, vent) in network.vents().iter().enumerate() {
        let rho = match scenario.vent_density {
            VentDensity::ZoneAir => node_density(vent.zone),
            VentDensity::Reference => scenario.rho_ref,
        };
        let volume = vent.rate_at(hour);
        rows.push(FlowRow {
            timestamp: result.timestamp,
            element_id: first + i,
            kind: "VMC".into(),
            source_id: vent.zone,
            zone_a: vent.zone,
            zone_b: EXTERIOR,
            mass_flow: volume / 3600.0 * rho,
            volume_flow: volume,
        });
    }
    rows
}

/// Writes `pressures.csv`, `flows.csv`, `solver.csv` and a README into
/// `out_dir`, creating it if needed.
pub fn write_results(scenario: &Scenario, results: &[StepResult], out_dir: &Path) -> Result<(), ResultsError> {
    if results.is_empty() {
        return Err(ResultsError::Empty);
    }
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;

    let mut header = vec!["timestamp".to_string()];
    header.extend(scenario.network().zones().iter().map(|z| format!("zone_{}", z.id)));
    write_csv(
        &out_dir.join(PRESSURES_FILE),
        &header,
        results.iter().map(|r| {
            let mut row = vec![format_timestamp(&r.timestamp)];
            row.extend(r.pressures.values().iter().copied().map(format_number));
            row
        }),
    )?;

    let header: Vec<String> =
        ["timestamp", "element_id", "kind", "source_id", "zone_a", "zone_b", "mass_flow_kg_s", "volume_flow_m3_h"]
            .map(String::from)
            .to_vec();
    write_csv(
        &out_dir.join(FLOWS_FILE),
        &header,
        results.iter().flat_map(|r| flow_rows(scenario, r)).map(|f| {
            vec![
                format_timestamp(&f.timestamp),
                f.element_id.to_string(),
                f.kind,
                f.source_id.to_string(),
                f.zone_a.to_string(),
                f.zone_b.to_string(),
                format_number(f.mass_flow),
                format_number(f.volume_flow),
            ]
        }),
    )?;

    let header: Vec<String> =
        ["timestamp", "iterations", "residual", "converged", "damping_events", "cold_start"].map(String::from).to_vec();
    write_csv(
        &out_dir.join(SOLVER_FILE),
        &header,
        results.iter().map(|r| {
            vec![
                format_timestamp(&r.timestamp),
                r.report.iterations.to_string(),
                format_number(r.report.final_residual_norm),
                r.report.converged.to_string(),
                r.report.damping_events.to_string(),
                r.report.cold_restart.to_string(),
            ]
        }),
    )?;

    let readme = out_dir.join(README_FILE);
    fs::write(&readme, README).map_err(io_err(&readme))
}

struct Table {
    path: PathBuf,
    rows: Vec<(u64, csv::StringRecord)>,
}

impl Table {
    fn read(path: &Path, expected: Option<&[&str]>) -> Result<Self, ResultsError> {
        let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
        if let Some(expected) = expected {
            let headers = r.headers().map_err(csv_err(path))?;
            if headers.iter().ne(expected.iter().copied()) {
                return Err(ResultsError::Parse {
                    path: path.to_path_buf(),
                    line: 1,
                    message: format!("expected header {}", expected.join(",")),
                });
            }
        }
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(csv_err(path))?;
            rows.push((rec.position().map_or(0, |p| p.line()), rec));
        }
        Ok(Self { path: path.to_path_buf(), rows })
    }

    fn field<T: std::str::FromStr>(&self, line: u64, rec: &csv::StringRecord, i: usize) -> Result<T, ResultsError> {
        rec.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| ResultsError::Parse {
            path: self.path.clone(),
            line,
            message: format!("bad value in column {}", i + 1),
        })
    }

    fn timestamp(&self, line: u64, rec: &csv::StringRecord) -> Result<NaiveDateTime, ResultsError> {
        rec.get(0).and_then(parse_timestamp).ok_or_else(|| ResultsError::Parse {
            path: self.path.clone(),
            line,
            message: "bad timestamp".into(),
        })
    }
}

pub fn read_pressures(path: &Path) -> Result<Vec<PressureRow>, ResultsError> {
    let t = Table::read(path, None)?;
    t.rows
        .iter()
        .map(|(line, rec)| {
            let pressures = (1..rec.len()).map(|i| t.field(*line, rec, i)).collect::<Result<_, _>>()?;
            Ok(PressureRow { timestamp: t.timestamp(*line, rec)?, pressures })
        })
        .collect()
}

pub fn read_flows(path: &Path) -> Result<Vec<FlowRow>, ResultsError> {
    let header =
        ["timestamp", "element_id", "kind", "source_id", "zone_a", "zone_b", "mass_flow_kg_s", "volume_flow_m3_h"];
    let t = Table::read(path, Some(&header))?;
    t.rows
        .iter()
        .map(|(line, rec)| {
            Ok(FlowRow {
                timestamp: t.timestamp(*line, rec)?,
                element_id: t.field(*line, rec, 1)?,
                kind: t.field(*line, rec, 2)?,
                source_id: t.field(*line, rec, 3)?,
                zone_a: t.field(*line, rec, 4)?,
                zone_b: t.field(*line, rec, 5)?,
                mass_flow: t.field(*line, rec, 6)?,
                volume_flow: t.field(*line, rec, 7)?,
            })
        })
        .collect()
}

pub fn read_solver(path: &Path) -> Result<Vec<SolverRow>, ResultsError> {
    let header = ["timestamp", "iterations", "residual", "converged", "damping_events", "cold_start"];
    let t = Table::read(path, Some(&header))?;
    t.rows
        .iter()
        .map(|(line, rec)| {
            Ok(SolverRow {
                timestamp: t.timestamp(*line, rec)?,
                iterations: t.field(*line, rec, 1)?,
                residual: t.field(*line, rec, 2)?,
                converged: t.field(*line, rec, 3)?,
                damping_events: t.field(*line, rec, 4)?,
                cold_restart: t.field(*line, rec, 5)?,
            })
        })
        .collect()
}
