//! Quasi-steady time stepping: each weather record is an independent steady
//! state, solved from the previous step's pressures.

use chrono::{NaiveDateTime, Timelike};

use crate::io::weather::WeatherRecord;
use crate::network::{
    build_network, density, expand_hourly, AirflowNetwork, BuildError, Component, NetworkDescription, NetworkError,
    ZoneId, CELSIUS_OFFSET, EXTERIOR,
};
use crate::solver::{
    newton_solve, BoundaryState, PressureSystem, PressureVector, SolverError, SolverOptions, SolverReport,
};

/// Density used to turn volumetric extraction into mass flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VentDensity {
    /// Air density at the extracted zone's temperature.
    #[default]
    ZoneAir,
    /// The scenario reference density, whatever the zone temperature.
    Reference,
}

impl VentDensity {
    pub fn keyword(self) -> &'static str {
        match self {
            VentDensity::ZoneAir => "zone",
            VentDensity::Reference => "reference",
        }
    }
}

/// Inter-zone mass flows; `get(i, j)` is the flow from node `i` to node `j`,
/// node 0 being the exterior.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowMatrix {
    size: usize,
    q: Vec<f64>,
}

impl FlowMatrix {
    pub fn zeros(zone_count: usize) -> Self {
        let size = zone_count + 1;
        Self { size, q: vec![0.0; size * size] }
    }

    /// Side length, `N + 1`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, from: ZoneId, to: ZoneId) -> f64 {
        self.q[from * self.size + to]
    }

    fn add(&mut self, from: ZoneId, to: ZoneId, value: f64) {
        self.q[from * self.size + to] += value;
    }

    pub fn inflow(&self, zone: ZoneId) -> f64 {
        (0..self.size).map(|i| self.get(i, zone)).sum()
    }

    pub fn outflow(&self, zone: ZoneId) -> f64 {
        (0..self.size).map(|j| self.get(zone, j)).sum()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.q.chunks(self.size)
    }
}

/// Fills the flow matrix from converged pressures. Vent extraction appears
/// as flow from its zone to the exterior.
pub fn compute_flow_matrix(
    network: &AirflowNetwork,
    p: &PressureVector,
    state: &BoundaryState,
    rho_ref: f64,
    epsilon: f64,
) -> Result<(FlowMatrix, Vec<f64>), SolverError> {
    let system = PressureSystem::new(network, state, rho_ref, epsilon)?;
    let element_flows = system.element_flows(p.values());
    let mut matrix = FlowMatrix::zeros(network.zone_count());
    for (e, &m) in network.elements().iter().zip(&element_flows) {
        if m > 0.0 {
            matrix.add(e.zone_a, e.zone_b, m);
        } else if m < 0.0 {
            matrix.add(e.zone_b, e.zone_a, -m);
        }
    }
    for (k, &x) in state.extraction_rates.iter().enumerate() {
        if x > 0.0 {
            matrix.add(k + 1, EXTERIOR, x);
        }
    }
    Ok((matrix, element_flows))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub timestamp: NaiveDateTime,
    pub boundary: BoundaryState,
    pub pressures: PressureVector,
    pub flows: FlowMatrix,
    /// Signed flow of each element, positive from `zone_a` to `zone_b`, kg/s.
    pub element_flows: Vec<f64>,
    pub report: SolverReport,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error("{timestamp}: {source}")]
    Solver { timestamp: NaiveDateTime, source: SolverError },
    #[error("weather series is empty")]
    EmptySeries,
    #[error("weather record {index} ({timestamp}) is not after the previous one")]
    Unordered { index: usize, timestamp: NaiveDateTime },
    #[error(transparent)]
    Network(#[from] BuildError),
}

/// A network with its constants and hourly schedules.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    description: NetworkDescription,
    network: AirflowNetwork,
    pub rho_ref: f64,
    pub options: SolverOptions,
    zone_temperatures: Vec<[f64; 24]>,
    pub vent_density: VentDensity,
}

impl Scenario {
    /// `zone_temperatures[k]` holds 1 or 24 hourly values for zone `k + 1`.
    pub fn new(
        description: NetworkDescription,
        rho_ref: f64,
        options: SolverOptions,
        zone_temperatures: &[Vec<f64>],
        vent_density: VentDensity,
    ) -> Result<Self, EngineError> {
        let network = build_network(&description, rho_ref)?;
        let mut errors = Vec::new();
        let count = network.zone_count();
        for zone in zone_temperatures.len() + 1..=count {
            errors.push(NetworkError::MissingTemperature(Component::Zone(zone)));
        }
        if zone_temperatures.len() > count {
            let zone = count + 1;
            errors.push(NetworkError::DanglingZone { component: Component::Zone(zone), zone });
        }
        let mut schedules = Vec::with_capacity(zone_temperatures.len());
        for (k, values) in zone_temperatures.iter().enumerate() {
            let component = Component::Zone(k + 1);
            match expand_hourly(values) {
                Some(s) => {
                    if let Some(t) = s.iter().find(|t| !(t.is_finite() && **t > -CELSIUS_OFFSET)) {
                        errors.push(NetworkError::NonPhysicalTemperature(*t));
                    }
                    schedules.push(s);
                }
                None => errors.push(NetworkError::ScheduleArity { component, len: values.len() }),
            }
        }
        if !errors.is_empty() {
            return Err(BuildError(errors).into());
        }
        Ok(Self { description, network, rho_ref, options, zone_temperatures: schedules, vent_density })
    }

    pub fn description(&self) -> &NetworkDescription {
        &self.description
    }

    pub fn network(&self) -> &AirflowNetwork {
        &self.network
    }

    pub fn zone_temperature_schedules(&self) -> &[[f64; 24]] {
        &self.zone_temperatures
    }

    /// Boundary conditions for one weather record, schedules taken at the
    /// record's hour of day.
    pub fn boundary_state(&self, record: &WeatherRecord) -> BoundaryState {
        let hour = record.timestamp.hour() as usize;
        let zone_temperatures: Vec<f64> = self.zone_temperatures.iter().map(|s| s[hour]).collect();
        let mut extraction = vec![0.0; self.network.zone_count()];
        for vent in self.network.vents() {
            let rho = match self.vent_density {
                VentDensity::ZoneAir => density(zone_temperatures[vent.zone - 1], self.rho_ref),
                VentDensity::Reference => self.rho_ref,
            };
            extraction[vent.zone - 1] += vent.rate_at(hour) / 3600.0 * rho;
        }
        BoundaryState {
            exterior_temperature: record.exterior_temperature,
            wind_speed: record.wind_speed,
            wind_direction: record.wind_direction,
            zone_temperatures,
            extraction_rates: extraction,
        }
    }
}

/// Solves one time step. A warm start that fails to converge is retried
/// once from the laminar initialization.
pub fn step(
    scenario: &Scenario,
    record: &WeatherRecord,
    warm_start: Option<&PressureVector>,
) -> Result<StepResult, EngineError> {
    let timestamp = record.timestamp;
    let wrap = |source| EngineError::Solver { timestamp, source };
    let network = scenario.network();
    let boundary = scenario.boundary_state(record);
    let solve = |warm| newton_solve(network, &boundary, scenario.rho_ref, &scenario.options, warm);

    let (mut pressures, mut report) = solve(warm_start).map_err(wrap)?;
    if !report.converged && warm_start.is_some() {
        let spent = report.iterations;
        let spent_damping = report.damping_events;
        (pressures, report) = solve(None).map_err(wrap)?;
        report.iterations += spent;
        report.damping_events += spent_damping;
        report.cold_restart = true;
    }
    let (flows, element_flows) =
        compute_flow_matrix(network, &pressures, &boundary, scenario.rho_ref, scenario.options.linearization_epsilon)
            .map_err(wrap)?;
    Ok(StepResult { timestamp, boundary, pressures, flows, element_flows, report })
}

/// Runs the series, threading each step's pressures into the next as warm
/// start. Non-converged steps are recorded and the run continues.
pub fn simulate(scenario: &Scenario, series: &[WeatherRecord]) -> Result<Vec<StepResult>, EngineError> {
    if series.is_empty() {
        return Err(EngineError::EmptySeries);
    }
    if let Some(index) = (1..series.len()).find(|&i| series[i].timestamp <= series[i - 1].timestamp) {
        return Err(EngineError::Unordered { index, timestamp: series[index].timestamp });
    }
    let mut results: Vec<StepResult> = Vec::with_capacity(series.len());
    let mut warm: Option<PressureVector> = None;
    for record in series {
        let result = step(scenario, record, warm.as_ref())?;
        warm = result.report.converged.then(|| result.pressures.clone());
        results.push(result);
    }
    Ok(results)
}
