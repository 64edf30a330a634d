//! Driving pressures and the power-law flow relation for a single element.

use std::ops::Index;

use crate::network::{density, AirflowNetwork, FlowElement, ZoneId, CELSIUS_OFFSET, EXTERIOR, GRAVITY};

use super::SolverError;

/// Averaged weather and zone conditions for one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryState {
    pub exterior_temperature: f64,
    pub wind_speed: f64,
    /// Direction the wind blows from, degrees.
    pub wind_direction: f64,
    /// One air temperature per zone, °C, zone 1 first.
    pub zone_temperatures: Vec<f64>,
    /// Mechanical extraction per zone, kg/s.
    pub extraction_rates: Vec<f64>,
}

impl BoundaryState {
    /// Uniform temperatures and no extraction.
    pub fn uniform(zone_count: usize, temperature: f64, wind_speed: f64, wind_direction: f64) -> Self {
        Self {
            exterior_temperature: temperature,
            wind_speed,
            wind_direction,
            zone_temperatures: vec![temperature; zone_count],
            extraction_rates: vec![0.0; zone_count],
        }
    }

    pub fn validate(&self, zone_count: usize) -> Result<(), SolverError> {
        let bad = |what: String| Err(SolverError::InvalidBoundary(what));
        if self.zone_temperatures.len() != zone_count {
            return bad(format!("{} zone temperatures for {zone_count} zones", self.zone_temperatures.len()));
        }
        if self.extraction_rates.len() != zone_count {
            return bad(format!("{} extraction rates for {zone_count} zones", self.extraction_rates.len()));
        }
        let physical = |t: f64| t.is_finite() && t > -CELSIUS_OFFSET;
        if !physical(self.exterior_temperature) {
            return bad(format!("exterior temperature {}", self.exterior_temperature));
        }
        if let Some((i, t)) = self.zone_temperatures.iter().enumerate().find(|(_, t)| !physical(**t)) {
            return bad(format!("zone {} temperature {t}", i + 1));
        }
        if !self.wind_speed.is_finite() || self.wind_speed < 0.0 {
            return bad(format!("wind speed {}", self.wind_speed));
        }
        if !self.wind_direction.is_finite() {
            return bad(format!("wind direction {}", self.wind_direction));
        }
        if self.extraction_rates.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return bad("extraction rates must be finite and >= 0".into());
        }
        Ok(())
    }
}

/// Gauge reference pressure of each zone, Pa, zone 1 first.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureVector(Vec<f64>);

impl PressureVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Index<usize> for PressureVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<Vec<f64>> for PressureVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Signed mass flow through a power-law opening, positive with `dp`.
///
/// Below `epsilon` the law is replaced by its linear form `K*dp`.
pub fn crack_mass_flow(permeability: f64, exponent: f64, dp: f64, epsilon: f64) -> f64 {
    flow_and_derivative(permeability, exponent, dp, epsilon).0
}

/// Magnitude of `d(flow)/d(dp)`; `K` inside the linear band.
pub fn flow_derivative(permeability: f64, exponent: f64, dp: f64, epsilon: f64) -> f64 {
    flow_and_derivative(permeability, exponent, dp, epsilon).1
}

/// Flow and its derivative. The derivative reuses the flow as `n*|m|/|dp|`
/// instead of a second power evaluation.
#[inline]
pub fn flow_and_derivative(permeability: f64, exponent: f64, dp: f64, epsilon: f64) -> (f64, f64) {
    let magnitude = dp.abs();
    if magnitude < epsilon {
        return (permeability * dp, permeability);
    }
    let flow = permeability * magnitude.powf(exponent);
    (flow.copysign(dp), exponent * flow / magnitude)
}

/// Pressure on the outdoor face of an exterior element at its elevation:
/// dynamic wind pressure minus the outdoor hydrostatic column from the datum.
pub fn exterior_side_pressure(element: &FlowElement, state: &BoundaryState, rho_ref: f64) -> Result<f64, SolverError> {
    let cp_table = match (&element.cp_table, element.is_exterior()) {
        (Some(t), true) => t,
        _ => return Err(SolverError::NotExterior(element.id)),
    };
    let rho = density(state.exterior_temperature, rho_ref);
    let cp = cp_table.lookup(state.wind_direction);
    Ok(0.5 * rho * cp * state.wind_speed * state.wind_speed - rho * GRAVITY * element.elevation)
}

/// Per-step constants shared by every residual evaluation: outdoor face
/// pressures indexed by element, zone air densities and extraction.
#[derive(Debug, Clone)]
pub struct DrivingTerms {
    exterior: Vec<f64>,
    zone_density: Vec<f64>,
    zone_height: Vec<f64>,
}

impl DrivingTerms {
    pub fn new(network: &AirflowNetwork, state: &BoundaryState, rho_ref: f64) -> Result<Self, SolverError> {
        state.validate(network.zone_count())?;
        let exterior = network
            .elements()
            .iter()
            .map(|e| if e.is_exterior() { exterior_side_pressure(e, state, rho_ref) } else { Ok(0.0) })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            exterior,
            zone_density: state.zone_temperatures.iter().map(|t| density(*t, rho_ref)).collect(),
            zone_height: network.zones().iter().map(|z| z.reference_height).collect(),
        })
    }

    pub fn exterior_pressures(&self) -> &[f64] {
        &self.exterior
    }

    pub fn zone_density(&self, zone: ZoneId) -> f64 {
        self.zone_density[zone - 1]
    }

    /// Pressure on the `zone` side of the element at index `index`.
    #[inline]
    fn side(&self, index: usize, element: &FlowElement, zone: ZoneId, p: &[f64]) -> f64 {
        if zone == EXTERIOR {
            self.exterior[index]
        } else {
            let k = zone - 1;
            p[k] - self.zone_density[k] * GRAVITY * (element.elevation - self.zone_height[k])
        }
    }

    /// Pressure difference driving flow from `zone_a` to `zone_b`.
    #[inline]
    pub fn delta_p(&self, index: usize, element: &FlowElement, p: &[f64]) -> f64 {
        self.side(index, element, element.zone_a, p) - self.side(index, element, element.zone_b, p)
    }
}

/// Pressure difference across one element, positive when it drives flow
/// from `zone_a` to `zone_b`.
pub fn pressure_difference(
    network: &AirflowNetwork,
    element_index: usize,
    p: &PressureVector,
    state: &BoundaryState,
    rho_ref: f64,
) -> Result<f64, SolverError> {
    let terms = DrivingTerms::new(network, state, rho_ref)?;
    let element = &network.elements()[element_index];
    Ok(terms.delta_p(element_index, element, p.values()))
}
