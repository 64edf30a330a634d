//! Solution of the zone mass-balance system `f(p) = 0`.
//!
//! Newton-Raphson with the analytic Jacobian, each correction obtained by LU
//! factorization. Without a warm start the iteration begins from the
//! solution of the laminar system (every exponent set to 1). A backtracking
//! line search on the max-norm of the residuals guards against the two-cycle
//! that pure Newton falls into on symmetric networks with exponent 0.5.

pub mod assembly;
pub mod flow;
pub mod linalg;

use crate::network::{AirflowNetwork, ZoneId, EXTERIOR};

pub use assembly::{assemble_jacobian, assemble_residuals, PressureSystem};
pub use flow::{
    crack_mass_flow, exterior_side_pressure, flow_and_derivative, flow_derivative, pressure_difference, BoundaryState,
    DrivingTerms, PressureVector,
};
pub use linalg::{lu_solve, DenseMatrix, LinalgError, LuFactors};

pub const DEFAULT_RESIDUAL_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_MAX_ITERATIONS: usize = 100;
pub const DEFAULT_LINEARIZATION_EPSILON: f64 = 1e-10;
pub const DEFAULT_MAX_HALVINGS: u32 = 6;

/// Fraction of the predicted decrease a damped step must achieve.
const SUFFICIENT_DECREASE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("invalid boundary state: {0}")]
    InvalidBoundary(String),
    #[error("invalid solver options: {0}")]
    InvalidOptions(String),
    #[error("element {0} is not an exterior element with a cp table")]
    NotExterior(usize),
    #[error("zone {zone} has no flow path to the exterior; the balance system is singular")]
    IsolatedZone { zone: ZoneId },
    #[error("network has no zones")]
    EmptyNetwork,
    #[error("singular linear system at pivot {pivot} (zone {zone})")]
    Singular { pivot: usize, zone: ZoneId },
    #[error("warm start has {got} entries for {expected} zones, or is not finite")]
    WarmStart { got: usize, expected: usize },
    #[error("non-finite pressures after iteration {iteration}")]
    NonFinite { iteration: usize },
}

impl From<LinalgError> for SolverError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::Singular { pivot, .. } => SolverError::Singular { pivot, zone: pivot + 1 },
            LinalgError::Dimension { rows, rhs, .. } => {
                SolverError::InvalidOptions(format!("dimension mismatch {rows} vs {rhs}"))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Max-norm of the zone balances accepted as converged, kg/s.
    pub residual_tolerance: f64,
    /// Cap on Newton corrections; the laminar initialization is not counted.
    pub max_iterations: usize,
    /// Below this |dp| (Pa) the flow law is linearized.
    pub linearization_epsilon: f64,
    /// Initial step length of every iteration, in (0, 1].
    pub damping: f64,
    /// Step halvings allowed per iteration. `0` gives plain Newton.
    pub max_halvings: u32,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            residual_tolerance: DEFAULT_RESIDUAL_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            linearization_epsilon: DEFAULT_LINEARIZATION_EPSILON,
            damping: 1.0,
            max_halvings: DEFAULT_MAX_HALVINGS,
        }
    }
}

impl SolverOptions {
    /// Full Newton steps, no line search.
    pub fn undamped() -> Self {
        Self { damping: 1.0, max_halvings: 0, ..Self::default() }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.residual_tolerance = tolerance;
        self
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |s: &str| Err(SolverError::InvalidOptions(s.into()));
        if !(self.residual_tolerance > 0.0 && self.residual_tolerance.is_finite()) {
            return bad("residual_tolerance must be > 0");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be > 0");
        }
        if !(self.linearization_epsilon > 0.0 && self.linearization_epsilon.is_finite()) {
            return bad("linearization_epsilon must be > 0");
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return bad("damping must lie in (0, 1]");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolverReport {
    /// Linear systems solved: the laminar initialization of a cold start
    /// counts as one, then one per Newton correction. Zero when a warm start
    /// already satisfied the tolerance.
    pub iterations: usize,
    pub converged: bool,
    /// Max over zones of |f_i|, kg/s.
    pub final_residual_norm: f64,
    /// Number of step halvings.
    pub damping_events: usize,
    pub used_linear_init: bool,
    /// The step was re-solved from a cold start after a failed warm start.
    pub cold_restart: bool,
}

pub(crate) fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// First zone that cannot reach the exterior through flow elements.
fn isolated_zone(network: &AirflowNetwork) -> Option<ZoneId> {
    let n = network.zone_count();
    let mut reached = vec![false; n + 1];
    reached[EXTERIOR] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for e in network.elements() {
            if reached[e.zone_a] != reached[e.zone_b] {
                reached[e.zone_a] = true;
                reached[e.zone_b] = true;
                changed = true;
            }
        }
    }
    (1..=n).find(|&z| !reached[z])
}

/// Pressures of the laminar network: every exponent forced to 1, wind,
/// stack and extraction kept. One linear solve.
pub fn linear_initialization(
    network: &AirflowNetwork,
    state: &BoundaryState,
    rho_ref: f64,
) -> Result<PressureVector, SolverError> {
    linear_initialization_with(network, state, rho_ref, DEFAULT_LINEARIZATION_EPSILON)
}

fn linear_initialization_with(
    network: &AirflowNetwork,
    state: &BoundaryState,
    rho_ref: f64,
    epsilon: f64,
) -> Result<PressureVector, SolverError> {
    if network.zone_count() == 0 {
        return Err(SolverError::EmptyNetwork);
    }
    let system = PressureSystem::new(network, state, rho_ref, epsilon)?.linearized();
    if let Some(zone) = isolated_zone(network) {
        return Err(SolverError::IsolatedZone { zone });
    }
    let origin = vec![0.0; network.zone_count()];
    let mut matrix = DenseMatrix::zeros(origin.len(), origin.len());
    // f is affine in p: f(p) = f(0) + A p
    let f0 = system.evaluate(&origin, Some(&mut matrix));
    let rhs: Vec<f64> = f0.iter().map(|x| -x).collect();
    Ok(PressureVector::new(lu_solve(&matrix, &rhs)?))
}

/// Solves the zone balances for the reference pressures.
///
/// A run that exhausts `max_iterations` is returned with
/// `report.converged == false`; the caller decides what to do with it.
pub fn newton_solve(
    network: &AirflowNetwork,
    state: &BoundaryState,
    rho_ref: f64,
    options: &SolverOptions,
    warm_start: Option<&PressureVector>,
) -> Result<(PressureVector, SolverReport), SolverError> {
    options.validate()?;
    let n = network.zone_count();
    if n == 0 {
        return Err(SolverError::EmptyNetwork);
    }
    let system = PressureSystem::new(network, state, rho_ref, options.linearization_epsilon)?;
    if let Some(zone) = isolated_zone(network) {
        return Err(SolverError::IsolatedZone { zone });
    }

    let mut report = SolverReport::default();
    let mut p = match warm_start {
        Some(w) if w.len() == n && w.is_finite() => w.values().to_vec(),
        Some(w) => return Err(SolverError::WarmStart { got: w.len(), expected: n }),
        None => {
            report.used_linear_init = true;
            report.iterations = 1;
            linear_initialization_with(network, state, rho_ref, options.linearization_epsilon)?.into_inner()
        }
    };

    let mut jacobian = DenseMatrix::zeros(n, n);
    let mut f = system.evaluate(&p, Some(&mut jacobian));
    let mut norm = max_norm(&f);

    let mut corrections = 0;
    while norm > options.residual_tolerance {
        if corrections == options.max_iterations {
            report.final_residual_norm = norm;
            return Ok((PressureVector::new(p), report));
        }
        let rhs: Vec<f64> = f.iter().map(|x| -x).collect();
        let correction = lu_solve(&jacobian, &rhs)?;

        let mut step = options.damping;
        let mut halvings = 0;
        let (trial, trial_f, trial_norm) = loop {
            let trial: Vec<f64> = p.iter().zip(&correction).map(|(x, d)| x + step * d).collect();
            let trial_f = system.residuals(&trial);
            let trial_norm = max_norm(&trial_f);
            let decreased = trial_norm <= (1.0 - SUFFICIENT_DECREASE * step) * norm;
            if decreased || halvings == options.max_halvings {
                break (trial, trial_f, trial_norm);
            }
            step *= 0.5;
            halvings += 1;
            report.damping_events += 1;
        };
        corrections += 1;
        report.iterations += 1;
        if !trial_norm.is_finite() || trial.iter().any(|x| !x.is_finite()) {
            return Err(SolverError::NonFinite { iteration: report.iterations });
        }
        p = trial;
        f = trial_f;
        norm = trial_norm;
        if norm > options.residual_tolerance {
            f = system.evaluate(&p, Some(&mut jacobian));
        }
    }

    report.converged = true;
    report.final_residual_norm = norm;
    Ok((PressureVector::new(p), report))
}
