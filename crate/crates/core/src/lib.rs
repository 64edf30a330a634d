//! Multizone airflow network simulation.
//!
//! A building is a set of well-mixed zones joined to each other and to the
//! exterior by openings. Each hour the zone reference pressures that balance
//! every zone's mass flow are found by Newton's method, and the resulting
//! interzonal flow matrix is reported.

#[cfg(test)]
macro_rules! assert_close {
    ($a:expr, $b:expr, $tol:expr) => {{
        let (a, b): (f64, f64) = ($a, $b);
        assert!((a - b).abs() <= $tol, "{a} vs {b} (tol {})", $tol);
    }};
}

pub mod batch;
pub mod cases;
pub mod check;
pub mod engine;
pub mod io;
pub mod network;
pub mod solver;

pub use engine::{simulate, step, EngineError, FlowMatrix, Scenario, StepResult, VentDensity};
pub use network::{build_network, AirflowNetwork, NetworkDescription};
pub use solver::{newton_solve, BoundaryState, PressureVector, SolverError, SolverOptions, SolverReport};
