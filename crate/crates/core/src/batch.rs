//! Independent solves in bulk.
//!
//! A time series has to run in order because each step starts from the
//! previous one, but separate boundary states or separate scenarios do not
//! depend on each other. With the `parallel` feature (on by default) they are
//! spread over the rayon thread pool; without it [`Execution::Parallel`] runs
//! sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::engine::{simulate, EngineError, Scenario, StepResult};
use crate::io::weather::WeatherRecord;
use crate::network::AirflowNetwork;
use crate::solver::{newton_solve, BoundaryState, PressureVector, SolverError, SolverOptions, SolverReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Applies `f` to every item, keeping input order.
pub fn map<T, R, F>(items: &[T], execution: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

pub type Solve = Result<(PressureVector, SolverReport), SolverError>;

/// Cold-started solve of one network under many boundary states.
pub fn solve_states(
    network: &AirflowNetwork,
    states: &[BoundaryState],
    rho_ref: f64,
    options: &SolverOptions,
    execution: Execution,
) -> Vec<Solve> {
    map(states, execution, |s| newton_solve(network, s, rho_ref, options, None))
}

/// Runs the same weather series through each scenario.
pub fn simulate_scenarios(
    scenarios: &[Scenario],
    series: &[WeatherRecord],
    execution: Execution,
) -> Vec<Result<Vec<StepResult>, EngineError>> {
    map(scenarios, execution, |s| simulate(s, series))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cases;

    fn states() -> Vec<BoundaryState> {
        (0..40)
            .map(|i| {
                let mut s = BoundaryState::uniform(1, -5.0 + i as f64, 0.25 * i as f64, (37.0 * i as f64) % 360.0);
                s.zone_temperatures = vec![20.0];
                s
            })
            .collect()
    }

    #[test]
    fn modes_agree_exactly() {
        let scenario = cases::vmc_day();
        let net = scenario.network();
        let opts = SolverOptions::default();
        let seq = solve_states(net, &states(), 1.293, &opts, Execution::Sequential);
        let par = solve_states(net, &states(), 1.293, &opts, Execution::Parallel);
        assert_eq!(seq, par);
        assert!(seq.iter().all(|r| r.as_ref().unwrap().1.converged));
    }

    #[test]
    fn scenarios_in_order() {
        let scenarios = vec![cases::stack_case(), cases::vmc_day()];
        let day = cases::artificial_day();
        let out = simulate_scenarios(&scenarios, &day, Execution::default());
        assert_eq!(out.len(), 2);
        assert_eq!(out[1].as_ref().unwrap(), &simulate(&scenarios[1], &day).unwrap());
    }
}
