//! Self-contained validation suite run by `zonalflow check`.

use std::fmt;

use crate::cases;
use crate::engine::{simulate, step, EngineError, StepResult};

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// A number reported for the reference case.
    Published,
    /// An analytic expression evaluated independently of the solver.
    ClosedForm,
    /// A qualitative pattern with no number attached.
    Property,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Published => "published",
            Basis::ClosedForm => "closed-form",
            Basis::Property => "property",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub basis: Basis,
    pub computed: String,
    pub expected: String,
    pub passed: bool,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} [{}]: computed {}, expected {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.basis,
            self.computed,
            self.expected
        )
    }
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Signed flows through the windward and leeward openings, positive inward.
pub fn vmc_openings(r: &StepResult) -> (f64, f64) {
    (r.element_flows[0], r.element_flows[1])
}

/// Hours whose flow signs do not match the three-regime narrative.
pub fn vmc_sign_violations(day: &[StepResult]) -> Vec<usize> {
    let calm_leeward = vmc_openings(&day[0]).1;
    day.iter()
        .enumerate()
        .filter(|(h, r)| {
            let (windward, leeward) = vmc_openings(r);
            let fraction = cases::vmc_fraction(*h);
            let ok = if fraction == 0.0 {
                windward > 0.0 && leeward < 0.0
            } else if fraction < 1.0 {
                windward > 0.0 && leeward < 0.0 && leeward.abs() < calm_leeward.abs()
            } else {
                windward > 0.0 && leeward > 0.0
            };
            !ok
        })
        .map(|(h, _)| h)
        .collect()
}

fn stack_checks(out: &mut Vec<Check>) -> Result<(), EngineError> {
    let day = cases::artificial_day();
    let r = step(&cases::stack_case(), &day[0], None)?;
    let through = r.flows.get(0, 1);
    let expected = cases::stack_expected();
    out.push(Check {
        name: "stack case through-flow",
        basis: Basis::Published,
        computed: format!("{through:.4} kg/s"),
        expected: "0.497 kg/s ± 5%".into(),
        passed: r.report.converged && relative(through, 0.497) <= 0.05,
    });
    out.push(Check {
        name: "stack case closed form",
        basis: Basis::ClosedForm,
        computed: format!("{through:.9} kg/s"),
        expected: format!("{expected:.9} kg/s ± 1e-6 rel"),
        passed: r.report.converged && relative(through, expected) <= 1e-6,
    });
    Ok(())
}

fn vmc_checks(out: &mut Vec<Check>) -> Result<(), EngineError> {
    let scenario = cases::vmc_day();
    let day = simulate(&scenario, &cases::artificial_day())?;

    let extraction = day[8].boundary.extraction_rates[0];
    out.push(Check {
        name: "10% extraction mass flow",
        basis: Basis::Published,
        computed: format!("{extraction:.5} kg/s"),
        expected: "0.108 kg/s ± 2%".into(),
        passed: relative(extraction, 0.108) <= 0.02,
    });

    let bad = vmc_sign_violations(&day);
    out.push(Check {
        name: "three-regime flow signs",
        basis: Basis::Property,
        computed: if bad.is_empty() { "all 24 hours match".into() } else { format!("mismatch at hours {bad:?}") },
        expected: "wind-driven, reduced leeward outflow, both inflow, wind-driven".into(),
        passed: bad.is_empty() && day.iter().all(|r| r.report.converged),
    });

    let iterating: Vec<usize> =
        day.iter().enumerate().filter(|(_, r)| r.report.iterations > 0).map(|(h, _)| h).collect();
    out.push(Check {
        name: "iterations only at schedule changes",
        basis: Basis::Property,
        computed: format!("hours {iterating:?}"),
        expected: "hours [0, 7, 13, 19]".into(),
        passed: iterating == [0, 7, 13, 19],
    });
    Ok(())
}

fn doorway_checks(out: &mut Vec<Check>) -> Result<(), EngineError> {
    let scenario = cases::counterflow_doorway();
    let r = step(&scenario, &cases::doorway_weather(), None)?;
    let go: Vec<(f64, f64)> = scenario
        .network()
        .elements()
        .iter()
        .zip(&r.element_flows)
        .filter(|(e, _)| e.kind.tag() == "GO")
        .map(|(e, m)| (e.elevation, *m))
        .collect();
    // zone_a is the cold room: the upper half must flow b -> a, the lower a -> b
    let (lower, upper) = (go[0].1, go[1].1);
    out.push(Check {
        name: "doorway counterflow",
        basis: Basis::Property,
        computed: format!("lower {lower:+.4} kg/s, upper {upper:+.4} kg/s (cold to warm positive)"),
        expected: "lower > 0, upper < 0".into(),
        passed: r.report.converged && lower > 0.0 && upper < 0.0,
    });
    Ok(())
}

type CaseChecks = fn(&mut Vec<Check>) -> Result<(), EngineError>;

/// Runs every reference case. A case that fails to solve becomes a failed
/// check carrying the error.
pub fn run_checks() -> Vec<Check> {
    let mut out = Vec::new();
    let groups: [(&'static str, CaseChecks); 3] =
        [("stack case", stack_checks), ("ventilation day", vmc_checks), ("doorway", doorway_checks)];
    for (name, run) in groups {
        if let Err(e) = run(&mut out) {
            out.push(Check {
                name,
                basis: Basis::Property,
                computed: e.to_string(),
                expected: "a solution".into(),
                passed: false,
            });
        }
    }
    out
}
