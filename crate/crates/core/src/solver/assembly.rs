//! Zone mass balances and their Jacobian.
//!
//! For zone `k` the balance is the sum of signed inflows through every
//! incident element minus the mechanical extraction. An element with flow
//! `m` from `a` to `b` adds `m` to `f_b` and removes it from `f_a`. Since
//! `dp = side(a) - side(b)` and `side(k) = p_k - rho_k g (z - z_k)`,
//! `d(dp)/dp_a = 1` and `d(dp)/dp_b = -1`. With `c = dm/d(dp) >= 0` this
//! gives `-c` on both diagonals and `+c` on both off-diagonals.

use crate::network::{AirflowNetwork, EXTERIOR};

use super::flow::{flow_and_derivative, BoundaryState, DrivingTerms, PressureVector};
use super::linalg::DenseMatrix;
use super::{SolverError, DEFAULT_LINEARIZATION_EPSILON};

/// Nonlinear balance system of a network under fixed boundary conditions.
#[derive(Debug, Clone)]
pub struct PressureSystem<'a> {
    network: &'a AirflowNetwork,
    terms: DrivingTerms,
    extraction: Vec<f64>,
    epsilon: f64,
    /// Replaces every exponent when set; `Some(1.0)` gives the laminar system.
    exponent_override: Option<f64>,
}

impl<'a> PressureSystem<'a> {
    pub fn new(
        network: &'a AirflowNetwork,
        state: &BoundaryState,
        rho_ref: f64,
        epsilon: f64,
    ) -> Result<Self, SolverError> {
        Ok(Self {
            network,
            terms: DrivingTerms::new(network, state, rho_ref)?,
            extraction: state.extraction_rates.clone(),
            epsilon,
            exponent_override: None,
        })
    }

    /// Same system with every flow exponent forced to 1.
    pub fn linearized(mut self) -> Self {
        self.exponent_override = Some(1.0);
        self
    }

    pub fn network(&self) -> &AirflowNetwork {
        self.network
    }

    pub fn terms(&self) -> &DrivingTerms {
        &self.terms
    }

    pub fn dimension(&self) -> usize {
        self.network.zone_count()
    }

    fn check_len(&self, p: &[f64]) {
        assert_eq!(p.len(), self.dimension(), "pressure vector length");
    }

    /// Signed flow through each element, positive from `zone_a` to `zone_b`.
    pub fn element_flows(&self, p: &[f64]) -> Vec<f64> {
        self.check_len(p);
        self.network
            .elements()
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let n = self.exponent_override.unwrap_or(e.exponent);
                flow_and_derivative(e.permeability, n, self.terms.delta_p(i, e, p), self.epsilon).0
            })
            .collect()
    }

    pub fn residuals(&self, p: &[f64]) -> Vec<f64> {
        self.evaluate(p, None)
    }

    pub fn jacobian(&self, p: &[f64]) -> DenseMatrix {
        let mut j = DenseMatrix::zeros(self.dimension(), self.dimension());
        self.evaluate(p, Some(&mut j));
        j
    }

    /// Residuals, filling `jacobian` on the way when given.
    pub fn evaluate(&self, p: &[f64], mut jacobian: Option<&mut DenseMatrix>) -> Vec<f64> {
        self.check_len(p);
        let mut f: Vec<f64> = self.extraction.iter().map(|x| -x).collect();
        if let Some(j) = jacobian.as_deref_mut() {
            j.fill(0.0);
        }
        for (i, e) in self.network.elements().iter().enumerate() {
            let n = self.exponent_override.unwrap_or(e.exponent);
            let dp = self.terms.delta_p(i, e, p);
            let (m, c) = flow_and_derivative(e.permeability, n, dp, self.epsilon);
            let a = (e.zone_a != EXTERIOR).then(|| e.zone_a - 1);
            let b = (e.zone_b != EXTERIOR).then(|| e.zone_b - 1);
            if let Some(a) = a {
                f[a] -= m;
            }
            if let Some(b) = b {
                f[b] += m;
            }
            if let Some(j) = jacobian.as_deref_mut() {
                if let Some(a) = a {
                    j[(a, a)] -= c;
                }
                if let Some(b) = b {
                    j[(b, b)] -= c;
                }
                if let (Some(a), Some(b)) = (a, b) {
                    j[(a, b)] += c;
                    j[(b, a)] += c;
                }
            }
        }
        f
    }
}

/// Zone mass balances, kg/s, at pressures `p`.
pub fn assemble_residuals(
    network: &AirflowNetwork,
    p: &PressureVector,
    state: &BoundaryState,
    rho_ref: f64,
) -> Result<Vec<f64>, SolverError> {
    let system = PressureSystem::new(network, state, rho_ref, DEFAULT_LINEARIZATION_EPSILON)?;
    Ok(system.residuals(p.values()))
}

/// Analytic Jacobian of the zone balances, kg·s⁻¹·Pa⁻¹.
pub fn assemble_jacobian(
    network: &AirflowNetwork,
    p: &PressureVector,
    state: &BoundaryState,
    rho_ref: f64,
) -> Result<DenseMatrix, SolverError> {
    let system = PressureSystem::new(network, state, rho_ref, DEFAULT_LINEARIZATION_EPSILON)?;
    Ok(system.jacobian(p.values()))
}
