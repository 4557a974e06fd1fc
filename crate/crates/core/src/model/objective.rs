use serde::Serialize;

use super::ModelState;
use crate::error::Result;
use crate::tensor::residual_fro_sq;

/// The four objective terms, each already multiplied by its weight.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ObjectiveTerms {
    /// `Σ_m ‖X^(m) − I ×_i V^m_i‖_F²`
    pub reconstruction: f64,
    /// `λ Σ_{m,i} ‖V^m_i‖_1`
    pub sparsity: f64,
    /// `θ Σ_{m,i} ‖V^m_i − V^(φ(m,i))‖_F²`
    pub consensus: f64,
    /// `ρ Σ_t ‖M^(t) ∘ V^(t)‖_F²`
    pub seed_mask: f64,
}

impl ObjectiveTerms {
    pub fn total(&self) -> f64 {
        self.reconstruction + self.sparsity + self.consensus + self.seed_mask
    }
}

pub fn objective(state: &ModelState) -> Result<ObjectiveTerms> {
    let mut reconstruction = 0.0;
    let mut l1 = 0.0;
    for (term, factors) in state.terms.iter().zip(&state.factors) {
        reconstruction += residual_fro_sq(&term.tensor, factors)?;
        l1 += factors.iter().map(|f| f.as_array().sum()).sum::<f64>();
    }
    let (consensus, seed_mask) = weight_dependent_terms(state);
    Ok(ObjectiveTerms {
        reconstruction,
        sparsity: state.hyper.lambda * l1,
        consensus,
        seed_mask,
    })
}

/// The consensus and seed-mask terms, the only ones that depend on `μ`.
pub(crate) fn weight_dependent_terms(state: &ModelState) -> (f64, f64) {
    let mut consensus = 0.0;
    let mut seed_mask = 0.0;
    for t in 0..state.type_sizes.len() {
        if state.contributors[t].is_empty() {
            continue;
        }
        let vt = state.consensus_raw(t);
        for &(m, i) in &state.contributors[t] {
            consensus += state.factors[m][i]
                .as_array()
                .iter()
                .zip(vt.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>();
        }
        seed_mask += state
            .mask
            .for_type(t)
            .iter()
            .zip(vt.iter())
            .map(|(m, v)| (m * v) * (m * v))
            .sum::<f64>();
    }
    (state.hyper.theta * consensus, state.hyper.rho * seed_mask)
}
