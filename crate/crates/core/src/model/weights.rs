use ndarray::Array2;

use super::objective::weight_dependent_terms;
use super::{objective, project_simplex, ModelState};
use crate::error::Result;

/// Smallest step tried by the backtracking search.
const MIN_STEP: f64 = 1e-12;

/// Gradient of the objective with respect to `μ` (only the consensus and
/// seed-mask terms depend on it). With `S_{m,t}` the mean of motif `m`'s
/// type-`t` factors and `n_t` the number of type-`t` factors overall:
/// `∂/∂μ_m = Σ_t 2ρ⟨M∘V^(t), S_{m,t}⟩ − 2θ⟨Σ_{φ(m',i)=t} V^{m'}_i − n_t V^(t), S_{m,t}⟩`.
pub fn grad_mu(state: &ModelState) -> Vec<f64> {
    let h = &state.hyper;
    let mut grad = vec![0.0; state.num_motifs()];
    for t in 0..state.type_sizes.len() {
        let contrib = &state.contributors[t];
        if contrib.is_empty() {
            continue;
        }
        let vt = state.consensus_raw(t);
        let mut pull = Array2::<f64>::zeros(vt.dim());
        for &(m, i) in contrib {
            pull += state.factors[m][i].as_array();
        }
        pull.scaled_add(-(contrib.len() as f64), &vt);
        // 2ρ M∘V^(t) − 2θ (Σ V − n_t V^(t)); M is 0/1 so M∘M∘V^(t) = M∘V^(t).
        let mut dir = &vt * state.mask.for_type(t) * (2.0 * h.rho);
        dir.scaled_add(-2.0 * h.theta, &pull);
        for &(m, i) in contrib {
            let share = state.terms[m].motif.same_type_count(i) as f64;
            let inner: f64 = dir
                .iter()
                .zip(state.factors[m][i].as_array().iter())
                .map(|(a, b)| a * b)
                .sum();
            grad[m] += inner / share;
        }
    }
    grad
}

/// Projected gradient descent on `μ` with factors fixed. Each step halves
/// the step size until the objective does not increase; stops when the
/// relative objective change drops below `inner_tol`. Returns the number of
/// accepted steps.
pub fn pgd_update_mu(state: &mut ModelState) -> Result<usize> {
    let fixed = {
        let o = objective(state)?;
        o.reconstruction + o.sparsity
    };
    let eval = |s: &ModelState| {
        let (a, b) = weight_dependent_terms(s);
        fixed + a + b
    };
    let mut obj = eval(state);
    let mut step = state.hyper.pgd_step;
    let mut accepted = 0;
    for _ in 0..state.hyper.max_pgd_iters {
        let g = grad_mu(state);
        let mu = state.weights.as_slice().to_vec();
        let mut moved = false;
        while step >= MIN_STEP {
            let trial: Vec<f64> = mu.iter().zip(&g).map(|(m, d)| m - step * d).collect();
            let cand = project_simplex(&trial);
            state.weights.set_raw(cand);
            let next = eval(state);
            if next <= obj {
                let rel = (obj - next) / obj.abs().max(f64::MIN_POSITIVE);
                obj = next;
                moved = true;
                accepted += 1;
                // Let the step recover after earlier halvings.
                step = (step * 2.0).min(state.hyper.pgd_step);
                if rel < state.hyper.inner_tol {
                    return Ok(accepted);
                }
                break;
            }
            step /= 2.0;
        }
        if !moved {
            state.weights.set_raw(mu);
            return Ok(accepted);
        }
    }
    Ok(accepted)
}
