use ndarray::{Array2, Zip};

use super::ModelState;
use crate::error::{Error, Result};
use crate::tensor::{gram_hadamard, mttkrp_sparse};

/// `[A]⁺ = (|A| + A) / 2`.
pub fn pos_part(a: &Array2<f64>) -> Array2<f64> {
    a.mapv(|x| (x.abs() + x) / 2.0)
}

/// `[A]⁻ = (|A| − A) / 2`.
pub fn neg_part(a: &Array2<f64>) -> Array2<f64> {
    a.mapv(|x| (x.abs() - x) / 2.0)
}

/// One square-root multiplicative step on `V^l_k` with everything else fixed.
///
/// Numerator: the sparse MTTKRP, `θ(1−η)(V^(t) − ηV)` and
/// `θη Σ [V^m_i − V^(t) + ηV]⁺` over the other factors of the same type.
/// Denominator: `V ⊙_{i≠k}(V_i V_iᵀ)`, `ρη M∘V^(t)`,
/// `θη Σ ([·]⁻ + ηV)`, `θ(1−η)²V` and the l1 weight.
pub fn update_factor(state: &mut ModelState, l: usize, k: usize) -> Result<()> {
    let h = &state.hyper;
    let (theta, rho, lambda, eps) = (h.theta, h.rho, h.lambda, h.eps_div);
    let t = state.node_type(l, k);
    let eta = state.eta(l, k);
    let v = state.factors[l][k].as_array();

    let mut num = mttkrp_sparse(&state.terms[l].tensor, &state.factors[l], k)?.reversed_axes();
    let gram = gram_hadamard(&state.factors[l], k)?;
    let mut den = gram.dot(v);

    // Contribution of every other factor to V^(t); V^(t) − ηV, computed
    // directly so it stays exactly non-negative.
    let others: Vec<(usize, usize)> = state.contributors[t]
        .iter()
        .copied()
        .filter(|&p| p != (l, k))
        .collect();
    let mut rest = Array2::<f64>::zeros(v.dim());
    for &(m, i) in &others {
        rest.scaled_add(state.eta(m, i), state.factors[m][i].as_array());
    }

    num.scaled_add(theta * (1.0 - eta), &rest);
    den.scaled_add(theta * (1.0 - eta) * (1.0 - eta), v);
    if eta > 0.0 {
        for &(m, i) in &others {
            let diff = state.factors[m][i].as_array() - &rest;
            num.scaled_add(theta * eta, &pos_part(&diff));
            den.scaled_add(theta * eta, &neg_part(&diff));
            den.scaled_add(theta * eta * eta, v);
        }
        let mut vt = rest;
        vt.scaled_add(eta, v);
        vt *= state.mask.for_type(t);
        den.scaled_add(rho * eta, &vt);
    }
    den.mapv_inplace(|d| d + 0.5 * lambda + eps);

    let mut next = v.to_owned();
    let mut bad = None;
    Zip::indexed(&mut next)
        .and(&num)
        .and(&den)
        .for_each(|idx, x, &n, &d| {
            if *x == 0.0 {
                return;
            }
            let r = (n / d).sqrt();
            *x *= r;
            if !x.is_finite() && bad.is_none() {
                bad = Some(format!("entry {idx:?}: numerator {n:e}, denominator {d:e}"));
            }
        });
    if let Some(detail) = bad {
        return Err(Error::NonFinite {
            motif: l,
            position: k,
            detail,
        });
    }
    state.factors[l][k].assign(next);
    Ok(())
}
