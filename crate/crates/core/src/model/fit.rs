use ndarray::Array2;
use serde::Serialize;

use super::{objective, pgd_update_mu, update_factor, ModelState, ObjectiveTerms};
use crate::error::{Error, Result};
use crate::hin::NodeTypeId;

/// Objective snapshot after one outer iteration (iteration 0 is the initial state).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterRecord {
    pub iter: usize,
    pub objective: f64,
    pub terms: ObjectiveTerms,
    pub mu: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitReport {
    /// False when the outer loop stopped at `max_outer_iters`.
    pub converged: bool,
    pub outer_iterations: usize,
    pub log: Vec<IterRecord>,
}

fn relative_change(prev: f64, cur: f64) -> f64 {
    if prev == cur {
        return 0.0;
    }
    (prev - cur).abs() / prev.abs().max(f64::MIN_POSITIVE)
}

fn record(state: &ModelState, iter: usize) -> Result<IterRecord> {
    let terms = objective(state)?;
    Ok(IterRecord {
        iter,
        objective: terms.total(),
        terms,
        mu: state.weights.as_slice().to_vec(),
    })
}

/// Alternating minimization: for each motif, sweep its positions with the
/// multiplicative update until the relative objective change falls below
/// `inner_tol`; then run projected gradient descent on `μ`. Repeats until the
/// outer relative change falls below `outer_tol`.
pub fn fit(state: &mut ModelState) -> Result<FitReport> {
    let mut log = vec![record(state, 0)?];
    let mut prev = log[0].objective;
    let mut converged = false;
    let mut outer = 0;
    while outer < state.hyper.max_outer_iters {
        outer += 1;
        for m in 0..state.num_motifs() {
            let mut inner_prev = objective(state)?.total();
            for _ in 0..state.hyper.max_inner_iters {
                for k in 0..state.terms[m].motif.order() {
                    update_factor(state, m, k)?;
                }
                let cur = objective(state)?.total();
                let done = relative_change(inner_prev, cur) < state.hyper.inner_tol;
                inner_prev = cur;
                if done {
                    break;
                }
            }
        }
        pgd_update_mu(state)?;
        let rec = record(state, outer)?;
        let cur = rec.objective;
        log::debug!("outer {outer}: objective {cur:.6e}, mu {:?}", rec.mu);
        log.push(rec);
        if relative_change(prev, cur) < state.hyper.outer_tol {
            converged = true;
            break;
        }
        prev = cur;
    }
    Ok(FitReport {
        converged,
        outer_iterations: outer,
        log,
    })
}

/// Hard labels for one node type.
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    pub node_type: NodeTypeId,
    /// Argmax cluster of each consensus column; ties go to the lowest index.
    pub labels: Vec<usize>,
    pub consensus: Array2<f64>,
    /// Nodes whose consensus column is all zero (labelled 0).
    pub zero_columns: Vec<usize>,
}

pub fn assign_clusters(state: &ModelState, t: NodeTypeId) -> Result<Assignment> {
    let consensus = state.consensus(t)?;
    Ok(assign_from_consensus(t, consensus))
}

pub(crate) fn assign_from_consensus(t: NodeTypeId, consensus: Array2<f64>) -> Assignment {
    let mut labels = Vec::with_capacity(consensus.ncols());
    let mut zero_columns = Vec::new();
    for (j, col) in consensus.columns().into_iter().enumerate() {
        let mut best = 0;
        for (c, &v) in col.iter().enumerate() {
            if v > col[best] {
                best = c;
            }
        }
        if col.iter().all(|&v| v == 0.0) {
            zero_columns.push(j);
        }
        labels.push(best);
    }
    if !zero_columns.is_empty() {
        log::warn!("{} node(s) have an all-zero consensus column", zero_columns.len());
    }
    Assignment {
        node_type: t,
        labels,
        consensus,
        zero_columns,
    }
}

/// Assignments for every type bound by at least one motif.
pub fn assign_all(state: &ModelState) -> Vec<Assignment> {
    (0..state.type_sizes.len() as u32)
        .map(NodeTypeId)
        .filter_map(|t| match assign_clusters(state, t) {
            Ok(a) => Some(a),
            Err(Error::Unclusterable(_)) => None,
            Err(e) => unreachable!("known type failed to assign: {e}"),
        })
        .collect()
}
