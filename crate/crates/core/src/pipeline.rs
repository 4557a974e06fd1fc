//! End-to-end helpers: motif specs in, cluster labels out.

use crate::error::{Error, Result};
use crate::hin::Hin;
use crate::model::{assign_all, fit, init_model, Assignment, FitReport, Hyperparameters, ModelState, MotifTerm, Seed};
use crate::motif::{enumerate_instances, transcribe, Motif, MotifSpec};

/// Resolves, enumerates and transcribes every motif.
pub fn build_terms(hin: &Hin, specs: &[MotifSpec]) -> Result<Vec<MotifTerm>> {
    specs
        .iter()
        .map(|spec| {
            let motif = Motif::resolve(spec, hin)?;
            let instances = enumerate_instances(hin, &motif)?;
            let tensor = transcribe(&instances, hin)?;
            Ok(MotifTerm { motif, tensor })
        })
        .collect()
}

#[derive(Debug)]
pub struct Clustering {
    pub state: ModelState,
    pub report: FitReport,
    pub assignments: Vec<Assignment>,
}

impl Clustering {
    /// `(node_id, cluster)` for every clusterable node, in nodes-file order.
    pub fn labels(&self, hin: &Hin) -> Vec<(String, usize)> {
        let mut out = Vec::new();
        for t in hin.node_type_ids() {
            let Some(a) = self.assignments.iter().find(|a| a.node_type == t) else {
                continue;
            };
            let names = hin.nodes_of_type(t).expect("type from this graph");
            out.extend(names.iter().cloned().zip(a.labels.iter().copied()));
        }
        out
    }

    /// Labels of one type by name.
    pub fn labels_of_type(&self, hin: &Hin, type_name: &str) -> Result<Vec<(String, usize)>> {
        let t = hin
            .node_type_id(type_name)
            .ok_or_else(|| Error::UnknownNodeType(type_name.to_owned()))?;
        let a = self
            .assignments
            .iter()
            .find(|a| a.node_type == t)
            .ok_or_else(|| Error::Unclusterable(type_name.to_owned()))?;
        let names = hin.nodes_of_type(t)?;
        Ok(names.iter().cloned().zip(a.labels.iter().copied()).collect())
    }
}

/// Fits the model on the given terms and assigns every clusterable type.
pub fn cluster_terms(hin: &Hin, terms: Vec<MotifTerm>, seeds: &[Seed], hyper: Hyperparameters) -> Result<Clustering> {
    let mut state = init_model(hin, terms, seeds, hyper)?;
    let report = fit(&mut state)?;
    let assignments = assign_all(&state);
    Ok(Clustering {
        state,
        report,
        assignments,
    })
}

pub fn cluster(hin: &Hin, specs: &[MotifSpec], seeds: &[Seed], hyper: Hyperparameters) -> Result<Clustering> {
    cluster_terms(hin, build_terms(hin, specs)?, seeds, hyper)
}
