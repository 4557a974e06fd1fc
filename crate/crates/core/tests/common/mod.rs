#![allow(dead_code)]

pub mod dense;
pub mod graphs;

use std::collections::BTreeSet;

use hinclust_core::model::{Hyperparameters, ModelState, MotifTerm, MotifWeights, Seed};
use hinclust_core::{Motif, NodeRef, NodeTypeId, SparseTensor};
use rand::seq::IndexedRandom;
use rand::Rng;

/// Bare motif over the given type indices; edges are irrelevant to the model.
pub fn motif(name: &str, types: &[u32]) -> Motif {
    Motif {
        name: name.to_owned(),
        node_ids: (0..types.len()).map(|i| format!("v{i}")).collect(),
        node_types: types.iter().map(|&t| NodeTypeId(t)).collect(),
        edges: Vec::new(),
        injective_types: BTreeSet::new(),
    }
}

pub fn random_tensor<R: Rng>(rng: &mut R, dims: &[usize], density: f64, binary: bool) -> SparseTensor {
    let total: usize = dims.iter().product();
    let mut entries = Vec::new();
    for flat in 0..total {
        if rng.random_bool(density) {
            let mut idx = vec![0; dims.len()];
            let mut f = flat;
            for k in (0..dims.len()).rev() {
                idx[k] = f % dims[k];
                f /= dims[k];
            }
            let v = if binary { 1.0 } else { rng.random_range(0.1..3.0) };
            entries.push((idx, v));
        }
    }
    SparseTensor::new(dims.to_vec(), entries).unwrap()
}

pub struct StateShape {
    pub max_types: usize,
    pub max_size: usize,
    pub max_motifs: usize,
    pub max_order: usize,
    pub max_clusters: usize,
}

impl Default for StateShape {
    fn default() -> Self {
        StateShape {
            max_types: 3,
            max_size: 6,
            max_motifs: 3,
            max_order: 3,
            max_clusters: 3,
        }
    }
}

/// A random model: random types, motifs, tensors, seeds, weights and
/// hyperparameters (θ ∈ [0.1, 2], ρ ∈ [0, 100], λ ∈ [1e-4, 1]).
pub fn random_state<R: Rng>(rng: &mut R, shape: &StateShape) -> ModelState {
    let n_types = rng.random_range(1..=shape.max_types);
    let sizes: Vec<usize> = (0..n_types).map(|_| rng.random_range(2..=shape.max_size)).collect();
    let n_motifs = rng.random_range(1..=shape.max_motifs);
    let mut terms = Vec::new();
    for m in 0..n_motifs {
        let order = rng.random_range(1..=shape.max_order);
        let types: Vec<u32> = (0..order).map(|_| rng.random_range(0..n_types as u32)).collect();
        let dims: Vec<usize> = types.iter().map(|&t| sizes[t as usize]).collect();
        let binary = rng.random_bool(0.5);
        let density = rng.random_range(0.2..0.8);
        terms.push(MotifTerm {
            motif: motif(&format!("m{m}"), &types),
            tensor: random_tensor(rng, &dims, density, binary),
        });
    }
    let clusters = rng.random_range(2..=shape.max_clusters);
    let mut seeds = Vec::new();
    for (t, &n) in sizes.iter().enumerate() {
        for j in 0..n {
            if rng.random_bool(0.3) {
                seeds.push(Seed {
                    node: NodeRef {
                        ty: NodeTypeId(t as u32),
                        index: j as u32,
                    },
                    label: rng.random_range(0..clusters),
                });
            }
        }
    }
    let hyper = Hyperparameters {
        clusters,
        theta: rng.random_range(0.1..2.0),
        rho: rng.random_range(0.0..100.0),
        lambda: rng.random_range(1e-4..1.0),
        init_seed: rng.random(),
        ..Hyperparameters::default()
    };
    let names = (0..n_types).map(|t| format!("T{t}")).collect();
    let mut state = ModelState::new(names, sizes, terms, &seeds, hyper).unwrap();
    let raw: Vec<f64> = (0..n_motifs).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = raw.iter().sum();
    state
        .set_weights(MotifWeights::new(raw.iter().map(|x| x / s).collect()).unwrap())
        .unwrap();
    state
}

pub fn pick<'a, R: Rng, T>(rng: &mut R, xs: &'a [T]) -> &'a T {
    xs.choose(rng).unwrap()
}
