use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Hyperparameters, MotifWeights, Seed, SeedMask};
use crate::error::{Error, Result};
use crate::hin::{Hin, NodeTypeId};
use crate::motif::Motif;
use crate::tensor::{FactorMatrix, SparseTensor};

/// A motif together with its transcribed tensor.
#[derive(Clone, Debug)]
pub struct MotifTerm {
    pub motif: Motif,
    pub tensor: SparseTensor,
}

/// Everything the optimizer touches: per-position factors, motif weights,
/// seed masks and settings.
#[derive(Clone, Debug)]
pub struct ModelState {
    pub(crate) type_names: Vec<String>,
    pub(crate) type_sizes: Vec<usize>,
    pub(crate) terms: Vec<MotifTerm>,
    pub(crate) factors: Vec<Vec<FactorMatrix>>,
    pub(crate) weights: MotifWeights,
    pub(crate) mask: SeedMask,
    pub(crate) hyper: Hyperparameters,
    /// `(motif, position)` pairs bound to each node type.
    pub(crate) contributors: Vec<Vec<(usize, usize)>>,
}

/// Builds a model for `hin`, initializing factors uniformly on `[0.1, 1.1)`.
pub fn init_model(
    hin: &Hin,
    terms: Vec<MotifTerm>,
    seeds: &[Seed],
    hyper: Hyperparameters,
) -> Result<ModelState> {
    let names = hin
        .node_type_ids()
        .map(|t| hin.node_type_name(t).to_owned())
        .collect();
    ModelState::new(names, hin.type_sizes(), terms, seeds, hyper)
}

impl ModelState {
    /// Same as [`init_model`] but from bare type names and sizes.
    pub fn new(
        type_names: Vec<String>,
        type_sizes: Vec<usize>,
        terms: Vec<MotifTerm>,
        seeds: &[Seed],
        hyper: Hyperparameters,
    ) -> Result<Self> {
        hyper.validate()?;
        if type_names.len() != type_sizes.len() {
            return Err(Error::Shape("type names and sizes differ in length".into()));
        }
        if terms.is_empty() {
            return Err(Error::Shape("at least one motif is required".into()));
        }
        let mut contributors = vec![Vec::new(); type_sizes.len()];
        for (m, term) in terms.iter().enumerate() {
            let dims: Vec<usize> = term
                .motif
                .node_types
                .iter()
                .map(|t| type_sizes.get(t.index()).copied().ok_or(Error::UnknownTypeId(t.index())))
                .collect::<Result<_>>()?;
            if dims != term.tensor.dims() {
                return Err(Error::Shape(format!(
                    "tensor of motif `{}` has dims {:?}, motif types need {:?}",
                    term.motif.name,
                    term.tensor.dims(),
                    dims
                )));
            }
            if term.tensor.values().iter().any(|&v| v < 0.0) {
                return Err(Error::Shape(format!(
                    "tensor of motif `{}` has negative entries",
                    term.motif.name
                )));
            }
            for (i, t) in term.motif.node_types.iter().enumerate() {
                contributors[t.index()].push((m, i));
            }
        }

        let c = hyper.clusters;
        let mut rng = ChaCha8Rng::seed_from_u64(hyper.init_seed);
        let mut factors: Vec<Vec<FactorMatrix>> = terms
            .iter()
            .map(|term| {
                term.motif
                    .node_types
                    .iter()
                    .map(|t| {
                        let a = Array2::from_shape_fn((c, type_sizes[t.index()]), |_| {
                            rng.random_range(0.1..1.1)
                        });
                        FactorMatrix::new(a).expect("positive init")
                    })
                    .collect()
            })
            .collect();

        let mask = SeedMask::new(c, &type_sizes, seeds)?;
        if hyper.seed_boost != 1.0 {
            for s in mask.seeds() {
                for &(m, i) in &contributors[s.node.ty.index()] {
                    factors[m][i].as_array_mut()[[s.label, s.node.index as usize]] *= hyper.seed_boost;
                }
            }
        }

        Ok(ModelState {
            type_names,
            type_sizes,
            weights: MotifWeights::uniform(terms.len()),
            terms,
            factors,
            mask,
            hyper,
            contributors,
        })
    }

    pub fn hyper(&self) -> &Hyperparameters {
        &self.hyper
    }

    pub fn terms(&self) -> &[MotifTerm] {
        &self.terms
    }

    pub fn num_motifs(&self) -> usize {
        self.terms.len()
    }

    pub fn type_names(&self) -> &[String] {
        &self.type_names
    }

    pub fn type_sizes(&self) -> &[usize] {
        &self.type_sizes
    }

    pub fn factors(&self, m: usize) -> &[FactorMatrix] {
        &self.factors[m]
    }

    pub fn factor(&self, m: usize, i: usize) -> &FactorMatrix {
        &self.factors[m][i]
    }

    /// Replaces one factor; the shape must match and entries must be non-negative.
    pub fn set_factor(&mut self, m: usize, i: usize, f: FactorMatrix) -> Result<()> {
        let cur = &self.factors[m][i];
        if (f.clusters(), f.nodes()) != (cur.clusters(), cur.nodes()) {
            return Err(Error::Shape(format!(
                "factor ({m}, {i}) must be {}x{}",
                cur.clusters(),
                cur.nodes()
            )));
        }
        self.factors[m][i] = f;
        Ok(())
    }

    pub fn weights(&self) -> &MotifWeights {
        &self.weights
    }

    pub fn set_weights(&mut self, w: MotifWeights) -> Result<()> {
        if w.len() != self.terms.len() {
            return Err(Error::Shape("one weight per motif is required".into()));
        }
        self.weights = w;
        Ok(())
    }

    pub fn mask(&self) -> &SeedMask {
        &self.mask
    }

    pub fn hyper_mut(&mut self) -> &mut Hyperparameters {
        &mut self.hyper
    }

    /// `η^m_i = μ_m / #{i' : φ(m,i') = φ(m,i)}`.
    pub fn eta(&self, m: usize, i: usize) -> f64 {
        self.weights.as_slice()[m] / self.terms[m].motif.same_type_count(i) as f64
    }

    pub(crate) fn node_type(&self, m: usize, i: usize) -> usize {
        self.terms[m].motif.node_types[i].index()
    }

    pub fn contributors(&self, t: NodeTypeId) -> &[(usize, usize)] {
        &self.contributors[t.index()]
    }

    /// Types bound by no motif position; their nodes cannot be clustered.
    pub fn unclusterable_types(&self) -> Vec<NodeTypeId> {
        (0..self.type_sizes.len())
            .filter(|&t| self.contributors[t].is_empty())
            .map(|t| NodeTypeId(t as u32))
            .collect()
    }

    /// Weighted sum `Σ_{φ(m,i)=t} η^m_i V^m_i`; all-zero for unbound types.
    pub(crate) fn consensus_raw(&self, t: usize) -> Array2<f64> {
        let mut acc = Array2::zeros((self.hyper.clusters, self.type_sizes[t]));
        for &(m, i) in &self.contributors[t] {
            acc.scaled_add(self.eta(m, i), self.factors[m][i].as_array());
        }
        acc
    }

    /// Consensus membership matrix `V^(t)`.
    pub fn consensus(&self, t: NodeTypeId) -> Result<Array2<f64>> {
        if t.index() >= self.type_sizes.len() {
            return Err(Error::UnknownTypeId(t.index()));
        }
        if self.contributors[t.index()].is_empty() {
            return Err(Error::Unclusterable(self.type_names[t.index()].clone()));
        }
        Ok(self.consensus_raw(t.index()))
    }
}
