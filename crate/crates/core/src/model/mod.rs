//! The seed-guided joint tensor factorization.
//!
//! Every motif `m` owns one non-negative `C × |V_t|` factor per pattern
//! position. Factors of the same node type are tied to a per-type consensus
//! matrix weighted by the motif weights `μ`, and seed masks push the
//! consensus of labeled nodes away from forbidden clusters. The optimizer
//! alternates multiplicative factor updates with projected gradient steps
//! on `μ`.

mod fit;
mod hyper;
mod objective;
mod seeds;
mod simplex;
mod state;
mod update;
mod weights;

pub use fit::{assign_all, assign_clusters, fit, Assignment, FitReport, IterRecord};
pub use hyper::Hyperparameters;
pub use objective::{objective, ObjectiveTerms};
pub use seeds::{read_seeds, Seed, SeedMask};
pub use simplex::{project_simplex, MotifWeights};
pub use state::{init_model, ModelState, MotifTerm};
pub use update::{neg_part, pos_part, update_factor};
pub use weights::{grad_mu, pgd_update_mu};
