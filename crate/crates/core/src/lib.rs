//! Seed-guided clustering of typed heterogeneous graphs through joint
//! non-negative factorization of motif instance tensors.
//!
//! The crate is organized bottom-up:
//!
//! * [`hin`]: typed graphs, loading and adjacency queries;
//! * [`motif`]: pattern specs, instance enumeration and tensor transcription;
//! * [`tensor`]: sparse tensors and the kernels the optimizer needs;
//! * [`model`]: the factorization, its objective and the fitting loop;
//! * [`metrics`]: accuracy, F1 and NMI;
//! * [`planted`]: synthetic graphs with known clusters.

pub mod error;
pub mod hin;
pub mod metrics;
pub mod model;
pub mod motif;
pub mod pipeline;
pub mod planted;
pub mod tensor;

pub use error::{Error, Result};
pub use hin::{load_hin, read_hin, Hin, HinBuilder, NodeRef, NodeTypeId, EdgeTypeId};
pub use metrics::{evaluate, LabeledPartition, MetricsReport};
pub use model::{fit, init_model, Hyperparameters, ModelState, MotifTerm, Seed};
pub use motif::{enumerate_instances, transcribe, Motif, MotifInstanceSet, MotifSpec};
pub use pipeline::{build_terms, cluster, Clustering};
pub use tensor::{FactorMatrix, SparseTensor};
