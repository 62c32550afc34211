//! Learning sparse pairwise Markov random fields over bounded continuous variables.
//!
//! Edges are recovered per node by minimising the generalized interaction
//! screening objective with entropic descent; node parameters are recovered by a
//! binned robust Lasso for conditional means followed by a projected-gradient
//! inversion of the mean map. The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod diagnostics;
pub mod error;
pub mod grise;
pub mod lasso;
pub mod linalg;
pub mod math;
pub mod model;
pub mod mrw;
pub mod node_recovery;
pub mod quadrature;
pub mod sampler;
pub mod structure;

pub use error::{Error, Result};
pub use grise::{entropic_descent, fit_all_nodes, project_to_feasible, GriseConfig, GriseSolution, Projection};
pub use model::{Basis, BasisFamily, BasisKind, Domain, EdgeBlock, FeatureSpace, Interval, ModelSpec, VertexParameter};
pub use sampler::{gibbs_sample, SampleMatrix, SamplerConfig};
pub use structure::{recover_edges, score_recovery, EdgeSet};
