//! Synchronization over the orthogonal group O(d) on weighted graphs.
//!
//! Edge potentials assign an orthogonal matrix to every edge; a vertex
//! potential synchronizes them when `f_i = ρ_ij f_j` along every edge. The
//! crate decides synchronizability through holonomy, builds the twisted
//! Hodge operators and the graph connection Laplacian, solves the relaxed
//! synchronization problem spectrally, and partitions graphs into nearly
//! synchronizable pieces with SynCut.

pub mod cli;
pub mod error;
pub mod graph;
pub mod hodge;
pub mod holonomy;
pub mod io;
pub mod netgen;
pub mod numeric;
pub mod potentials;
pub mod solver;
pub mod sparse;
pub mod syncut;

pub use error::{Error, Result};
pub use graph::WeightedGraph;
pub use potentials::{EdgePotential, Mat, VertexPotential};
