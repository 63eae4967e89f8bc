//! Numerical backends: eigensolvers, spectral synchronization, k-means and
//! normalized-cut spectral clustering.

pub mod cluster;
pub mod eigen;
pub mod kmeans;
pub mod sync;

pub use cluster::{spectral_clustering, Partition};
pub use eigen::{smallest_eigenpairs, smallest_eigenpairs_with, EigenOptions, Eigenpairs, SymmetricOperator};
pub use kmeans::{kmeans, KMeans};
pub use sync::{gram_schmidt_sync, spectral_sync, SyncResult};
