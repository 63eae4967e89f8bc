//! Normalized-cut spectral clustering on a reweighted graph.

use crate::error::{Error, Result};
use crate::graph::{classes_from_labels, WeightedGraph};
use crate::hodge::connection_eigenpairs;
use crate::potentials::EdgePotential;

use super::kmeans::{kmeans, DEFAULT_RESTARTS};

/// A labelling of the vertices into `k` nonempty classes.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub k: usize,
    pub labels: Vec<usize>,
    /// Whether each class induces a connected subgraph of the original graph.
    pub connected_flags: Vec<bool>,
}

impl Partition {
    pub fn new(g: &WeightedGraph, labels: Vec<usize>, k: usize) -> Result<Self> {
        if labels.len() != g.n() {
            return Err(Error::LengthMismatch { left: labels.len(), right: g.n() });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::Validation(format!("label {bad} outside 0..{k}")));
        }
        let classes = classes_from_labels(&labels);
        if classes.len() < k || classes.iter().any(|c| c.is_empty()) {
            return Err(Error::Validation("partition has an empty class".into()));
        }
        let connected_flags = classes
            .iter()
            .map(|members| g.induced_subgraph(members).0.is_connected())
            .collect();
        Ok(Self { k, labels, connected_flags })
    }

    /// Members of each class, ascending.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        classes_from_labels(&self.labels)
    }
}

/// Embed vertices by the `k` lowest eigenvectors of the random-walk
/// Laplacian of `(g, weights)`, normalize rows, and run k-means.
/// Zero-weight edges are removed first.
pub fn spectral_clustering(g: &WeightedGraph, weights: &[f64], k: usize, seed: u64) -> Result<Partition> {
    if weights.len() != g.m() {
        return Err(Error::LengthMismatch { left: weights.len(), right: g.m() });
    }
    if k == 0 || k > g.n() {
        return Err(Error::TooFewPoints { points: g.n(), k });
    }
    if !weights.is_empty() && weights.iter().all(|&w| w < 1e-300) {
        return Err(Error::DegenerateWeights);
    }
    if k == 1 {
        return Partition::new(g, vec![0; g.n()], 1);
    }
    let (gw, _) = g.reweighted(weights)?;
    let pairs = connection_eigenpairs(&gw, &EdgePotential::identity(&gw, 1), k)?;
    let mut embedding = pairs.vectors;
    for mut row in embedding.row_iter_mut() {
        let nrm = row.norm();
        if nrm > 0.0 {
            row /= nrm;
        }
    }
    let clusters = kmeans(&embedding, k, seed, DEFAULT_RESTARTS)?;
    Partition::new(g, clusters.labels, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_cliques(size: usize, bridge: f64) -> WeightedGraph {
        let mut list = Vec::new();
        for offset in [0, size] {
            for u in 0..size {
                for v in u + 1..size {
                    list.push((offset + u, offset + v, 1.0));
                }
            }
        }
        list.push((size - 1, size, bridge));
        WeightedGraph::from_edges(&list).unwrap()
    }

    #[test]
    fn cuts_the_light_bridge() {
        let g = two_cliques(6, 0.05);
        let p = spectral_clustering(&g, &g.weights(), 2, 1).unwrap();
        let expect: Vec<usize> = (0..12).map(|i| usize::from(i >= 6)).collect();
        assert_eq!(p.labels, expect);
        assert_eq!(p.connected_flags, vec![true, true]);
    }

    #[test]
    fn single_class() {
        let g = two_cliques(4, 1.0);
        let p = spectral_clustering(&g, &g.weights(), 1, 0).unwrap();
        assert_eq!(p.labels, vec![0; 8]);
    }

    #[test]
    fn zero_weight_bridge_separates_components() {
        let g = two_cliques(5, 1.0);
        let mut w = g.weights();
        *w.last_mut().unwrap() = 0.0;
        let p = spectral_clustering(&g, &w, 2, 3).unwrap();
        let expect: Vec<usize> = (0..10).map(|i| usize::from(i >= 5)).collect();
        assert_eq!(p.labels, expect);
    }

    #[test]
    fn degenerate_weights() {
        let g = two_cliques(3, 1.0);
        let w = vec![1e-301; g.m()];
        assert!(matches!(spectral_clustering(&g, &w, 2, 0), Err(Error::DegenerateWeights)));
    }

    #[test]
    fn partition_flags_disconnected_class() {
        let g = WeightedGraph::from_edges(&[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let p = Partition::new(&g, vec![0, 1, 1, 0], 2).unwrap();
        assert_eq!(p.connected_flags, vec![false, true]);
        assert!(Partition::new(&g, vec![0, 0, 0, 0], 2).is_err());
    }
}
