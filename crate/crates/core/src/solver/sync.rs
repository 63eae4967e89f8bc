//! Spectral relaxation for O(d) synchronization and its Gram–Schmidt fast
//! path for potentials already known to be synchronizable.

use std::borrow::Cow;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::hodge::{connection_eigenpairs, default_zero_tol};
use crate::potentials::{
    eta_frustration, nu_graph, polar_factor, Cochain0, EdgePotential, Mat, VertexPotential, RANK_TOL,
};

#[derive(Debug, Clone)]
pub struct SyncResult {
    pub f: VertexPotential,
    /// η of the raw eigenvector cochain, before projection onto O(d).
    pub eta: f64,
    /// ν of the projected vertex potential.
    pub nu: f64,
    /// Smallest d+1 eigenvalues of D₁⁻¹L₁.
    pub eigenvalues: Vec<f64>,
    /// Vertices whose eigenvector block was rank deficient; their block is the identity.
    pub rank_deficient_blocks: Vec<usize>,
}

fn effective_graph<'a>(g: &'a WeightedGraph, weights: Option<&[f64]>) -> Result<Cow<'a, WeightedGraph>> {
    let g = match weights {
        Some(w) => Cow::Owned(g.with_weights(w)?),
        None => Cow::Borrowed(g),
    };
    if !g.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    Ok(g)
}

/// Synchronize `rho` from the d lowest eigenvectors of the graph connection
/// Laplacian, rounding each vertex block to its polar factor. `weights`,
/// when given, replaces the edge weights of `g`.
pub fn spectral_sync(g: &WeightedGraph, rho: &EdgePotential, weights: Option<&[f64]>) -> Result<SyncResult> {
    let g = effective_graph(g, weights)?;
    let d = rho.d();
    let pairs = connection_eigenpairs(&g, rho, d + 1)?;
    let x = pairs.vectors.columns(0, d).into_owned();

    let mut blocks = Vec::with_capacity(g.n());
    let mut rank_deficient_blocks = Vec::new();
    for i in 0..g.n() {
        let (q, ratio) = polar_factor(&x.rows(i * d, d).into_owned());
        if ratio < RANK_TOL {
            rank_deficient_blocks.push(i);
            blocks.push(Mat::identity(d, d));
        } else {
            blocks.push(q);
        }
    }
    let f = VertexPotential::from_blocks(d, &blocks)?;
    let raw = Cochain0::new(d, x)?;
    Ok(SyncResult {
        eta: eta_frustration(&g, &raw, rho)?,
        nu: nu_graph(&g, &f, rho)?,
        f,
        eigenvalues: pairs.values,
        rank_deficient_blocks,
    })
}

/// One-pass Gram–Schmidt on the stacked kernel basis, columns scaled to
/// norm √n so that every vertex block is itself orthogonal.
pub fn gram_schmidt_sync(g: &WeightedGraph, rho: &EdgePotential) -> Result<SyncResult> {
    let g = effective_graph(g, None)?;
    let d = rho.d();
    let pairs = connection_eigenpairs(&g, rho, d + 1)?;
    let tol = default_zero_tol(&g, rho)?;
    let kernel = pairs.values.iter().filter(|&&x| x < tol).count();
    if kernel != d {
        return Err(Error::NotSynchronizable { kernel_dim: kernel, expected: d });
    }
    let mut x = pairs.vectors.columns(0, d).into_owned();
    let scale = (g.n() as f64).sqrt();
    for c in 0..d {
        for p in 0..c {
            let proj = x.column(p).dot(&x.column(c));
            let prev = x.column(p).into_owned();
            x.column_mut(c).axpy(-proj, &prev, 1.0);
        }
        let nrm = x.column(c).norm();
        x.column_mut(c).scale_mut(1.0 / nrm);
    }
    let raw = Cochain0::new(d, x.clone())?;
    let f = VertexPotential::from_stacked(d, x * scale)?;
    Ok(SyncResult {
        eta: eta_frustration(&g, &raw, rho)?,
        nu: nu_graph(&g, &f, rho)?,
        f,
        eigenvalues: pairs.values,
        rank_deficient_blocks: Vec::new(),
    })
}
