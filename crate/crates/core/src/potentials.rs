//! Edge and vertex potentials over O(d), the gauge action, and frustration
//! functionals.
//!
//! Edge potentials are stored once per canonical edge `u → v`; the value on
//! the reversed edge is the transpose. Vertex potentials and vector-valued
//! cochains are both stored as a vertically stacked `nd × k` matrix, so the
//! block of vertex `i` is rows `i·d .. (i+1)·d`.

use nalgebra::{DMatrix, DMatrixView};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::numeric::{compensated_sum, orthogonality_defect};

pub type Mat = DMatrix<f64>;

pub const DEFAULT_ORTH_TOL: f64 = 1e-9;

/// Relative singular value threshold below which a matrix counts as rank deficient.
pub const RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct EdgePotential {
    d: usize,
    blocks: Vec<Mat>,
}

impl EdgePotential {
    pub fn new(d: usize, blocks: Vec<Mat>) -> Result<Self> {
        if let Some((e, b)) = blocks.iter().enumerate().find(|(_, b)| b.shape() != (d, d)) {
            return Err(Error::dims(format!(
                "edge {e} block is {}x{}, expected {d}x{d}",
                b.nrows(),
                b.ncols()
            )));
        }
        Ok(Self { d, blocks })
    }

    pub fn identity(g: &WeightedGraph, d: usize) -> Self {
        Self { d, blocks: vec![Mat::identity(d, d); g.m()] }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// ρ_uv on the canonical orientation of edge `e`.
    pub fn block(&self, e: usize) -> &Mat {
        &self.blocks[e]
    }

    pub fn blocks(&self) -> &[Mat] {
        &self.blocks
    }

    pub fn set_block(&mut self, e: usize, value: Mat) {
        assert_eq!(value.shape(), (self.d, self.d));
        self.blocks[e] = value;
    }

    /// ρ_ij for an edge traversed from `i` to `j`.
    pub fn get(&self, g: &WeightedGraph, i: usize, j: usize) -> Result<Mat> {
        let e = g.edge_index(i, j).ok_or(Error::NoSuchEdge { u: i, v: j })?;
        Ok(self.oriented(e, g.edge(e).u == i))
    }

    pub fn oriented(&self, e: usize, forward: bool) -> Mat {
        if forward {
            self.blocks[e].clone()
        } else {
            self.blocks[e].transpose()
        }
    }

    /// ρ·x on edge `e`, using ρᵀ when traversed backwards.
    pub(crate) fn apply(&self, e: usize, forward: bool, x: &DMatrixView<'_, f64>) -> Mat {
        if forward {
            &self.blocks[e] * x
        } else {
            self.blocks[e].tr_mul(x)
        }
    }

    pub(crate) fn check_graph(&self, g: &WeightedGraph) -> Result<()> {
        if self.blocks.len() != g.m() {
            return Err(Error::dims(format!(
                "edge potential has {} blocks, graph has {} edges",
                self.blocks.len(),
                g.m()
            )));
        }
        Ok(())
    }
}

/// Anything assigning a stacked `d × k` block to every vertex.
pub trait VertexField {
    fn fibre_dim(&self) -> usize;

    fn stacked(&self) -> &Mat;

    fn n_vertices(&self) -> usize {
        if self.fibre_dim() == 0 {
            0
        } else {
            self.stacked().nrows() / self.fibre_dim()
        }
    }

    fn block(&self, i: usize) -> DMatrixView<'_, f64> {
        let d = self.fibre_dim();
        self.stacked().rows(i * d, d)
    }
}

/// One orthogonal `d × d` matrix per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexPotential {
    d: usize,
    stacked: Mat,
}

impl VertexPotential {
    pub fn identity(n: usize, d: usize) -> Self {
        let mut stacked = Mat::zeros(n * d, d);
        for i in 0..n {
            stacked.view_mut((i * d, 0), (d, d)).fill_with_identity();
        }
        Self { d, stacked }
    }

    pub fn from_blocks(d: usize, blocks: &[Mat]) -> Result<Self> {
        let mut stacked = Mat::zeros(blocks.len() * d, d);
        for (i, b) in blocks.iter().enumerate() {
            if b.shape() != (d, d) {
                return Err(Error::dims(format!("vertex {i} block is not {d}x{d}")));
            }
            stacked.view_mut((i * d, 0), (d, d)).copy_from(b);
        }
        Ok(Self { d, stacked })
    }

    /// Wrap an `nd × d` stacked matrix without checking orthogonality.
    pub fn from_stacked(d: usize, stacked: Mat) -> Result<Self> {
        if d == 0 || stacked.ncols() != d || !stacked.nrows().is_multiple_of(d) {
            return Err(Error::dims(format!(
                "stacked matrix {}x{} is not n·{d} x {d}",
                stacked.nrows(),
                stacked.ncols()
            )));
        }
        Ok(Self { d, stacked })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.n_vertices()
    }

    pub fn is_empty(&self) -> bool {
        self.stacked.nrows() == 0
    }

    pub fn get(&self, i: usize) -> Mat {
        self.block(i).into_owned()
    }

    pub fn set(&mut self, i: usize, value: &Mat) {
        let d = self.d;
        self.stacked.view_mut((i * d, 0), (d, d)).copy_from(value);
    }

    pub fn blocks(&self) -> Vec<Mat> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }

    /// Pointwise product `(self·other)_i = self_i other_i`.
    pub fn compose(&self, other: &VertexPotential) -> Result<VertexPotential> {
        self.same_shape(other)?;
        let blocks: Vec<Mat> = (0..self.len()).map(|i| self.block(i) * other.block(i)).collect();
        VertexPotential::from_blocks(self.d, &blocks)
    }

    /// Pointwise inverse (transpose).
    pub fn inverse(&self) -> VertexPotential {
        let blocks: Vec<Mat> = (0..self.len()).map(|i| self.block(i).transpose()).collect();
        VertexPotential::from_blocks(self.d, &blocks).expect("shape preserved")
    }

    /// Right-multiply every block by `h`.
    pub fn right_mul(&self, h: &Mat) -> VertexPotential {
        Self { d: self.d, stacked: &self.stacked * h }
    }

    /// Vertices whose block deviates from orthogonality beyond `tol`.
    pub fn non_orthogonal_blocks(&self, tol: f64) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| orthogonality_defect(&self.get(i)) > tol)
            .collect()
    }

    pub fn into_cochain(self) -> Cochain0 {
        Cochain0 { d: self.d, data: self.stacked }
    }

    fn same_shape(&self, other: &VertexPotential) -> Result<()> {
        if self.d != other.d || self.stacked.nrows() != other.stacked.nrows() {
            return Err(Error::dims("vertex potentials differ in shape"));
        }
        Ok(())
    }
}

impl VertexField for VertexPotential {
    fn fibre_dim(&self) -> usize {
        self.d
    }

    fn stacked(&self) -> &Mat {
        &self.stacked
    }
}

/// Vector-valued vertex cochain, optionally with several stacked columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Cochain0 {
    d: usize,
    data: Mat,
}

impl Cochain0 {
    pub fn new(d: usize, data: Mat) -> Result<Self> {
        if d == 0 || !data.nrows().is_multiple_of(d) {
            return Err(Error::dims(format!("{} rows is not a multiple of d={d}", data.nrows())));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Validation("cochain has non-finite entries".into()));
        }
        Ok(Self { d, data })
    }

    pub fn zeros(n: usize, d: usize, columns: usize) -> Self {
        Self { d, data: Mat::zeros(n * d, columns) }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn columns(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> &Mat {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut Mat {
        &mut self.data
    }

    pub fn into_data(self) -> Mat {
        self.data
    }
}

impl VertexField for Cochain0 {
    fn fibre_dim(&self) -> usize {
        self.d
    }

    fn stacked(&self) -> &Mat {
        &self.data
    }
}

pub(crate) fn check_field<F: VertexField + ?Sized>(
    g: &WeightedGraph,
    f: &F,
    rho: &EdgePotential,
) -> Result<()> {
    rho.check_graph(g)?;
    if f.fibre_dim() != rho.d() {
        return Err(Error::dims(format!(
            "field has fibre dimension {}, potential has {}",
            f.fibre_dim(),
            rho.d()
        )));
    }
    if f.stacked().nrows() != g.n() * rho.d() {
        return Err(Error::dims(format!(
            "field has {} rows, expected {}",
            f.stacked().nrows(),
            g.n() * rho.d()
        )));
    }
    Ok(())
}

/// Edges whose block violates orthogonality beyond `orth_tol`.
pub fn validate_edge_potential(
    g: &WeightedGraph,
    rho: &EdgePotential,
    orth_tol: f64,
) -> Result<Vec<usize>> {
    rho.check_graph(g)?;
    Ok((0..rho.len())
        .filter(|&e| orthogonality_defect(rho.block(e)) > orth_tol)
        .collect())
}

/// Right action `[f(ρ)]_ij = f_iᵀ ρ_ij f_j`.
pub fn gauge_act(g: &WeightedGraph, f: &VertexPotential, rho: &EdgePotential) -> Result<EdgePotential> {
    check_field(g, f, rho)?;
    let blocks = g
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| f.block(edge.u).tr_mul(&(rho.block(e) * f.block(edge.v))))
        .collect();
    EdgePotential::new(rho.d(), blocks)
}

/// The potential `ρ_ij = g_i g_jᵀ`, synchronizable by construction.
pub fn potential_from_vertex(g: &WeightedGraph, gv: &VertexPotential) -> Result<EdgePotential> {
    if gv.len() != g.n() {
        return Err(Error::dims(format!("{} vertex blocks for {} vertices", gv.len(), g.n())));
    }
    let blocks = g
        .edges()
        .iter()
        .map(|edge| gv.block(edge.u) * gv.block(edge.v).transpose())
        .collect();
    EdgePotential::new(gv.d(), blocks)
}

/// ‖f_i − ρ_ij f_j‖² for the edge traversed from `i` to `j`.
pub fn edge_frustration<F: VertexField + ?Sized>(
    g: &WeightedGraph,
    f: &F,
    rho: &EdgePotential,
    i: usize,
    j: usize,
) -> Result<f64> {
    check_field(g, f, rho)?;
    let e = g.edge_index(i, j).ok_or(Error::NoSuchEdge { u: i, v: j })?;
    let forward = g.edge(e).u == i;
    Ok(residual_sq(f, rho, e, forward, i, j))
}

fn residual_sq<F: VertexField + ?Sized>(
    f: &F,
    rho: &EdgePotential,
    e: usize,
    forward: bool,
    i: usize,
    j: usize,
) -> f64 {
    let moved = rho.apply(e, forward, &f.block(j));
    f.block(i)
        .iter()
        .zip(moved.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum()
}

/// Frustration on every canonical edge, in edge order.
pub fn edge_frustrations<F: VertexField + ?Sized>(
    g: &WeightedGraph,
    f: &F,
    rho: &EdgePotential,
) -> Result<Vec<f64>> {
    check_field(g, f, rho)?;
    Ok(g.edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| residual_sq(f, rho, e, true, edge.u, edge.v))
        .collect())
}

/// Σ over canonical edges of w_ij‖f_i − ρ_ij f_j‖².
pub fn total_frustration<F: VertexField + ?Sized>(
    g: &WeightedGraph,
    f: &F,
    rho: &EdgePotential,
) -> Result<f64> {
    let fr = edge_frustrations(g, f, rho)?;
    Ok(compensated_sum(g.edges().iter().zip(&fr).map(|(e, x)| e.weight * x)))
}

/// η(f) = ½ Σ_i Σ_j w_ij‖f_i − ρ_ij f_j‖² / Σ_i d_i‖f_i‖².
pub fn eta_frustration<F: VertexField + ?Sized>(
    g: &WeightedGraph,
    f: &F,
    rho: &EdgePotential,
) -> Result<f64> {
    let numerator = total_frustration(g, f, rho)?;
    let denominator = compensated_sum(
        (0..g.n()).map(|i| g.degree(i) * f.block(i).norm_squared()),
    );
    if denominator == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(numerator / denominator)
}

/// ν(g) = (1/2d)(1/vol Γ) Σ_i Σ_j w_ij‖g_i − ρ_ij g_j‖²_F.
pub fn nu_graph(g: &WeightedGraph, f: &VertexPotential, rho: &EdgePotential) -> Result<f64> {
    let ordered = 2.0 * total_frustration(g, f, rho)?;
    let vol = compensated_sum(g.degrees().iter().copied());
    if vol == 0.0 {
        return Ok(0.0);
    }
    Ok(ordered / (2.0 * rho.d() as f64 * vol))
}

/// Σ over ordered pairs `j, k ∈ subset` of w_jk‖f_j − ρ_jk f_k‖²_F, evaluated at `f`.
pub fn nu_subgraph<F: VertexField + ?Sized>(
    g: &WeightedGraph,
    subset: &[usize],
    f: &F,
    rho: &EdgePotential,
) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    check_field(g, f, rho)?;
    let mut inside = vec![false; g.n()];
    for &v in subset {
        if v >= g.n() {
            return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
        }
        inside[v] = true;
    }
    let total = compensated_sum(
        g.edges()
            .iter()
            .enumerate()
            .filter(|(_, edge)| inside[edge.u] && inside[edge.v])
            .map(|(e, edge)| edge.weight * residual_sq(f, rho, e, true, edge.u, edge.v)),
    );
    Ok(2.0 * total)
}

/// Nearest orthogonal matrix `UVᵀ` from the singular value decomposition.
pub fn project_to_orthogonal(m: &Mat) -> Result<Mat> {
    let (q, ratio) = polar_factor(m);
    if ratio < RANK_TOL {
        return Err(Error::RankDeficient { ratio });
    }
    Ok(q)
}

/// `UVᵀ` together with σ_min/σ_max, without the rank check.
pub(crate) fn polar_factor(m: &Mat) -> (Mat, f64) {
    assert!(m.is_square(), "polar factor of a non-square matrix");
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested Vᵀ");
    (u * v_t, ratio)
}
