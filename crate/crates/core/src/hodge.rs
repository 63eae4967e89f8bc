//! Twisted differential and codifferential, the degree-weighted inner
//! products, the two twisted Laplacians, the graph connection Laplacian
//! `L₁ = D₁ − W₁` and the spectral quantities derived from it.
//!
//! One-forms are stored once per canonical edge `i → j` as the coefficient
//! in the frame of the tail vertex `i`. The reverse orientation is `−ω_ij`
//! (skew-symmetry) and the same form read in the frame of `j` is
//! `ρ_ji ω_ij` (compatibility), so both laws hold by construction.

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::numeric::compensated_sum;
use crate::potentials::{check_field, Cochain0, EdgePotential, Mat, VertexField};
use crate::solver::eigen::{smallest_eigenpairs, Eigenpairs};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct TwistedOneForm {
    d: usize,
    data: Mat,
}

impl TwistedOneForm {
    pub fn new(d: usize, data: Mat) -> Result<Self> {
        if d == 0 || !data.nrows().is_multiple_of(d) {
            return Err(Error::dims(format!("{} rows is not a multiple of d={d}", data.nrows())));
        }
        Ok(Self { d, data })
    }

    pub fn zeros(m: usize, d: usize, columns: usize) -> Self {
        Self { d, data: Mat::zeros(m * d, columns) }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn data(&self) -> &Mat {
        &self.data
    }

    pub fn n_edges(&self) -> usize {
        self.data.nrows() / self.d
    }

    /// Tail-frame coefficient on canonical edge `e`.
    pub fn coefficient(&self, e: usize) -> Mat {
        self.data.rows(e * self.d, self.d).into_owned()
    }

    /// `p_i(ω_ij⁽ⁱ⁾)` for the edge traversed from `i` to `j`.
    pub fn in_frame_of(&self, g: &WeightedGraph, rho: &EdgePotential, i: usize, j: usize) -> Result<Mat> {
        let e = g.edge_index(i, j).ok_or(Error::NoSuchEdge { u: i, v: j })?;
        if g.edge(e).u == i {
            Ok(self.coefficient(e))
        } else {
            // ω_ij⁽ⁱ⁾ = −ω_ji⁽ⁱ⁾ = −ρ_ij ω_ji⁽ʲ⁾
            Ok(-(rho.block(e).transpose() * self.coefficient(e)))
        }
    }

    fn check(&self, g: &WeightedGraph, rho: &EdgePotential) -> Result<()> {
        rho.check_graph(g)?;
        if self.d != rho.d() || self.data.nrows() != g.m() * rho.d() {
            return Err(Error::dims(format!(
                "one-form has {} rows, expected {}",
                self.data.nrows(),
                g.m() * rho.d()
            )));
        }
        Ok(())
    }
}

/// `(d_ρ f)_ij = f_i − ρ_ij f_j` on every canonical edge.
pub fn apply_d(g: &WeightedGraph, f: &Cochain0, rho: &EdgePotential) -> Result<TwistedOneForm> {
    check_field(g, f, rho)?;
    let d = rho.d();
    let mut out = TwistedOneForm::zeros(g.m(), d, f.columns());
    for (e, edge) in g.edges().iter().enumerate() {
        let value = f.block(edge.u) - rho.block(e) * f.block(edge.v);
        out.data.rows_mut(e * d, d).copy_from(&value);
    }
    Ok(out)
}

/// `(δ_ρ θ)_i = (1/d_i) Σ_j w_ij p_i(θ_ij⁽ⁱ⁾)`.
pub fn apply_delta(g: &WeightedGraph, omega: &TwistedOneForm, rho: &EdgePotential) -> Result<Cochain0> {
    omega.check(g, rho)?;
    let d = rho.d();
    let k = omega.data.ncols();
    let mut out = Mat::zeros(g.n() * d, k);
    for (e, edge) in g.edges().iter().enumerate() {
        let coef = omega.data.rows(e * d, d);
        let w = edge.weight;
        let tail = coef * (w / g.degree(edge.u));
        let head = rho.block(e).tr_mul(&coef) * (-w / g.degree(edge.v));
        let mut at_u = out.rows_mut(edge.u * d, d);
        at_u += &tail;
        let mut at_v = out.rows_mut(edge.v * d, d);
        at_v += &head;
    }
    Cochain0::new(d, out)
}

/// `⟨f, h⟩ = Σ_i d_i ⟨f_i, h_i⟩_F`.
pub fn inner0<F: VertexField + ?Sized, H: VertexField + ?Sized>(g: &WeightedGraph, f: &F, h: &H) -> Result<f64> {
    if f.stacked().shape() != h.stacked().shape() || f.fibre_dim() != h.fibre_dim() {
        return Err(Error::dims("cochains differ in shape"));
    }
    if f.n_vertices() != g.n() {
        return Err(Error::dims(format!("{} vertex blocks for {} vertices", f.n_vertices(), g.n())));
    }
    Ok(compensated_sum((0..g.n()).map(|i| g.degree(i) * f.block(i).dot(&h.block(i)))))
}

/// Both expressions of the one-form inner product: the halved sum over
/// both orientations in each tail frame, and the single-orientation sum.
#[derive(Debug, Clone, Copy)]
pub struct InnerOneForms {
    pub both_orientations: f64,
    pub single_orientation: f64,
}

pub fn inner1_forms(
    g: &WeightedGraph,
    rho: &EdgePotential,
    omega: &TwistedOneForm,
    eta: &TwistedOneForm,
) -> Result<InnerOneForms> {
    omega.check(g, rho)?;
    eta.check(g, rho)?;
    let single = compensated_sum(
        g.edges()
            .iter()
            .enumerate()
            .map(|(e, edge)| edge.weight * omega.coefficient(e).dot(&eta.coefficient(e))),
    );
    let mut both = crate::numeric::CompensatedSum::new();
    for i in 0..g.n() {
        for inc in g.neighbors(i) {
            let a = omega.in_frame_of(g, rho, i, inc.neighbor)?;
            let b = eta.in_frame_of(g, rho, i, inc.neighbor)?;
            both.add(g.edge(inc.edge).weight * a.dot(&b));
        }
    }
    Ok(InnerOneForms { both_orientations: 0.5 * both.value(), single_orientation: single })
}

pub fn inner1(g: &WeightedGraph, rho: &EdgePotential, omega: &TwistedOneForm, eta: &TwistedOneForm) -> Result<f64> {
    omega.check(g, rho)?;
    eta.check(g, rho)?;
    Ok(compensated_sum(
        g.edges()
            .iter()
            .enumerate()
            .map(|(e, edge)| edge.weight * omega.coefficient(e).dot(&eta.coefficient(e))),
    ))
}

/// Δ⁽⁰⁾ = δ_ρ d_ρ.
pub fn laplacian0(g: &WeightedGraph, f: &Cochain0, rho: &EdgePotential) -> Result<Cochain0> {
    apply_delta(g, &apply_d(g, f, rho)?, rho)
}

/// Δ⁽¹⁾ = d_ρ δ_ρ.
pub fn laplacian1(g: &WeightedGraph, omega: &TwistedOneForm, rho: &EdgePotential) -> Result<TwistedOneForm> {
    apply_d(g, &apply_delta(g, omega, rho)?, rho)
}

#[derive(Debug, Clone)]
pub struct TwistedOperators {
    /// `nd × nd` graph connection Laplacian.
    pub l1: CsrMatrix,
    /// Diagonal of D₁.
    pub d1: Vec<f64>,
    /// `md × nd` matrix of the twisted differential.
    pub d_rho: CsrMatrix,
    /// `nd × md` matrix of the twisted codifferential.
    pub delta_rho: CsrMatrix,
}

pub fn build_operators(g: &WeightedGraph, rho: &EdgePotential) -> Result<TwistedOperators> {
    rho.check_graph(g)?;
    let d = rho.d();
    let (n, m) = (g.n(), g.m());
    let mut l1 = Vec::with_capacity(n * d + 2 * m * d * d);
    let mut d_rho = Vec::with_capacity(m * (d + d * d));
    let mut delta = Vec::with_capacity(m * (d + d * d));
    let mut d1 = vec![0.0; n * d];
    for i in 0..n {
        for a in 0..d {
            d1[i * d + a] = g.degree(i);
            l1.push((i * d + a, i * d + a, g.degree(i)));
        }
    }
    for (e, edge) in g.edges().iter().enumerate() {
        let (u, v, w) = (edge.u, edge.v, edge.weight);
        let r = rho.block(e);
        for a in 0..d {
            d_rho.push((e * d + a, u * d + a, 1.0));
            delta.push((u * d + a, e * d + a, w / g.degree(u)));
            for b in 0..d {
                l1.push((u * d + a, v * d + b, -w * r[(a, b)]));
                l1.push((v * d + b, u * d + a, -w * r[(a, b)]));
                d_rho.push((e * d + a, v * d + b, -r[(a, b)]));
                // −(w/d_v) ρ_vu = −(w/d_v) ρ_uvᵀ
                delta.push((v * d + b, e * d + a, -w / g.degree(v) * r[(a, b)]));
            }
        }
    }
    Ok(TwistedOperators {
        l1: CsrMatrix::from_triplets(n * d, n * d, l1),
        d1,
        d_rho: CsrMatrix::from_triplets(m * d, n * d, d_rho),
        delta_rho: CsrMatrix::from_triplets(n * d, m * d, delta),
    })
}

/// Per-row scaling `D₁^{−1/2}`; isolated vertices are left unscaled.
pub(crate) fn inv_sqrt_degrees(g: &WeightedGraph) -> Vec<f64> {
    g.degrees()
        .iter()
        .map(|&x| if x > 0.0 { 1.0 / x.sqrt() } else { 1.0 })
        .collect()
}

/// `D₁^{−1/2} L₁ D₁^{−1/2}`, which has the spectrum of `D₁⁻¹L₁`.
pub fn normalized_connection_laplacian(g: &WeightedGraph, rho: &EdgePotential) -> Result<CsrMatrix> {
    rho.check_graph(g)?;
    let d = rho.d();
    let s = inv_sqrt_degrees(g);
    let mut t = Vec::with_capacity(g.n() * d + 2 * g.m() * d * d);
    for i in 0..g.n() {
        let diag = if g.degree(i) > 0.0 { 1.0 } else { 0.0 };
        for a in 0..d {
            t.push((i * d + a, i * d + a, diag));
        }
    }
    for (e, edge) in g.edges().iter().enumerate() {
        let scale = -edge.weight * s[edge.u] * s[edge.v];
        let r = rho.block(e);
        for a in 0..d {
            for b in 0..d {
                t.push((edge.u * d + a, edge.v * d + b, scale * r[(a, b)]));
                t.push((edge.v * d + b, edge.u * d + a, scale * r[(a, b)]));
            }
        }
    }
    Ok(CsrMatrix::from_triplets(g.n() * d, g.n() * d, t))
}

/// Smallest `k` eigenvalues of `D₁⁻¹L₁` with eigenvectors mapped back by
/// `D₁^{−1/2}` (so they are D₁-orthonormal).
pub fn connection_eigenpairs(g: &WeightedGraph, rho: &EdgePotential, k: usize) -> Result<Eigenpairs> {
    let sym = normalized_connection_laplacian(g, rho)?;
    let mut pairs = smallest_eigenpairs(&sym, k.min(sym.nrows()))?;
    let d = rho.d();
    let s = inv_sqrt_degrees(g);
    for r in 0..pairs.vectors.nrows() {
        let scale = s[r / d];
        pairs.vectors.row_mut(r).scale_mut(scale);
    }
    Ok(pairs)
}

#[derive(Debug, Clone)]
pub struct KernelReport {
    /// Numerical dimension of ker d_ρ.
    pub dim: usize,
    /// Rank deficiency of [d_ρ] from a column-pivoted QR, when the matrix is small enough.
    pub qr_dim: Option<usize>,
    /// Number of eigenvalues of D₁⁻¹L₁ below `tol`.
    pub eigen_dim: usize,
    /// Smallest d+1 eigenvalues of D₁⁻¹L₁.
    pub eigenvalues: Vec<f64>,
    pub tol: f64,
}

const QR_ENTRY_LIMIT: usize = 4_000_000;

/// Rough largest eigenvalue of a symmetric operator by power iteration.
fn lambda_max_estimate(a: &CsrMatrix) -> f64 {
    let n = a.nrows();
    if n == 0 {
        return 0.0;
    }
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + (i % 7) as f64 * 0.1).collect();
    let mut y = vec![0.0; n];
    let mut lam = 0.0;
    for _ in 0..60 {
        let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= nrm);
        a.mul_slice(&x, &mut y);
        lam = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
        std::mem::swap(&mut x, &mut y);
    }
    lam
}

/// Default "zero eigenvalue" threshold: 1e−8 · λ_max(D₁⁻¹L₁).
pub fn default_zero_tol(g: &WeightedGraph, rho: &EdgePotential) -> Result<f64> {
    let sym = normalized_connection_laplacian(g, rho)?;
    Ok(1e-8 * lambda_max_estimate(&sym).max(f64::MIN_POSITIVE))
}

pub fn kernel_dim(g: &WeightedGraph, rho: &EdgePotential, tol: Option<f64>) -> Result<KernelReport> {
    let d = rho.d();
    let tol = match tol {
        Some(t) => t,
        None => default_zero_tol(g, rho)?,
    };
    let pairs = connection_eigenpairs(g, rho, d + 1)?;
    let eigen_dim = pairs.values.iter().filter(|&&x| x < tol).count();

    let ops = build_operators(g, rho)?;
    let (rows, cols) = (ops.d_rho.nrows(), ops.d_rho.ncols());
    let qr_dim = (rows * cols <= QR_ENTRY_LIMIT).then(|| {
        if rows == 0 {
            return cols;
        }
        let qr = ops.d_rho.to_dense().col_piv_qr();
        let r = qr.r();
        let diag: Vec<f64> = (0..r.nrows().min(r.ncols())).map(|i| r[(i, i)].abs()).collect();
        let lead = diag.first().copied().unwrap_or(0.0);
        let rank = diag.iter().filter(|&&x| x > 1e-8 * lead).count();
        cols - rank
    });
    Ok(KernelReport {
        dim: qr_dim.unwrap_or(eigen_dim),
        qr_dim,
        eigen_dim,
        eigenvalues: pairs.values,
        tol,
    })
}

#[derive(Debug, Clone)]
pub struct HodgeDecomposition {
    pub harmonic: Cochain0,
    pub coexact: Cochain0,
}

/// Split `f` into its inner0-orthogonal projection onto ker Δ⁽⁰⁾ and the remainder.
pub fn hodge_decompose(
    g: &WeightedGraph,
    f: &Cochain0,
    rho: &EdgePotential,
    tol: Option<f64>,
) -> Result<HodgeDecomposition> {
    check_field(g, f, rho)?;
    let d = rho.d();
    let tol = match tol {
        Some(t) => t,
        None => default_zero_tol(g, rho)?,
    };
    let pairs = connection_eigenpairs(g, rho, d + 1)?;
    let mut harmonic = Mat::zeros(f.data().nrows(), f.columns());
    for (c, &lam) in pairs.values.iter().enumerate() {
        if lam >= tol {
            continue;
        }
        let x = pairs.vectors.column(c);
        // D₁-weighted coefficient ⟨x, f⟩ for each column of f
        for k in 0..f.columns() {
            let coef: f64 = (0..x.len()).map(|r| g.degree(r / d) * x[r] * f.data()[(r, k)]).sum();
            for r in 0..x.len() {
                harmonic[(r, k)] += coef * x[r];
            }
        }
    }
    let coexact = f.data() - &harmonic;
    Ok(HodgeDecomposition { harmonic: Cochain0::new(d, harmonic)?, coexact: Cochain0::new(d, coexact)? })
}

/// Least-squares solution of Δ⁽¹⁾θ = d_ρ f, used to confirm that the
/// non-harmonic part of `f` lies in the image of δ_ρ.
#[derive(Debug, Clone)]
pub struct PoissonCheck {
    pub theta: TwistedOneForm,
    /// ‖Δ⁽¹⁾θ − d_ρ f‖ / max(1, ‖d_ρ f‖).
    pub residual: f64,
    /// δ_ρ θ, which should equal the coexact part of `f`.
    pub delta_theta: Cochain0,
}

pub fn poisson_check(g: &WeightedGraph, f: &Cochain0, rho: &EdgePotential) -> Result<PoissonCheck> {
    check_field(g, f, rho)?;
    let d = rho.d();
    let ops = build_operators(g, rho)?;
    let laplacian1 = ops.d_rho.to_dense() * ops.delta_rho.to_dense();
    let rhs = apply_d(g, f, rho)?;
    let svd = laplacian1.clone().svd(true, true);
    let cutoff = 1e-10 * svd.singular_values.max();
    let theta = svd
        .solve(rhs.data(), cutoff)
        .map_err(|msg| Error::Validation(msg.to_string()))?;
    let residual = (&laplacian1 * &theta - rhs.data()).norm() / rhs.data().norm().max(1.0);
    let theta = TwistedOneForm::new(d, theta)?;
    let delta_theta = apply_delta(g, &theta, rho)?;
    Ok(PoissonCheck { theta, residual, delta_theta })
}

/// (1/d) Σ_{k ≤ d} λ_k(D₁⁻¹L₁), a lower bound for ν of any vertex potential.
pub fn cheeger_lower_bound(g: &WeightedGraph, rho: &EdgePotential) -> Result<f64> {
    let d = rho.d();
    let pairs = connection_eigenpairs(g, rho, d)?;
    Ok(compensated_sum(pairs.values.iter().copied()) / d as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgen::random_orthogonal;
    use crate::potentials::{nu_graph, potential_from_vertex, total_frustration, VertexPotential};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn k3() -> WeightedGraph {
        WeightedGraph::from_edges(&[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    fn square() -> WeightedGraph {
        WeightedGraph::from_edges(&[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]).unwrap()
    }

    fn weighted_graph() -> WeightedGraph {
        WeightedGraph::from_edges(&[
            (0, 1, 1.0),
            (1, 2, 0.5),
            (2, 3, 2.0),
            (3, 4, 1.5),
            (4, 0, 1.0),
            (0, 2, 0.7),
            (1, 3, 1.2),
            (4, 5, 0.3),
        ])
        .unwrap()
    }

    fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Mat {
        Mat::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
    }

    fn random_ep(g: &WeightedGraph, d: usize, rng: &mut ChaCha8Rng) -> EdgePotential {
        EdgePotential::new(d, (0..g.m()).map(|_| random_orthogonal(d, rng)).collect()).unwrap()
    }

    fn random_vp(n: usize, d: usize, rng: &mut ChaCha8Rng) -> VertexPotential {
        let blocks: Vec<Mat> = (0..n).map(|_| random_orthogonal(d, rng)).collect();
        VertexPotential::from_blocks(d, &blocks).unwrap()
    }

    #[test]
    fn trivial_potential_gives_graph_laplacian() {
        let g = weighted_graph();
        let ops = build_operators(&g, &EdgePotential::identity(&g, 1)).unwrap();
        let l = ops.l1.to_dense();
        for i in 0..g.n() {
            for j in 0..g.n() {
                let expect = if i == j {
                    g.degree(i)
                } else {
                    -g.edge_index(i, j).map_or(0.0, |e| g.edge(e).weight)
                };
                assert_eq!(l[(i, j)], expect);
            }
        }
        let rw = ops.delta_rho.to_dense() * ops.d_rho.to_dense();
        for i in 0..g.n() {
            for j in 0..g.n() {
                assert!((rw[(i, j)] - l[(i, j)] / g.degree(i)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn k3_spectrum() {
        let g = k3();
        let ops = build_operators(&g, &EdgePotential::identity(&g, 1)).unwrap();
        let e = smallest_eigenpairs(&ops.l1, 3).unwrap();
        for (x, y) in e.values.iter().zip([0.0, 3.0, 3.0]) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn synchronization_solution_in_kernel() {
        let g = weighted_graph();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let gv = random_vp(g.n(), 3, &mut rng);
        let rho = potential_from_vertex(&g, &gv).unwrap();
        let ops = build_operators(&g, &rho).unwrap();
        assert!(ops.l1.mul_dense(gv.stacked()).norm() < 1e-10);
        let f = Cochain0::new(3, gv.stacked().clone()).unwrap();
        assert!(apply_d(&g, &f, &rho).unwrap().data().norm() < 1e-12);
        assert!(laplacian0(&g, &f, &rho).unwrap().data().norm() < 1e-12);
    }

    #[test]
    fn classical_difference_and_divergence() {
        let g = weighted_graph();
        let rho = EdgePotential::identity(&g, 1);
        let vals: Vec<f64> = (0..g.n()).map(|i| i as f64 * 1.5 - 2.0).collect();
        let f = Cochain0::new(1, Mat::from_column_slice(g.n(), 1, &vals)).unwrap();
        let df = apply_d(&g, &f, &rho).unwrap();
        for (e, edge) in g.edges().iter().enumerate() {
            assert_eq!(df.coefficient(e)[(0, 0)], vals[edge.u] - vals[edge.v]);
        }
        // (δω)_i = (1/d_i) Σ_j w_ij ω_ij with ω antisymmetric
        let omega_vals: Vec<f64> = (0..g.m()).map(|e| (e as f64).sin()).collect();
        let omega = TwistedOneForm::new(1, Mat::from_column_slice(g.m(), 1, &omega_vals)).unwrap();
        let div = apply_delta(&g, &omega, &rho).unwrap();
        for i in 0..g.n() {
            let mut s = 0.0;
            for inc in g.neighbors(i) {
                let w = g.edge(inc.edge).weight;
                let sign = if inc.outgoing { 1.0 } else { -1.0 };
                s += w * sign * omega_vals[inc.edge];
            }
            assert!((div.data()[(i, 0)] - s / g.degree(i)).abs() < 1e-15);
        }
        let zero = apply_delta(&g, &TwistedOneForm::zeros(g.m(), 1, 1), &rho).unwrap();
        assert_eq!(zero.data().norm(), 0.0);
    }

    #[test]
    fn nontrivial_single_edge() {
        let g = weighted_graph();
        let mut rho = EdgePotential::identity(&g, 2);
        let r = Mat::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        rho.set_block(3, r.clone());
        let c = [0.3, -1.1];
        let data = Mat::from_fn(g.n() * 2, 1, |r, _| c[r % 2]);
        let f = Cochain0::new(2, data).unwrap();
        let df = apply_d(&g, &f, &rho).unwrap();
        let cv = Mat::from_column_slice(2, 1, &c);
        for e in 0..g.m() {
            let expect = if e == 3 { &cv - &r * &cv } else { Mat::zeros(2, 1) };
            assert!((df.coefficient(e) - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn k3_random_walk_laplacian() {
        let g = k3();
        let rho = EdgePotential::identity(&g, 1);
        let f = Cochain0::new(1, Mat::from_column_slice(3, 1, &[1.0, 0.0, 0.0])).unwrap();
        let lf = laplacian0(&g, &f, &rho).unwrap();
        let expect = [1.0, -0.5, -0.5];
        for i in 0..3 {
            assert!((lf.data()[(i, 0)] - expect[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn inner_products() {
        let g = weighted_graph();
        let d = 2;
        let mut f = Cochain0::zeros(g.n(), d, 1);
        f.data_mut()[(3 * d, 0)] = 1.0;
        assert_eq!(inner0(&g, &f, &f).unwrap(), g.degree(3));
        let mut h = Cochain0::zeros(g.n(), d, 1);
        h.data_mut()[(1 * d + 1, 0)] = 2.0;
        assert_eq!(inner0(&g, &f, &h).unwrap(), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = random_ep(&g, d, &mut rng);
        let mut omega = TwistedOneForm::zeros(g.m(), d, 1);
        omega.data[(4 * d, 0)] = 1.0;
        assert!((inner1(&g, &rho, &omega, &omega).unwrap() - g.edge(4).weight).abs() < 1e-15);
        let forms = inner1_forms(&g, &rho, &omega, &omega).unwrap();
        assert!((forms.both_orientations - forms.single_orientation).abs() < 1e-15);

        let a = Cochain0::new(d, gaussian(g.n() * d, 1, &mut rng)).unwrap();
        let b = Cochain0::new(d, gaussian(g.n() * d, 1, &mut rng)).unwrap();
        let c = Cochain0::new(d, gaussian(g.n() * d, 1, &mut rng)).unwrap();
        assert!((inner0(&g, &a, &b).unwrap() - inner0(&g, &b, &a).unwrap()).abs() < 1e-12);
        let ab = Cochain0::new(d, a.data() * 2.0 + b.data()).unwrap();
        let lhs = inner0(&g, &ab, &c).unwrap();
        let rhs = 2.0 * inner0(&g, &a, &c).unwrap() + inner0(&g, &b, &c).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn adjointness_and_quadratic_form() {
        let g = weighted_graph();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 1..=4 {
            let rho = random_ep(&g, d, &mut rng);
            let f = Cochain0::new(d, gaussian(g.n() * d, 1, &mut rng)).unwrap();
            let theta = TwistedOneForm::new(d, gaussian(g.m() * d, 1, &mut rng)).unwrap();
            let lhs = inner1(&g, &rho, &apply_d(&g, &f, &rho).unwrap(), &theta).unwrap();
            let rhs = inner0(&g, &f, &apply_delta(&g, &theta, &rho).unwrap()).unwrap();
            assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs() + rhs.abs()));

            let q = inner0(&g, &f, &laplacian0(&g, &f, &rho).unwrap()).unwrap();
            let direct = total_frustration(&g, &f, &rho).unwrap();
            assert!((q - direct).abs() <= 1e-10 * direct.abs().max(1.0));

            let ops = build_operators(&g, &rho).unwrap();
            let l = ops.l1.to_dense();
            assert!((&l - l.transpose()).amax() < 1e-14);
            let prod = ops.delta_rho.to_dense() * ops.d_rho.to_dense();
            for r in 0..l.nrows() {
                for c in 0..l.ncols() {
                    let want = l[(r, c)] / ops.d1[r];
                    assert!((prod[(r, c)] - want).abs() <= 1e-12 * want.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn kernel_of_harmonic_one_forms() {
        let g = weighted_graph();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho = random_ep(&g, 2, &mut rng);
        // project a random one-form onto ker δ_ρ via the dense matrices
        let ops = build_operators(&g, &rho).unwrap();
        let delta = ops.delta_rho.to_dense();
        let svd = delta.clone().svd(false, true);
        let v_t = svd.v_t.unwrap();
        let rank = svd.singular_values.iter().filter(|&&s| s > 1e-10).count();
        let x = gaussian(g.m() * 2, 1, &mut rng);
        let mut proj = x.clone();
        for k in 0..rank {
            let row = v_t.row(k).transpose();
            let c = row.dot(&x.column(0));
            proj -= &row * c;
        }
        let omega = TwistedOneForm::new(2, proj).unwrap();
        assert!(apply_delta(&g, &omega, &rho).unwrap().data().norm() < 1e-10);
        assert!(laplacian1(&g, &omega, &rho).unwrap().data().norm() < 1e-10);
    }

    #[test]
    fn kernel_dimensions() {
        let g = weighted_graph();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let gv = random_vp(g.n(), 3, &mut rng);
        let synced = potential_from_vertex(&g, &gv).unwrap();
        let report = kernel_dim(&g, &synced, None).unwrap();
        assert_eq!(report.dim, 3);
        assert_eq!(report.eigen_dim, 3);
        assert_eq!(report.eigenvalues.len(), 4);

        let noisy = random_ep(&g, 3, &mut rng);
        let report = kernel_dim(&g, &noisy, None).unwrap();
        assert_eq!((report.dim, report.eigen_dim), (0, 0));

        // sign-twisted square: spectrum of D⁻¹L₁ is {0.., } with no kernel
        let sq = square();
        let mut rho = EdgePotential::identity(&sq, 1);
        rho.set_block(sq.edge_index(3, 0).unwrap(), Mat::from_element(1, 1, -1.0));
        let report = kernel_dim(&sq, &rho, None).unwrap();
        assert_eq!(report.dim, 0);
        assert!((report.eigenvalues[0] - (1.0 - (std::f64::consts::PI / 4.0).cos())).abs() < 1e-12);
    }

    #[test]
    fn hodge_parts() {
        let g = weighted_graph();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let gv = random_vp(g.n(), 2, &mut rng);
        let synced = potential_from_vertex(&g, &gv).unwrap();
        let f = Cochain0::new(2, gv.stacked().clone()).unwrap();
        let parts = hodge_decompose(&g, &f, &synced, None).unwrap();
        assert!(parts.coexact.data().norm() < 1e-10);
        assert_eq!(parts.harmonic.data() + parts.coexact.data(), *f.data());

        let noisy = random_ep(&g, 2, &mut rng);
        let f = Cochain0::new(2, gaussian(g.n() * 2, 1, &mut rng)).unwrap();
        let parts = hodge_decompose(&g, &f, &noisy, None).unwrap();
        assert!(parts.harmonic.data().norm() < 1e-12);

        let f = Cochain0::new(2, gaussian(g.n() * 2, 1, &mut rng)).unwrap();
        let parts = hodge_decompose(&g, &f, &synced, None).unwrap();
        let cross = inner0(&g, &parts.harmonic, &parts.coexact).unwrap();
        assert!(cross.abs() <= 1e-8 * inner0(&g, &f, &f).unwrap());
        let check = poisson_check(&g, &f, &synced).unwrap();
        assert!(check.residual < 1e-8);
        assert!((check.delta_theta.data() - parts.coexact.data()).norm() < 1e-8);
    }

    #[test]
    fn cheeger_bound_examples() {
        let g = weighted_graph();
        assert!(cheeger_lower_bound(&g, &EdgePotential::identity(&g, 1)).unwrap().abs() < 1e-10);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let synced = potential_from_vertex(&g, &random_vp(g.n(), 3, &mut rng)).unwrap();
        assert!(cheeger_lower_bound(&g, &synced).unwrap().abs() < 1e-10);
        let noisy = random_ep(&g, 3, &mut rng);
        let bound = cheeger_lower_bound(&g, &noisy).unwrap();
        assert!(bound > 0.0);
        for _ in 0..200 {
            let cand = random_vp(g.n(), 3, &mut rng);
            assert!(nu_graph(&g, &cand, &noisy).unwrap() >= bound - 1e-8);
        }
    }

    #[test]
    fn spectrum_is_gauge_invariant() {
        let g = weighted_graph();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rho = random_ep(&g, 3, &mut rng);
        let h = random_vp(g.n(), 3, &mut rng);
        let moved = crate::potentials::gauge_act(&g, &h, &rho).unwrap();
        let a = connection_eigenpairs(&g, &rho, g.n() * 3).unwrap().values;
        let b = connection_eigenpairs(&g, &moved, g.n() * 3).unwrap().values;
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
    }
}
