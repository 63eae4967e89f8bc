//! SynCut: partition a graph into pieces that are each close to
//! synchronizable, alternating frustration-driven reweighting, spectral
//! clustering, local synchronization and collage.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{connected_components, classes_from_labels, volume, WeightedGraph};
use crate::numeric::derive_seed;
use crate::potentials::{
    edge_frustrations, nu_subgraph, polar_factor, EdgePotential, Mat, VertexPotential, RANK_TOL,
};
use crate::solver::{spectral_clustering, spectral_sync, Partition};

const ZERO_FRUSTRATION: f64 = 1e-14;
const EPS_FLOOR: f64 = 1e-250;

#[derive(Debug, Clone, PartialEq)]
pub struct SynCutConfig {
    pub k: usize,
    pub max_iters: usize,
    pub xi_tol: f64,
    pub seed: u64,
}

impl Default for SynCutConfig {
    fn default() -> Self {
        Self { k: 2, max_iters: 10, xi_tol: 1e-8, seed: 0 }
    }
}

impl SynCutConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidConfig("k must be at least 2".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        if !(self.xi_tol >= 0.0 && self.xi_tol.is_finite()) {
            return Err(Error::InvalidConfig("xi_tol must be a finite non-negative number".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SynCutResult {
    pub partition: Partition,
    pub f_star: VertexPotential,
    pub xi_trace: Vec<f64>,
    pub iterations: usize,
    pub final_edge_frustrations: Vec<f64>,
}

/// ε_ij = w_ij exp(−‖f_i − ρ_ij f_j‖²/σ), σ the mean nonzero frustration.
pub fn reweight(w: &[f64], f: &VertexPotential, rho: &EdgePotential, g: &WeightedGraph) -> Result<Vec<f64>> {
    if w.len() != g.m() {
        return Err(Error::LengthMismatch { left: w.len(), right: g.m() });
    }
    let fr = edge_frustrations(g, f, rho)?;
    let live = || fr.iter().zip(w).filter(|(_, &wi)| wi > 0.0).map(|(&x, _)| x);
    let max = live().fold(0.0, f64::max);
    if max <= ZERO_FRUSTRATION {
        return Ok(w.to_vec());
    }
    let cutoff = ZERO_FRUSTRATION * max;
    let (sum, count) = live()
        .filter(|&x| x > cutoff)
        .fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    let sigma = sum / count as f64;
    Ok(w.iter()
        .zip(&fr)
        .map(|(&wi, &x)| (wi * (-x / sigma).exp()).max(wi * EPS_FLOOR))
        .collect())
}

#[derive(Debug, Clone)]
pub struct Collage {
    pub f: VertexPotential,
    /// Right factor h_p applied to each class.
    pub offsets: Vec<Mat>,
    /// Set when some cross-class aggregate was rank deficient.
    pub rank_deficient: bool,
}

/// Σ over edges from class `p` to class `q` of w (g_u)ᵀ ρ_uv g_v, u ∈ S_p.
fn cross_aggregates(
    g: &WeightedGraph,
    rho: &EdgePotential,
    labels: &[usize],
    locals: &VertexPotential,
) -> std::collections::BTreeMap<(usize, usize), (Mat, f64)> {
    let d = rho.d();
    let mut agg = std::collections::BTreeMap::new();
    for (e, edge) in g.edges().iter().enumerate() {
        let (lu, lv) = (labels[edge.u], labels[edge.v]);
        if lu == lv {
            continue;
        }
        let term = locals.get(edge.u).transpose() * rho.block(e) * locals.get(edge.v) * edge.weight;
        let (key, term) = if lu < lv { ((lu, lv), term) } else { ((lv, lu), term.transpose()) };
        let slot = agg.entry(key).or_insert_with(|| (Mat::zeros(d, d), 0.0));
        slot.0 += term;
        slot.1 += edge.weight;
    }
    agg
}

/// Step 5: choose h_p per class to minimize the total cross-class
/// frustration of f*_u = g_u h_p, using the supplied locals.
pub fn collage(
    partition: &Partition,
    locals: &VertexPotential,
    rho: &EdgePotential,
    g: &WeightedGraph,
) -> Result<Collage> {
    if locals.len() != g.n() || locals.d() != rho.d() {
        return Err(Error::dims("local potentials do not match the graph"));
    }
    rho.check_graph(g)?;
    let d = rho.d();
    let k = partition.k;
    let agg = cross_aggregates(g, rho, &partition.labels, locals);
    let mut offsets = vec![Mat::identity(d, d); k];
    let mut rank_deficient = false;

    if k == 2 {
        if let Some((a, _)) = agg.get(&(0, 1)) {
            let (q, ratio) = polar_factor(a);
            if ratio < RANK_TOL {
                rank_deficient = true;
            } else {
                offsets[0] = q;
            }
        }
    } else if k > 2 {
        let mut edges = Vec::new();
        let mut blocks = Vec::new();
        for (&(p, q), (a, weight)) in &agg {
            let (h, ratio) = polar_factor(a);
            rank_deficient |= ratio < RANK_TOL;
            edges.push((p, q, *weight));
            blocks.push(h);
        }
        let reduced = WeightedGraph::new(k, &edges)?;
        let reduced_rho = EdgePotential::new(d, blocks)?;
        let comp = connected_components(&reduced);
        for members in classes_from_labels(&comp) {
            if members.len() < 2 {
                continue;
            }
            let (sub, origin) = reduced.induced_subgraph(&members);
            let sub_rho = EdgePotential::new(d, origin.iter().map(|&e| reduced_rho.block(e).clone()).collect())?;
            let h = spectral_sync(&sub, &sub_rho, None)?;
            rank_deficient |= !h.rank_deficient_blocks.is_empty();
            for (local, &p) in members.iter().enumerate() {
                offsets[p] = h.f.get(local);
            }
        }
    }

    let mut f = locals.clone();
    for v in 0..g.n() {
        f.set(v, &(locals.get(v) * &offsets[partition.labels[v]]));
    }
    Ok(Collage { f, offsets, rank_deficient })
}

/// ξ = (Σ_ℓ ν(S_ℓ)) · (Σ_ℓ 1/vol S_ℓ), ν evaluated at the supplied locals.
pub fn objective_xi(
    partition: &Partition,
    rho: &EdgePotential,
    g: &WeightedGraph,
    locals: &VertexPotential,
) -> Result<f64> {
    let mut numerator = 0.0;
    let mut inverse_volumes = 0.0;
    for (class, members) in partition.classes().iter().enumerate() {
        let vol = volume(g, members);
        if vol <= 0.0 {
            return Err(Error::ZeroVolumeClass { class });
        }
        numerator += nu_subgraph(g, members, locals, rho)?;
        inverse_volumes += 1.0 / vol;
    }
    Ok(numerator * inverse_volumes)
}

/// Step 4: spectral synchronization inside each class under weights `eps`,
/// one connected piece at a time.
fn local_sync(
    g: &WeightedGraph,
    rho: &EdgePotential,
    partition: &Partition,
    eps: &[f64],
) -> Result<VertexPotential> {
    let d = rho.d();
    let per_class: Vec<Vec<(usize, Mat)>> = partition
        .classes()
        .par_iter()
        .map(|members| -> Result<Vec<(usize, Mat)>> {
            let mut out = Vec::with_capacity(members.len());
            let (sub, origin) = g.induced_subgraph(members);
            let sub_eps: Vec<f64> = origin.iter().map(|&e| eps[e]).collect();
            let sub = sub.with_weights(&sub_eps)?;
            // pieces share no edges, so collaging them leaves each at the identity offset
            for piece in classes_from_labels(&connected_components(&sub)) {
                if piece.len() == 1 {
                    out.push((members[piece[0]], Mat::identity(d, d)));
                    continue;
                }
                let (pg, porigin) = sub.induced_subgraph(&piece);
                let prho = EdgePotential::new(d, porigin.iter().map(|&e| rho.block(origin[e]).clone()).collect())?;
                let res = spectral_sync(&pg, &prho, None)?;
                for (local, &v) in piece.iter().enumerate() {
                    out.push((members[v], res.f.get(local)));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut locals = VertexPotential::identity(g.n(), d);
    for (v, block) in per_class.into_iter().flatten() {
        locals.set(v, &block);
    }
    Ok(locals)
}

pub fn syncut(g: &WeightedGraph, rho: &EdgePotential, config: &SynCutConfig) -> Result<SynCutResult> {
    config.validate()?;
    rho.check_graph(g)?;
    if config.k > g.n() {
        return Err(Error::TooFewPoints { points: g.n(), k: config.k });
    }
    if !g.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    let w = g.weights();
    let mut eps = w.clone();
    let mut xi_trace: Vec<f64> = Vec::new();
    let mut last = None;

    for t in 0..config.max_iters {
        let global = spectral_sync(g, rho, Some(&eps))?;
        eps = reweight(&w, &global.f, rho, g)?;
        let first = spectral_clustering(g, &eps, config.k, derive_seed(config.seed, 2 * t as u64))?;
        let locals = local_sync(g, rho, &first, &eps)?;
        let glued = collage(&first, &locals, rho, g)?;
        eps = reweight(&w, &glued.f, rho, g)?;
        let second = spectral_clustering(g, &eps, config.k, derive_seed(config.seed, 2 * t as u64 + 1))?;
        let xi = objective_xi(&first, rho, g, &locals)?;
        let converged = xi_trace.last().is_some_and(|&prev| (xi - prev).abs() < config.xi_tol);
        xi_trace.push(xi);
        last = Some((second, glued.f));
        if converged {
            break;
        }
    }

    let (partition, f_star) = last.expect("at least one iteration");
    Ok(SynCutResult {
        final_edge_frustrations: edge_frustrations(g, &f_star, rho)?,
        iterations: xi_trace.len(),
        partition,
        f_star,
        xi_trace,
    })
}
