//! Random synchronization networks and the SynCut-versus-NCut benchmark.
//!
//! A network consists of two equally sized connected components, each drawn
//! from a random degree sequence, joined by random inter-component links.
//! The edge potential is synchronizable inside each component (built from a
//! planted Haar-random vertex potential) and random on the inter links.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::hodge::connection_eigenpairs;
use crate::numeric::{derive_seed, fmt_g17};
use crate::potentials::{EdgePotential, Mat, VertexPotential};
use crate::solver::spectral_clustering;
use crate::syncut::{syncut, SynCutConfig};

const GRAPH_ATTEMPTS: usize = 100;

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of R's diagonal moved into Q.
pub fn random_orthogonal<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Mat {
    let a = Mat::from_fn(d, d, |_, _| StandardNormal.sample(rng));
    let qr = a.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

pub fn random_vertex_potential<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> VertexPotential {
    let blocks: Vec<Mat> = (0..n).map(|_| random_orthogonal(d, rng)).collect();
    VertexPotential::from_blocks(d, &blocks).expect("blocks are d x d")
}

pub fn random_edge_potential<R: Rng + ?Sized>(g: &WeightedGraph, d: usize, rng: &mut R) -> EdgePotential {
    EdgePotential::new(d, (0..g.m()).map(|_| random_orthogonal(d, rng)).collect()).expect("blocks are d x d")
}

/// Connected graph on `n` vertices: a random recursive tree plus up to
/// `extra` further edges, weights uniform in [0.5, 2).
pub fn random_weighted_graph<R: Rng + ?Sized>(n: usize, extra: usize, rng: &mut R) -> WeightedGraph {
    let mut list = Vec::new();
    let mut present = std::collections::HashSet::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        present.insert((u, v));
        list.push((u, v, rng.random_range(0.5..2.0)));
    }
    let max_edges = n * n.saturating_sub(1) / 2;
    let target = (list.len() + extra).min(max_edges);
    while list.len() < target {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        if present.insert(key) {
            list.push((key.0, key.1, rng.random_range(0.5..2.0)));
        }
    }
    WeightedGraph::new(n, &list).expect("generated edges are valid")
}

/// Erdős–Gallai test.
pub fn is_graphical(degrees: &[usize]) -> bool {
    let n = degrees.len();
    if degrees.iter().sum::<usize>() % 2 == 1 || degrees.iter().any(|&d| d >= n) {
        return false;
    }
    let mut sorted = degrees.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut prefix = 0usize;
    for k in 1..=n {
        prefix += sorted[k - 1];
        let tail: usize = sorted[k..].iter().map(|&d| d.min(k)).sum();
        if prefix > k * (k - 1) + tail {
            return false;
        }
    }
    true
}

/// One sequential-importance draw of a simple graph with the given degrees.
fn sequential_realization<R: Rng + ?Sized>(degrees: &[usize], rng: &mut R) -> Vec<(usize, usize)> {
    let n = degrees.len();
    let mut residual = degrees.to_vec();
    let mut edges = Vec::new();
    let mut adjacent = vec![false; n * n];
    let mut trial = residual.clone();
    while let Some(i) = (0..n).filter(|&v| residual[v] > 0).min_by_key(|&v| (residual[v], v)) {
        while residual[i] > 0 {
            let mut candidates = Vec::new();
            let mut mass = 0usize;
            for j in 0..n {
                if j == i || residual[j] == 0 || adjacent[i * n + j] {
                    continue;
                }
                trial.copy_from_slice(&residual);
                trial[i] -= 1;
                trial[j] -= 1;
                if is_graphical(&trial) {
                    candidates.push(j);
                    mass += residual[j];
                }
            }
            // the residual sequence stays graphical, so a candidate always exists
            let mut target = rng.random_range(0..mass);
            let j = *candidates
                .iter()
                .find(|&&j| {
                    if target < residual[j] {
                        true
                    } else {
                        target -= residual[j];
                        false
                    }
                })
                .expect("target below total mass");
            adjacent[i * n + j] = true;
            adjacent[j * n + i] = true;
            residual[i] -= 1;
            residual[j] -= 1;
            edges.push((i.min(j), i.max(j)));
        }
    }
    edges
}

/// Simple connected unit-weight graph realizing `degrees`, sampled
/// sequentially; disconnected draws are retried.
pub fn random_connected_degree_graph<R: Rng + ?Sized>(degrees: &[usize], rng: &mut R) -> Result<WeightedGraph> {
    if !is_graphical(degrees) {
        return Err(Error::NotGraphical);
    }
    for _ in 0..GRAPH_ATTEMPTS {
        let edges = sequential_realization(degrees, rng);
        let list: Vec<_> = edges.into_iter().map(|(u, v)| (u, v, 1.0)).collect();
        let g = WeightedGraph::new(degrees.len(), &list)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::RetriesExhausted { attempts: GRAPH_ATTEMPTS })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub n_per_component: usize,
    pub d: usize,
    pub degree_min: usize,
    pub degree_max: usize,
    pub inter_links_min: usize,
    pub inter_links_max: usize,
    #[serde(default)]
    pub seed: u64,
}

impl SimConfig {
    /// Desk-scale configuration used by the regression benchmark.
    pub fn desk() -> Self {
        Self {
            n_per_component: 40,
            d: 3,
            degree_min: 4,
            degree_max: 8,
            inter_links_min: 20,
            inter_links_max: 60,
            seed: 0,
        }
    }

    /// The large simulation study: N = 100 per component, d = 5.
    pub fn paper_scale() -> Self {
        Self {
            n_per_component: 100,
            d: 5,
            degree_min: 4,
            degree_max: 8,
            inter_links_min: 100,
            inter_links_max: 250,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if self.d == 0 {
            return bad("d must be at least 1");
        }
        if self.degree_min == 0 || self.degree_min > self.degree_max {
            return bad("need 1 <= degree_min <= degree_max");
        }
        if self.degree_max >= self.n_per_component {
            return bad("degree_max must be below n_per_component");
        }
        if self.inter_links_min == 0 || self.inter_links_min > self.inter_links_max {
            return bad("need 1 <= inter_links_min <= inter_links_max");
        }
        if self.inter_links_max > self.n_per_component * self.n_per_component {
            return bad("more inter links requested than vertex pairs");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SimInstance {
    pub graph: WeightedGraph,
    pub rho: EdgePotential,
    pub planted_g: VertexPotential,
    pub planted_labels: Vec<usize>,
    pub n_inter_links: usize,
    /// λ₂ of the normalized graph Laplacian of the whole graph.
    pub spectral_gap: f64,
    /// Degree sequences drawn for the two components.
    pub component_degrees: [Vec<usize>; 2],
}

impl SimInstance {
    pub fn is_inter_edge(&self, e: usize) -> bool {
        let edge = self.graph.edge(e);
        self.planted_labels[edge.u] != self.planted_labels[edge.v]
    }
}

fn draw_component<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> Result<(WeightedGraph, Vec<usize>)> {
    for _ in 0..GRAPH_ATTEMPTS {
        let degrees: Vec<usize> = (0..cfg.n_per_component)
            .map(|_| rng.random_range(cfg.degree_min..=cfg.degree_max))
            .collect();
        match random_connected_degree_graph(&degrees, rng) {
            Ok(g) => return Ok((g, degrees)),
            Err(Error::NotGraphical | Error::RetriesExhausted { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::RetriesExhausted { attempts: GRAPH_ATTEMPTS })
}

pub fn simulate_network(cfg: &SimConfig, seed: u64) -> Result<SimInstance> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = cfg.n_per_component;
    let (g1, deg1) = draw_component(cfg, &mut rng)?;
    let (g2, deg2) = draw_component(cfg, &mut rng)?;

    let mut list: Vec<(usize, usize, f64)> = g1.edges().iter().map(|e| (e.u, e.v, 1.0)).collect();
    list.extend(g2.edges().iter().map(|e| (e.u + n, e.v + n, 1.0)));
    let n_inter = rng.random_range(cfg.inter_links_min..=cfg.inter_links_max);
    let mut picks = index::sample(&mut rng, n * n, n_inter).into_vec();
    picks.sort_unstable();
    list.extend(picks.iter().map(|&p| (p / n, n + p % n, 1.0)));
    let graph = WeightedGraph::new(2 * n, &list)?;

    let planted_g = random_vertex_potential(2 * n, cfg.d, &mut rng);
    let planted_labels: Vec<usize> = (0..2 * n).map(|v| usize::from(v >= n)).collect();
    let blocks = graph
        .edges()
        .iter()
        .map(|e| {
            if planted_labels[e.u] == planted_labels[e.v] {
                planted_g.get(e.u) * planted_g.get(e.v).transpose()
            } else {
                random_orthogonal(cfg.d, &mut rng)
            }
        })
        .collect();
    let rho = EdgePotential::new(cfg.d, blocks)?;
    let spectral_gap = connection_eigenpairs(&graph, &EdgePotential::identity(&graph, 1), 2)?.values[1];

    Ok(SimInstance {
        graph,
        rho,
        planted_g,
        planted_labels,
        n_inter_links: n_inter,
        spectral_gap,
        component_degrees: [deg1, deg2],
    })
}

/// Fraction of misclustered vertices, minimized over relabelings of `pred`.
pub fn error_ratio(pred: &[usize], truth: &[usize], k: usize) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch { left: pred.len(), right: truth.len() });
    }
    if pred.is_empty() {
        return Ok(0.0);
    }
    if let Some(&bad) = pred.iter().chain(truth).find(|&&l| l >= k) {
        return Err(Error::Validation(format!("label {bad} outside 0..{k}")));
    }
    let mut confusion = vec![vec![0usize; k]; k];
    for (&p, &t) in pred.iter().zip(truth) {
        confusion[p][t] += 1;
    }
    let matched = if k <= 6 { best_permutation(&confusion) } else { best_assignment(&confusion) };
    Ok(1.0 - matched as f64 / pred.len() as f64)
}

fn best_permutation(confusion: &[Vec<usize>]) -> usize {
    fn go(row: usize, used: &mut Vec<bool>, c: &[Vec<usize>]) -> usize {
        if row == c.len() {
            return 0;
        }
        let mut best = 0;
        for col in 0..c.len() {
            if !used[col] {
                used[col] = true;
                best = best.max(c[row][col] + go(row + 1, used, c));
                used[col] = false;
            }
        }
        best
    }
    go(0, &mut vec![false; confusion.len()], confusion)
}

/// Hungarian method on the negated confusion matrix.
fn best_assignment(confusion: &[Vec<usize>]) -> usize {
    let k = confusion.len();
    let cost = |i: usize, j: usize| -(confusion[i - 1][j - 1] as i64);
    let mut u = vec![0i64; k + 1];
    let mut v = vec![0i64; k + 1];
    let mut p = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    for i in 1..=k {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![i64::MAX; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0;
            for j in 1..=k {
                if !used[j] {
                    let cur = cost(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=k).map(|j| confusion[p[j] - 1][j - 1]).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub trial: usize,
    pub seed: u64,
    pub gap: f64,
    pub syncut_err: f64,
    pub ncut_err: f64,
    pub iters: usize,
    /// Set when the trial failed; numeric fields are then NaN/0.
    pub error: Option<String>,
}

pub const BENCH_HEADER: &str = "trial,seed,gap,syncut_err,ncut_err,iters";

impl BenchRow {
    pub fn to_csv_line(&self) -> String {
        let iters = match &self.error {
            Some(kind) => format!("error:{kind}"),
            None => self.iters.to_string(),
        };
        format!(
            "{},{},{},{},{},{}",
            self.trial,
            self.seed,
            fmt_g17(self.gap),
            fmt_g17(self.syncut_err),
            fmt_g17(self.ncut_err),
            iters
        )
    }
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(BENCH_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv_line());
        out.push('\n');
    }
    out
}

fn run_trial(cfg: &SimConfig, trial: usize, master_seed: u64) -> BenchRow {
    let seed = derive_seed(master_seed, trial as u64);
    let outcome = (|| -> Result<BenchRow> {
        let inst = simulate_network(cfg, seed)?;
        let config = SynCutConfig { k: 2, seed: derive_seed(seed, 1), ..SynCutConfig::default() };
        let sc = syncut(&inst.graph, &inst.rho, &config)?;
        let ncut = spectral_clustering(&inst.graph, &inst.graph.weights(), 2, derive_seed(seed, 2))?;
        Ok(BenchRow {
            trial,
            seed,
            gap: inst.spectral_gap,
            syncut_err: error_ratio(&sc.partition.labels, &inst.planted_labels, 2)?,
            ncut_err: error_ratio(&ncut.labels, &inst.planted_labels, 2)?,
            iters: sc.iterations,
            error: None,
        })
    })();
    outcome.unwrap_or_else(|e| BenchRow {
        trial,
        seed,
        gap: f64::NAN,
        syncut_err: f64::NAN,
        ncut_err: f64::NAN,
        iters: 0,
        error: Some(e.kind().to_string()),
    })
}

/// Run `n_trials` seeded trials on up to `jobs` threads; rows are ordered by trial.
pub fn run_benchmark(cfg: &SimConfig, n_trials: usize, master_seed: u64, jobs: usize) -> Result<Vec<BenchRow>> {
    use rayon::prelude::*;
    cfg.validate()?;
    if n_trials == 0 {
        return Err(Error::InvalidConfig("need at least one trial".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    Ok(pool.install(|| {
        (0..n_trials)
            .into_par_iter()
            .map(|t| run_trial(cfg, t, master_seed))
            .collect()
    }))
}
