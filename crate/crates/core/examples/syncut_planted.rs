//! SynCut on a simulated two-component network, compared with plain
//! spectral clustering of the graph.
//!
//!     cargo run --release --example syncut_planted -- [seed]

use sync_geom::netgen::{error_ratio, simulate_network, SimConfig};
use sync_geom::solver::spectral_clustering;
use sync_geom::syncut::{syncut, SynCutConfig};
use sync_geom::Result;

fn main() -> Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let inst = simulate_network(&SimConfig::desk(), seed)?;
    let g = &inst.graph;
    println!("n = {}, m = {}, inter links = {}, spectral gap = {:.4}", g.n(), g.m(), inst.n_inter_links, inst.spectral_gap);

    let res = syncut(g, &inst.rho, &SynCutConfig { seed, ..SynCutConfig::default() })?;
    println!("SynCut: {} iteration(s), ξ trace {:?}", res.iterations, res.xi_trace);
    let err = error_ratio(&res.partition.labels, &inst.planted_labels, 2)?;

    let ncut = spectral_clustering(g, &g.weights(), 2, seed)?;
    let ncut_err = error_ratio(&ncut.labels, &inst.planted_labels, 2)?;
    println!("error ratio: SynCut {err:.4}, NCut {ncut_err:.4}");

    let (mut inter, mut intra) = (Vec::new(), Vec::new());
    for (e, &fr) in res.final_edge_frustrations.iter().enumerate() {
        if inst.is_inter_edge(e) { inter.push(fr) } else { intra.push(fr) }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
    println!("mean final frustration: inter {:.4}, intra {:.2e}", mean(&inter), mean(&intra));
    Ok(())
}
