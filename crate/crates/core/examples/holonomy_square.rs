//! Holonomy on a 4-cycle: a consistent potential is gauge equivalent to the
//! identity, a twisted one is not.
//!
//!     cargo run --example holonomy_square

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sync_geom::holonomy::{holonomy_generators, tree_gauge};
use sync_geom::netgen::{random_orthogonal, random_vertex_potential};
use sync_geom::potentials::{gauge_act, potential_from_vertex};
use sync_geom::{EdgePotential, Mat, Result, WeightedGraph};

fn report(label: &str, g: &WeightedGraph, rho: &EdgePotential) -> Result<()> {
    let hol = holonomy_generators(g, rho)?;
    println!("{label}: {} generator(s), max ‖H − I‖ = {:.3e}, synchronizable = {}",
        hol.generators.len(), hol.max_deviation, hol.synchronizable);
    for gen in &hol.generators {
        println!("  generator on edge {}:{:.4}", gen.edge, gen.matrix);
    }
    Ok(())
}

fn main() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = WeightedGraph::from_edges(&[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)])?;
    let d = 3;

    let truth = random_vertex_potential(g.n(), d, &mut rng);
    let consistent = potential_from_vertex(&g, &truth)?;
    report("consistent", &g, &consistent)?;

    // gauge the consistent potential to the identity along the spanning tree
    let hol = holonomy_generators(&g, &consistent)?;
    let fixed = gauge_act(&g, &tree_gauge(&g, &consistent, &hol.tree)?, &consistent)?;
    let worst = fixed.blocks().iter().map(|b| (b - Mat::identity(d, d)).norm()).fold(0.0, f64::max);
    println!("after tree gauge, max ‖ρ_e − I‖ = {worst:.3e}");

    let mut twisted = consistent.clone();
    twisted.set_block(3, random_orthogonal(d, &mut rng) * consistent.block(3));
    report("twisted", &g, &twisted)
}
