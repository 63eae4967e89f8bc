//! How far a random potential is from synchronizable: ν of the spectral
//! solution against the eigenvalue lower bound, over many draws.
//!
//!     cargo run --release --example frustration_distribution -- [draws]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sync_geom::hodge::cheeger_lower_bound;
use sync_geom::netgen::{random_edge_potential, random_weighted_graph};
use sync_geom::numeric::derive_seed;
use sync_geom::solver::spectral_sync;
use sync_geom::Result;

fn main() -> Result<()> {
    let draws: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(40);
    println!("{:>4} {:>3} {:>10} {:>10} {:>8}", "draw", "d", "bound", "nu", "ratio");
    for i in 0..draws {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(99, i));
        let d = 1 + (i as usize % 4);
        let g = random_weighted_graph(30, 40, &mut rng);
        let rho = random_edge_potential(&g, d, &mut rng);
        let bound = cheeger_lower_bound(&g, &rho)?;
        let nu = spectral_sync(&g, &rho, None)?.nu;
        println!("{i:>4} {d:>3} {bound:>10.5} {nu:>10.5} {:>8.3}", nu / bound);
    }
    Ok(())
}
