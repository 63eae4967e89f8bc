//! Recover a planted vertex potential from noisy edge measurements.
//!
//!     cargo run --release --example spectral_sync -- [noise]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sync_geom::netgen::{random_vertex_potential, random_weighted_graph};
use sync_geom::potentials::{potential_from_vertex, project_to_orthogonal};
use sync_geom::solver::{gram_schmidt_sync, spectral_sync};
use sync_geom::{Mat, Result, VertexPotential};

/// Mean ‖f_i − g_i O‖_F after the best global alignment O.
fn alignment_error(f: &VertexPotential, truth: &VertexPotential) -> Result<f64> {
    let d = f.d();
    let mut cross = Mat::zeros(d, d);
    for i in 0..f.len() {
        cross += truth.get(i).transpose() * f.get(i);
    }
    let o = project_to_orthogonal(&cross)?;
    let total: f64 = (0..f.len()).map(|i| (f.get(i) - truth.get(i) * &o).norm()).sum();
    Ok(total / f.len() as f64)
}

fn main() -> Result<()> {
    let noise: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.3);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (n, d) = (150, 3);
    let g = random_weighted_graph(n, 4 * n, &mut rng);
    let truth = random_vertex_potential(n, d, &mut rng);
    let clean = potential_from_vertex(&g, &truth)?;

    let exact = gram_schmidt_sync(&g, &clean)?;
    println!("noiseless: ν = {:.2e}, alignment error {:.2e}", exact.nu, alignment_error(&exact.f, &truth)?);

    let mut noisy = clean.clone();
    for e in 0..g.m() {
        let kick = Mat::from_fn(d, d, |_, _| noise * Distribution::<f64>::sample(&StandardNormal, &mut rng));
        noisy.set_block(e, project_to_orthogonal(&(clean.block(e) + kick))?);
    }
    let s = spectral_sync(&g, &noisy, None)?;
    println!("noise {noise}: η = {:.4}, ν = {:.4}, alignment error {:.4}", s.eta, s.nu, alignment_error(&s.f, &truth)?);
    println!("lowest eigenvalues {:.5?}", s.eigenvalues);
    Ok(())
}
