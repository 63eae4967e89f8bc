//! SynCut versus NCut on seeded random synchronization networks.
//!
//!     cargo run --release --example benchmark -- [--trials 50] [--seed 0] [--paper-scale] [--out results.csv]

use std::path::PathBuf;

use clap::Parser;
use sync_geom::netgen::{bench_csv, run_benchmark, SimConfig};

#[derive(Parser)]
struct Opts {
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// N = 100 per component, d = 5, 100 to 250 inter links.
    #[arg(long)]
    paper_scale: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.retain(|x| x.is_finite());
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.sort_by(f64::total_cmp);
    let mid = xs.len() / 2;
    if xs.len().is_multiple_of(2) {
        0.5 * (xs[mid - 1] + xs[mid])
    } else {
        xs[mid]
    }
}

fn histogram(label: &str, xs: &[f64]) {
    let mut bins = [0usize; 10];
    for &x in xs.iter().filter(|x| x.is_finite()) {
        bins[((x / 0.05) as usize).min(9)] += 1;
    }
    println!("{label}");
    for (b, count) in bins.iter().enumerate() {
        println!("  [{:.2}, {:.2}) {}", b as f64 * 0.05, (b + 1) as f64 * 0.05, "#".repeat(*count));
    }
}

fn main() -> sync_geom::Result<()> {
    let opts = Opts::parse();
    let cfg = if opts.paper_scale { SimConfig::paper_scale() } else { SimConfig::desk() };
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let start = std::time::Instant::now();
    let rows = run_benchmark(&cfg, opts.trials, opts.seed, jobs)?;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    let sc: Vec<f64> = rows.iter().map(|r| r.syncut_err).collect();
    let nc: Vec<f64> = rows.iter().map(|r| r.ncut_err).collect();

    println!("{} trials, N = {}, d = {} ({:.1?})", rows.len(), cfg.n_per_component, cfg.d, start.elapsed());
    println!("median error  SynCut {:.4}  NCut {:.4}", median(sc.clone()), median(nc.clone()));
    println!("max iterations {}", rows.iter().map(|r| r.iters).max().unwrap_or(0));
    if failed > 0 {
        println!("{failed} trials failed");
    }
    histogram("SynCut error ratio", &sc);
    histogram("NCut error ratio", &nc);

    if let Some(path) = opts.out {
        sync_geom::io::write_text(&path, &bench_csv(&rows))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
