//! Command-line front end: `sync`, `syncut`, `holonomy`, `spectrum`,
//! `simulate` and `bench`.
//!
//! Exit status is 0 on success, 1 for input or validation errors and 2 for
//! numerical failures; errors are printed as one `error: <kind>: <detail>`
//! line. Commands writing an output directory also write `manifest.json`
//! with the resolved parameters, input digests, seed and tool version.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::hodge::{build_operators, connection_eigenpairs, kernel_dim, normalized_connection_laplacian};
use crate::holonomy::{holonomy_generators_at, DEFAULT_SYNC_TOL};
use crate::io::{self, format_csv};
use crate::netgen::{bench_csv, run_benchmark, simulate_network, SimConfig};
use crate::numeric::fmt_g17;
use crate::potentials::{EdgePotential, Mat};
use crate::solver::spectral_sync;
use crate::sparse::CsrMatrix;
use crate::syncut::{syncut, SynCutConfig};

pub const THREADS_ENV: &str = "SYNC_GEOM_THREADS";

#[derive(Parser, Debug)]
#[command(name = "sync-geom", version, about = "Synchronization over O(d) on weighted graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Spectral synchronization of an edge potential.
    Sync(SyncArgs),
    /// Partition a graph into nearly synchronizable pieces.
    Syncut(SyncutArgs),
    /// Holonomy generators at a base vertex.
    Holonomy(HolonomyArgs),
    /// Smallest eigenvalues of the connection Laplacian.
    Spectrum(SpectrumArgs),
    /// Generate a random two-component synchronization network.
    Simulate(SimulateArgs),
    /// SynCut versus NCut on seeded random networks.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct Inputs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    potential: PathBuf,
}

#[derive(Args, Debug)]
struct SyncArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Zero threshold for kernel and holonomy tests.
    #[arg(long, default_value_t = DEFAULT_SYNC_TOL)]
    tol: f64,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SyncutArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 10)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-8)]
    xi_tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct HolonomyArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long, default_value_t = 0)]
    base: usize,
    #[arg(long, default_value_t = DEFAULT_SYNC_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Number of eigenvalues; defaults to d + 1.
    #[arg(long)]
    k: Option<usize>,
    /// Directory for coordinate-format operator files.
    #[arg(long)]
    export: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Simulation config; the desk-scale defaults are used when absent.
    #[arg(long, conflicts_with = "paper_scale")]
    config: Option<PathBuf>,
    /// Use N = 100 per component, d = 5, 100–250 inter links.
    #[arg(long)]
    paper_scale: bool,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    jobs: Option<usize>,
}

/// Run the tool on `argv` (program name first) and return the exit status.
pub fn parse_and_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            let detail = e.to_string();
            let first = detail.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error: validation: {first}");
            return 1;
        }
    };
    configure_threads();
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            let kind = e.kind();
            eprintln!("error: {kind}: {}", e.to_string().replace('\n', " "));
            if kind == "numerical" {
                2
            } else {
                1
            }
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // a global pool may already exist when embedded; keep it then
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Sync(a) => cmd_sync(a),
        Command::Syncut(a) => cmd_syncut(a),
        Command::Holonomy(a) => cmd_holonomy(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn load(inputs: &Inputs) -> Result<(WeightedGraph, EdgePotential)> {
    let g = io::read_graph(&inputs.graph)?;
    let rho = io::read_potential(&inputs.potential, &g)?;
    Ok((g, rho))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => io::write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
    s.push('\n');
    s
}

fn matrix_json(m: &Mat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|r| Value::Array((0..m.ncols()).map(|c| json!(m[(r, c)])).collect()))
            .collect(),
    )
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

fn write_manifest(dir: &Path, subcommand: &str, config: Value, inputs: &[&Path], seed: Option<u64>) -> Result<()> {
    let mut digests = serde_json::Map::new();
    for p in inputs {
        digests.insert(p.display().to_string(), json!(sha256_file(p)?));
    }
    let manifest = json!({
        "subcommand": subcommand,
        "config": config,
        "inputs": digests,
        "seed": seed,
        "version": env!("CARGO_PKG_VERSION"),
    });
    io::write_text(&dir.join("manifest.json"), &to_json(&manifest))
}

fn cmd_sync(a: SyncArgs) -> Result<()> {
    let (g, rho) = load(&a.inputs)?;
    let res = spectral_sync(&g, &rho, None)?;
    let kernel = kernel_dim(&g, &rho, None)?;
    let hol = holonomy_generators_at(&g, &rho, 0, a.tol)?;
    let value = json!({
        "n": g.n(),
        "m": g.m(),
        "d": rho.d(),
        "eigenvalues": res.eigenvalues,
        "nu": res.nu,
        "eta": res.eta,
        "kernel_dim": kernel.dim,
        "synchronizable": hol.synchronizable,
        "rank_deficient_blocks": res.rank_deficient_blocks,
        "vertex_potential": io::format_vertex_potential(&res.f),
    });
    emit(a.out.as_deref(), &to_json(&value))
}

fn cmd_holonomy(a: HolonomyArgs) -> Result<()> {
    let (g, rho) = load(&a.inputs)?;
    let report = holonomy_generators_at(&g, &rho, a.base, a.tol)?;
    let generators: Vec<Value> = report
        .generators
        .iter()
        .map(|gen| {
            let e = g.edge(gen.edge);
            json!({ "edge": [e.u, e.v], "matrix": matrix_json(&gen.matrix) })
        })
        .collect();
    let value = json!({
        "base": report.base,
        "n_generators": generators.len(),
        "max_deviation": report.max_deviation,
        "synchronizable": report.synchronizable,
        "generators": generators,
    });
    emit(a.out.as_deref(), &to_json(&value))
}

fn write_coo(path: &Path, m: &CsrMatrix) -> Result<()> {
    let mut buf = Vec::new();
    m.write_coordinate(&mut buf)
        .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    fs::write(path, buf).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn cmd_spectrum(a: SpectrumArgs) -> Result<()> {
    let (g, rho) = load(&a.inputs)?;
    let k = a.k.unwrap_or(rho.d() + 1).min(g.n() * rho.d());
    let pairs = connection_eigenpairs(&g, &rho, k)?;
    let csv = format_csv(
        "index,eigenvalue",
        pairs.values.iter().enumerate().map(|(i, &x)| vec![i.to_string(), fmt_g17(x)]),
    );
    if let Some(dir) = &a.export {
        create_dir(dir)?;
        let ops = build_operators(&g, &rho)?;
        write_coo(&dir.join("l1.coo"), &ops.l1)?;
        write_coo(&dir.join("d_rho.coo"), &ops.d_rho)?;
        write_coo(&dir.join("delta_rho.coo"), &ops.delta_rho)?;
        write_coo(&dir.join("normalized_l1.coo"), &normalized_connection_laplacian(&g, &rho)?)?;
        write_manifest(
            dir,
            "spectrum",
            json!({ "k": k }),
            &[a.inputs.graph.as_path(), a.inputs.potential.as_path()],
            None,
        )?;
    }
    emit(a.out.as_deref(), &csv)
}

fn cmd_syncut(a: SyncutArgs) -> Result<()> {
    let (g, rho) = load(&a.inputs)?;
    let config = SynCutConfig { k: a.k, max_iters: a.max_iters, xi_tol: a.xi_tol, seed: a.seed };
    let res = syncut(&g, &rho, &config)?;
    create_dir(&a.out)?;
    io::write_text(
        &a.out.join("partition.csv"),
        &format_csv(
            "vertex,label",
            res.partition.labels.iter().enumerate().map(|(v, l)| vec![v.to_string(), l.to_string()]),
        ),
    )?;
    io::write_text(&a.out.join("fstar.pot"), &io::format_vertex_potential(&res.f_star))?;
    io::write_text(
        &a.out.join("xi_trace.csv"),
        &format_csv(
            "iter,xi",
            res.xi_trace.iter().enumerate().map(|(t, &x)| vec![(t + 1).to_string(), fmt_g17(x)]),
        ),
    )?;
    io::write_text(
        &a.out.join("edge_frustration.csv"),
        &format_csv(
            "u,v,frustration",
            g.edges()
                .iter()
                .zip(&res.final_edge_frustrations)
                .map(|(e, &x)| vec![e.u.to_string(), e.v.to_string(), fmt_g17(x)]),
        ),
    )?;
    write_manifest(
        &a.out,
        "syncut",
        json!({ "k": config.k, "max_iters": config.max_iters, "xi_tol": config.xi_tol }),
        &[a.inputs.graph.as_path(), a.inputs.potential.as_path()],
        Some(config.seed),
    )
}

fn read_sim_config(path: &Path) -> Result<SimConfig> {
    let text = io::read_text(path)?;
    let cfg: SimConfig = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_simulate(a: SimulateArgs) -> Result<()> {
    let cfg = read_sim_config(&a.config)?;
    let inst = simulate_network(&cfg, a.seed)?;
    create_dir(&a.out)?;
    io::write_graph(&a.out.join("graph.tsv"), &inst.graph)?;
    io::write_potential(&a.out.join("potential.pot"), &inst.graph, &inst.rho)?;
    io::write_text(&a.out.join("planted.vpot"), &io::format_vertex_potential(&inst.planted_g))?;
    io::write_text(
        &a.out.join("labels.csv"),
        &format_csv(
            "vertex,label",
            inst.planted_labels.iter().enumerate().map(|(v, l)| vec![v.to_string(), l.to_string()]),
        ),
    )?;
    let summary = json!({
        "n": inst.graph.n(),
        "m": inst.graph.m(),
        "n_inter_links": inst.n_inter_links,
        "spectral_gap": inst.spectral_gap,
    });
    io::write_text(&a.out.join("instance.json"), &to_json(&summary))?;
    write_manifest(
        &a.out,
        "simulate",
        serde_json::to_value(&cfg).expect("config serializes"),
        &[a.config.as_path()],
        Some(a.seed),
    )
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    let cfg = match (&a.config, a.paper_scale) {
        (Some(path), _) => read_sim_config(path)?,
        (None, true) => SimConfig::paper_scale(),
        (None, false) => SimConfig::desk(),
    };
    let jobs = a.jobs.unwrap_or_else(rayon::current_num_threads);
    let rows = run_benchmark(&cfg, a.trials, a.seed, jobs)?;
    io::write_text(&a.out, &bench_csv(&rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(parse_and_dispatch(["sync-geom", "sync"]), 1);
        assert_eq!(parse_and_dispatch(["sync-geom", "frobnicate"]), 1);
    }

    #[test]
    fn version_exits_zero() {
        assert_eq!(parse_and_dispatch(["sync-geom", "--version"]), 0);
    }

    #[test]
    fn missing_input_is_an_io_error() {
        let code = parse_and_dispatch([
            "sync-geom",
            "sync",
            "--graph",
            "/nonexistent/g.tsv",
            "--potential",
            "/nonexistent/p.pot",
        ]);
        assert_eq!(code, 1);
    }
}
