//! The `hmmsb` command-line tool.
//!
//! Subcommands: `simulate`, `infer`, `eval-f1`, `heldout`, `export-dot`,
//! `recount-check`. Exit codes: 0 success, 1 usage error, 2 malformed input,
//! 3 internal consistency fault. `--seed` falls back to the `HMMSB_SEED`
//! environment variable, then to 0; `simulate` additionally reads a flat
//! `key=value` config file with explicit flags taking precedence.

use crate::error::{Fault, HmmsbError, Result};
use crate::eval::{
    consensus, f1_report, heldout_protocol, marginal_likelihood_is, merge_small_communities,
    mode_levels, HeldoutConfig, IsEstimate, GAMMA_GRID,
};
use crate::generative::{generate, BRegime, SimulationConfig};
use crate::gibbs::{
    complete_log_likelihood_parts, run_chain, ChainConfig, ChainInit, RetainedSample, ScanOrder,
};
use crate::hyper::Hyperparams;
use crate::io::{
    self, hierarchy_from_paths, hierarchy_to_paths, manifest, parse_config_file, read_edge_list,
    read_hierarchy, read_node_labels, read_samples, write_edge_list, write_f1_csv,
    write_gamma_grid_csv, write_heldout_csv, write_hierarchy, write_permuted_adjacency,
    write_samples, write_trace_csv, HierarchyFile, SamplesHeader,
};
use crate::network::DirectedNetwork;
use crate::path::PathAssignment;
use crate::seed;
use crate::stats::CompatibilityStats;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

/// Entry point for the `hmmsb` binary; returns the process exit code.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

/// Parses `args` and executes the requested command.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match std::panic::catch_unwind(move || execute(cli)) {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            eprintln!("error: internal consistency fault: {msg}");
            3
        }
    }
}

#[derive(Parser)]
#[command(
    name = "hmmsb",
    version,
    about = "Hierarchical mixed membership stochastic blockmodel: simulation, collapsed Gibbs inference, evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a network and its latent hierarchy from the model
    Simulate(SimulateArgs),
    /// Fit the model to an edge list by collapsed Gibbs sampling
    Infer(InferArgs),
    /// Score a predicted hierarchy against a reference one
    EvalF1(EvalF1Args),
    /// Select Beta hyperparameters by held-out marginal likelihood
    Heldout(HeldoutArgs),
    /// Render saved artifacts as Graphviz DOT files
    ExportDot(ExportDotArgs),
    /// Verify the internal consistency of a samples file
    RecountCheck(RecountCheckArgs),
}

/// Model hyperparameter flags shared by `infer` and `heldout`.
#[derive(Args, Clone)]
struct HyperArgs {
    /// Hierarchy depth
    #[arg(long = "K", default_value_t = 2)]
    depth: usize,
    /// Nested CRP concentration
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Stick-breaking mean parameter, in (0, 1)
    #[arg(long, default_value_t = 0.5)]
    m: f64,
    /// Stick-breaking concentration parameter
    #[arg(long, default_value_t = 0.5)]
    pi: f64,
    /// Beta pseudo-count on edges
    #[arg(long, default_value_t = 0.5)]
    lambda1: f64,
    /// Beta pseudo-count on non-edges
    #[arg(long, default_value_t = 0.5)]
    lambda2: f64,
}

impl HyperArgs {
    fn build(&self) -> Result<Hyperparams> {
        Hyperparams::new(
            self.gamma,
            self.m,
            self.pi,
            self.lambda1,
            self.lambda2,
            self.depth,
        )
        .map_err(|e| HmmsbError::Usage(e.to_string()))
    }

    fn manifest_extra(&self) -> Vec<(&'static str, String)> {
        vec![
            ("K", self.depth.to_string()),
            ("gamma", self.gamma.to_string()),
            ("m", self.m.to_string()),
            ("pi", self.pi.to_string()),
            ("lambda1", self.lambda1.to_string()),
            ("lambda2", self.lambda2.to_string()),
        ]
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Flat key=value config file; explicit flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of actors
    #[arg(long)]
    n: Option<usize>,
    /// Hierarchy depth
    #[arg(long = "K")]
    depth: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    pi: Option<f64>,
    #[arg(long)]
    lambda1: Option<f64>,
    #[arg(long)]
    lambda2: Option<f64>,
    /// Fix every actor's membership weights (comma-separated, one per level)
    #[arg(long)]
    theta: Option<String>,
    /// Fix on-diagonal block probabilities (comma-separated, one per level)
    #[arg(long)]
    b_on: Option<String>,
    /// Fix off-diagonal block probabilities (comma-separated, one per level)
    #[arg(long)]
    b_off: Option<String>,
    #[arg(long, env = "HMMSB_SEED")]
    seed: Option<u64>,
    /// Output path prefix
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InferArgs {
    /// Input edge list (TSV)
    #[arg(long)]
    edges: PathBuf,
    /// Optional id<TAB>label node-metadata sidecar
    #[arg(long)]
    labels: Option<PathBuf>,
    #[command(flatten)]
    hyper: HyperArgs,
    /// Iterations discarded before retaining samples
    #[arg(long = "burnin", default_value_t = 1000)]
    burn_in: u64,
    /// Number of retained samples
    #[arg(long = "samples", default_value_t = 100)]
    n_samples: u64,
    /// Iterations between retained samples
    #[arg(long, default_value_t = 1)]
    lag: u64,
    /// Site visitation order per sweep
    #[arg(long, value_enum, default_value_t = ScanOrder::Fixed)]
    scan: ScanOrder,
    /// Chain starting state
    #[arg(long, value_enum, default_value_t = ChainInit::Singleton)]
    init: ChainInit,
    /// Select gamma over a grid by importance-sampled marginal likelihood
    #[arg(long)]
    grid: bool,
    /// Importance samples per grid cell
    #[arg(long, default_value_t = 2000)]
    grid_is_samples: usize,
    /// Communities at the bottom level no larger than this are merged
    #[arg(long, default_value_t = 5)]
    min_community_size: usize,
    /// Worker threads for grid cells (results do not depend on this)
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, env = "HMMSB_SEED", default_value_t = 0)]
    seed: u64,
    /// Output path prefix
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalF1Args {
    /// Predicted hierarchy JSON
    #[arg(long)]
    predicted: PathBuf,
    /// Reference hierarchy JSON
    #[arg(long)]
    truth: PathBuf,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct HeldoutArgs {
    /// Input edge list (TSV)
    #[arg(long)]
    edges: PathBuf,
    #[command(flatten)]
    hyper: HyperArgs,
    /// Number of random actor splits
    #[arg(long, default_value_t = 5)]
    splits: usize,
    /// Importance samples per grid cell
    #[arg(long, default_value_t = 10000)]
    is_samples: usize,
    #[arg(long, env = "HMMSB_SEED", default_value_t = 0)]
    seed: u64,
    /// Output path prefix
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExportDotArgs {
    /// Hierarchy JSON to render
    #[arg(long)]
    hierarchy: PathBuf,
    /// Edge list; when given, a network DOT is rendered too
    #[arg(long)]
    edges: Option<PathBuf>,
    /// Samples file; per-pair modal levels style the network edges
    #[arg(long)]
    samples: Option<PathBuf>,
    /// Output path prefix
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RecountCheckArgs {
    /// Edge list the samples refer to
    #[arg(long)]
    edges: PathBuf,
    /// Samples file to verify
    #[arg(long)]
    samples: PathBuf,
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Infer(args) => cmd_infer(args),
        Command::EvalF1(args) => cmd_eval_f1(args),
        Command::Heldout(args) => cmd_heldout(args),
        Command::ExportDot(args) => cmd_export_dot(args),
        Command::RecountCheck(args) => cmd_recount_check(args),
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

fn parse_f64_list(name: &str, text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|_| HmmsbError::Usage(format!("{name}: invalid number {f:?}")))
        })
        .collect()
}

/// Resolved `simulate` parameters after merging flags over the config file.
struct SimulateParams {
    config: SimulationConfig,
    seed: u64,
}

fn simulate_params(args: &SimulateArgs) -> Result<SimulateParams> {
    let file = match &args.config {
        Some(path) => parse_config_file(path)?,
        None => BTreeMap::new(),
    };
    const KNOWN: [&str; 11] = [
        "n_actors", "K", "gamma", "m", "pi", "lambda1", "lambda2", "theta", "b_on", "b_off",
        "seed",
    ];
    for key in file.keys() {
        if !KNOWN.contains(&key.as_str()) {
            return Err(HmmsbError::Usage(format!("unknown config key {key:?}")));
        }
    }
    fn from_file<T: std::str::FromStr>(
        file: &BTreeMap<String, String>,
        key: &str,
    ) -> Result<Option<T>> {
        match file.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                HmmsbError::Usage(format!("config key {key}: invalid value {raw:?}"))
            }),
        }
    }

    let n_actors = args
        .n
        .or(from_file(&file, "n_actors")?)
        .ok_or_else(|| HmmsbError::Usage("actor count required: --n or config n_actors".into()))?;
    let depth = args.depth.or(from_file(&file, "K")?).unwrap_or(2);
    let gamma = args.gamma.or(from_file(&file, "gamma")?).unwrap_or(1.0);
    let m = args.m.or(from_file(&file, "m")?).unwrap_or(0.5);
    let pi = args.pi.or(from_file(&file, "pi")?).unwrap_or(0.5);
    let lambda1 = args.lambda1.or(from_file(&file, "lambda1")?).unwrap_or(0.5);
    let lambda2 = args.lambda2.or(from_file(&file, "lambda2")?).unwrap_or(0.5);
    let seed = args.seed.or(from_file(&file, "seed")?).unwrap_or(0);
    let hyper = Hyperparams::new(gamma, m, pi, lambda1, lambda2, depth)
        .map_err(|e| HmmsbError::Usage(e.to_string()))?;

    let list = |flag: &Option<String>, key: &str| -> Result<Option<Vec<f64>>> {
        match flag.as_deref().or(file.get(key).map(String::as_str)) {
            Some(text) => parse_f64_list(key, text).map(Some),
            None => Ok(None),
        }
    };
    let fixed_theta = list(&args.theta, "theta")?;
    let b_on = list(&args.b_on, "b_on")?;
    let b_off = list(&args.b_off, "b_off")?;
    let fixed_b = match (b_on, b_off) {
        (Some(on_diagonal), Some(off_diagonal)) => Some(BRegime {
            on_diagonal,
            off_diagonal,
        }),
        (None, None) => None,
        _ => {
            return Err(HmmsbError::Usage(
                "b_on and b_off must be given together".into(),
            ));
        }
    };
    let config = SimulationConfig {
        n_actors,
        hyper,
        fixed_theta,
        fixed_b,
        fixed_paths: None,
    };
    config.validate().map_err(|e| HmmsbError::Usage(e.to_string()))?;
    Ok(SimulateParams { config, seed })
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let params = simulate_params(&args)?;
    let sim = &params.config;
    let mut extra = vec![
        ("n_actors", sim.n_actors.to_string()),
        ("K", sim.hyper.max_depth.to_string()),
        ("gamma", sim.hyper.gamma.to_string()),
        ("m", sim.hyper.m.to_string()),
        ("pi", sim.hyper.pi.to_string()),
        ("lambda1", sim.hyper.lambda1.to_string()),
        ("lambda2", sim.hyper.lambda2.to_string()),
    ];
    let join = |v: &[f64]| {
        v.iter()
            .map(f64::to_string)
            .collect::<Vec<_>>()
            .join(",")
    };
    if let Some(theta) = &sim.fixed_theta {
        extra.push(("theta", join(theta)));
    }
    if let Some(b) = &sim.fixed_b {
        extra.push(("b_on", join(&b.on_diagonal)));
        extra.push(("b_off", join(&b.off_diagonal)));
    }
    let manifest = manifest("simulate", params.seed, &extra);

    let mut rng = seed::root_rng(params.seed);
    let generated = generate(sim, &mut rng)?;

    let edges_path = with_suffix(&args.out, ".edges.tsv");
    write_edge_list(&edges_path, &generated.network, &manifest)?;

    let truth_path = with_suffix(&args.out, ".truth.json");
    let root = hierarchy_from_paths(&generated.paths, None);
    write_hierarchy(
        &truth_path,
        &HierarchyFile::new(&generated.paths, root, manifest.clone()),
    )?;

    // The full latent state in the samples format, so any consumer of chain
    // output (including recount-check) can read the simulation truth.
    let state_path = with_suffix(&args.out, ".state.jsonl");
    let chain = ChainConfig {
        burn_in: 0,
        n_samples: 1,
        lag: 1,
        scan: ScanOrder::Fixed,
        init: ChainInit::Prior,
    };
    let parts = complete_log_likelihood_parts(
        &generated.network,
        &generated.paths,
        &generated.levels,
        &sim.hyper,
    );
    let header = SamplesHeader::new(sim.n_actors, &sim.hyper, params.seed, &chain, manifest.clone());
    let truth_sample = RetainedSample {
        iteration: 0,
        paths: generated.paths.clone(),
        levels: generated.levels.clone(),
        log_likelihood: parts.total(),
    };
    write_samples(&state_path, &header, &[truth_sample])?;

    let b_path = with_suffix(&args.out, ".b.json");
    let entries: Vec<serde_json::Value> = generated
        .b_entries
        .iter()
        .map(|(key, p)| {
            serde_json::json!({
                "parent": key.parent(),
                "donor_child": key.donor_child(),
                "receiver_child": key.receiver_child(),
                "probability": p,
            })
        })
        .collect();
    let b_doc = serde_json::json!({
        "format": "hmmsb-bmap-v1",
        "manifest": manifest,
        "entries": entries,
    });
    io::write_atomic(&b_path, &format!("{:#}\n", b_doc))?;

    let manifest_path = with_suffix(&args.out, ".manifest.json");
    let manifest_doc = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    io::write_atomic(&manifest_path, &format!("{manifest_doc}\n"))?;

    println!(
        "simulated {} actors, {} edges (density {:.4})",
        generated.network.n_actors(),
        generated.network.edge_count(),
        generated.network.density()
    );
    for path in [&edges_path, &truth_path, &state_path, &b_path, &manifest_path] {
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// Scores every gamma candidate with its own derived random stream, so the
/// outcome is identical however the cells are scheduled. Ties keep the
/// smaller gamma.
pub fn gamma_grid_search(
    network: &DirectedNetwork,
    base: &Hyperparams,
    n_is_samples: usize,
    seed: u64,
    threads: usize,
) -> Result<(f64, Vec<(f64, IsEstimate)>)> {
    let cell = |(idx, gamma): (usize, f64)| -> (f64, IsEstimate) {
        let mut hyper = base.clone();
        hyper.gamma = gamma;
        let mut rng = seed::unit_rng(seed, 100 + idx as u64);
        (
            gamma,
            marginal_likelihood_is(network, &hyper, n_is_samples, &mut rng),
        )
    };
    let cells: Vec<(usize, f64)> = GAMMA_GRID.iter().copied().enumerate().collect();
    let estimates: Vec<(f64, IsEstimate)> = if threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| HmmsbError::Config(format!("thread pool: {e}")))?;
        pool.install(|| cells.par_iter().copied().map(cell).collect())
    } else {
        cells.into_iter().map(cell).collect()
    };
    let mut best = estimates[0].0;
    let mut best_value = estimates[0].1.log_marginal;
    for (gamma, est) in &estimates[1..] {
        if est.log_marginal > best_value {
            best = *gamma;
            best_value = est.log_marginal;
        }
    }
    Ok((best, estimates))
}

fn cmd_infer(args: InferArgs) -> Result<()> {
    let loaded = read_edge_list(&args.edges)?;
    let mut network = loaded.network;
    if let Some(labels_path) = &args.labels {
        let labels = read_node_labels(labels_path, network.n_actors())?;
        network.set_labels(labels)?;
    }
    let mut hyper = args.hyper.build()?;
    let chain_config = ChainConfig {
        burn_in: args.burn_in,
        n_samples: args.n_samples,
        lag: args.lag,
        scan: args.scan,
        init: args.init,
    };
    chain_config
        .validate()
        .map_err(|e| HmmsbError::Usage(e.to_string()))?;

    let mut extra = args.hyper.manifest_extra();
    extra.push(("edges", args.edges.display().to_string()));
    extra.push(("burnin", args.burn_in.to_string()));
    extra.push(("samples", args.n_samples.to_string()));
    extra.push(("lag", args.lag.to_string()));
    extra.push(("init", format!("{:?}", args.init).to_lowercase()));
    extra.push(("min_community_size", args.min_community_size.to_string()));

    if args.grid {
        let (selected, estimates) =
            gamma_grid_search(&network, &hyper, args.grid_is_samples, args.seed, args.threads)?;
        hyper.gamma = selected;
        extra.push(("gamma_selected", selected.to_string()));
        extra.push(("grid_is_samples", args.grid_is_samples.to_string()));
        let manifest = manifest("infer", args.seed, &extra);
        let grid_path = with_suffix(&args.out, ".grid.csv");
        write_gamma_grid_csv(&grid_path, &estimates, selected, &manifest)?;
        println!("selected gamma={selected} over {} grid cells", estimates.len());
    }
    let manifest = manifest("infer", args.seed, &extra);

    let mut chain_rng = seed::unit_rng(args.seed, 1);
    let result = run_chain(network.clone(), hyper.clone(), &chain_config, &mut chain_rng)?;

    let samples_path = with_suffix(&args.out, ".samples.jsonl");
    let header = SamplesHeader::new(
        network.n_actors(),
        &hyper,
        args.seed,
        &chain_config,
        manifest.clone(),
    );
    write_samples(&samples_path, &header, &result.samples)?;

    let trace_path = with_suffix(&args.out, ".trace.csv");
    write_trace_csv(&trace_path, &result.trace, &manifest)?;

    let path_samples: Vec<PathAssignment> =
        result.samples.iter().map(|s| s.paths.clone()).collect();
    let level_samples: Vec<_> = result.samples.iter().map(|s| s.levels.clone()).collect();
    let cons = consensus(&path_samples, &level_samples);
    let merged = merge_small_communities(&cons.consensus_paths, args.min_community_size);
    let (stats, _, _) = CompatibilityStats::recount(&network, &merged, &cons.level_modes);

    let consensus_path = with_suffix(&args.out, ".consensus.json");
    let root = hierarchy_from_paths(&merged, Some((&stats, hyper.lambda1, hyper.lambda2)));
    write_hierarchy(
        &consensus_path,
        &HierarchyFile::new(&merged, root.clone(), manifest.clone()),
    )?;

    let hierarchy_dot_path = with_suffix(&args.out, ".hierarchy.dot");
    io::write_atomic(&hierarchy_dot_path, &io::hierarchy_dot(&root, &manifest))?;
    let network_dot_path = with_suffix(&args.out, ".network.dot");
    io::write_atomic(
        &network_dot_path,
        &io::network_dot(&network, &merged, Some(&cons.level_modes), &manifest),
    )?;

    let adjacency_path = with_suffix(&args.out, ".adjacency.csv");
    let permutation_path = with_suffix(&args.out, ".permutation.csv");
    write_permuted_adjacency(&adjacency_path, &permutation_path, &network, &merged, &manifest)?;

    let last_ll = result.trace.last().copied().unwrap_or(f64::NAN);
    println!(
        "retained {} samples after {} iterations (final log likelihood {:.4})",
        result.samples.len(),
        result.trace.len(),
        last_ll
    );
    for path in [
        &samples_path,
        &trace_path,
        &consensus_path,
        &hierarchy_dot_path,
        &network_dot_path,
        &adjacency_path,
        &permutation_path,
    ] {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_eval_f1(args: EvalF1Args) -> Result<()> {
    let predicted_file = read_hierarchy(&args.predicted)?;
    let truth_file = read_hierarchy(&args.truth)?;
    if predicted_file.n_actors != truth_file.n_actors {
        return Err(HmmsbError::Usage(format!(
            "hierarchies cover different actor sets: {} vs {}",
            predicted_file.n_actors, truth_file.n_actors
        )));
    }
    if predicted_file.depth != truth_file.depth {
        return Err(HmmsbError::Usage(format!(
            "hierarchy depths differ: {} vs {}",
            predicted_file.depth, truth_file.depth
        )));
    }
    let predicted = hierarchy_to_paths(&predicted_file)?;
    let truth = hierarchy_to_paths(&truth_file)?;
    let report = f1_report(&predicted, &truth);
    let manifest = manifest(
        "eval-f1",
        0,
        &[
            ("predicted", args.predicted.display().to_string()),
            ("truth", args.truth.display().to_string()),
        ],
    );
    write_f1_csv(&args.out, &report, &manifest)?;
    for level in &report.per_level {
        println!(
            "level {}: precision {:.4} recall {:.4} f1 {:.4}",
            level.level, level.precision, level.recall, level.f1
        );
    }
    println!("total f1 {:.4}", report.total);
    println!("wrote {}", args.out.display());
    Ok(())
}

fn cmd_heldout(args: HeldoutArgs) -> Result<()> {
    let loaded = read_edge_list(&args.edges)?;
    let base = args.hyper.build()?;
    let config = HeldoutConfig {
        n_splits: args.splits,
        lambda_grid: HeldoutConfig::default_lambda_grid(),
        n_is_samples: args.is_samples,
        base,
    };
    let mut rng = seed::root_rng(args.seed);
    let report = heldout_protocol(&loaded.network, &config, &mut rng)?;

    let mut extra = args.hyper.manifest_extra();
    extra.push(("edges", args.edges.display().to_string()));
    extra.push(("splits", args.splits.to_string()));
    extra.push(("is_samples", args.is_samples.to_string()));
    let manifest = manifest("heldout", args.seed, &extra);
    let out_path = with_suffix(&args.out, ".heldout.csv");
    write_heldout_csv(&out_path, &report, &manifest)?;

    for (s, split) in report.splits.iter().enumerate() {
        println!(
            "split {}: selected lambda=({}, {}), test log marginal {:.4}",
            s + 1,
            split.selected.0,
            split.selected.1,
            split.test_estimate.log_marginal
        );
    }
    println!("mean test log marginal {:.4}", report.mean_test_log_marginal);
    println!("wrote {}", out_path.display());
    Ok(())
}

fn cmd_export_dot(args: ExportDotArgs) -> Result<()> {
    let hierarchy = read_hierarchy(&args.hierarchy)?;
    let manifest = manifest(
        "export-dot",
        0,
        &[("hierarchy", args.hierarchy.display().to_string())],
    );
    let hierarchy_dot_path = with_suffix(&args.out, ".hierarchy.dot");
    io::write_atomic(
        &hierarchy_dot_path,
        &io::hierarchy_dot(&hierarchy.root, &manifest),
    )?;
    println!("wrote {}", hierarchy_dot_path.display());

    if let Some(edges) = &args.edges {
        let loaded = read_edge_list(edges)?;
        if loaded.network.n_actors() != hierarchy.n_actors {
            return Err(HmmsbError::Usage(format!(
                "edge list has {} actors but the hierarchy covers {}",
                loaded.network.n_actors(),
                hierarchy.n_actors
            )));
        }
        let paths = hierarchy_to_paths(&hierarchy)?;
        let levels = match &args.samples {
            Some(samples_path) => {
                let (header, samples) = read_samples(samples_path)?;
                if header.n_actors != hierarchy.n_actors {
                    return Err(HmmsbError::Usage(format!(
                        "samples file covers {} actors but the hierarchy covers {}",
                        header.n_actors, hierarchy.n_actors
                    )));
                }
                let level_samples: Vec<_> = samples.into_iter().map(|s| s.levels).collect();
                if level_samples.is_empty() {
                    None
                } else {
                    Some(mode_levels(&level_samples))
                }
            }
            None => None,
        };
        let network_dot_path = with_suffix(&args.out, ".network.dot");
        io::write_atomic(
            &network_dot_path,
            &io::network_dot(&loaded.network, &paths, levels.as_ref(), &manifest),
        )?;
        println!("wrote {}", network_dot_path.display());
    }
    Ok(())
}

fn cmd_recount_check(args: RecountCheckArgs) -> Result<()> {
    let loaded = read_edge_list(&args.edges)?;
    let network = loaded.network;
    let (header, samples) = read_samples(&args.samples)?;
    if header.n_actors != network.n_actors() {
        return Err(HmmsbError::MalformedFile {
            path: args.samples.clone(),
            message: format!(
                "samples cover {} actors but the edge list has {}",
                header.n_actors,
                network.n_actors()
            ),
        });
    }
    let fault = |msg: String| HmmsbError::from(Fault(msg));
    for sample in &samples {
        let (_, _, incompatible_ones) =
            CompatibilityStats::recount(&network, &sample.paths, &sample.levels);
        if incompatible_ones > 0 {
            return Err(fault(format!(
                "iteration {}: {} edges sit on structurally incompatible pairs",
                sample.iteration, incompatible_ones
            )));
        }
        let parts =
            complete_log_likelihood_parts(&network, &sample.paths, &sample.levels, &header.hyper);
        let recomputed = parts.total();
        let stored = sample.log_likelihood;
        if !recomputed.is_finite()
            || (recomputed - stored).abs() > 1e-6 * stored.abs().max(1.0)
        {
            return Err(fault(format!(
                "iteration {}: stored log likelihood {stored} but recount gives {recomputed}",
                sample.iteration
            )));
        }
        crate::gibbs::SamplerState::from_parts(
            network.clone(),
            sample.paths.clone(),
            sample.levels.clone(),
            header.hyper.clone(),
        )
        .map_err(|e| fault(format!("iteration {}: {e}", sample.iteration)))?;
    }
    println!("ok: {} samples verified against recounted statistics", samples.len());
    Ok(())
}
