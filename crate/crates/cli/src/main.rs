use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lightset::experiment::{SuiteConfig, SuiteFamily, DEFAULT_CELL_TIMEOUT_SECS, DEFAULT_EPS_GRID};
use lightset::graph::{generate_family, Family, FamilySpec};
use lightset::io::{graph_to_json, read_graph};
use lightset::report::{report_to_csv, report_to_json};
use lightset::sampling::sampling_experiment;
use lightset::selection::{barrier_greedy, default_step_budget, select_light_set, PipelineOptions, Policy, DEFAULT_C_LEV};
use lightset::spectral::{is_epsilon_light, leverage_profile, SpectralContext};
use lightset::{run_suite, Error};

const THREADS_ENV: &str = "LIGHTSET_THREADS";

#[derive(Parser)]
#[command(name = "lightset", version, about = "Epsilon-light vertex subsets of weighted graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark graph as JSON.
    Gen(GenArgs),
    /// Per-edge leverage scores of a graph.
    Leverage(LeverageArgs),
    /// Test whether a vertex set is ε-light.
    LightCheck(LightCheckArgs),
    /// Run the selection pipeline and emit the step trace.
    Greedy(GreedyArgs),
    /// Bernoulli sampling baseline at p = ε.
    Sample(SampleArgs),
    /// Sweep the pipeline over families, sizes and ε values.
    Suite(SuiteArgs),
}

#[derive(Args)]
struct GenArgs {
    /// complete, cycle, barbell, disjoint-cliques, erdos-renyi, complete-bipartite, path, grid
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: Option<usize>,
    /// Edge probability for erdos-renyi.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Side sizes for complete-bipartite.
    #[arg(long)]
    a: Option<usize>,
    #[arg(long)]
    b: Option<usize>,
    /// Grid dimensions.
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    weight: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LeverageArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LightCheckArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Comma-separated vertex ids.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    set: Vec<usize>,
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GreedyArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value = "min-norm")]
    policy: Policy,
    /// Step budget; defaults to ⌊ε·|candidates|/3⌋.
    #[arg(long)]
    steps: Option<usize>,
    /// Skip the leverage-degree filter.
    #[arg(long)]
    no_filter: bool,
    #[arg(long, default_value_t = DEFAULT_C_LEV)]
    c_lev: f64,
    /// Use every vertex as a candidate instead of the pruned pipeline set.
    #[arg(long)]
    all_candidates: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 500)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    /// Repeatable; defaults to complete, cycle, barbell, disjoint-cliques, erdos-renyi:0.5.
    #[arg(long)]
    family: Vec<SuiteFamily>,
    /// Sizes as `lo..hi` (inclusive) or a comma list.
    #[arg(long, default_value = "8..64")]
    n: String,
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,
    #[arg(long, default_value = "min-norm")]
    policy: Policy,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    no_filter: bool,
    #[arg(long, default_value_t = DEFAULT_C_LEV)]
    c_lev: f64,
    #[arg(long)]
    steps: Option<usize>,
    /// Per-cell time limit in seconds.
    #[arg(long, default_value_t = DEFAULT_CELL_TIMEOUT_SECS)]
    timeout: f64,
    /// JSON report path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV report path.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn parse_sizes(spec: &str) -> Result<Vec<usize>, Error> {
    let bad = || Error::InvalidConfig(format!("cannot parse sizes `{spec}`"));
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim_start_matches('=').trim().parse().map_err(|_| bad())?;
        return Ok((lo..=hi).collect());
    }
    spec.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn gen(args: GenArgs) -> Result<(), Error> {
    let need = |v: Option<usize>, name: &str| {
        v.ok_or_else(|| Error::InvalidFamilyParams(format!("--{name} is required for {}", args.family)))
    };
    let family = match args.family.as_str() {
        "complete" => Family::Complete { n: need(args.n, "n")? },
        "cycle" => Family::Cycle { n: need(args.n, "n")? },
        "barbell" => Family::Barbell { n: need(args.n, "n")? },
        "disjoint-cliques" => Family::DisjointCliques { n: need(args.n, "n")? },
        "erdos-renyi" => Family::ErdosRenyi { n: need(args.n, "n")?, p: args.p },
        "path" => Family::Path { n: need(args.n, "n")? },
        "complete-bipartite" => Family::CompleteBipartite { a: need(args.a, "a")?, b: need(args.b, "b")? },
        "grid" => Family::Grid { rows: need(args.rows, "rows")?, cols: need(args.cols, "cols")? },
        other => return Err(Error::InvalidFamilyParams(format!("unknown family `{other}`"))),
    };
    let g = generate_family(&FamilySpec::new(family).with_seed(args.seed).with_weight(args.weight))?;
    emit(&graph_to_json(&g), args.out.as_deref())
}

fn leverage(args: LeverageArgs) -> Result<(), Error> {
    let ctx = SpectralContext::new(&read_graph(&args.graph)?)?;
    let profile = leverage_profile(&ctx);
    emit(&to_json(&profile.entries), args.out.as_deref())
}

fn light_check(args: LightCheckArgs) -> Result<(), Error> {
    let ctx = SpectralContext::new(&read_graph(&args.graph)?)?;
    let verdict = is_epsilon_light(&ctx, &args.set, args.eps)?;
    emit(&to_json(&verdict), args.out.as_deref())
}

fn greedy(args: GreedyArgs) -> Result<(), Error> {
    let ctx = SpectralContext::new(&read_graph(&args.graph)?)?;
    let trace = if args.all_candidates {
        let all: Vec<usize> = (0..ctx.n()).collect();
        let budget = args.steps.unwrap_or_else(|| default_step_budget(args.eps, all.len()));
        barrier_greedy(&ctx, args.eps, &all, budget, args.policy)?
    } else {
        let opts = PipelineOptions {
            policy: args.policy,
            apply_filter: !args.no_filter,
            c_lev: args.c_lev,
            step_budget: args.steps,
        };
        select_light_set(&ctx, args.eps, &opts)?.trace
    };
    emit(&to_json(&trace), args.out.as_deref())
}

fn sample(args: SampleArgs) -> Result<(), Error> {
    let ctx = SpectralContext::new(&read_graph(&args.graph)?)?;
    let outcome = sampling_experiment(&ctx, args.eps, args.trials, args.seed)?;
    emit(&to_json(&outcome), args.out.as_deref())
}

/// Returns whether any cell failed.
fn suite(args: SuiteArgs) -> Result<bool, Error> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => Some(
            v.parse::<usize>()
                .map_err(|_| Error::InvalidConfig(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?,
        ),
        Err(_) => None,
    };
    let config = SuiteConfig {
        families: if args.family.is_empty() { SuiteFamily::standard() } else { args.family },
        n_values: parse_sizes(&args.n)?,
        eps_values: if args.eps.is_empty() { DEFAULT_EPS_GRID.to_vec() } else { args.eps },
        policy: args.policy,
        master_seed: args.seed,
        apply_filter: !args.no_filter,
        c_lev: args.c_lev,
        step_budget: args.steps,
        cell_timeout_secs: args.timeout,
        threads,
    };
    let report = run_suite(&config)?;
    if let Some(path) = &args.csv {
        fs::write(path, report_to_csv(&report)?)?;
    }
    match &args.out {
        Some(path) => fs::write(path, report_to_json(&report))?,
        None if args.csv.is_none() => print!("{}", report_to_csv(&report)?),
        None => {}
    }
    let s = &report.summary;
    eprintln!(
        "cells={} failed={} timed_out={} nontrivial_steps={} violations={} max_dbar={}",
        s.cells,
        s.failed_cells,
        s.timed_out_cells,
        s.nontrivial_steps,
        s.violations,
        s.max_dbar
            .as_ref()
            .map(|m| format!("{:.6} ({} n={} eps={} t={})", m.value, m.family, m.n, m.eps, m.t))
            .unwrap_or_else(|| "-".into()),
    );
    Ok(report.has_failures())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a).map(|_| false),
        Command::Leverage(a) => leverage(a).map(|_| false),
        Command::LightCheck(a) => light_check(a).map(|_| false),
        Command::Greedy(a) => greedy(a).map(|_| false),
        Command::Sample(a) => sample(a).map(|_| false),
        Command::Suite(a) => suite(a),
    };
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}
