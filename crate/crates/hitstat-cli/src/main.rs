//! Command-line front end: exact pair analysis, corpus verification,
//! instance generation, distribution and growth-table exports, and seeded
//! simulation.
//!
//! Exit codes: 0 success, 1 verification or computation failure, 2 usage or
//! I/O error. Every failure also prints a machine-readable JSON object on
//! stderr. Reports are byte-stable for identical inputs and seeds.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hitstat::analysis::{profile, profile_report, Layer};
use hitstat::chain::srw_chain;
use hitstat::constructions::{
    funnel_tau_moments, growth_table_json, growth_table_tsv, interval_growth_table,
    ConstructionError,
};
use hitstat::graph::{self, parse_graph, serialize_graph, Graph, GraphError};
use hitstat::linear::{
    distribution_to_tsv, hitting_distribution, hitting_mean, hitting_second_moment,
};
use hitstat::montecarlo::{estimate, estimate_report, SimError};
use hitstat::suite::{outcome_json, run_suite, SuiteConfig, SuiteKind};

/// Largest funnel graph the `--exact-graph` cross-check will materialize.
const EXACT_GRAPH_CAP: usize = 100_000;
/// Relative tolerance for the funnel closed-form vs exact-solve cross-check.
const CROSS_CHECK_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "hitstat",
    version,
    about = "Exact hitting-time analysis for random walks on finite graphs and reversible chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one source/target pair exactly and print a profile report.
    Analyze(AnalyzeArgs),
    /// Run a verification suite over the built-in corpus.
    Verify(VerifyArgs),
    /// Generate a named family instance and write its edge list.
    Construct(ConstructArgs),
    /// Export the exact hitting-time distribution as plot-ready TSV.
    Distribution(DistributionArgs),
    /// Interval-concentration growth table over the comb family.
    Interval(IntervalArgs),
    /// Closed-form funnel moments, optionally cross-checked on the graph.
    Funnel(FunnelArgs),
    /// Seeded Monte Carlo estimate of the hitting-time moments.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Edge-list graph file.
    #[arg(long)]
    graph: PathBuf,
    /// Start vertex id.
    #[arg(long)]
    source: usize,
    /// Target vertex id.
    #[arg(long)]
    target: usize,
    /// Voltage normalization: by degree (graph) or by pi (chain).
    #[arg(long, value_enum, default_value = "graph")]
    layer: LayerArg,
    /// Embed the per-state and per-edge tables in the report.
    #[arg(long)]
    full: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which suite to run.
    #[arg(long, value_enum)]
    suite: SuiteArg,
    /// Largest instance size admitted to the corpus.
    #[arg(long, default_value_t = 500)]
    max_n: usize,
    /// Seed for the randomized corpus instances.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Report format.
    #[arg(long, value_enum, default_value = "tsv")]
    format: Format,
    /// Overrides the slack floor of every bound check (test hook).
    #[arg(long, hide = true, allow_negative_numbers = true)]
    slack_floor: Option<f64>,
    /// Caps the funnel sizes exercised by the lumping suite (test hook).
    #[arg(long, hide = true)]
    lumping_cap: Option<usize>,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(subcommand)]
    family: Family,
    /// Output edge-list file; stdout when omitted.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Family {
    /// Path with `len` edges on `len + 1` vertices labeled end to end.
    Path {
        #[arg(long)]
        len: usize,
    },
    /// Complete graph on `n` vertices.
    Complete {
        #[arg(long)]
        n: usize,
    },
    /// Star on `n` vertices: center 0, leaves 1..n.
    Star {
        #[arg(long)]
        n: usize,
    },
    /// Complete `branching`-ary rooted tree, breadth-first labels, root 0.
    BaryTree {
        #[arg(long)]
        branching: usize,
        #[arg(long)]
        depth: usize,
    },
    /// B-ary tree of the given depth with all deepest leaves joined to one
    /// extra vertex; root 0 is the canonical source, the extra vertex (last
    /// id) the canonical target.
    Funnel {
        #[arg(long)]
        levels: usize,
        #[arg(long)]
        branching: usize,
    },
    /// Spine 0..=m with a depth-j binary tree hanging at spine vertex j.
    Comb {
        #[arg(long)]
        teeth: usize,
    },
    /// Uniform random labeled tree on `n` vertices.
    RandomTree {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Erdos-Renyi graph conditioned on connectivity by retry.
    RandomConnected {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        edge_prob: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct DistributionArgs {
    /// Edge-list graph file.
    #[arg(long)]
    graph: PathBuf,
    /// Start vertex id.
    #[arg(long)]
    source: usize,
    /// Target vertex id.
    #[arg(long)]
    target: usize,
    /// Truncate once the surviving mass drops below this.
    #[arg(long, default_value_t = 1e-9)]
    tail: f64,
    /// Output TSV file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct IntervalArgs {
    /// Comb sizes to scan, as `LO:HI` (e.g. `5:10`).
    #[arg(long)]
    comb_range: String,
    /// Report format.
    #[arg(long, value_enum, default_value = "tsv")]
    format: Format,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct FunnelArgs {
    /// Tree depth L (the shortest hitting path has L + 1 steps).
    #[arg(long)]
    levels: usize,
    /// Branching factor B.
    #[arg(long)]
    branching: u64,
    /// Cross-check the closed forms against an exact solve on the graph
    /// when it has at most 100000 vertices.
    #[arg(long)]
    exact_graph: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Edge-list graph file.
    #[arg(long)]
    graph: PathBuf,
    /// Start vertex id.
    #[arg(long)]
    source: usize,
    /// Target vertex id.
    #[arg(long)]
    target: usize,
    /// Number of independent walks (at least 100).
    #[arg(long)]
    samples: usize,
    /// PRNG seed (ChaCha8, one stream per sample block).
    #[arg(long)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum LayerArg {
    Graph,
    Chain,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Identities,
    Bounds,
    Lumping,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

enum CliError {
    Usage(String),
    Computation(String),
}

impl CliError {
    fn class(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Computation(_) => "computation",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Computation(m) => m,
        }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Computation(_) => 1,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn failure(msg: impl Into<String>) -> CliError {
    CliError::Computation(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let report = serde_json::json!({
                "schema": "hitstat/error-v1",
                "class": e.class(),
                "error": e.message(),
            });
            eprintln!("{report}");
            ExitCode::from(e.code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Analyze(args) => run_analyze(args),
        Command::Verify(args) => run_verify(args),
        Command::Construct(args) => run_construct(args),
        Command::Distribution(args) => run_distribution(args),
        Command::Interval(args) => run_interval(args),
        Command::Funnel(args) => run_funnel(args),
        Command::Simulate(args) => run_simulate(args),
    }
}

fn run_analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    let g = load_graph(&args.graph)?;
    check_state(args.source, g.vertex_count(), "--source")?;
    check_state(args.target, g.vertex_count(), "--target")?;
    let chain = srw_chain(&g);
    let layer = match args.layer {
        LayerArg::Graph => Layer::Graph,
        LayerArg::Chain => Layer::Chain,
    };
    let p = profile(&chain, args.source, args.target, layer)
        .map_err(|e| failure(e.to_string()))?;
    let mut report = profile_report(&p);
    if !args.full {
        let obj = report.as_object_mut().expect("profile report is an object");
        for key in ["hit_mean", "hit_second", "occupation", "voltage", "edges", "degrees"] {
            obj.remove(key);
        }
    }
    print_out(&format!("{}\n", pretty(&report)))
}

fn run_verify(args: VerifyArgs) -> Result<(), CliError> {
    let mut config = SuiteConfig {
        max_n: args.max_n,
        seed: args.seed,
        ..SuiteConfig::default()
    };
    if let Some(floor) = args.slack_floor {
        config.slack_floor = floor;
    }
    if let Some(cap) = args.lumping_cap {
        config.lumping_cap = cap;
    }
    let kind = match args.suite {
        SuiteArg::Identities => SuiteKind::Identities,
        SuiteArg::Bounds => SuiteKind::Bounds,
        SuiteArg::Lumping => SuiteKind::Lumping,
        SuiteArg::All => SuiteKind::All,
    };
    let outcome = run_suite(kind, &config).map_err(|e| failure(e.to_string()))?;
    match args.format {
        Format::Tsv => print_out(&outcome.to_tsv())?,
        Format::Json => print_out(&format!("{}\n", pretty(&outcome_json(&outcome))))?,
    }
    if outcome.failures > 0 {
        return Err(failure(format!(
            "{} of {} checks failed in the {} suite",
            outcome.failures, outcome.checks, outcome.suite
        )));
    }
    Ok(())
}

fn run_construct(args: ConstructArgs) -> Result<(), CliError> {
    let g = build_family(&args.family).map_err(|e| usage(e.to_string()))?;
    emit(args.output.as_deref(), &serialize_graph(&g))
}

fn build_family(family: &Family) -> Result<Graph, GraphError> {
    match *family {
        Family::Path { len } => graph::path(len),
        Family::Complete { n } => graph::complete(n),
        Family::Star { n } => graph::star(n),
        Family::BaryTree { branching, depth } => graph::bary_tree(branching, depth),
        Family::Funnel { levels, branching } => graph::funnel(levels, branching),
        Family::Comb { teeth } => graph::comb(teeth),
        Family::RandomTree { n, seed } => graph::random_tree(n, seed),
        Family::RandomConnected { n, edge_prob, seed } => {
            graph::random_connected(n, edge_prob, seed)
        }
    }
}

fn run_distribution(args: DistributionArgs) -> Result<(), CliError> {
    if !(args.tail > 0.0 && args.tail < 1.0) {
        return Err(usage(format!("--tail must lie in (0, 1), got {}", args.tail)));
    }
    let g = load_graph(&args.graph)?;
    check_state(args.source, g.vertex_count(), "--source")?;
    check_state(args.target, g.vertex_count(), "--target")?;
    let chain = srw_chain(&g);
    let table = hitting_distribution(&chain, args.source, args.target, args.tail)
        .map_err(|e| failure(e.to_string()))?;
    emit(args.output.as_deref(), &distribution_to_tsv(&table))
}

fn run_interval(args: IntervalArgs) -> Result<(), CliError> {
    let (lo, hi) = parse_comb_range(&args.comb_range)?;
    let rows = interval_growth_table(lo, hi).map_err(|e| failure(e.to_string()))?;
    let text = match args.format {
        Format::Tsv => growth_table_tsv(&rows),
        Format::Json => format!("{}\n", pretty(&growth_table_json(&rows))),
    };
    emit(args.output.as_deref(), &text)
}

fn run_funnel(args: FunnelArgs) -> Result<(), CliError> {
    let fm = funnel_tau_moments(args.levels, args.branching).map_err(|e| match e {
        ConstructionError::ParameterOutOfRange { .. } => usage(e.to_string()),
        other => failure(other.to_string()),
    })?;
    let mut report = serde_json::to_value(fm).expect("funnel moments serialize");
    let obj = report.as_object_mut().expect("funnel report is an object");
    obj.insert("schema".into(), "hitstat/funnel-v1".into());
    obj.insert("method".into(), "closed-form".into());
    let mut gap_error = None;
    if args.exact_graph {
        let cross_check = if fm.log_vertex_count <= (EXACT_GRAPH_CAP as f64).ln() {
            let branching = usize::try_from(args.branching).expect("bounded by the graph cap");
            let g = graph::funnel(args.levels, branching).map_err(|e| failure(e.to_string()))?;
            let chain = srw_chain(&g);
            let n = g.vertex_count();
            let mean = hitting_mean(&chain, n - 1)
                .map_err(|e| failure(e.to_string()))?
                .values[0];
            let variance = hitting_second_moment(&chain, n - 1)
                .map_err(|e| failure(e.to_string()))?
                .variance[0];
            let table = hitting_distribution(&chain, 0, n - 1, 1e-12)
                .map_err(|e| failure(e.to_string()))?;
            let shortest = table.probs.get(args.levels + 1).copied().unwrap_or(0.0);
            let mean_gap = rel_gap(mean, fm.mean);
            let variance_gap = rel_gap(variance, fm.variance);
            let shortest_gap = (shortest - fm.shortest_path_probability).abs();
            let worst = mean_gap.max(variance_gap).max(shortest_gap);
            if worst > CROSS_CHECK_TOL {
                gap_error = Some(format!(
                    "funnel cross-check gap {worst:e} exceeds {CROSS_CHECK_TOL:e}"
                ));
            }
            serde_json::json!({
                "vertices": n,
                "mean": mean,
                "variance": variance,
                "shortest_path_probability": shortest,
                "mean_gap": mean_gap,
                "variance_gap": variance_gap,
                "shortest_path_gap": shortest_gap,
                "tolerance": CROSS_CHECK_TOL,
            })
        } else {
            serde_json::json!({
                "skipped": format!("funnel graph exceeds {EXACT_GRAPH_CAP} vertices"),
            })
        };
        obj.insert("cross_check".into(), cross_check);
    }
    print_out(&format!("{}\n", pretty(&report)))?;
    match gap_error {
        Some(msg) => Err(failure(msg)),
        None => Ok(()),
    }
}

fn run_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let g = load_graph(&args.graph)?;
    check_state(args.source, g.vertex_count(), "--source")?;
    check_state(args.target, g.vertex_count(), "--target")?;
    let chain = srw_chain(&g);
    let est = estimate(&chain, args.source, args.target, args.samples, args.seed).map_err(
        |e| match e {
            SimError::TooFewSamples { .. } => usage(e.to_string()),
            SimError::StepCapExceeded { .. } => failure(e.to_string()),
        },
    )?;
    print_out(&format!("{}\n", pretty(&estimate_report(&est))))
}

fn load_graph(path: &Path) -> Result<Graph, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    parse_graph(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn check_state(id: usize, count: usize, flag: &str) -> Result<(), CliError> {
    if id >= count {
        return Err(usage(format!("{flag} {id} out of range for {count} states")));
    }
    Ok(())
}

fn parse_comb_range(text: &str) -> Result<(usize, usize), CliError> {
    let bad = || usage(format!("--comb-range wants LO:HI with 1 <= LO <= HI, got {text:?}"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().parse().map_err(|_| bad())?;
    if lo < 1 || lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| usage(format!("cannot write {}: {e}", p.display()))),
        None => print_out(text),
    }
}

/// Writes to stdout; a broken pipe (e.g. piping into `head`) is a clean stop.
fn print_out(text: &str) -> Result<(), CliError> {
    use std::io::Write as _;
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(usage(format!("cannot write to stdout: {e}"))),
    }
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn pretty(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}
