use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use snapnet::analytics::{betweenness, degree_histogram, topology_report, DegreeHistogram, Direction};
use snapnet::attacks::{run_sweep, AttackDegree, AttackPlan, AttackStrategy};
use snapnet::config::{parse_grid, ExperimentConfig};
use snapnet::controllability::{
    driver_count, state_driver_placement, structural_driver_nodes, ControlKind, StateMode,
};
use snapnet::edgelist::{read_edge_list, write_edge_list};
use snapnet::generators::{parse_int_set, DegreeConvention, GenerationSpec, ModelKind};
use snapnet::motifs::motif_census;
use snapnet::reproduce::{default_runs, reproduce, Figure, ReproduceOptions};
use snapnet::DirectedGraph;

#[derive(Parser)]
#[command(name = "snapnet", version, about = "q-snapback networks, controllability and attack robustness")]
struct Cli {
    /// Worker threads for sweeps and metrics. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Progress messages on stderr (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph and write it as an edge list.
    Generate {
        #[command(flatten)]
        model: ModelArgs,
        /// Output file; falls back to the config's `output`, then stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Degree histograms, topology report and betweenness leaders of a graph.
    Measure {
        /// Edge-list file.
        input: PathBuf,
        /// JSON report file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Writes `<prefix>_out.csv` and `<prefix>_in.csv` degree histograms.
        #[arg(long)]
        histograms: Option<PathBuf>,
        /// Number of nodes and edges listed by betweenness.
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
    /// Driver-node count of a graph.
    Controllability {
        /// Edge-list file.
        input: PathBuf,
        #[arg(long, value_parser = parse_kind)]
        kind: ControlKind,
        #[arg(long, value_parser = parse_state_mode, default_value = "zero")]
        state_mode: StateMode,
        /// Also list the driver nodes (1-based).
        #[arg(long)]
        nodes: bool,
    },
    /// Robustness curve of a generated model under an attack strategy.
    Attack {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_parser = parse_strategy)]
        strategy: Option<AttackStrategy>,
        #[arg(long, value_parser = parse_kind)]
        ctrl: Option<ControlKind>,
        #[arg(long, value_parser = parse_state_mode)]
        state_mode: Option<StateMode>,
        /// Independent instance-runs averaged per point.
        #[arg(long)]
        runs: Option<usize>,
        /// `default` or comma-separated removal fractions.
        #[arg(long)]
        grid: Option<String>,
        /// Seed of the attack streams; defaults to `--seed`.
        #[arg(long)]
        attack_seed: Option<u64>,
        /// Degree used by the degree-targeted attack.
        #[arg(long, value_parser = parse_attack_degree)]
        degree: Option<AttackDegree>,
        /// CSV file, else the config's `output`, else stdout. A `.json`
        /// sidecar is written next to a file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// 4-node motif census of a graph.
    Motifs {
        /// Edge-list file.
        input: PathBuf,
        /// CSV file (stdout if omitted); a `.json` sidecar is written next to it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the preconfigured experiment bundle of a figure.
    Reproduce {
        #[arg(value_parser = parse_figure)]
        figure: Figure,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Use the larger network sizes.
        #[arg(long)]
        large: bool,
        /// Overrides the run count of every curve.
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long, value_parser = parse_state_mode, default_value = "zero")]
        state_mode: StateMode,
    },
}

#[derive(Args)]
struct ModelArgs {
    /// key = value experiment file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_model)]
    model: Option<ModelKind>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    q: Option<f64>,
    /// `all`, or integers and ranges such as `1,2,5-9`.
    #[arg(long, value_parser = parse_set)]
    layers: Option<Option<Vec<usize>>>,
    #[arg(long, value_parser = parse_set)]
    remainders: Option<Option<Vec<usize>>>,
    /// Target average degree.
    #[arg(long)]
    target_k: Option<f64>,
    #[arg(long, value_parser = parse_convention)]
    convention: Option<DegreeConvention>,
    /// Let modulus 1 act as an MCN source.
    #[arg(long)]
    mcn_unit_modulus: bool,
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_model(s: &str) -> Result<ModelKind, snapnet::Error> {
    s.parse()
}
fn parse_kind(s: &str) -> Result<ControlKind, snapnet::Error> {
    s.parse()
}
fn parse_state_mode(s: &str) -> Result<StateMode, snapnet::Error> {
    s.parse()
}
fn parse_strategy(s: &str) -> Result<AttackStrategy, snapnet::Error> {
    s.parse()
}
fn parse_attack_degree(s: &str) -> Result<AttackDegree, snapnet::Error> {
    s.parse()
}
fn parse_convention(s: &str) -> Result<DegreeConvention, snapnet::Error> {
    s.parse()
}
fn parse_figure(s: &str) -> Result<Figure, snapnet::Error> {
    s.parse()
}
fn parse_set(s: &str) -> Result<Option<Vec<usize>>, snapnet::Error> {
    parse_int_set(s)
}

enum Failure {
    Usage(ErrorKind, String),
    Run(snapnet::Error),
}

impl From<snapnet::Error> for Failure {
    fn from(e: snapnet::Error) -> Self {
        Failure::Run(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Run(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Run(e.into())
    }
}

fn usage(kind: ErrorKind, msg: impl Into<String>) -> Failure {
    Failure::Usage(kind, msg.into())
}

type Outcome<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(kind, msg)) => Cli::command().error(kind, msg).exit(),
        Err(Failure::Run(e)) => {
            let message = e.to_string().replace('\n', " ");
            eprintln!("error: kind={} message={}", e.kind(), message);
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Outcome<()> {
    if cli.jobs == 0 {
        return Err(usage(ErrorKind::ValueValidation, "--jobs must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build_global()
        .map_err(|e| usage(ErrorKind::ValueValidation, e.to_string()))?;
    let verbose = cli.verbose;
    match cli.command {
        Command::Generate { model, out } => generate(model, out, verbose),
        Command::Measure { input, out, histograms, top } => measure(&input, out, histograms, top),
        Command::Controllability { input, kind, state_mode, nodes } => controllability(&input, kind, state_mode, nodes),
        Command::Attack { model, strategy, ctrl, state_mode, runs, grid, attack_seed, degree, out } => {
            let overrides = PlanArgs { strategy, ctrl, state_mode, runs, grid, attack_seed, degree };
            attack(model, overrides, out, verbose)
        }
        Command::Motifs { input, out } => motifs(&input, out),
        Command::Reproduce { figure, out_dir, seed, large, runs, state_mode } => {
            let seed = seed.ok_or_else(|| {
                usage(ErrorKind::MissingRequiredArgument, "reproduce runs stochastic experiments and needs --seed")
            })?;
            let mut opts = ReproduceOptions::new(seed);
            opts.large = large;
            opts.runs = runs;
            opts.state_mode = state_mode;
            if verbose > 0 {
                eprintln!("reproducing {figure} into {}", out_dir.display());
            }
            let manifest = reproduce(figure, &opts, &out_dir)?;
            if verbose > 0 {
                eprintln!("wrote {} artifacts", manifest.artifacts.len());
            }
            Ok(())
        }
    }
}

/// Reads a config file, returning it together with whether it sets `seed`.
fn load_config(path: &Path) -> Outcome<(ExperimentConfig, bool)> {
    let text = fs::read_to_string(path)?;
    let config = ExperimentConfig::parse(&text)?;
    let has_seed = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.starts_with('#'))
        .any(|l| l.split_once('=').is_some_and(|(k, _)| k.trim() == "seed"));
    Ok((config, has_seed))
}

/// Builds the experiment from the config file and flags. Returns the config
/// and whether a seed was supplied either way.
fn experiment(args: &ModelArgs) -> Outcome<(ExperimentConfig, bool)> {
    let (mut config, mut seeded) = match &args.config {
        Some(path) => load_config(path)?,
        None => {
            let model = args
                .model
                .ok_or_else(|| usage(ErrorKind::MissingRequiredArgument, "--model is required without --config"))?;
            let n = args
                .n
                .ok_or_else(|| usage(ErrorKind::MissingRequiredArgument, "--n is required without --config"))?;
            (ExperimentConfig::new(GenerationSpec::new(model, n)), false)
        }
    };
    let g = &mut config.generation;
    if let Some(m) = args.model {
        g.model = m;
    }
    if let Some(n) = args.n {
        g.n = n;
    }
    if args.q.is_some() {
        g.q = args.q;
    }
    if let Some(l) = &args.layers {
        g.layers = l.clone();
    }
    if let Some(r) = &args.remainders {
        g.remainders = r
            .clone()
            .ok_or_else(|| usage(ErrorKind::ValueValidation, "--remainders cannot be \"all\""))?;
    }
    if args.target_k.is_some() {
        g.target_avg_degree = args.target_k;
    }
    if let Some(c) = args.convention {
        g.convention = c;
    }
    if args.mcn_unit_modulus {
        g.mcn_unit_modulus = true;
    }
    if let Some(s) = args.seed {
        g.seed = s;
        seeded = true;
    }
    g.validate()?;
    Ok((config, seeded))
}

fn require_seed(seeded: bool, what: &str) -> Outcome<()> {
    if seeded {
        Ok(())
    } else {
        Err(usage(ErrorKind::MissingRequiredArgument, format!("{what} is stochastic and needs --seed")))
    }
}

/// File writer, or stdout when no path is given.
fn sink(path: Option<&Path>) -> Outcome<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(path: Option<&Path>, text: &str) -> Outcome<()> {
    let mut w = sink(path)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

fn sidecar(path: &Path, value: &impl Serialize) -> Outcome<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path.with_extension("json"), text)?;
    Ok(())
}

fn read_graph(path: &Path) -> Outcome<DirectedGraph> {
    let (g, _) = read_edge_list(BufReader::new(File::open(path)?))?;
    Ok(g)
}

fn generate(args: ModelArgs, out: Option<PathBuf>, verbose: u8) -> Outcome<()> {
    let (mut config, seeded) = experiment(&args)?;
    let out = out.or(config.output.as_ref().map(PathBuf::from));
    let spec = config.generation.clone();
    if spec.model.is_stochastic() {
        require_seed(seeded, &format!("model {}", spec.model))?;
    }
    let resolved = spec.resolve()?;
    let g = spec.generate()?;
    if verbose > 0 {
        eprintln!("generated {} nodes, {} edges", g.node_count(), g.edge_count());
    }
    // The header carries the resolved spec, so the file regenerates itself.
    config.generation = resolved;
    config.plan = None;
    config.output = None;
    let comments: Vec<String> = config.to_text().lines().map(str::to_string).collect();
    write_edge_list(&g, &comments, sink(out.as_deref())?)?;
    Ok(())
}

fn counts(h: &DegreeHistogram) -> std::collections::BTreeMap<usize, u64> {
    h.counts.iter().map(|(&d, &c)| (d, c as u64)).collect()
}

fn measure(input: &Path, out: Option<PathBuf>, histograms: Option<PathBuf>, top: usize) -> Outcome<()> {
    let g = read_graph(input)?;
    let out_h = degree_histogram(&g, Direction::Out);
    let in_h = degree_histogram(&g, Direction::In);
    let scores = betweenness(&g);
    let top_nodes: Vec<_> = scores
        .top_nodes(top)
        .into_iter()
        .map(|(u, s)| json!({ "node": u + 1, "score": s }))
        .collect();
    let top_edges: Vec<_> = scores
        .top_edges(top)
        .into_iter()
        .map(|((u, v), s)| json!({ "edge": [u + 1, v + 1], "score": s }))
        .collect();
    let report = json!({
        "input": input.display().to_string(),
        "nodes": g.node_count(),
        "active_nodes": g.active_node_count(),
        "edges": g.edge_count(),
        "out_degree_histogram": counts(&out_h),
        "in_degree_histogram": counts(&in_h),
        "topology": topology_report(&g),
        "betweenness": { "top_nodes": top_nodes, "top_edges": top_edges },
    });
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    emit(out.as_deref(), &text)?;
    if let Some(prefix) = histograms {
        let name = prefix.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        emit(Some(&prefix.with_file_name(format!("{name}_out.csv"))), &out_h.to_csv())?;
        emit(Some(&prefix.with_file_name(format!("{name}_in.csv"))), &in_h.to_csv())?;
    }
    Ok(())
}

fn controllability(input: &Path, kind: ControlKind, mode: StateMode, nodes: bool) -> Outcome<()> {
    let g = read_graph(input)?;
    let count = driver_count(&g, kind, mode)?;
    let mut value = serde_json::to_value(count)?;
    if kind == ControlKind::State {
        value["state_mode"] = json!(mode.name());
    }
    if nodes {
        let drivers = match kind {
            ControlKind::Structural => structural_driver_nodes(&g)?,
            ControlKind::State => state_driver_placement(&g, mode)?.driver_nodes(),
        };
        value["driver_nodes"] = json!(drivers.into_iter().map(|u| u + 1).collect::<Vec<_>>());
    }
    emit(None, &format!("{value}\n"))
}

struct PlanArgs {
    strategy: Option<AttackStrategy>,
    ctrl: Option<ControlKind>,
    state_mode: Option<StateMode>,
    runs: Option<usize>,
    grid: Option<String>,
    attack_seed: Option<u64>,
    degree: Option<AttackDegree>,
}

fn attack(args: ModelArgs, o: PlanArgs, out: Option<PathBuf>, verbose: u8) -> Outcome<()> {
    let (mut config, seeded) = experiment(&args)?;
    let out = out.or(config.output.as_ref().map(PathBuf::from));
    let from_file = config.plan.take();
    let strategy = o
        .strategy
        .or(from_file.as_ref().map(|p| p.strategy))
        .ok_or_else(|| usage(ErrorKind::MissingRequiredArgument, "attack needs --strategy"))?;
    // Tie-breaks among equal scores are random, so every attack is stochastic.
    require_seed(seeded, &format!("attack {}", strategy.name()))?;
    let seed = config.generation.seed;
    let mut plan = from_file.unwrap_or_else(|| {
        AttackPlan::new(strategy, ControlKind::Structural, default_runs(strategy), o.attack_seed.unwrap_or(seed))
    });
    plan.strategy = strategy;
    if let Some(k) = o.ctrl {
        plan.kind = k;
    }
    if let Some(m) = o.state_mode {
        plan.state_mode = m;
    }
    if let Some(r) = o.runs {
        plan.runs = r;
    }
    if let Some(g) = &o.grid {
        plan.fractions = parse_grid(g)?;
    }
    if let Some(s) = o.attack_seed {
        plan.seed = s;
    }
    if let Some(d) = o.degree {
        plan.degree = d;
    }
    plan.validate()?;
    if verbose > 0 {
        eprintln!("running {} x {} on {}", plan.runs, strategy.name(), config.generation.model);
    }
    let curve = run_sweep(&config.generation, &plan)?;
    emit(out.as_deref(), &curve.to_csv())?;
    if let Some(path) = &out {
        config.plan = Some(plan);
        config.output = Some(path.display().to_string());
        let meta = json!({
            "config": config.to_text(),
            "generation": config.generation,
            "resolved_q": curve.spec.q,
            "plan": curve.plan,
            "runs": curve.runs,
            "points": curve.points.len(),
        });
        sidecar(path, &meta)?;
    }
    Ok(())
}

fn motifs(input: &Path, out: Option<PathBuf>) -> Outcome<()> {
    let g = read_graph(input)?;
    let census = motif_census(&g);
    emit(out.as_deref(), &census.to_csv())?;
    if let Some(path) = &out {
        let meta = json!({
            "input": input.display().to_string(),
            "nodes": g.node_count(),
            "edges": g.edge_count(),
            "total_enumerated": census.total_enumerated,
            "named_classes": census.named_classes,
            "semantics": "induced, weakly connected 4-node subgraphs",
        });
        sidecar(path, &meta)?;
    }
    Ok(())
}
