//! `dgsp` — mine top-k sequential patterns in database graphs.
//!
//! Subcommands: `generate` (synthetic graphs), `mine` (exact or sampled
//! top-k), `eval` (ME/AP/RS between two ranked-pattern files), and `bound`
//! (sample-size bound calculators).
//!
//! Exit codes: 0 success, 2 usage/config error, 3 no length-l path exists,
//! 4 sampler rejection budget exhausted.

mod manifest;
mod schema;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use dgsp::baseline;
use dgsp::error::Error as DgspError;
use dgsp::eval as metrics;
use dgsp::gen;
use dgsp::graph::WeightMode;
use dgsp::miner::{self, MinerOptions, ScoreKind};
use dgsp::sampler::{self, SamplerOptions};

use manifest::{write_output, ManifestCore, RunManifest, Timing};
use schema::{BoundFile, BoundValue, EvalFile, MineFile};

const REJECTION_BUDGET_ENV: &str = "DGSP_REJECTION_BUDGET";

#[derive(Parser)]
#[command(
    name = "dgsp",
    version,
    about = "Top-k sequential pattern mining in database graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic database graph file.
    Generate(GenerateArgs),
    /// Mine top-k patterns, exactly or by two-step sampling.
    Mine(MineArgs),
    /// Compare a produced ranking against a ground-truth ranking.
    Eval(EvalArgs),
    /// Evaluate the sample-size bounds.
    Bound(BoundArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Number of vertices.
    #[arg(long)]
    vertices: usize,
    /// Number of directed edges.
    #[arg(long)]
    edges: usize,
    /// Database size rule: constant:N or degree-linear:BASE,SLOPE
    /// (BASE + SLOPE * out-degree transactions per vertex).
    #[arg(long)]
    db: String,
    /// Item universe size.
    #[arg(long)]
    items: usize,
    /// Target mean transaction size.
    #[arg(long = "avg-items")]
    avg_items: f64,
    /// Graph shape: random-digraph or random-dag.
    #[arg(long, default_value = "random-digraph")]
    shape: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct MineArgs {
    /// exact or sample.
    #[arg(long)]
    mode: String,
    /// Graph file to mine.
    #[arg(long)]
    graph: PathBuf,
    /// Pattern length l (l+1 itemsets per pattern).
    #[arg(short)]
    l: usize,
    /// How many patterns to return.
    #[arg(short)]
    k: usize,
    /// Sample size m (sample mode only).
    #[arg(long)]
    samples: Option<usize>,
    /// Continuation weights: walk-count or distance-degree.
    #[arg(long, default_value = "walk-count")]
    weights: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sampler parallelism; results do not depend on it.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Optional cap on per-position itemset width.
    #[arg(long)]
    max_width: Option<usize>,
    /// Also write the raw sample batch as JSON lines (sample mode only).
    #[arg(long)]
    dump_samples: Option<PathBuf>,
    /// json or csv.
    #[arg(long, default_value = "json")]
    format: String,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Ground-truth ranked-pattern file (JSON).
    #[arg(long)]
    truth: PathBuf,
    /// Produced ranked-pattern file (JSON).
    #[arg(long)]
    produced: PathBuf,
    /// Ranks to evaluate, comma separated.
    #[arg(short, value_delimiter = ',', required = true)]
    k: Vec<usize>,
    /// json or csv.
    #[arg(long, default_value = "json")]
    format: String,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    delta: f64,
    /// Item universe size |I|.
    #[arg(long, conflicts_with = "graph")]
    items: Option<usize>,
    /// Graph file to read |I| from.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Pattern length l.
    #[arg(short)]
    l: usize,
    /// Weight ratio a = mean(M)/max(M); defaults to the optimistic 1.0.
    #[arg(long, conflicts_with = "sample")]
    a: Option<f64>,
    /// Sample batch JSONL to estimate a from.
    #[arg(long)]
    sample: Option<PathBuf>,
    /// Known pattern count |Q_l| for the tighter bound.
    #[arg(long)]
    patterns: Option<f64>,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Lib(DgspError),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Lib(err) => write!(f, "{err}"),
            CliError::Io(err) => write!(f, "{err}"),
        }
    }
}

impl From<DgspError> for CliError {
    fn from(err: DgspError) -> Self {
        CliError::Lib(err)
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(err) => match err {
                DgspError::NoPath { .. } => 3,
                DgspError::RejectionBudget { .. } => 4,
                DgspError::Io(_) => 1,
                _ => 2,
            },
            CliError::Io(_) => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Mine(args) => cmd_mine(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Bound(args) => cmd_bound(args),
    }
}

fn parse_db_rule(raw: &str) -> Result<gen::DbSizeRule, CliError> {
    let usage = || {
        CliError::Usage(format!(
            "--db expects constant:N or degree-linear:BASE,SLOPE, got {raw:?}"
        ))
    };
    let (kind, params) = raw.split_once(':').ok_or_else(usage)?;
    match kind {
        "constant" => Ok(gen::DbSizeRule::Constant(
            params.parse().map_err(|_| usage())?,
        )),
        "degree-linear" => {
            let (base, slope) = params.split_once(',').ok_or_else(usage)?;
            Ok(gen::DbSizeRule::DegreeLinear {
                base: base.parse().map_err(|_| usage())?,
                slope: slope.parse().map_err(|_| usage())?,
            })
        }
        _ => Err(usage()),
    }
}

fn parse_shape(raw: &str) -> Result<gen::GraphShape, CliError> {
    match raw {
        "random-dag" => Ok(gen::GraphShape::RandomDag),
        "random-digraph" => Ok(gen::GraphShape::RandomDigraph),
        other => Err(CliError::Usage(format!(
            "--shape expects random-dag or random-digraph, got {other:?}"
        ))),
    }
}

fn load_graph_file(path: &Path) -> Result<(dgsp::DatabaseGraph, Vec<u8>), CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Usage(format!("cannot read graph file {}: {e}", path.display())))?;
    let graph = dgsp::load_graph(bytes.as_slice())?;
    Ok((graph, bytes))
}

fn cmd_generate(args: GenerateArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let config = gen::GenConfig {
        vertex_count: args.vertices,
        edge_count: args.edges,
        item_universe_size: args.items,
        avg_items_per_transaction: args.avg_items,
        db_size_rule: parse_db_rule(&args.db)?,
        graph_shape: parse_shape(&args.shape)?,
        seed: args.seed,
    };
    let graph = gen::generate(&config)?;
    let mut bytes = Vec::new();
    dgsp::write_graph(&graph, &mut bytes)?;

    write_output(args.output.as_deref(), &bytes)?;

    let core = ManifestCore::new("generate")
        .flag("vertices", args.vertices)
        .flag("edges", args.edges)
        .flag("db", &args.db)
        .flag("items", args.items)
        .flag("avg-items", args.avg_items)
        .flag("shape", &args.shape)
        .seed(args.seed)
        .graph_digest(&bytes);
    let full = RunManifest {
        core,
        workers: None,
        output: args.output.as_ref().map(|p| p.display().to_string()),
        timing: Timing {
            sampling_ms: 0.0,
            mining_ms: 0.0,
            total_ms: started.elapsed().as_secs_f64() * 1e3,
        },
    };
    full.emit(args.output.as_deref())?;
    Ok(())
}

fn rejection_budget() -> Result<u64, CliError> {
    match std::env::var(REJECTION_BUDGET_ENV) {
        Ok(raw) => raw.parse().map_err(|_| {
            CliError::Usage(format!(
                "{REJECTION_BUDGET_ENV} must be an integer, got {raw:?}"
            ))
        }),
        Err(_) => Ok(sampler::DEFAULT_REJECTION_BUDGET),
    }
}

fn cmd_mine(args: MineArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let (graph, graph_bytes) = load_graph_file(&args.graph)?;
    let weight_mode: WeightMode = args
        .weights
        .parse()
        .map_err(|e: DgspError| CliError::Usage(e.to_string()))?;
    let miner_opts = MinerOptions {
        prune: true,
        max_itemset_width: args.max_width,
    };

    let mut core = ManifestCore::new("mine")
        .flag("mode", &args.mode)
        .flag("graph", args.graph.display())
        .flag("l", args.l)
        .flag("k", args.k)
        .flag("weights", weight_mode.as_str())
        .flag("format", &args.format)
        .flag_opt("max-width", args.max_width)
        .graph_digest(&graph_bytes);

    let mut timing = Timing::default();
    let file = match args.mode.as_str() {
        "exact" => {
            let mining_started = Instant::now();
            let result = baseline::exact_topk_with(&graph, args.l, args.k, &miner_opts)?;
            timing.mining_ms = mining_started.elapsed().as_secs_f64() * 1e3;
            MineFile {
                manifest: core.clone(),
                score_kind: ScoreKind::ExactFrequency,
                l: args.l,
                k: args.k,
                list_len: result.topk.entries.len(),
                d_l_size: Some(result.d_l_size),
                samples: None,
                total_weight: None,
                rejections: None,
                patterns: result.topk.to_rows(&graph),
            }
        }
        "sample" => {
            let m = args.samples.ok_or_else(|| {
                CliError::Usage("--samples is required when --mode sample".into())
            })?;
            let sampler_opts = SamplerOptions {
                rejection_budget: rejection_budget()?,
            };
            core = core.flag("samples", m).seed(args.seed);

            let sampling_started = Instant::now();
            let batch = sampler::sample_batch(
                &graph,
                args.l,
                m,
                weight_mode,
                args.seed,
                args.workers,
                &sampler_opts,
            )?;
            timing.sampling_ms = sampling_started.elapsed().as_secs_f64() * 1e3;

            if let Some(dump) = &args.dump_samples {
                let mut sink = Vec::new();
                sampler::write_batch_jsonl(&graph, &batch, &mut sink)?;
                std::fs::write(dump, sink)?;
            }

            let mining_started = Instant::now();
            let ranked = miner::mine_topk(&graph, &batch, args.k, &miner_opts)?;
            timing.mining_ms = mining_started.elapsed().as_secs_f64() * 1e3;

            MineFile {
                manifest: core.clone(),
                score_kind: ranked.score_kind,
                l: args.l,
                k: args.k,
                list_len: ranked.entries.len(),
                d_l_size: None,
                samples: Some(m),
                total_weight: Some(batch.total_weight()),
                rejections: Some(batch.rejections),
                patterns: ranked.to_rows(&graph),
            }
        }
        other => {
            return Err(CliError::Usage(format!(
                "--mode expects exact or sample, got {other:?}"
            )))
        }
    };

    let content = match args.format.as_str() {
        "json" => {
            let mut body =
                serde_json::to_vec_pretty(&file).map_err(|e| CliError::Usage(e.to_string()))?;
            body.push(b'\n');
            body
        }
        "csv" => schema::patterns_to_csv(&file.patterns).into_bytes(),
        other => {
            return Err(CliError::Usage(format!(
                "--format expects json or csv, got {other:?}"
            )))
        }
    };
    write_output(args.output.as_deref(), &content)?;

    timing.total_ms = started.elapsed().as_secs_f64() * 1e3;
    let full = RunManifest {
        core: file.manifest.clone(),
        workers: Some(args.workers),
        output: args.output.as_ref().map(|p| p.display().to_string()),
        timing,
    };
    full.emit(args.output.as_deref())?;
    Ok(())
}

fn read_mine_file(path: &Path) -> Result<MineFile, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_slice(&bytes).map_err(|e| {
        CliError::Usage(format!(
            "{} is not a ranked-pattern file: {e}",
            path.display()
        ))
    })
}

fn cmd_eval(args: EvalArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let truth = read_mine_file(&args.truth)?;
    let produced = read_mine_file(&args.produced)?;
    if truth.l != produced.l {
        return Err(CliError::Usage(format!(
            "pattern length mismatch: truth l={} vs produced l={}",
            truth.l, produced.l
        )));
    }

    let keyed = |file: &MineFile| -> Result<Vec<(String, f64)>, CliError> {
        file.patterns
            .iter()
            .map(|row| Ok((schema::pattern_key(&row.pattern)?, row.freq)))
            .collect()
    };
    let truth_rows = keyed(&truth)?;
    let produced_rows = keyed(&produced)?;
    let truth_keys: Vec<String> = truth_rows.iter().map(|(k, _)| k.clone()).collect();
    let produced_keys: Vec<String> = produced_rows.iter().map(|(k, _)| k.clone()).collect();
    let produced_freq: std::collections::HashMap<&str, f64> = produced_rows
        .iter()
        .map(|(k, f)| (k.as_str(), *f))
        .collect();

    let m_flag = produced
        .manifest
        .flags
        .get("samples")
        .and_then(|s| s.parse().ok());
    let seed_flag = produced.manifest.seed;

    let mut cells = Vec::with_capacity(args.k.len());
    for &k in &args.k {
        if k == 0 || k > truth_rows.len() || k > produced_rows.len() {
            return Err(CliError::Usage(format!(
                "k={k} exceeds a list length (truth {}, produced {})",
                truth_rows.len(),
                produced_rows.len()
            )));
        }
        let me = metrics::mean_estimation_error(
            &truth_rows,
            |key| produced_freq.get(key.as_str()).copied(),
            k,
        )?;
        let ap = metrics::average_precision(&produced_keys, &truth_keys, k)?;
        let rs = metrics::ranking_similarity(&produced_keys, &truth_keys, k)?;
        cells.push(metrics::MetricsCell {
            k,
            me: Some(me.value),
            ap,
            rs,
            m: m_flag,
            l: Some(truth.l as u64),
            seed: seed_flag,
            me_missing: me.missing,
            produced_len: produced_rows.len(),
        });
    }

    let core = ManifestCore::new("eval")
        .flag("truth", args.truth.display())
        .flag("produced", args.produced.display())
        .flag(
            "k",
            args.k
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(","),
        )
        .flag("format", &args.format);
    let file = EvalFile {
        manifest: core,
        cells,
    };

    let content = match args.format.as_str() {
        "json" => {
            let mut body =
                serde_json::to_vec_pretty(&file).map_err(|e| CliError::Usage(e.to_string()))?;
            body.push(b'\n');
            body
        }
        "csv" => schema::cells_to_csv(&file.cells).into_bytes(),
        other => {
            return Err(CliError::Usage(format!(
                "--format expects json or csv, got {other:?}"
            )))
        }
    };
    write_output(args.output.as_deref(), &content)?;

    let full = RunManifest {
        core: file.manifest.clone(),
        workers: None,
        output: args.output.as_ref().map(|p| p.display().to_string()),
        timing: Timing {
            sampling_ms: 0.0,
            mining_ms: 0.0,
            total_ms: started.elapsed().as_secs_f64() * 1e3,
        },
    };
    full.emit(args.output.as_deref())?;
    Ok(())
}

fn cmd_bound(args: BoundArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let items = match (args.items, &args.graph) {
        (Some(items), _) => items,
        (None, Some(path)) => load_graph_file(path)?.0.item_count(),
        (None, None) => {
            return Err(CliError::Usage(
                "one of --items or --graph is required".into(),
            ))
        }
    };
    let a = match (args.a, &args.sample) {
        (Some(a), _) => a,
        (None, Some(path)) => {
            let file = std::fs::File::open(path).map_err(|e| {
                CliError::Usage(format!("cannot read sample file {}: {e}", path.display()))
            })?;
            let weights = sampler::read_batch_weights(std::io::BufReader::new(file))?;
            metrics::estimate_a_from_weights(weights)?
        }
        (None, None) => 1.0,
    };

    let with_pattern_count = match args.patterns {
        Some(q) => Some(metrics::sample_size_bound(&metrics::BoundInputs {
            epsilon: args.epsilon,
            delta: args.delta,
            item_count: items,
            l: args.l,
            a,
            pattern_count: Some(q),
        })?),
        None => None,
    };
    let item_cap = metrics::sample_size_bound(&metrics::BoundInputs {
        epsilon: args.epsilon,
        delta: args.delta,
        item_count: items,
        l: args.l,
        a,
        pattern_count: None,
    })?;

    let to_value = |raw: f64| BoundValue {
        raw,
        samples: raw.ceil() as u64,
    };
    let core = ManifestCore::new("bound")
        .flag("epsilon", args.epsilon)
        .flag("delta", args.delta)
        .flag("items", items)
        .flag("l", args.l)
        .flag("a", a)
        .flag_opt("patterns", args.patterns);
    let file = BoundFile {
        manifest: core,
        epsilon: args.epsilon,
        delta: args.delta,
        items,
        l: args.l,
        a,
        pattern_count: args.patterns,
        bound_from_pattern_count: with_pattern_count.map(to_value),
        bound_from_item_cap: to_value(item_cap),
    };
    let mut content =
        serde_json::to_vec_pretty(&file).map_err(|e| CliError::Usage(e.to_string()))?;
    content.push(b'\n');
    write_output(args.output.as_deref(), &content)?;

    let full = RunManifest {
        core: file.manifest.clone(),
        workers: None,
        output: args.output.as_ref().map(|p| p.display().to_string()),
        timing: Timing {
            sampling_ms: 0.0,
            mining_ms: 0.0,
            total_ms: started.elapsed().as_secs_f64() * 1e3,
        },
    };
    full.emit(args.output.as_deref())?;
    Ok(())
}
