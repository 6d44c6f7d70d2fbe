//! Command-line frontend: re-rank session logs, compare strategies, analyze
//! dimension stability and generate synthetic corpora.
//!
//! Exit codes: 0 success, 2 input parse failure, 3 configuration error,
//! 4 empty analysis, 5 I/O failure.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use dimrank::dimension::DIMENSION_COUNT;
use dimrank::error::{Error, Result};
use dimrank::eval::{default_cutoffs, default_strategies, evaluate_strategies, Cutoff};
use dimrank::replay::{replay, Protocol, RankMode};
use dimrank::scorers::{ScorerConfig, ScorerSet, UserProfile};
use dimrank::session::{read_sessions, resolve_sessions, write_sessions, SessionLog};
use dimrank::synth::{generate, GeneratorConfig, PlantedPreference};
use dimrank::weights::WeightProvenance;
use dimrank::DimensionId;

#[derive(Parser)]
#[command(
    name = "dimrank",
    version,
    about = "Session-aware multidimensional relevance re-ranking"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Re-rank each evaluated query of a session log and write one JSONL
    /// record per query, including the weight vector used.
    Rerank(RerankArgs),
    /// Compare the seven fixed-dimension strategies and the captured
    /// weighted combination; emit a CSV report.
    Eval(EvalArgs),
    /// Measure how often a session's early top-k dimensions persist.
    AnalyzeStability(StabilityArgs),
    /// Generate a synthetic pre-scored corpus with planted preferences.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Session log file(s) in JSONL format.
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    /// Scorer configuration (JSON) for logs without pre-computed scores.
    #[arg(long)]
    scorer_config: Option<PathBuf>,
}

#[derive(Args)]
struct RerankArgs {
    #[command(flatten)]
    io: InputArgs,
    /// captured, uniform or fixed:DIMENSION.
    #[arg(long, default_value = "captured")]
    mode: String,
    /// within-session or cross-session.
    #[arg(long, default_value = "within-session")]
    protocol: String,
    /// Output path for the ranking records (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    io: InputArgs,
    #[arg(long, default_value = "within-session")]
    protocol: String,
    /// Comma-separated NDCG cutoffs, e.g. 1,5,10,all.
    #[arg(long)]
    k: Option<String>,
    /// Output path for the CSV report (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct StabilityArgs {
    #[command(flatten)]
    io: InputArgs,
    /// How many top dimensions to track per query.
    #[arg(long, default_value_t = 3)]
    top_k: usize,
    /// Also print one status line per session.
    #[arg(long)]
    per_session: bool,
}

#[derive(Args)]
struct GenerateArgs {
    /// Output path for the JSONL corpus.
    #[arg(long)]
    output: PathBuf,
    /// Output path for the truth sidecar (defaults to OUTPUT.truth.json).
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    sessions: usize,
    /// Queries per session, as LO-HI or a single number.
    #[arg(long, default_value = "3-8")]
    queries: String,
    /// Documents per query, as LO-HI or a single number.
    #[arg(long, default_value = "10-20")]
    docs: String,
    /// Planted preference: seven comma-separated simplex weights,
    /// one-hot:DIMENSION, or concentrated:SHARPNESS.
    #[arg(long, default_value = "concentrated:8")]
    planted: String,
    /// Half-width of the utility noise, in [0, 1].
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    /// Per-query preference perturbation in [0, 1] (1 re-draws each query).
    #[arg(long)]
    drift: Option<f64>,
    /// SAT clicks per query.
    #[arg(long, default_value_t = 1)]
    sat: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

fn main() {
    let cli = Cli::try_parse().unwrap_or_else(|e| {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => e.exit(),
            _ => {
                let _ = e.print();
                std::process::exit(3);
            }
        }
    });
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } | Error::InvalidInput(_) => 2,
        Error::Config(_) => 3,
        Error::EmptyAnalysis(_) => 4,
        Error::Io(_) => 5,
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Rerank(args) => cmd_rerank(args),
        Command::Eval(args) => cmd_eval(args),
        Command::AnalyzeStability(args) => cmd_analyze_stability(args),
        Command::Generate(args) => cmd_generate(args),
    }
}

fn with_path_context(err: Error, path: &Path) -> Error {
    let shown = path.display();
    match err {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{shown}: {message}"),
        },
        Error::Io(e) => Error::Io(std::io::Error::new(e.kind(), format!("{shown}: {e}"))),
        other => other,
    }
}

/// Read every input file and merge sessions by id, preserving first
/// appearance order across files and ts order within each session.
fn load_sessions(paths: &[PathBuf]) -> Result<Vec<SessionLog>> {
    let mut order: Vec<String> = Vec::new();
    let mut by_id: BTreeMap<String, SessionLog> = BTreeMap::new();
    for path in paths {
        let file = File::open(path).map_err(|e| with_path_context(e.into(), path))?;
        let sessions =
            read_sessions(BufReader::new(file)).map_err(|e| with_path_context(e, path))?;
        for session in sessions {
            match by_id.get_mut(&session.session_id) {
                None => {
                    order.push(session.session_id.clone());
                    by_id.insert(session.session_id.clone(), session);
                }
                Some(existing) => {
                    existing.queries.extend(session.queries);
                    existing.queries.sort_by_key(|q| q.ts);
                }
            }
        }
    }
    Ok(order
        .into_iter()
        .map(|id| by_id.remove(&id).unwrap())
        .collect())
}

fn load_scorer_setup(path: Option<&PathBuf>) -> Result<(ScorerSet, UserProfile)> {
    match path {
        None => Ok((ScorerSet::baselines(), UserProfile::default())),
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| with_path_context(e.into(), path))?;
            let config = ScorerConfig::from_json(&text)?;
            Ok((config.build_scorer_set()?, config.profile))
        }
    }
}

fn open_output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    match path {
        None => Ok(Box::new(std::io::stdout().lock())),
        Some(path) => {
            let file = File::create(path).map_err(|e| with_path_context(e.into(), path))?;
            Ok(Box::new(BufWriter::new(file)))
        }
    }
}

#[derive(Serialize)]
struct RankedEntry<'a> {
    doc_id: &'a str,
    score: f64,
}

/// One output record per evaluated query; the weight vector is embedded in
/// dimension order so rankings are auditable without re-running capture.
#[derive(Serialize)]
struct RankingRecord<'a> {
    session_id: &'a str,
    query_id: &'a str,
    protocol: String,
    mode: String,
    provenance: WeightProvenance,
    weights: &'a [f64; DIMENSION_COUNT],
    ranking: Vec<RankedEntry<'a>>,
}

fn cmd_rerank(args: RerankArgs) -> Result<()> {
    let mode: RankMode = args.mode.parse()?;
    let protocol: Protocol = args.protocol.parse()?;
    let sessions = load_sessions(&args.io.input)?;
    let (scorers, profile) = load_scorer_setup(args.io.scorer_config.as_ref())?;
    let resolved = resolve_sessions(&sessions, &scorers, &profile)?;
    let rankings = replay(&resolved, protocol, mode)?;

    let mut out = open_output(args.output.as_ref())?;
    for r in rankings.iter().filter(|r| r.informed) {
        let record = RankingRecord {
            session_id: &r.session_id,
            query_id: &r.query_id,
            protocol: protocol.to_string(),
            mode: mode.to_string(),
            provenance: r.weights.provenance(),
            weights: r.weights.values(),
            ranking: r
                .ranking
                .entries()
                .iter()
                .map(|e| RankedEntry {
                    doc_id: &e.doc_id,
                    score: e.score,
                })
                .collect(),
        };
        serde_json::to_writer(&mut out, &record)
            .map_err(|e| Error::InvalidInput(format!("serialize record failed: {e}")))?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let protocol: Protocol = args.protocol.parse()?;
    let cutoffs = match &args.k {
        None => default_cutoffs(),
        Some(list) => list
            .split(',')
            .map(|part| part.parse::<Cutoff>())
            .collect::<Result<Vec<_>>>()?,
    };
    let sessions = load_sessions(&args.io.input)?;
    let (scorers, profile) = load_scorer_setup(args.io.scorer_config.as_ref())?;
    let resolved = resolve_sessions(&sessions, &scorers, &profile)?;
    let report = evaluate_strategies(&resolved, &default_strategies(), protocol, &cutoffs)?;

    println!("{}", report.to_table());
    println!(
        "queries evaluated: {} ({} with no relevant label, scored 0)",
        report.strategies[0].n_queries, report.strategies[0].zero_relevant
    );
    match &args.output {
        Some(_) => {
            let mut out = open_output(args.output.as_ref())?;
            out.write_all(report.to_csv().as_bytes())?;
            out.flush()?;
        }
        None => print!("{}", report.to_csv()),
    }
    Ok(())
}

fn cmd_analyze_stability(args: StabilityArgs) -> Result<()> {
    let sessions = load_sessions(&args.io.input)?;
    let (scorers, profile) = load_scorer_setup(args.io.scorer_config.as_ref())?;
    let resolved = resolve_sessions(&sessions, &scorers, &profile)?;
    let report = dimrank::stability_analysis(&resolved, args.top_k)?;

    println!("top_k {}", report.top_k);
    println!("fraction_stable {:.4}", report.fraction_stable);
    println!("stable {}", report.stable_sessions);
    println!("eligible {}", report.eligible_sessions);
    println!("excluded {}", report.excluded_sessions);
    if args.per_session {
        for s in &report.per_session {
            println!("{} {}", s.session_id, s.status);
        }
    }
    Ok(())
}

fn parse_usize_range(text: &str, flag: &str) -> Result<(usize, usize)> {
    let parse_one = |part: &str| {
        part.trim()
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("--{flag}: '{part}' is not a count")))
    };
    match text.split_once('-') {
        Some((lo, hi)) => Ok((parse_one(lo)?, parse_one(hi)?)),
        None => {
            let v = parse_one(text)?;
            Ok((v, v))
        }
    }
}

fn parse_planted(text: &str) -> Result<PlantedPreference> {
    let lower = text.trim().to_ascii_lowercase();
    if let Some(dim) = lower.strip_prefix("one-hot:") {
        let dim: DimensionId = dim.parse()?;
        let mut weights = [0.0; DIMENSION_COUNT];
        weights[dim.index()] = 1.0;
        return Ok(PlantedPreference::Fixed(weights));
    }
    if let Some(sharp) = lower.strip_prefix("concentrated:") {
        let sharpness = sharp
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("--planted: bad sharpness '{sharp}'")))?;
        return Ok(PlantedPreference::Concentrated { sharpness });
    }
    let parts: Vec<&str> = lower.split(',').collect();
    if parts.len() != DIMENSION_COUNT {
        return Err(Error::Config(format!(
            "--planted: expected {DIMENSION_COUNT} weights, one-hot:<dimension> or \
             concentrated:<sharpness>, got '{text}'"
        )));
    }
    let mut weights = [0.0; DIMENSION_COUNT];
    for (slot, part) in weights.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("--planted: bad weight '{part}'")))?;
    }
    Ok(PlantedPreference::Fixed(weights))
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let config = GeneratorConfig {
        seed: args.seed,
        sessions: args.sessions,
        queries_per_session: parse_usize_range(&args.queries, "queries")?,
        docs_per_query: parse_usize_range(&args.docs, "docs")?,
        planted: parse_planted(&args.planted)?,
        click_noise: args.noise,
        drift: args.drift,
        sat_per_query: args.sat,
    };
    let corpus = generate(&config)?;

    let corpus_file =
        File::create(&args.output).map_err(|e| with_path_context(e.into(), &args.output))?;
    write_sessions(&corpus.sessions, BufWriter::new(corpus_file))?;

    let truth_path = args.truth.clone().unwrap_or_else(|| {
        let mut p = args.output.as_os_str().to_owned();
        p.push(".truth.json");
        PathBuf::from(p)
    });
    let truth_file =
        File::create(&truth_path).map_err(|e| with_path_context(e.into(), &truth_path))?;
    corpus.write_truth(BufWriter::new(truth_file))?;

    let n_queries: usize = corpus.sessions.iter().map(|s| s.queries.len()).sum();
    let n_docs: usize = corpus
        .sessions
        .iter()
        .flat_map(|s| &s.queries)
        .map(|q| q.docs.len())
        .sum();
    println!(
        "wrote {} sessions, {n_queries} queries, {n_docs} docs (seed {}) to {}",
        corpus.sessions.len(),
        args.seed,
        args.output.display()
    );
    println!("truth sidecar: {}", truth_path.display());
    Ok(())
}
