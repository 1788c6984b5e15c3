//! `hlsa`: batch front end for term-document ingestion, SVD, word
//! similarity, CHSH scoring/simulation and the Fock phrase demo.
//!
//! Exit status: 0 on success, 1 on usage errors, 2 on data errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hilbert_lsa::bell::{self, ClassicalSource, LocalStrategy};
use hilbert_lsa::corpus::{self, TermDocMatrix};
use hilbert_lsa::fock::{stein_phrases, FockVector, STEIN_VOCAB};
use hilbert_lsa::format::sig6;
use hilbert_lsa::semantic::SemanticSpace;
use hilbert_lsa::spectral::{self, SvdRecord};
use hilbert_lsa::Execution;
use serde::Serialize;

/// The CLI runs every kernel on the calling thread.
const EXEC: Execution = Execution::Sequential;

/// Characters per line in written letter texts.
const TEXT_WIDTH: usize = 64;

#[derive(Parser, Debug)]
#[command(name = "hlsa", version, about = "Latent semantic analysis in Hilbert-space form, plus a CHSH text codec")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a term-document matrix from a corpus file (one document per line)
    Ingest(IngestArgs),
    /// Decompose a matrix file and write the rank-k truncation with its factors
    Svd(SvdArgs),
    /// Print raw and reduced cosines between words
    Similar(SimilarArgs),
    /// Score a letter text: mean G, quadruple count, skipped characters
    BellScore(ScoreArgs),
    /// Simulate a quantum or classical source and write its letter text
    BellSimulate(SimulateArgs),
    /// CHSH tools grouped under one command
    #[command(subcommand)]
    Bell(BellCommand),
    /// Print the Stein phrase vectors and their squared norms
    FockDemo,
}

#[derive(Subcommand, Debug)]
enum BellCommand {
    /// Same as `bell-score`
    Score(ScoreArgs),
    /// Same as `bell-simulate`
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
struct IngestArgs {
    /// Corpus text file, one document per non-blank line
    corpus: PathBuf,
    /// Output matrix file (JSON)
    #[arg(long)]
    out: PathBuf,
    /// Token to leave out of the vocabulary (repeatable)
    #[arg(long = "exclude", value_name = "WORD")]
    exclude: Vec<String>,
    /// Apply log-entropy weighting to the counts
    #[arg(long)]
    entropy: bool,
}

#[derive(Args, Debug)]
struct SvdArgs {
    /// Matrix file written by `ingest`
    matrix: PathBuf,
    /// Number of singular triples kept (default: full rank)
    #[arg(long)]
    rank: Option<usize>,
    /// Output decomposition file (JSON)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SimilarArgs {
    /// Matrix file written by `ingest`
    matrix: PathBuf,
    /// Rank of the reduced space (default: full rank)
    #[arg(long)]
    rank: Option<usize>,
    /// Word pair to compare; all pairs are printed when omitted
    #[arg(num_args = 0..=2, value_names = ["W1", "W2"])]
    words: Vec<String>,
}

#[derive(Args, Debug)]
struct ScoreArgs {
    /// Letter text file (a-p, whitespace ignored)
    text: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Model {
    Quantum,
    Classical,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Source model
    #[arg(long, value_enum)]
    model: Model,
    /// Number of four-pair groups
    #[arg(long)]
    groups: usize,
    /// Generator seed
    #[arg(long)]
    seed: u64,
    /// Output letter text file
    #[arg(long)]
    out: PathBuf,
    /// Classical strategy: `uniform` or four signs for A, A', B, B' such as `++-+`
    #[arg(long, default_value = "uniform", value_parser = parse_strategy)]
    strategy: Strategy,
}

#[derive(Clone, Debug)]
enum Strategy {
    Uniform,
    Fixed(LocalStrategy),
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    if s == "uniform" {
        return Ok(Strategy::Uniform);
    }
    LocalStrategy::parse(s)
        .map(Strategy::Fixed)
        .ok_or_else(|| format!("expected `uniform` or four of + and -, got {s:?}"))
}

#[derive(Serialize)]
struct SvdFile<'a> {
    vocab: &'a [String],
    rank: usize,
    truncated: Vec<Vec<f64>>,
    decomposition: SvdRecord,
}

fn load_matrix(path: &Path) -> Result<TermDocMatrix> {
    TermDocMatrix::load(path).with_context(|| format!("reading matrix {}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn ingest(args: &IngestArgs, out: &mut impl Write) -> Result<()> {
    let docs = corpus::read_corpus(&args.corpus).with_context(|| format!("reading corpus {}", args.corpus.display()))?;
    let mut matrix = corpus::build_matrix_excluding(&docs, &args.exclude)?;
    if args.entropy {
        matrix = corpus::entropy_weight(&matrix)?;
    }
    matrix.save(&args.out).with_context(|| format!("writing {}", args.out.display()))?;
    writeln!(out, "words\t{}", matrix.vocab().len())?;
    writeln!(out, "documents\t{}", matrix.doc_count())?;
    Ok(())
}

fn svd(args: &SvdArgs, out: &mut impl Write) -> Result<()> {
    let matrix = load_matrix(&args.matrix)?;
    let triple = spectral::svd(matrix.entries())?;
    let rank = args.rank.unwrap_or(triple.singulars.len());
    let truncated = spectral::truncate(&triple, rank)?;
    let file = SvdFile {
        vocab: matrix.vocab().words(),
        rank,
        truncated: spectral::rows_of(&truncated),
        decomposition: triple.to_record(),
    };
    write_file(&args.out, &(serde_json::to_string_pretty(&file)? + "\n"))?;
    let shown: Vec<String> = triple.singulars.iter().map(|&s| sig6(s)).collect();
    writeln!(out, "singulars\t{}", shown.join("\t"))?;
    writeln!(out, "rank\t{rank}")?;
    Ok(())
}

fn similar(args: &SimilarArgs, out: &mut impl Write) -> Result<()> {
    if args.words.len() == 1 {
        anyhow::bail!(UsageError("similar takes either two words or none".into()));
    }
    let matrix = load_matrix(&args.matrix)?;
    let raw = SemanticSpace::from_matrix(&matrix);
    let reduced = match args.rank {
        Some(k) => SemanticSpace::reduced(&matrix, k)?,
        None => raw.clone(),
    };
    if let [w1, w2] = args.words.as_slice() {
        let (a, b) = (raw.cosine_words(w1, w2)?, reduced.cosine_words(w1, w2)?);
        writeln!(out, "{w1}\t{w2}\t{}\t{}", sig6(a), sig6(b))?;
        return Ok(());
    }
    let (sr, sk) = (raw.similarity_matrix(EXEC), reduced.similarity_matrix(EXEC));
    let words = matrix.vocab().words();
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            writeln!(out, "{}\t{}\t{}\t{}", words[i], words[j], sig6(sr[[i, j]]), sig6(sk[[i, j]]))?;
        }
    }
    Ok(())
}

fn bell_score(args: &ScoreArgs, out: &mut impl Write) -> Result<()> {
    let text = bell::read_text(&args.text).with_context(|| format!("reading {}", args.text.display()))?;
    let score = bell::chsh_score_with(&text, EXEC)?;
    writeln!(out, "mean_g\t{}", sig6(score.mean_g))?;
    writeln!(out, "n_quads\t{}", score.n_quads)?;
    writeln!(out, "skipped\t{}", score.skipped)?;
    Ok(())
}

fn bell_simulate(args: &SimulateArgs, out: &mut impl Write) -> Result<()> {
    let groups = match (args.model, &args.strategy) {
        (Model::Quantum, _) => bell::simulate_quantum_with(args.groups, args.seed, EXEC),
        (Model::Classical, Strategy::Uniform) => {
            bell::simulate_classical_with(args.groups, args.seed, &ClassicalSource::Uniform, EXEC)
        }
        (Model::Classical, Strategy::Fixed(s)) => {
            bell::simulate_classical_with(args.groups, args.seed, &ClassicalSource::Fixed(*s), EXEC)
        }
    };
    let text = bell::encode_groups(&groups);
    write_file(&args.out, &bell::wrap_text(&text, TEXT_WIDTH))?;
    writeln!(out, "groups\t{}", groups.len())?;
    writeln!(out, "letters\t{}", text.len())?;
    Ok(())
}

fn describe(v: &FockVector) -> String {
    v.terms()
        .into_iter()
        .filter(|(_, c)| *c != 0.0)
        .map(|(idx, c)| {
            let ket: Vec<&str> = idx.iter().map(|&i| STEIN_VOCAB[i]).collect();
            format!("{}|{}>", sig6(c), ket.join(" "))
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn fock_demo(out: &mut impl Write) -> Result<()> {
    for (i, s) in stein_phrases().iter().enumerate() {
        let norm_sq = s.inner(s)?;
        writeln!(out, "s{}\t{}\tnorm_sq\t{}", i + 1, describe(s), sig6(norm_sq))?;
    }
    Ok(())
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn run(cli: Cli, out: &mut impl Write) -> Result<()> {
    match cli.command {
        Command::Ingest(a) => ingest(&a, out),
        Command::Svd(a) => svd(&a, out),
        Command::Similar(a) => similar(&a, out),
        Command::BellScore(a) | Command::Bell(BellCommand::Score(a)) => bell_score(&a, out),
        Command::BellSimulate(a) | Command::Bell(BellCommand::Simulate(a)) => bell_simulate(&a, out),
        Command::FockDemo => fock_demo(out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
