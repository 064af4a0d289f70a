//! `fragmol` command-line tool.

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fragmol::assemble::AssembleOrder;
use fragmol::Scheme;

use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "fragmol",
    version,
    about = "Motif vocabularies and molecule fragmentation"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "FRAGMOL_WORKERS")]
    workers: Option<usize>,
    /// Leave wall-clock timings out of the log.
    #[arg(long, global = true)]
    deterministic: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a motif vocabulary from a SMILES corpus.
    BuildVocab(BuildVocabArgs),
    /// Decompose every molecule of a corpus into motifs and single atoms.
    Decompose(DecomposeArgs),
    /// Emit CSV statistics.
    Stats(StatsArgs),
    /// Seeded train/validation/test split of a corpus.
    Split(SplitArgs),
    /// Turn scored bond candidates into molecules.
    Assemble(AssembleArgs),
    /// Build both vocabularies at one size and compare all three schemes.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// SMILES corpus, one molecule per line (`-` for stdin). Repeatable.
    #[arg(long, short, required = true)]
    pub input: Vec<PathBuf>,
    /// Log and skip unparsable lines instead of failing.
    #[arg(long)]
    pub skip_invalid: bool,
}

#[derive(Debug, Args)]
pub struct BuildVocabArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// `subcover` builds the BBB vocabulary it uses.
    #[arg(long)]
    pub scheme: Scheme,
    #[arg(long)]
    pub k: usize,
    /// Vocabulary file (default: stdout).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub scheme: Scheme,
    #[arg(long)]
    pub vocab: PathBuf,
    /// Decomposition records (default: stdout).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Report {
    /// One summary row for the scheme.
    Summary,
    /// One row per molecule.
    Records,
    /// Number of molecules per fragment count.
    Fragments,
    /// Ring sizes per molecule (needs only --input).
    Rings,
    /// Vocabulary composition (needs only --vocab).
    Vocab,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long, value_enum, default_value_t = Report::Summary)]
    pub report: Report,
    /// SMILES corpus (`-` for stdin). Repeatable.
    #[arg(long, short)]
    pub input: Vec<PathBuf>,
    #[arg(long)]
    pub skip_invalid: bool,
    #[arg(long)]
    pub scheme: Option<Scheme>,
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Train, validation and test fractions.
    #[arg(long, value_delimiter = ',', default_values_t = [0.8, 0.1, 0.1])]
    pub split: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output prefix; writes PREFIX.train.smi, PREFIX.valid.smi and PREFIX.test.smi.
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct AssembleArgs {
    /// Scored bond graphs, one JSON record per line (`-` for stdin).
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, default_value_t = AssembleOrder::ValencyFirst)]
    pub order: AssembleOrder,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub k: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

pub struct Globals {
    pub deterministic: bool,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let workers = match cli.workers {
        Some(0) => return Err(CliError::Usage("--workers must be at least 1".into())),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let globals = Globals {
        deterministic: cli.deterministic,
    };
    match cli.command {
        Command::BuildVocab(a) => commands::build_vocab(&a, &globals),
        Command::Decompose(a) => commands::decompose(&a, &globals),
        Command::Stats(a) => commands::stats(&a, &globals),
        Command::Split(a) => commands::split(&a, &globals),
        Command::Assemble(a) => commands::assemble(&a, &globals),
        Command::Compare(a) => commands::compare(&a, &globals),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
