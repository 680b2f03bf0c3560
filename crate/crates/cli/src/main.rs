use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use msg_core::adversary::BobKind;
use msg_core::rational::{parse_rational, parse_rational_list, Q};
use msg_core::Error;

mod commands;
mod verify_input;

/// Exact-arithmetic modified Schmidt games and the avoidance strategy for
/// weighted badly approximable points.
#[derive(Debug, Parser)]
#[command(name = "msg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Play the avoidance strategy against a Bob adversary and write the transcript.
    Play(PlayArgs),
    /// Check a point or box file against the badness inequality.
    Verify(VerifyArgs),
    /// Grow Alice's strategy tree and write the per-level dimension table as CSV.
    Tree(TreeArgs),
    /// Win the intersection of several lower-dimensional targets in one game.
    Intersect(IntersectArgs),
    /// Play the ternary-word game where Alice forces a countable outcome.
    TernaryDemo(TernaryArgs),
    /// Print the derived strategy constants for a configuration.
    Params(ParamsArgs),
    /// Re-validate every move of a transcript file.
    Replay(ReplayArgs),
}

fn flag_error(e: Error) -> String {
    match e {
        Error::Parse { message, .. } => message,
        other => other.to_string(),
    }
}

pub(crate) fn rational(s: &str) -> Result<Q, String> {
    parse_rational(s).map_err(flag_error)
}

/// A comma-separated list of rationals given as one flag value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct QList(pub Vec<Q>);

pub(crate) fn rationals(s: &str) -> Result<QList, String> {
    parse_rational_list(s).map(QList).map_err(flag_error)
}

#[derive(Debug, Clone, Args)]
pub(crate) struct GameArgs {
    /// Comma-separated weights summing to 1, e.g. "1/3,2/3".
    #[arg(long, value_parser = rationals)]
    pub weights: QList,
    /// Alice's step.
    #[arg(long, value_parser = rational)]
    pub a: Q,
    /// Bob's step (defaults to a).
    #[arg(long, value_parser = rational)]
    pub b: Option<Q>,
    /// Time of Bob's opening box (defaults to a).
    #[arg(long, value_parser = rational)]
    pub t1: Option<Q>,
    /// Fraction of the largest admissible constant used for c′.
    #[arg(long, value_parser = rational, default_value = "1/2")]
    pub margin: Q,
}

#[derive(Debug, Clone, Args)]
pub(crate) struct MapArgs {
    /// Diagonal of the affine map f, comma-separated.
    #[arg(long = "f-diag", value_parser = rationals)]
    pub f_diag: Option<QList>,
    /// Translation of f, comma-separated.
    #[arg(long = "f-shift", value_parser = rationals)]
    pub f_shift: Option<QList>,
}

#[derive(Debug, Clone, Args)]
pub(crate) struct RunArgs {
    #[arg(long, default_value_t = 6)]
    pub rounds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// center, seeded-random or rational-seeker.
    #[arg(long, default_value = "rational-seeker")]
    pub bob: BobKind,
    /// Transcript destination (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub(crate) struct PlayArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[command(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub(crate) struct VerifyArgs {
    /// JSON file with "point" or "box", "weights", "c", "qmax" and optionally "f".
    pub input: PathBuf,
    /// Overrides the file's weights (zero entries drop a coordinate).
    #[arg(long, value_parser = rationals)]
    pub weights: Option<QList>,
    /// Overrides the file's denominator bound.
    #[arg(long)]
    pub qmax: Option<u64>,
    #[command(flatten)]
    pub map: MapArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub(crate) enum TreeAlice {
    Bad,
    Dummy,
}

#[derive(Debug, Args)]
pub(crate) struct TreeArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
    /// Which Alice strategy grows the tree.
    #[arg(long, value_enum, default_value_t = TreeAlice::Bad)]
    pub alice: TreeAlice,
    /// Extrapolation depth for the limiting estimate.
    #[arg(long, default_value_t = 50)]
    pub extend: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub(crate) struct IntersectArgs {
    #[command(flatten)]
    pub game: GameArgs,
    /// 1-based coordinate subsets separated by ';', e.g. "1;2" or "1,2;3".
    #[arg(long)]
    pub subsets: String,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub(crate) struct TernaryArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 6)]
    pub rounds: usize,
    /// Bob's ratio is β = 3^{-e}.
    #[arg(long = "beta-exp", default_value_t = 1)]
    pub beta_exp: u32,
}

#[derive(Debug, Args)]
pub(crate) struct ParamsArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[command(flatten)]
    pub map: MapArgs,
    /// Report the certified denominator bound after this many rounds.
    #[arg(long, default_value_t = 6)]
    pub rounds: usize,
}

#[derive(Debug, Args)]
pub(crate) struct ReplayArgs {
    pub input: PathBuf,
}

/// How a run ended, mapped onto the process exit code.
#[derive(Debug)]
pub(crate) enum Failure {
    /// Exit 2: an outcome or certificate did not verify.
    Verification(String),
    /// Exit 3: a move broke the game rules.
    Illegal(String),
    /// Exit 4: the configuration or input was unusable.
    Config(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 2,
            Failure::Illegal(_) => 3,
            Failure::Config(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Verification(m) | Failure::Illegal(m) | Failure::Config(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        match e.root_cause() {
            Error::IllegalMove { .. } => Failure::Illegal(message),
            Error::CertificateFailure { .. } | Error::FullDimensional => {
                Failure::Verification(message)
            }
            _ => Failure::Config(message),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Config(format!("i/o error: {e}"))
    }
}

pub(crate) type Outcome = Result<(), Failure>;

/// Stdout, or the file at `path`.
pub(crate) fn sink(path: Option<&PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            Failure::Config(format!("cannot create {}: {e}", p.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Play(args) => commands::play(&args),
        Command::Verify(args) => commands::verify(&args),
        Command::Tree(args) => commands::tree(&args),
        Command::Intersect(args) => commands::intersect(&args),
        Command::TernaryDemo(args) => commands::ternary_demo(&args),
        Command::Params(args) => commands::params(&args),
        Command::Replay(args) => commands::replay(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("msg: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
