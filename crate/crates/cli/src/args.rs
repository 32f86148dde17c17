use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use passguess_core::report::Estimator;
use passguess_core::HighCombiner;

#[derive(Debug, Parser)]
#[command(
    name = "passguess",
    version,
    about = "Passphrase policy checks and guessability estimates"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// N-gram store directory.
    #[arg(long, global = true, env = "PASSGUESS_STORE")]
    pub store: Option<PathBuf>,
    /// Maximum relative edit distance for tolerant matching.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Number of top-ranked 3/4/5-grams forbidden in passphrases.
    #[arg(long, global = true)]
    pub blacklist_k: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub high_combiner: Option<CombinerArg>,
    /// Vocabulary size used by the 1-gram permutation estimate.
    #[arg(long, global = true)]
    pub vocab_size: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CombinerArg {
    Sum,
    Product,
}

impl From<CombinerArg> for HighCombiner {
    fn from(c: CombinerArg) -> Self {
        match c {
            CombinerArg::Sum => HighCombiner::Sum,
            CombinerArg::Product => HighCombiner::Product,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EstimatorArg {
    Low,
    High,
    Unigram,
}

impl From<EstimatorArg> for Estimator {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::Low => Estimator::Low,
            EstimatorArg::High => Estimator::High,
            EstimatorArg::Unigram => Estimator::Unigram,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an n-gram store from plain text.
    Ingest(IngestArgs),
    /// Check passphrases against the creation policy.
    Policy(PolicyArgs),
    /// Estimate guess-numbers, one record per input line.
    Rank(RankArgs),
    #[command(subcommand)]
    Theory(TheoryCommand),
    #[command(subcommand)]
    Report(ReportCommand),
    /// Run the HTTP demo service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Text files to count; `-` reads stdin.
    #[arg(long = "corpus", required = true)]
    pub corpus: Vec<PathBuf>,
    #[arg(long, default_value_t = 5)]
    pub max_n: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// One proper noun per line.
    #[arg(long)]
    pub proper_nouns: Option<PathBuf>,
    /// One slang term per line.
    #[arg(long)]
    pub slang: Option<PathBuf>,
    /// Do not let windows cross `.`, `!` or `?`.
    #[arg(long)]
    pub sentence_boundaries: bool,
    /// Keep only the first K entries of table N, given as `N=K`.
    #[arg(long = "cap", value_parser = parse_cap)]
    pub caps: Vec<(usize, usize)>,
    /// Lexicon size recorded for permutation estimates.
    #[arg(long)]
    pub lexicon_size: Option<u64>,
}

fn parse_cap(s: &str) -> Result<(usize, usize), String> {
    let (n, k) = s.split_once('=').ok_or("expected N=K")?;
    let n: usize = n.parse().map_err(|_| format!("bad table size {n:?}"))?;
    let k: usize = k.parse().map_err(|_| format!("bad cap {k:?}"))?;
    if !(1..=5).contains(&n) {
        return Err(format!("table size {n} outside 1..=5"));
    }
    Ok((n, k))
}

#[derive(Debug, Args)]
pub struct PolicyArgs {
    /// Passphrase to check.
    #[arg(conflicts_with = "input", required_unless_present = "input")]
    pub passphrase: Option<String>,
    /// One passphrase per line; `-` reads stdin.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Do not require a proper noun.
    #[arg(long)]
    pub no_proper_noun: bool,
    #[arg(long)]
    pub min_words: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    /// One passphrase per line; `-` reads stdin.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Lines ranked in parallel per batch.
    #[arg(long, default_value_t = 1024)]
    pub batch: usize,
}

#[derive(Debug, Subcommand)]
pub enum TheoryCommand {
    /// Marginal guesswork for one or more success rates.
    Guesswork {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, required = true, num_args = 1..)]
        alpha: Vec<f64>,
    },
    /// Cumulative mass after each guess.
    Curve {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, default_value_t = 1)]
        stride: usize,
    },
    /// Count word sequences reachable by chaining n-grams, e.g. `5+3`.
    Joins {
        #[arg(long = "composition", required = true, num_args = 1..)]
        compositions: Vec<String>,
    },
    /// Bits of a uniform search space.
    Bits {
        #[arg(long)]
        alphabet: u64,
        #[arg(long)]
        length: f64,
    },
    /// Probability mass of the top entries before and after blacklisting.
    Mass {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Defaults to the blacklist size in effect.
        #[arg(long)]
        top_k: Option<u64>,
        #[arg(long)]
        renormalize: bool,
    },
    /// Bits after substituting a lexicon of words into a base space.
    Multiplier {
        #[arg(long)]
        base: String,
        #[arg(long)]
        lexicon: u64,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct DistArgs {
    /// One probability or frequency per line; `-` reads stdin.
    #[arg(long)]
    pub dist: Option<PathBuf>,
    /// Uniform distribution over this many items.
    #[arg(long)]
    pub uniform: Option<usize>,
    /// Frequencies of this store table.
    #[arg(long)]
    pub table: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum ReportCommand {
    /// Cumulative fraction guessed against log2 guesses.
    Curve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "low")]
        estimator: EstimatorArg,
    },
    /// Slang and not-found word counts per phrase.
    Coverage {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Unfound words a tolerant matcher would map onto the lexicon.
    Tolerance {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Exact matches against a list of known phrases.
    Phrasedict {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        known: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080, env = "PASSGUESS_PORT")]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long, env = "PASSGUESS_DATA")]
    pub data_dir: PathBuf,
    /// Enable the cue retrieval endpoint.
    #[arg(long)]
    pub expose_cue: bool,
}
