//! `zhwn`: build, screen, correct and evaluate a bilingual wordnet.
//!
//! Exit status is 0 on success, 1 on a usage error and 2 on a data error.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "zhwn",
    version,
    about = "Build, screen, correct and evaluate a bilingual English-Chinese wordnet"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Directory holding the data.* and index.* files.
    #[arg(long, global = true, value_name = "DIR")]
    pub wordnet: Option<PathBuf>,
    /// Lexicon JSONL.
    #[arg(long, global = true, value_name = "FILE")]
    pub lexicon: Option<PathBuf>,
    /// Word vectors in word2vec text format.
    #[arg(long, global = true, value_name = "FILE")]
    pub embeddings: Option<PathBuf>,
    /// key = value settings file.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Primary output; stdout when absent.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Run manifest path; defaults to <out>.manifest.json, else stderr.
    #[arg(long, global = true, value_name = "FILE")]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Propose Chinese candidates for every synset from bilingual dictionaries.
    Build {
        /// Dictionary TSV (english, chinese|..., source); repeatable, earlier wins.
        #[arg(long = "dict", value_name = "FILE", required = true)]
        dicts: Vec<PathBuf>,
        /// Existing lexicon to merge the new candidates into.
        #[arg(long, value_name = "FILE")]
        base: Option<PathBuf>,
        /// Write English lemmas without a dictionary entry here.
        #[arg(long, value_name = "FILE")]
        misses: Option<PathBuf>,
    },
    /// Filter candidates by their distance on the fitted projection.
    Screen {
        /// Write one screening outcome per synset here (JSONL).
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
        /// Review queue to extend with deferred and rule-flagged candidates.
        #[arg(long, value_name = "FILE")]
        queue: Option<PathBuf>,
        /// Do not flag description-like translations for review.
        #[arg(long)]
        no_hard_patterns: bool,
    },
    /// Replay an edit log onto a lexicon.
    ApplyEdits {
        #[arg(long, value_name = "FILE")]
        edits: PathBuf,
    },
    /// Precision, recall and F of lemmas against a gloss standard.
    EvalRelatedness {
        /// TSV of synset id and English gloss.
        #[arg(long, value_name = "FILE")]
        standard: PathBuf,
        #[arg(long, value_name = "FILE")]
        stoplist: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Rank correlation of taxonomy similarity with human pair ratings.
    EvalSimilarity {
        /// TSV of word, word, score.
        #[arg(long, value_name = "FILE")]
        pairs: PathBuf,
        /// Rating scale, checked before scoring.
        #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], allow_negative_numbers = true)]
        scale: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Disambiguate targets by context and gloss vectors.
    EvalWsd {
        /// Instance JSONL.
        #[arg(long, value_name = "FILE", conflicts_with = "semeval_xml", required_unless_present = "semeval_xml")]
        instances: Option<PathBuf>,
        /// Lexical-sample XML, read with --semeval-key.
        #[arg(long, value_name = "FILE", requires = "semeval_key")]
        semeval_xml: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        semeval_key: Option<PathBuf>,
        /// TSV of word, sense id, English lemma, gloss.
        #[arg(long, value_name = "FILE")]
        inventory: PathBuf,
        #[arg(long, value_name = "FILE")]
        stoplist: Option<PathBuf>,
        /// Also score the first-sense baseline.
        #[arg(long)]
        baseline: bool,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Translation coverage per part of speech.
    Stats {
        /// Edit log to apply to the lexicon first.
        #[arg(long, value_name = "FILE")]
        edits: Option<PathBuf>,
    },
    /// Serve the review API; the address comes from ZHWN_LISTEN.
    Serve {
        /// Holds lexicon.jsonl, edits.jsonl, queue.jsonl, screening.jsonl.
        #[arg(long, value_name = "DIR")]
        data: PathBuf,
        /// Static files served outside /api.
        #[arg(long = "static", value_name = "DIR")]
        static_dir: Option<PathBuf>,
    },
}

/// A missing or inconsistent argument found after parsing.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}\n\nFor more information, try '--help'.");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
