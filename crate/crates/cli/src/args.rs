use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "cemaint", version, about = "Cross-entropy and LLOC as maintainability signals")]
pub struct Cli {
    /// JSON file with defaults for any flag (flags win).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// More logging (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score every source file of a corpus with one language model.
    Score(ScoreArgs),
    /// Cross-validate classifiers on joined scores and ratings.
    Evaluate(EvaluateArgs),
    /// Descriptive statistics of per-file cross-entropy, one row per model.
    Stats(StatsArgs),
    /// Marginal vs. LLOC-conditional association of CE with the label.
    Analyze(AnalyzeArgs),
    /// Convert an upstream ratings table to the canonical ratings CSV.
    RatingsAdapt(RatingsAdaptArgs),
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Model-serving shim URL (default: $CEMAINT_ENDPOINT).
    #[arg(long, conflicts_with = "builtin")]
    pub endpoint: Option<String>,
    /// uniform:V or unigram:PATH
    #[arg(long)]
    pub builtin: Option<String>,
    #[arg(long)]
    pub max_input: Option<usize>,
    /// Prefix every chunk with the model's BOS token.
    #[arg(long)]
    pub prepend_bos: bool,
    /// Files scored concurrently.
    #[arg(long)]
    pub concurrency: Option<usize>,
    /// File extensions to include (repeatable).
    #[arg(long = "ext")]
    pub extensions: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub scores: Option<PathBuf>,
    #[arg(long)]
    pub ratings: Option<PathBuf>,
    /// Model to use when the scores file holds several.
    #[arg(long)]
    pub model: Option<String>,
    /// ov|rd|ud|cx|md
    #[arg(long)]
    pub dimension: Option<String>,
    /// lloc|ce|both
    #[arg(long)]
    pub features: Option<String>,
    /// Every dimension × feature set × classifier.
    #[arg(long)]
    pub all: bool,
    /// logreg|rf
    #[arg(long)]
    pub classifier: Option<String>,
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Shuffle within classes before assigning folds.
    #[arg(long)]
    pub shuffle: bool,
    /// per-fold|global
    #[arg(long)]
    pub scaling: Option<String>,
    /// Trees per random forest.
    #[arg(long)]
    pub trees: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Scores CSVs (repeatable).
    #[arg(long = "scores", required = false)]
    pub scores: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Scores CSVs (repeatable); each model is analyzed separately.
    #[arg(long = "scores")]
    pub scores: Vec<PathBuf>,
    #[arg(long)]
    pub ratings: Option<PathBuf>,
    #[arg(long)]
    pub dimension: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RatingsAdaptArgs {
    /// Upstream ratings table.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
