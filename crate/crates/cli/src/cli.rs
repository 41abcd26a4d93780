use std::path::PathBuf;

use ara_core::features::FeatureSet;
use ara_core::forest::FeatureRule;
use ara_core::stats::TestKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Readability assessment across closely related languages.
///
/// Exit status: 0 on success, 1 when inputs or arguments are invalid,
/// 2 when a run fails on valid input.
#[derive(Debug, Parser)]
#[command(name = "ara", version)]
pub struct Cli {
    /// Print one JSON object on stdout instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Worker threads; 1 runs everything sequentially. Defaults to all cores.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    /// Seed for forests and fold assignment (default 1).
    #[arg(long, global = true, value_name = "SEED")]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build n-gram profiles per corpus and the pairwise overlap matrix.
    Profile(ProfileArgs),
    /// Genetic distance and relatedness band for each language pair of a wordlist.
    Genetic(GeneticArgs),
    /// Extract a feature matrix (CSV plus schema sidecar) from corpora.
    Features(FeaturesArgs),
    /// Train a random forest on a feature matrix.
    Train(TrainArgs),
    /// Score a model on a feature matrix, or cross-validate with --cv.
    Eval(EvalArgs),
    /// Run the cross-lingual experiment grid described by a config file.
    Matrix(MatrixArgs),
    /// t-test between two groups of cells of a saved report.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    /// Corpus manifest; repeat for each language.
    #[arg(long = "corpus", required = true, value_name = "MANIFEST")]
    pub corpora: Vec<PathBuf>,
    /// N-gram order.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Share of n-gram types kept, in (0, 1].
    #[arg(long = "top", default_value_t = 0.25)]
    pub top_fraction: f64,
    /// RBO persistence in (0, 1]; 1 gives average overlap.
    #[arg(long, default_value_t = 0.9)]
    pub p: f64,
    /// Directory for `<lang>.n<N>.tsv` profiles and `overlap.n<N>.tsv`.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GeneticArgs {
    /// Tab-separated wordlist with a `concept` column and one column per language.
    pub wordlist: PathBuf,
    /// Drop concepts with an empty cell instead of failing.
    #[arg(long)]
    pub skip_incomplete: bool,
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    /// Corpus manifest to extract rows from; repeatable.
    #[arg(long = "corpus", required = true, value_name = "MANIFEST")]
    pub corpora: Vec<PathBuf>,
    #[arg(long = "set", default_value = "trad-crossngo", value_parser = parse_feature_set)]
    pub feature_set: FeatureSet,
    /// Directory of saved profiles (`tgl.n2.tsv`, ..., `ceb.n3.tsv`).
    #[arg(long, value_name = "DIR", conflicts_with = "reference")]
    pub profiles: Option<PathBuf>,
    /// Manifests to build reference profiles from; defaults to the --corpus ones.
    #[arg(long, value_name = "MANIFEST")]
    pub reference: Vec<PathBuf>,
    /// Share of n-gram types kept when building reference profiles.
    #[arg(long = "top", default_value_t = 0.25)]
    pub top_fraction: f64,
    /// Embedding table (`id,e0,...,e767`).
    #[arg(long, value_name = "CSV")]
    pub embeddings: Option<PathBuf>,
    /// Languages syllabified without the `ng` digraph.
    #[arg(long, value_delimiter = ',', default_value = "eng")]
    pub plain: Vec<String>,
    /// Output CSV; the schema is written next to it.
    #[arg(long, value_name = "CSV")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ForestArgs {
    #[arg(long, default_value_t = 100)]
    pub trees: usize,
    /// Features tried per split: `log2`, `ln` or a count.
    #[arg(long, default_value = "log2", value_parser = parse_feature_rule)]
    pub num_features: FeatureRule,
    #[arg(long)]
    pub max_depth: Option<usize>,
    /// Bootstrap size as a share of the training set.
    #[arg(long, default_value_t = 1.0)]
    pub bag_fraction: f64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Feature matrix written by `features`.
    #[arg(long, value_name = "CSV")]
    pub features: PathBuf,
    #[command(flatten)]
    pub forest: ForestArgs,
    /// Model output (JSON).
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_name = "CSV")]
    pub features: PathBuf,
    /// Trained model to score.
    #[arg(long, value_name = "PATH", required_unless_present = "cv", conflicts_with = "cv")]
    pub model: Option<PathBuf>,
    /// Stratified k-fold cross-validation instead of a saved model.
    #[arg(long, value_name = "K")]
    pub cv: Option<usize>,
    #[command(flatten)]
    pub forest: ForestArgs,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    /// Experiment config (TOML).
    #[arg(long, env = "ARA_CONFIG", value_name = "TOML")]
    pub config: PathBuf,
    /// Report output (JSON).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Accuracy table output (TSV).
    #[arg(long, value_name = "PATH")]
    pub table: Option<PathBuf>,
    /// Override the configured number of folds.
    #[arg(long)]
    pub folds: Option<usize>,
    /// Override the configured number of trees.
    #[arg(long)]
    pub trees: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Paired,
    Welch,
}

impl From<KindArg> for TestKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Paired => TestKind::Paired,
            KindArg::Welch => TestKind::Welch,
        }
    }
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Report written by `matrix --out`.
    #[arg(long, value_name = "JSON")]
    pub report: PathBuf,
    /// Cell selector for the first group, e.g. `setup=pairwise,features=trad-crossngo`.
    #[arg(long)]
    pub a: String,
    /// Cell selector for the second group.
    #[arg(long)]
    pub b: String,
    #[arg(long, value_enum, default_value_t = KindArg::Paired)]
    pub kind: KindArg,
}

fn parse_feature_set(s: &str) -> Result<FeatureSet, String> {
    s.parse().map_err(|e: ara_core::Error| e.to_string())
}

fn parse_feature_rule(s: &str) -> Result<FeatureRule, String> {
    match s {
        "log2" => Ok(FeatureRule::Log2),
        "ln" => Ok(FeatureRule::Ln),
        n => match n.parse::<usize>() {
            Ok(k) if k > 0 => Ok(FeatureRule::Fixed(k)),
            _ => Err(format!("expected `log2`, `ln` or a positive count, got `{n}`")),
        },
    }
}
