//! `permsig`: signature verification from pen trajectories, end to end.
//!
//! Subcommands cover the whole pipeline: `synth` writes a seeded synthetic
//! dataset, `features` extracts the six ordinal quantifiers per signature,
//! `train` fits per-subject one-class models, `verify` scores probes against
//! a model, `evaluate` runs the enrollment protocol and reports ACC/AUC/EER,
//! and `cluster` groups subjects by their genuine-feature statistics.
//!
//! Machine-readable results (CSV, JSON, Newick) go to files or stdout;
//! diagnostics go to stderr. Exit codes: 0 success, 1 fatal, 2 partial
//! failure. Every command is deterministic given its flags and seed; the
//! `PERMSIG_SEED` environment variable is the fallback for `--seed`.

mod commands;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "permsig",
    version,
    about = "Online signature verification with ordinal-pattern features"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset and manifest.
    Synth(SynthArgs),
    /// Extract feature vectors for every signature in a manifest.
    Features(FeaturesArgs),
    /// Train one one-class model per subject from a feature file.
    Train(TrainArgs),
    /// Score probe signatures against a trained model.
    Verify(VerifyArgs),
    /// Run the enrollment protocol and report ACC/AUC/EER.
    Evaluate(EvaluateArgs),
    /// Cluster subjects by genuine-feature statistics.
    Cluster(ClusterArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Output directory for trace files and manifest.json.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 20)]
    subjects: usize,
    #[arg(long, default_value_t = 25)]
    genuine: usize,
    #[arg(long, default_value_t = 25)]
    forgeries: usize,
    #[arg(long, default_value_t = 4)]
    harmonics: usize,
    #[arg(long, default_value_t = 0.012)]
    genuine_jitter: f64,
    #[arg(long, default_value_t = 0.08)]
    forgery_distortion: f64,
    #[arg(long, env = "PERMSIG_SEED", default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct FeaturesArgs {
    /// Dataset manifest (JSON).
    #[arg(long)]
    manifest: PathBuf,
    /// Output feature file.
    #[arg(long)]
    out: PathBuf,
    /// Ordinal pattern length.
    #[arg(long, default_value_t = 5)]
    dimension: usize,
    /// Ordinal time lag.
    #[arg(long, default_value_t = 1)]
    lag: usize,
    /// Points per trace after resampling.
    #[arg(long, default_value_t = 2000)]
    resample_length: usize,
    /// Output format: csv or json (json embeds the ordinal configuration).
    #[arg(long, default_value = "csv")]
    format: String,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Treat warnings (degenerate axes, statistically short traces) as errors.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct TrainArgs {
    /// Feature CSV produced by `features`.
    #[arg(long)]
    features: PathBuf,
    /// Directory for per-subject model JSON files.
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = permsig::ocsvm::DEFAULT_NU)]
    nu: f64,
    #[arg(long, default_value_t = permsig::ocsvm::DEFAULT_SIGMA_SQ)]
    sigma_sq: f64,
    /// Candidate kernel widths; picks per subject by cross validation.
    #[arg(long, value_delimiter = ',')]
    sigma_grid: Option<Vec<f64>>,
    /// Cross-validation folds (with --sigma-grid).
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, env = "PERMSIG_SEED", default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = permsig::ocsvm::DEFAULT_SOLVER_TOLERANCE)]
    tolerance: f64,
    #[arg(long, default_value_t = permsig::ocsvm::DEFAULT_MAX_ITERATIONS)]
    max_iterations: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args)]
struct VerifyArgs {
    /// Trained model JSON.
    #[arg(long)]
    model: PathBuf,
    /// Feature CSV of the probes to score.
    #[arg(long)]
    features: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Feature CSV covering every subject.
    #[arg(long)]
    features: PathBuf,
    /// Genuine signatures enrolled per subject.
    #[arg(long, default_value_t = 5)]
    train_size: usize,
    /// Report JSON output path.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = permsig::ocsvm::DEFAULT_NU)]
    nu: f64,
    #[arg(long, default_value_t = permsig::ocsvm::DEFAULT_SIGMA_SQ)]
    sigma_sq: f64,
    #[arg(long, env = "PERMSIG_SEED", default_value_t = 42)]
    seed: u64,
    /// Pooled ROC as CSV (threshold, far, frr).
    #[arg(long)]
    roc_out: Option<PathBuf>,
    /// Per-subject metrics as CSV.
    #[arg(long)]
    per_subject_out: Option<PathBuf>,
    /// Subject-to-class CSV (subject_id,class); evaluates each class
    /// separately and writes a map of reports.
    #[arg(long)]
    classes: Option<PathBuf>,
    /// Treat warnings (classes matching no subject) as errors.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct ClusterArgs {
    /// Feature CSV covering every subject.
    #[arg(long)]
    features: PathBuf,
    /// Which quantifiers feed the summaries: entropy, complexity, fisher, all.
    #[arg(long, default_value = "entropy")]
    feature_selection: String,
    /// Distance between summaries: euclidean, manhattan, maximum.
    #[arg(long, default_value = "euclidean")]
    metric: String,
    /// Cluster-to-cluster linkage: average, complete, single.
    #[arg(long, default_value = "average")]
    linkage: String,
    /// Dendrogram output (Newick).
    #[arg(long)]
    newick_out: PathBuf,
    /// Cut into exactly this many clusters.
    #[arg(long)]
    k: Option<usize>,
    /// Cut at this fraction of the root merge height.
    #[arg(long)]
    height_fraction: Option<f64>,
    /// Cluster assignment CSV (subject_id,cluster); needs a cut.
    #[arg(long)]
    assignments_out: Option<PathBuf>,
    /// Fitted per-cluster boxes as JSON; needs a cut.
    #[arg(long)]
    boxes_out: Option<PathBuf>,
    /// Print a JSON report on whether the three metrics agree at --k.
    #[arg(long)]
    stability: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Synth(args) => commands::synth(args),
        Command::Features(args) => commands::features(args),
        Command::Train(args) => commands::train(args),
        Command::Verify(args) => commands::verify(args),
        Command::Evaluate(args) => commands::evaluate(args),
        Command::Cluster(args) => commands::cluster(args),
    };
    match outcome {
        Ok(commands::Outcome::Success) => ExitCode::SUCCESS,
        Ok(commands::Outcome::PartialFailure) => ExitCode::from(2),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
