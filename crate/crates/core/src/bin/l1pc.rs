use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, CommandFactory, FromArgMatches, Parser, Subcommand};

use l1pc::cli::io::{parse_lambda_list, parse_level_list, parse_positive_list, LambdaToken};
use l1pc::cli::sweep::{run_sweep, Experiment, ExperimentConfig, LambdaSpec, NoiseSpec, TransformSpec};
use l1pc::linalg::DEFAULT_ZERO_TOL;

/// Sparsity-targeted l1 regularization sweeps.
///
/// Each subcommand builds one family of l1-regularized problems, solves it by
/// the fixed-point proximity algorithm for every requested lambda, and writes
/// one CSV row per solve.
#[derive(Parser)]
#[command(name = "l1pc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Denoising with the identity operator (Lasso).
    LassoIdentity(Flags),
    /// Image denoising, sparse in a separable 2-D wavelet basis.
    ImageDwt(Flags),
    /// Group Lasso over the levels of a wavelet basis.
    GroupLasso(Flags),
    /// Total-variation denoising of a 1-D signal.
    TvSignal(Flags),
    /// Kernel classifier with square loss.
    SvmSquare(Flags),
    /// Kernel classifier with hinge loss.
    SvmHinge(Flags),
    /// Kernel regression with the eps-insensitive loss.
    SvmEps(Flags),
    /// Closed-form most-sparse logistic regression quantities.
    LogisticCheck(Flags),
    /// lambda = C * delta over a grid of noise levels.
    Balance(Flags),
}

impl Command {
    fn split(self) -> (Experiment, Flags) {
        match self {
            Command::LassoIdentity(f) => (Experiment::LassoIdentity, f),
            Command::ImageDwt(f) => (Experiment::ImageDwt, f),
            Command::GroupLasso(f) => (Experiment::GroupLasso, f),
            Command::TvSignal(f) => (Experiment::TvSignal, f),
            Command::SvmSquare(f) => (Experiment::SvmSquare, f),
            Command::SvmHinge(f) => (Experiment::SvmHinge, f),
            Command::SvmEps(f) => (Experiment::SvmEps, f),
            Command::LogisticCheck(f) => (Experiment::LogisticCheck, f),
            Command::Balance(f) => (Experiment::Balance, f),
        }
    }
}

#[derive(Clone)]
struct Tokens(Vec<LambdaToken>);

#[derive(Clone)]
struct Levels(Vec<usize>);

#[derive(Clone)]
struct Positives(Vec<f64>);

#[derive(Args)]
#[command(group(ArgGroup::new("noise").args(["sigma", "snr", "delta_list"])))]
#[command(group(ArgGroup::new("lambda_spec").args(["lambda_list", "target_levels", "c"])))]
struct Flags {
    /// Signal length, image side, or number of synthetic samples.
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated lambdas; `max` and `<factor>max` scale lambda_max.
    #[arg(long, value_parser = |s: &str| parse_lambda_list(s).map(Tokens).map_err(|e| e.to_string()))]
    lambda_list: Option<Tokens>,
    /// Comma-separated target sparsity levels.
    #[arg(long, value_parser = |s: &str| parse_level_list(s).map(Levels).map_err(|e| e.to_string()))]
    target_levels: Option<Levels>,
    /// lambda = C * delta.
    #[arg(long)]
    c: Option<f64>,
    /// Noise standard deviation per entry.
    #[arg(long)]
    sigma: Option<f64>,
    /// Signal-to-noise ratio in dB.
    #[arg(long)]
    snr: Option<f64>,
    /// Comma-separated noise norms, one realization each.
    #[arg(long, value_parser = |s: &str| parse_positive_list(s).map(Positives).map_err(|e| e.to_string()))]
    delta_list: Option<Positives>,
    /// Iteration budget per solve.
    #[arg(long)]
    iters: Option<usize>,
    /// Primal step size.
    #[arg(long)]
    beta: Option<f64>,
    /// Dual step size.
    #[arg(long)]
    rho: Option<f64>,
    /// Seed of every random draw; required when noise or data is drawn.
    #[arg(long)]
    seed: Option<u64>,
    /// Stop a solve once the relative change of the iterates drops below this;
    /// 0 runs the full budget.
    #[arg(long, default_value_t = 0.0)]
    rel_tol: f64,
    /// Relative zero test for sparsity counts.
    #[arg(long, default_value_t = DEFAULT_ZERO_TOL)]
    zero_tol: f64,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Daubechies wavelet as `N,L`: vanishing moments and coarsest level.
    #[arg(long, value_parser = parse_wavelet, conflicts_with = "dct")]
    wavelet: Option<(usize, u32)>,
    /// Use the orthonormal DCT.
    #[arg(long)]
    dct: bool,
    /// Gaussian kernel width.
    #[arg(long)]
    mu: Option<f64>,
    /// Insensitive-zone width of svm-eps.
    #[arg(long)]
    eps: Option<f64>,
    /// Square power-of-two PGM image (P2 or P5).
    #[arg(long)]
    image: Option<PathBuf>,
    /// CSV dataset, label in the last column.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Plain-text signal, one value per line.
    #[arg(long)]
    signal: Option<PathBuf>,
}

fn parse_wavelet(s: &str) -> Result<(usize, u32), String> {
    let (n, l) = s.split_once(',').ok_or_else(|| format!("expected N,L, got {s:?}"))?;
    let n = n.trim().parse().map_err(|_| format!("bad vanishing-moment count {n:?}"))?;
    let l = l.trim().parse().map_err(|_| format!("bad level {l:?}"))?;
    Ok((n, l))
}

impl Flags {
    fn into_config(self, experiment: Experiment) -> (ExperimentConfig, Option<PathBuf>) {
        let mut cfg = ExperimentConfig::new(experiment);
        cfg.n = self.n;
        cfg.image = self.image;
        cfg.dataset = self.dataset;
        cfg.signal = self.signal;
        cfg.transform = match (self.wavelet, self.dct) {
            (Some((moments, level)), _) => Some(TransformSpec::Wavelet { moments, level }),
            (None, true) => Some(TransformSpec::Dct),
            (None, false) => None,
        };
        cfg.mu = self.mu;
        cfg.eps = self.eps;
        cfg.noise = self
            .sigma
            .map(NoiseSpec::Sigma)
            .or(self.snr.map(NoiseSpec::Snr))
            .or(self.delta_list.map(|d| NoiseSpec::Deltas(d.0)));
        cfg.lambda = self
            .lambda_list
            .map(|t| LambdaSpec::List(t.0))
            .or(self.target_levels.map(|l| LambdaSpec::TargetLevels(l.0)))
            .or(self.c.map(LambdaSpec::Scaled));
        cfg.iters = self.iters;
        cfg.beta = self.beta;
        cfg.rho = self.rho;
        cfg.seed = self.seed;
        cfg.rel_tol = self.rel_tol;
        cfg.zero_tol = self.zero_tol;
        (cfg, self.out)
    }
}

fn main() -> ExitCode {
    let mut cmd = Cli::command();
    for e in Experiment::ALL {
        let cols: Vec<&str> = e.columns().iter().map(|c| c.name()).collect();
        cmd = cmd.mut_subcommand(e.name(), |s| s.after_help(format!("CSV columns: {}", cols.join(","))));
    }
    let cli = match Cli::from_arg_matches(&cmd.get_matches()) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let (experiment, flags) = cli.command.split();
    let (cfg, out) = flags.into_config(experiment);
    let result = run_sweep(&cfg).map(|t| t.to_csv()).and_then(|csv| match &out {
        Some(p) => std::fs::write(p, csv).map_err(Into::into),
        None => {
            print!("{csv}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("l1pc: {e}");
            ExitCode::FAILURE
        }
    }
}
