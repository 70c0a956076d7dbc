//! Parameter sweeps: one solve per `lambda` (and noise realization), one CSV
//! row per solve.
//!
//! Rows are solved in parallel. Every random draw is keyed by the seed and a
//! fixed stream index, and rows are emitted sorted by `(delta, lambda)`, so the
//! table does not depend on scheduling.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;

use crate::cli::data::{doppler_signal, synth_regression, synth_two_class_stream, synthetic_image};
use crate::cli::io::{load_csv_dataset, load_signal, read_pgm, LambdaToken};
use crate::cli::metrics::{accuracy, error_ratio, mse, psnr};
use crate::cli::noise::{add_gaussian_noise, NoiseLevel};
use crate::error::{Error, Result};
use crate::fppa::{fppa_solve_with_norm, spectral_norm, FppaConfig, SolveReport};
use crate::linalg::{block_sparsity_level, sparsity_level, LinearOperator, Matrix, DEFAULT_ZERO_TOL};
use crate::param_choice::{
    balance_strategy, default_tolerance, difference_multipliers, group_lasso_thresholds, lambda_for_sparsity,
    lasso_identity_thresholds, logistic_lambda_max, project_boxes, svm_square_lambda_max, tv_lambda_max_fast,
    verify_projected, BalanceMode, ThresholdSet,
};
use crate::prox::{
    subdiff_near, EpsInsensitiveSum, GroupL2, HingeSum, L1Norm, LeadingL1, ScalarLossKind, SquaredDistance,
    SubdiffInterval,
};
use crate::transforms::{
    dct_matrix, gaussian_cross_kernel, gaussian_kernel_matrix, FirstDifference, Identity, Kron2d, Transposed, Wavelet,
    WithNorm,
};

/// A numerical solution within this distance of a loss kink is treated as
/// sitting on it when the subdifferential boxes are formed.
pub const KINK_TOL: f64 = 1e-4;

// stream indices of the generator; noise realizations use 0, 1, ...
const TRAIN_STREAM: u64 = 1 << 32;
const TEST_STREAM: u64 = (1 << 32) + 1;

const SYNTH_SEPARATION: f64 = 2.0;
const SYNTH_DIM: usize = 2;
const SYNTH_REGRESSION_NOISE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    LassoIdentity,
    ImageDwt,
    GroupLasso,
    TvSignal,
    SvmSquare,
    SvmHinge,
    SvmEps,
    LogisticCheck,
    Balance,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::LassoIdentity,
        Experiment::ImageDwt,
        Experiment::GroupLasso,
        Experiment::TvSignal,
        Experiment::SvmSquare,
        Experiment::SvmHinge,
        Experiment::SvmEps,
        Experiment::LogisticCheck,
        Experiment::Balance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::LassoIdentity => "lasso-identity",
            Experiment::ImageDwt => "image-dwt",
            Experiment::GroupLasso => "group-lasso",
            Experiment::TvSignal => "tv-signal",
            Experiment::SvmSquare => "svm-square",
            Experiment::SvmHinge => "svm-hinge",
            Experiment::SvmEps => "svm-eps",
            Experiment::LogisticCheck => "logistic-check",
            Experiment::Balance => "balance",
        }
    }

    /// The CSV schema of the experiment.
    pub fn columns(self) -> &'static [Column] {
        use Column::*;
        match self {
            Experiment::LassoIdentity => &[Lambda, Delta, Sl, PredictedSl, Mse, Iterations],
            Experiment::ImageDwt => &[Lambda, Delta, Sl, PredictedSl, Psnr, Iterations],
            Experiment::GroupLasso => &[Lambda, Delta, Bsl, PredictedBsl, Mse, Iterations],
            Experiment::TvSignal => &[Lambda, Delta, Gamma, Sl, Mse, Iterations],
            Experiment::SvmSquare | Experiment::SvmHinge | Experiment::SvmEps => {
                &[Lambda, Gamma, Sl, Tra, Tea, Iterations]
            }
            Experiment::LogisticCheck => &[LambdaMax, BStar, Ytc, Positives, Negatives],
            Experiment::Balance => &[Delta, Lambda, Sl, ImpliedSl, Mse, MseOverDelta, ErrorRatio, Iterations],
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown experiment {s:?}")))
    }
}

impl std::fmt::Display for Experiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A CSV column and the [`SweepRow`] field it prints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    Lambda,
    Delta,
    Sl,
    Bsl,
    PredictedSl,
    PredictedBsl,
    ImpliedSl,
    Gamma,
    Mse,
    Psnr,
    Tra,
    Tea,
    MseOverDelta,
    ErrorRatio,
    Iterations,
    LambdaMax,
    BStar,
    Ytc,
    Positives,
    Negatives,
}

impl Column {
    pub fn name(self) -> &'static str {
        match self {
            Column::Lambda => "lambda",
            Column::Delta => "delta",
            Column::Sl => "sl",
            Column::Bsl => "bsl",
            Column::PredictedSl => "predicted_sl",
            Column::PredictedBsl => "predicted_bsl",
            Column::ImpliedSl => "implied_sl",
            Column::Gamma => "gamma",
            Column::Mse => "mse",
            Column::Psnr => "psnr",
            Column::Tra => "tra",
            Column::Tea => "tea",
            Column::MseOverDelta => "mse_over_delta",
            Column::ErrorRatio => "error_ratio",
            Column::Iterations => "iterations",
            Column::LambdaMax => "lambda_max",
            Column::BStar => "b_star",
            Column::Ytc => "ytc",
            Column::Positives => "positives",
            Column::Negatives => "negatives",
        }
    }

    /// The value as a float, `None` when the row does not carry it.
    pub fn value(self, row: &SweepRow) -> Option<f64> {
        let int = |v: Option<usize>| v.map(|k| k as f64);
        match self {
            Column::Lambda | Column::LambdaMax => Some(row.lambda),
            Column::Delta => row.delta,
            Column::Sl | Column::Bsl => int(row.level),
            Column::PredictedSl | Column::PredictedBsl | Column::ImpliedSl => int(row.predicted_level),
            Column::Gamma => row.gamma,
            Column::Mse => row.mse,
            Column::Psnr => row.psnr,
            Column::Tra => row.tra,
            Column::Tea => row.tea,
            Column::MseOverDelta => row.mse_over_delta,
            Column::ErrorRatio => row.error_ratio,
            Column::Iterations => int(row.iterations),
            Column::BStar => row.b_star,
            Column::Ytc => row.ytc,
            Column::Positives => int(row.positives),
            Column::Negatives => int(row.negatives),
        }
    }

    fn is_integer(self) -> bool {
        matches!(
            self,
            Column::Sl
                | Column::Bsl
                | Column::PredictedSl
                | Column::PredictedBsl
                | Column::ImpliedSl
                | Column::Iterations
                | Column::Positives
                | Column::Negatives
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransformSpec {
    /// Periodized Daubechies with `moments` vanishing moments down to `level`.
    Wavelet {
        moments: usize,
        level: u32,
    },
    Dct,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NoiseSpec {
    Sigma(f64),
    Snr(f64),
    /// One realization per noise norm.
    Deltas(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum LambdaSpec {
    List(Vec<LambdaToken>),
    /// The threshold leaving each listed number of nonzeros.
    TargetLevels(Vec<usize>),
    /// `lambda = c * delta`.
    Scaled(f64),
}

/// Everything a sweep depends on. Unset fields take per-experiment defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Signal length, image side, or sample count.
    pub n: Option<usize>,
    pub image: Option<PathBuf>,
    pub dataset: Option<PathBuf>,
    pub signal: Option<PathBuf>,
    pub transform: Option<TransformSpec>,
    /// Gaussian kernel width.
    pub mu: Option<f64>,
    /// Width of the insensitive zone of `svm-eps`.
    pub eps: Option<f64>,
    pub noise: Option<NoiseSpec>,
    pub lambda: Option<LambdaSpec>,
    pub iters: Option<usize>,
    pub beta: Option<f64>,
    pub rho: Option<f64>,
    pub seed: Option<u64>,
    /// Early stop on the relative change of the iterates; 0 runs the budget.
    pub rel_tol: f64,
    pub zero_tol: f64,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        ExperimentConfig {
            experiment,
            n: None,
            image: None,
            dataset: None,
            signal: None,
            transform: None,
            mu: None,
            eps: None,
            noise: None,
            lambda: None,
            iters: None,
            beta: None,
            rho: None,
            seed: None,
            rel_tol: 0.0,
            zero_tol: DEFAULT_ZERO_TOL,
        }
    }

    fn seed(&self, what: &str) -> Result<u64> {
        self.seed.ok_or_else(|| Error::InvalidArgument(format!("{} draws {what}; a seed is required", self.experiment)))
    }
}

/// One solve. Fields an experiment does not produce stay `None`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub delta: Option<f64>,
    /// Sparsity level (or block sparsity level) of the solution.
    pub level: Option<usize>,
    /// Level predicted by the thresholds, or implied by the balance rule.
    pub predicted_level: Option<usize>,
    pub gamma: Option<f64>,
    pub mse: Option<f64>,
    pub psnr: Option<f64>,
    pub tra: Option<f64>,
    pub tea: Option<f64>,
    pub mse_over_delta: Option<f64>,
    pub error_ratio: Option<f64>,
    pub iterations: Option<usize>,
    pub b_star: Option<f64>,
    pub ytc: Option<f64>,
    pub positives: Option<usize>,
    pub negatives: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub experiment: Experiment,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn columns(&self) -> &'static [Column] {
        self.experiment.columns()
    }

    /// Values of the named column, `None` for an unknown name.
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let c = self.columns().iter().find(|c| c.name() == name)?;
        Some(self.rows.iter().map(|r| c.value(r)).collect())
    }

    /// Header plus one line per row; reals with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let cols = self.columns();
        let mut out = cols.iter().map(|c| c.name()).collect::<Vec<_>>().join(",");
        out.push('\n');
        for row in &self.rows {
            for (k, c) in cols.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                match c.value(row) {
                    Some(v) if c.is_integer() => write!(out, "{}", v as u64).expect("writing to a String"),
                    Some(v) => out.push_str(&format_real(v)),
                    None => {}
                }
            }
            out.push('\n');
        }
        out
    }
}

/// `{:.16e}`, with `inf`, `-inf` and `nan` spelled out.
pub fn format_real(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

/// Runs the configured sweep.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepTable> {
    if !(cfg.rel_tol >= 0.0 && cfg.rel_tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("relative tolerance must be finite and >= 0, got {}", cfg.rel_tol)));
    }
    if !(cfg.zero_tol >= 0.0 && cfg.zero_tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("zero tolerance must be finite and >= 0, got {}", cfg.zero_tol)));
    }
    let mut rows = match cfg.experiment {
        Experiment::LassoIdentity => lasso_identity(cfg)?,
        Experiment::ImageDwt => image_dwt(cfg)?,
        Experiment::GroupLasso => group_lasso(cfg)?,
        Experiment::TvSignal => tv_signal(cfg)?,
        Experiment::SvmSquare | Experiment::SvmHinge | Experiment::SvmEps => svm(cfg)?,
        Experiment::LogisticCheck => logistic_check(cfg)?,
        Experiment::Balance => balance(cfg)?,
    };
    rows.sort_by(|a, b| a.delta.unwrap_or(0.0).total_cmp(&b.delta.unwrap_or(0.0)).then(a.lambda.total_cmp(&b.lambda)));
    Ok(SweepTable { experiment: cfg.experiment, rows })
}

struct Solver {
    iters: usize,
    beta: Option<f64>,
    rho: Option<f64>,
    rel_tol: f64,
    zero_tol: f64,
}

impl Solver {
    fn new(cfg: &ExperimentConfig, default_iters: usize) -> Self {
        Solver {
            iters: cfg.iters.unwrap_or(default_iters),
            beta: cfg.beta,
            rho: cfg.rho,
            rel_tol: cfg.rel_tol,
            zero_tol: cfg.zero_tol,
        }
    }

    fn solve(
        &self,
        phi: &dyn crate::prox::Proximable,
        omega: &dyn crate::prox::Proximable,
        c: &dyn LinearOperator,
        norm: f64,
    ) -> Result<SolveReport> {
        let mut fc = FppaConfig::with_default_steps(norm, self.iters).rel_tol(self.rel_tol);
        if let Some(b) = self.beta {
            fc.beta = b;
        }
        if let Some(r) = self.rho {
            fc.rho = r;
        }
        fc.zero_tol = self.zero_tol;
        fppa_solve_with_norm(phi, omega, c, &fc, norm)
    }
}

/// `(lambda, predicted level)` pairs for one noise realization.
fn resolve_lambdas(
    cfg: &ExperimentConfig,
    default: LambdaSpec,
    thresholds: Option<&ThresholdSet>,
    lambda_max: Option<f64>,
    delta: f64,
) -> Result<Vec<(f64, Option<usize>)>> {
    let spec = cfg.lambda.clone().unwrap_or(default);
    let predict = |l: f64| thresholds.map(|t| t.count_above(l));
    match spec {
        LambdaSpec::List(tokens) => tokens
            .iter()
            .map(|tok| {
                let l = match *tok {
                    LambdaToken::Value(v) => v,
                    LambdaToken::Max(f) => {
                        f * lambda_max.ok_or_else(|| {
                            Error::InvalidArgument(format!("{} has no closed-form lambda_max", cfg.experiment))
                        })?
                    }
                };
                Ok((l, predict(l)))
            })
            .collect(),
        LambdaSpec::TargetLevels(levels) => {
            let t = thresholds
                .ok_or_else(|| Error::InvalidArgument(format!("{} does not support target levels", cfg.experiment)))?;
            levels
                .iter()
                .map(|&l| {
                    if cfg.experiment == Experiment::Balance {
                        let (lambda, implied) = balance_strategy(t, BalanceMode::TargetLevel(l))?;
                        Ok((lambda, Some(implied)))
                    } else {
                        let lambda = lambda_for_sparsity(t, l)?;
                        Ok((lambda, predict(lambda)))
                    }
                })
                .collect()
        }
        LambdaSpec::Scaled(c) => {
            let l = c * delta;
            if !(l > 0.0) {
                return Err(Error::InvalidArgument(format!("C * delta must be positive (C={c}, delta={delta})")));
            }
            Ok(vec![(l, predict(l))])
        }
    }
}

/// Noise level of a single-realization experiment.
fn single_noise(cfg: &ExperimentConfig, default: Option<NoiseLevel>) -> Result<Option<NoiseLevel>> {
    match &cfg.noise {
        None => Ok(default),
        Some(NoiseSpec::Sigma(s)) => Ok(Some(NoiseLevel::Sigma(*s))),
        Some(NoiseSpec::Snr(s)) => Ok(Some(NoiseLevel::Snr(*s))),
        Some(NoiseSpec::Deltas(d)) if d.len() == 1 => Ok(Some(NoiseLevel::Delta(d[0]))),
        Some(NoiseSpec::Deltas(_)) => {
            Err(Error::InvalidArgument(format!("{} takes a single noise level", cfg.experiment)))
        }
    }
}

/// `f` plus one noise realization on stream `stream`, and the noise norm.
fn add_noise(cfg: &ExperimentConfig, f: &[f64], level: Option<NoiseLevel>, stream: u64) -> Result<(Vec<f64>, f64)> {
    match level {
        None => Ok((f.to_vec(), 0.0)),
        Some(l) => add_gaussian_noise(f, l, &mut crate::rng::SeededRng::new(cfg.seed("noise")?, stream)),
    }
}

fn clean_signal(cfg: &ExperimentConfig, default_n: usize) -> Result<Vec<f64>> {
    match &cfg.signal {
        Some(p) => load_signal(p),
        None => Ok(doppler_signal(cfg.n.unwrap_or(default_n))?.into_inner()),
    }
}

fn wavelet_spec(cfg: &ExperimentConfig, default: (usize, u32)) -> Result<(usize, u32)> {
    match cfg.transform {
        None => Ok(default),
        Some(TransformSpec::Wavelet { moments, level }) => Ok((moments, level)),
        Some(TransformSpec::Dct) => {
            Err(Error::InvalidArgument(format!("{} needs a wavelet transform", cfg.experiment)))
        }
    }
}

fn solve_rows<F>(lambdas: &[(f64, Option<usize>)], f: F) -> Result<Vec<SweepRow>>
where
    F: Fn(f64, Option<usize>) -> Result<SweepRow> + Sync,
{
    lambdas.par_iter().map(|&(l, p)| f(l, p)).collect()
}

fn lasso_identity(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let f = clean_signal(cfg, 20)?;
    let n = f.len();
    let (x, delta) = add_noise(cfg, &f, single_noise(cfg, None)?, 0)?;
    let t = lasso_identity_thresholds(&x);
    let lambda_max = lambda_for_sparsity(&t, 0)?;
    let lambdas = resolve_lambdas(cfg, LambdaSpec::TargetLevels((0..=n).collect()), Some(&t), Some(lambda_max), delta)?;
    let solver = Solver::new(cfg, 2000);
    let c = Identity { n };
    let omega = SquaredDistance { target: x };
    solve_rows(&lambdas, |lambda, predicted| {
        let r = solver.solve(&L1Norm { weight: lambda }, &omega, &c, 1.0)?;
        Ok(SweepRow {
            lambda,
            delta: Some(delta),
            level: Some(r.sparsity.level),
            predicted_level: predicted,
            mse: Some(mse(&f, r.u_inf.as_slice())?),
            iterations: Some(r.iterations_run),
            ..SweepRow::default()
        })
    })
}

fn image_dwt(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let (side, f) = match &cfg.image {
        Some(p) => {
            let img = read_pgm(p)?;
            if img.width != img.height || !img.width.is_power_of_two() {
                return Err(Error::InvalidShape(format!(
                    "image is {}x{}; a square power-of-two image is required",
                    img.width, img.height
                )));
            }
            (img.width, img.pixels.clone())
        }
        None => {
            let side = cfg.n.unwrap_or(64);
            if side < 2 || !side.is_power_of_two() {
                return Err(Error::InvalidArgument(format!("image side must be a power of two >= 2, got {side}")));
            }
            (side, synthetic_image(side))
        }
    };
    let depth = side.trailing_zeros();
    let (moments, level) = wavelet_spec(cfg, (4, 4.min(depth.saturating_sub(1))))?;
    let b = Kron2d::new(Wavelet::new(side, moments, level)?)?;
    let (x, delta) = add_noise(cfg, &f, single_noise(cfg, Some(NoiseLevel::Sigma(20.0)))?, 0)?;
    let bx = b.apply(&x);
    let t = lasso_identity_thresholds(&bx);
    let total = side * side;
    let levels = [2, 4, 8, 16, 32, 64].iter().map(|d| total / d).chain([0]).collect();
    let lambdas =
        resolve_lambdas(cfg, LambdaSpec::TargetLevels(levels), Some(&t), Some(lambda_for_sparsity(&t, 0)?), delta)?;
    let solver = Solver::new(cfg, 100);
    let a = Transposed(b);
    let omega = SquaredDistance { target: x };
    solve_rows(&lambdas, |lambda, predicted| {
        let r = solver.solve(&L1Norm { weight: lambda }, &omega, &a, 1.0)?;
        let u = a.apply(r.u_inf.as_slice());
        Ok(SweepRow {
            lambda,
            delta: Some(delta),
            level: Some(r.sparsity.level),
            predicted_level: predicted,
            psnr: Some(psnr(&f, &u, 255.0)?),
            iterations: Some(r.iterations_run),
            ..SweepRow::default()
        })
    })
}

fn group_lasso(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let f = clean_signal(cfg, 4096)?;
    let (moments, level) = wavelet_spec(cfg, (6, 3))?;
    let w = Wavelet::new(f.len(), moments, level)?;
    let partition = w.partition();
    let a = Transposed(w);
    let (x, delta) = add_noise(cfg, &f, single_noise(cfg, Some(NoiseLevel::Snr(7.0)))?, 0)?;
    let t = group_lasso_thresholds(&a, &x, &partition)?;
    let d = partition.len();
    let levels = if d == 10 { vec![10, 8, 6, 5, 3, 1, 0] } else { (0..=d).rev().collect() };
    let lambda_max = lambda_for_sparsity(&t, 0)?;
    let lambdas = resolve_lambdas(cfg, LambdaSpec::TargetLevels(levels), Some(&t), Some(lambda_max), delta)?;
    let solver = Solver::new(cfg, 1000);
    let omega = SquaredDistance { target: x };
    solve_rows(&lambdas, |lambda, predicted| {
        let phi = GroupL2::group_lasso(partition.clone(), lambda);
        let r = solver.solve(&phi, &omega, &a, 1.0)?;
        let u = r.u_inf.as_slice();
        Ok(SweepRow {
            lambda,
            delta: Some(delta),
            level: Some(block_sparsity_level(u, &partition, cfg.zero_tol)?.level),
            predicted_level: predicted,
            mse: Some(mse(&f, &a.apply(u))?),
            iterations: Some(r.iterations_run),
            ..SweepRow::default()
        })
    })
}

fn tv_signal(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let f = clean_signal(cfg, 4096)?;
    let d = FirstDifference::new(f.len())?;
    let norm = d.norm_hint().expect("first difference has a closed-form norm");
    let (x, delta) = add_noise(cfg, &f, single_noise(cfg, Some(NoiseLevel::Snr(7.0)))?, 0)?;
    let (lambda_max, _) = tv_lambda_max_fast(&x)?;
    let factors = [5e-4, 1e-3, 2e-3, 2e-2, 0.1, 0.4, 1.0];
    let default = LambdaSpec::List(factors.iter().map(|&k| LambdaToken::Max(k)).collect());
    let lambdas = resolve_lambdas(cfg, default, None, Some(lambda_max), delta)?;
    let solver = Solver::new(cfg, 50_000);
    let phi = SquaredDistance { target: x.clone() };
    solve_rows(&lambdas, |lambda, _| {
        let r = solver.solve(&phi, &L1Norm { weight: lambda }, &d, norm)?;
        let u = r.u_inf.as_slice();
        let z = d.apply(u);
        let grad: Vec<f64> = u.iter().zip(&x).map(|(a, b)| a - b).collect();
        let (g, kernel) = difference_multipliers(&grad);
        let ranges: Vec<(f64, f64)> = g.iter().chain([&kernel]).map(|&v| (v, v)).collect();
        let verdict = verify_projected(&ranges, &z, lambda, default_tolerance(lambda), cfg.zero_tol)?;
        Ok(SweepRow {
            lambda,
            delta: Some(delta),
            gamma: Some(verdict.gamma),
            level: Some(sparsity_level(&z, cfg.zero_tol).level),
            mse: Some(mse(&f, u)?),
            iterations: Some(r.iterations_run),
            ..SweepRow::default()
        })
    })
}

struct Split {
    train_x: Matrix,
    train_y: Vec<f64>,
    test_x: Matrix,
    test_y: Vec<f64>,
}

/// Dataset split 80/20 in file order, or synthetic train and test sets.
fn svm_data(cfg: &ExperimentConfig, classification: bool) -> Result<Split> {
    if let Some(p) = &cfg.dataset {
        let (x, y) = load_csv_dataset(p)?;
        if classification {
            check_binary_labels(&y)?;
        }
        let n = y.len();
        if n < 2 {
            return Err(Error::InvalidArgument(format!("dataset needs at least 2 rows, got {n}")));
        }
        let k = (4 * n / 5).clamp(1, n - 1);
        let rows = |r: std::ops::Range<usize>| Matrix::from_fn(r.len(), x.ncols(), |i, j| x.get(r.start + i, j));
        return Ok(Split {
            train_x: rows(0..k),
            train_y: y[..k].to_vec(),
            test_x: rows(k..n),
            test_y: y[k..].to_vec(),
        });
    }
    let seed = cfg.seed("synthetic data")?;
    let n = cfg.n.unwrap_or(100);
    let draw = |stream| {
        if classification {
            synth_two_class_stream(n, SYNTH_DIM, SYNTH_SEPARATION, seed, stream)
        } else {
            synth_regression(n, 1, SYNTH_REGRESSION_NOISE, seed, stream)
        }
    };
    let (train_x, train_y) = draw(TRAIN_STREAM)?;
    let (test_x, test_y) = draw(TEST_STREAM)?;
    Ok(Split { train_x, train_y, test_x, test_y })
}

fn check_binary_labels(y: &[f64]) -> Result<()> {
    match y.iter().position(|&v| v != 1.0 && v != -1.0) {
        Some(j) => Err(Error::InvalidArgument(format!("label {} is {} (expected +-1)", j + 1, y[j]))),
        None => Ok(()),
    }
}

fn svm(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let exp = cfg.experiment;
    let classification = exp != Experiment::SvmEps;
    let data = svm_data(cfg, classification)?;
    let n = data.train_y.len();
    let mu = cfg.mu.unwrap_or(if classification { 1.0 } else { 0.5 });
    let k = gaussian_kernel_matrix(&data.train_x, mu)?;
    let kp = k.hstack(&Matrix::from_fn(n, 1, |_, _| 1.0))?;
    let kt = gaussian_cross_kernel(&data.test_x, &data.train_x, mu)?;
    let eps = cfg.eps.unwrap_or(0.1);
    if exp == Experiment::SvmEps && !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("eps must be finite and >= 0, got {eps}")));
    }
    let y = &data.train_y;

    // the operator C and the subdifferential boxes of the loss at C u
    let c = match exp {
        Experiment::SvmHinge => kp.scale_rows(y)?,
        _ => kp.clone(),
    };
    let boxes = |cu: &[f64]| -> Vec<SubdiffInterval> {
        cu.iter()
            .zip(y)
            .map(|(&t, &yi)| match exp {
                Experiment::SvmSquare => subdiff_near(ScalarLossKind::Square { x: yi }, t, 0.0),
                Experiment::SvmHinge => subdiff_near(ScalarLossKind::Hinge, t, KINK_TOL),
                _ => subdiff_near(ScalarLossKind::EpsInsensitive { y: yi, eps }, t, KINK_TOL),
            })
            .collect()
    };
    let (lambda_max, default) = match exp {
        Experiment::SvmSquare => {
            let (l, _) = svm_square_lambda_max(&k, y)?;
            (Some(l), LambdaSpec::List([1e-3, 1e-2, 0.1, 0.5, 1.0].map(LambdaToken::Max).to_vec()))
        }
        _ => (None, LambdaSpec::List([1e-3, 1e-2, 0.1, 1.0, 10.0].map(LambdaToken::Value).to_vec())),
    };
    let lambdas = resolve_lambdas(cfg, default, None, lambda_max, 0.0)?;
    let norm = spectral_norm(&c, 500)?;
    // both terms of the hinge and eps-insensitive models are nonsmooth, and
    // the iteration approaches their kinks slowly
    let solver = Solver::new(cfg, if exp == Experiment::SvmSquare { 20_000 } else { 1_000_000 });
    let omega: Box<dyn crate::prox::Proximable> = match exp {
        Experiment::SvmSquare => Box::new(SquaredDistance { target: y.clone() }),
        Experiment::SvmHinge => Box::new(HingeSum),
        _ => Box::new(EpsInsensitiveSum { target: y.clone(), eps }),
    };
    let score = |pred: &[f64], labels: &[f64]| if classification { accuracy(pred, labels) } else { mse(labels, pred) };
    solve_rows(&lambdas, |lambda, _| {
        let r = solver.solve(&LeadingL1 { weight: lambda, penalized: n }, omega.as_ref(), &c, norm)?;
        let u = r.u_inf.as_slice();
        let ranges = project_boxes(&c, &boxes(&c.matvec(u)?))?;
        let verdict = verify_projected(&ranges, &u[..n], lambda, default_tolerance(lambda), cfg.zero_tol)?;
        let train_pred = kp.matvec(u)?;
        let test_pred: Vec<f64> = kt.matvec(&u[..n])?.iter().map(|v| v + u[n]).collect();
        Ok(SweepRow {
            lambda,
            gamma: Some(verdict.gamma),
            level: Some(sparsity_level(&u[..n], cfg.zero_tol).level),
            tra: Some(score(&train_pred, y)?),
            tea: Some(score(&test_pred, &data.test_y)?),
            iterations: Some(r.iterations_run),
            ..SweepRow::default()
        })
    })
}

fn logistic_check(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let (x, y) = match &cfg.dataset {
        Some(p) => load_csv_dataset(p)?,
        None => synth_two_class_stream(
            cfg.n.unwrap_or(100),
            SYNTH_DIM,
            SYNTH_SEPARATION,
            cfg.seed("synthetic data")?,
            TRAIN_STREAM,
        )?,
    };
    let chk = logistic_lambda_max(&x, &y)?;
    Ok(vec![SweepRow {
        lambda: chk.lambda_max,
        b_star: Some(chk.b_star),
        ytc: Some(chk.ytc),
        positives: Some(chk.positives),
        negatives: Some(chk.negatives),
        ..SweepRow::default()
    }])
}

fn balance(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let f = clean_signal(cfg, 1024)?;
    let n = f.len();
    let a: Box<dyn LinearOperator> = match cfg.transform.unwrap_or(TransformSpec::Dct) {
        TransformSpec::Dct => Box::new(WithNorm { op: dct_matrix(n)?.transpose(), norm: 1.0 }),
        TransformSpec::Wavelet { moments, level } => Box::new(Transposed(Wavelet::new(n, moments, level)?)),
    };
    let u_tilde = a.apply_transpose(&f);
    let levels: Vec<NoiseLevel> = match &cfg.noise {
        None => [1e-3, 1e-2, 1e-1, 1.0].map(NoiseLevel::Delta).to_vec(),
        Some(NoiseSpec::Deltas(d)) => d.iter().map(|&v| NoiseLevel::Delta(v)).collect(),
        Some(_) => vec![single_noise(cfg, None)?.expect("noise spec is set")],
    };
    let solver = Solver::new(cfg, 1000);
    let mut jobs = Vec::new();
    for (i, &level) in levels.iter().enumerate() {
        let (x, delta) = add_noise(cfg, &f, Some(level), i as u64)?;
        let t = lasso_identity_thresholds(&a.apply_transpose(&x));
        let lambdas =
            match cfg.lambda.clone().unwrap_or(LambdaSpec::Scaled(1.4)) {
                LambdaSpec::Scaled(c) => vec![balance_strategy(&t, BalanceMode::ScaledNoise { c, delta })
                    .map(|(l, implied)| (l, Some(implied)))?],
                _ => resolve_lambdas(cfg, LambdaSpec::Scaled(1.4), Some(&t), Some(lambda_for_sparsity(&t, 0)?), delta)?,
            };
        let x = std::sync::Arc::new(x);
        jobs.extend(lambdas.into_iter().map(|(l, p)| (x.clone(), delta, l, p)));
    }
    jobs.par_iter()
        .map(|(x, delta, lambda, implied)| {
            let omega = SquaredDistance { target: x.to_vec() };
            let r = solver.solve(&L1Norm { weight: *lambda }, &omega, a.as_ref(), 1.0)?;
            let u = r.u_inf.as_slice();
            let err = mse(&f, &a.apply(u))?;
            Ok(SweepRow {
                lambda: *lambda,
                delta: Some(*delta),
                level: Some(r.sparsity.level),
                predicted_level: *implied,
                mse: Some(err),
                mse_over_delta: Some(err / delta),
                error_ratio: Some(error_ratio(u, &u_tilde, *delta)?),
                iterations: Some(r.iterations_run),
                ..SweepRow::default()
            })
        })
        .collect()
}
