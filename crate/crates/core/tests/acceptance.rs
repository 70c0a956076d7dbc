//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use l1pc::cli::data::{doppler_signal, synth_two_class};
use l1pc::cli::noise::{add_gaussian_noise, NoiseLevel};
use l1pc::cli::sweep::{run_sweep, Experiment, ExperimentConfig, NoiseSpec};
use l1pc::fppa::{fppa_solve, FppaConfig};
use l1pc::linalg::{
    block_sparsity_level, mean, norm_2, norm_inf, sparsity_level, sub, LinearOperator, Matrix, Partition,
};
use l1pc::oracle::{
    grid_minimize_1d, group_fermat_residual, minimize_convex_2d, orthogonal_group_lasso_closed_form,
    orthogonal_lasso_closed_form, GridSpec,
};
use l1pc::param_choice::{
    difference_multipliers, group_lasso_thresholds, lambda_for_sparsity, lasso_identity_thresholds,
    logistic_lambda_max, svm_square_lambda_max, tv_lambda_max_fast, verify_general_characterization, verify_projected,
};
use l1pc::prox::{
    prox_eps_insensitive_sum, prox_group_l2, prox_hinge_sum, prox_l1, prox_square_fidelity, GroupL2, L1Norm, LeadingL1,
    SquaredDistance,
};
use l1pc::rng::SeededRng;
use l1pc::transforms::{
    gaussian_kernel_matrix, random_orthogonal, svd, FirstDifference, Identity, Transposed, Wavelet,
};

// criterion 1
const PROX_INSTANCES: usize = 100;
const PROX_TOL: f64 = 1e-4;
const PROX_TIME: Duration = Duration::from_secs(10);
// criterion 2
const ORTHO_N: usize = 64;
const ORTHO_TOL: f64 = 1e-8;
const ORTHO_MAX_ITERS: usize = 5000;
const ORTHO_TIME: Duration = Duration::from_secs(30);
// criterion 3
const LASSO_N: usize = 20;
const LEVEL_OFFSET: f64 = 1e-9;
// criterion 4
const GROUP_N: usize = 4096;
const GROUP_LEVELS: [usize; 7] = [10, 8, 6, 5, 3, 1, 0];
// criterion 5
const TV_SIGNALS: usize = 20;
const TV_TOL: f64 = 1e-6;
const TV_SHARPNESS: f64 = 0.99;
// criterion 6
const VERIFY_TOL: f64 = 1e-5;
// criterion 7
const SVM_N: usize = 100;
const SVM_TOL: f64 = 1e-6;
const LOGISTIC_TOL: f64 = 1e-12;
// criterion 8
const BALANCE_N: usize = 1024;
const BALANCE_C: f64 = 1.4;
const BALANCE_DELTAS: [f64; 4] = [1e-3, 1e-2, 1e-1, 1.0];
const BALANCE_TIME: Duration = Duration::from_secs(60);
// criterion 10
const SVD_MATRICES: usize = 100;
const SVD_MAX_DIM: usize = 20;
const SVD_TOL: f64 = 1e-10;

/// Zero test for sparsity counts of solver output.
const ZERO_TOL: f64 = 1e-6;

type Outcome = Result<String, String>;

/// Verifier results of the solves in criteria 2 to 5, checked by criterion 6.
struct VerifierCase {
    label: String,
    lambda: f64,
    gamma: f64,
    equality_residual: f64,
}

static CASES: Mutex<Vec<VerifierCase>> = Mutex::new(Vec::new());

fn record(label: String, lambda: f64, gamma: f64, equality_residual: f64) {
    CASES.lock().unwrap().push(VerifierCase { label, lambda, gamma, equality_residual });
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn grid_around(points: &[f64], pad: f64) -> GridSpec {
    let lo = points.iter().copied().fold(f64::INFINITY, f64::min) - pad;
    let hi = points.iter().copied().fold(f64::NEG_INFINITY, f64::max) + pad;
    GridSpec::new(lo, hi, 1e-3).unwrap()
}

fn c1_prox_oracles() -> Outcome {
    let start = Instant::now();
    let mut rng = SeededRng::new(101, 0);
    let mut worst = [0.0f64; 5];
    for _ in 0..PROX_INSTANCES {
        let z = rng.uniform_in(-4.0, 4.0);
        let c = rng.uniform_in(0.05, 3.0);
        let x = rng.uniform_in(-3.0, 3.0);
        let eps = rng.uniform_in(0.0, 1.5);
        let q = |u: f64| 0.5 * (u - z).powi(2);
        let grid = grid_around(&[z, x, 1.0], 4.0);

        let (l1, _) = grid_minimize_1d(|u| c * u.abs() + q(u), &grid);
        worst[0] = worst[0].max((prox_l1(&[z], c)[0] - l1).abs());

        let (sq, _) = grid_minimize_1d(|u| 0.5 * c * (u - x).powi(2) + q(u), &grid);
        worst[1] = worst[1].max((prox_square_fidelity(&[z], &[x], c).unwrap()[0] - sq).abs());

        let (hinge, _) = grid_minimize_1d(|u| c * (1.0 - u).max(0.0) + q(u), &grid);
        worst[2] = worst[2].max((prox_hinge_sum(&[z], c)[0] - hinge).abs());

        let (ei, _) = grid_minimize_1d(|u| c * ((u - x).abs() - eps).max(0.0) + q(u), &grid);
        worst[3] = worst[3].max((prox_eps_insensitive_sum(&[z], &[x], eps, c).unwrap()[0] - ei).abs());

        let z2 = [z, rng.uniform_in(-4.0, 4.0)];
        let f = |a: f64, b: f64| c * a.hypot(b) + 0.5 * ((a - z2[0]).powi(2) + (b - z2[1]).powi(2));
        let (a, b) = minimize_convex_2d(f, (-5.0, 5.0), (-5.0, 5.0), 1e-9);
        let p = prox_group_l2(&z2, &Partition::contiguous(&[2]).unwrap(), &[c]).unwrap();
        worst[4] = worst[4].max((p[0] - a).abs().max((p[1] - b).abs()));
    }
    let elapsed = start.elapsed();
    let max = worst.iter().copied().fold(0.0, f64::max);
    ensure(max <= PROX_TOL, || format!("max deviation {max:e} > {PROX_TOL:e} (per operator {worst:?})"))?;
    ensure(elapsed < PROX_TIME, || format!("took {elapsed:?}"))?;
    Ok(format!("5 x {PROX_INSTANCES} instances, max deviation {max:.2e}, {elapsed:.2?}"))
}

fn c2_closed_form() -> Outcome {
    let start = Instant::now();
    let mut rng = SeededRng::new(202, 0);
    let a = random_orthogonal(ORTHO_N, &mut rng);
    let x = rng.gaussian_vec(ORTHO_N);
    let atx = a.apply_transpose(&x);
    let top = norm_inf(&atx);
    let omega = SquaredDistance { target: x.clone() };
    let mut worst: f64 = 0.0;
    let mut max_iters = 0;
    for frac in [0.05, 0.2, 0.5, 0.8, 1.1] {
        let lambda = frac * top;
        let cfg = FppaConfig::for_operator(&a, ORTHO_MAX_ITERS).unwrap().rel_tol(1e-15);
        let r = fppa_solve(&L1Norm { weight: lambda }, &omega, &a, &cfg).unwrap();
        let exact = orthogonal_lasso_closed_form(&a, &x, lambda).unwrap();
        worst = worst.max(norm_inf(&sub(r.u_inf.as_slice(), exact.as_slice())));
        max_iters = max_iters.max(r.iterations_run);
        let u = r.u_inf.as_slice();
        let grad = a.apply_transpose(&sub(&a.apply(u), &x));
        let v = verify_general_characterization(&grad, u, lambda, VERIFY_TOL, ZERO_TOL).unwrap();
        record(format!("orthogonal lasso lambda={lambda:.3}"), lambda, v.gamma, v.equality_residual);
    }

    let partition = Partition::contiguous(&[1, 3, 4, 8, 16, 32]).unwrap();
    let group_top = partition
        .groups()
        .iter()
        .map(|g| norm_2(&g.iter().map(|&i| atx[i]).collect::<Vec<_>>()) / (g.len() as f64).sqrt())
        .fold(0.0, f64::max);
    for frac in [0.05, 0.2, 0.5, 0.8, 1.1] {
        let lambda = frac * group_top;
        let phi = GroupL2::group_lasso(partition.clone(), lambda);
        let cfg = FppaConfig::for_operator(&a, ORTHO_MAX_ITERS).unwrap().rel_tol(1e-15);
        let r = fppa_solve(&phi, &omega, &a, &cfg).unwrap();
        let exact = orthogonal_group_lasso_closed_form(&a, &x, &partition, lambda).unwrap();
        worst = worst.max(norm_inf(&sub(r.u_inf.as_slice(), exact.as_slice())));
        max_iters = max_iters.max(r.iterations_run);
        record_group(
            &format!("orthogonal group lasso lambda={lambda:.3}"),
            &a,
            &x,
            r.u_inf.as_slice(),
            &partition,
            lambda,
        );
    }
    let elapsed = start.elapsed();
    ensure(worst <= ORTHO_TOL, || format!("max deviation {worst:e} > {ORTHO_TOL:e}"))?;
    ensure(max_iters <= ORTHO_MAX_ITERS, || format!("{max_iters} iterations"))?;
    ensure(elapsed < ORTHO_TIME, || format!("took {elapsed:?}"))?;
    Ok(format!("10 solves, max deviation {worst:.2e}, at most {max_iters} iterations, {elapsed:.2?}"))
}

/// Group verifier: block residual on active groups, `|grad_S|_2 / sqrt(n_S)`
/// on zero groups.
fn record_group(label: &str, a: &dyn LinearOperator, x: &[f64], u: &[f64], partition: &Partition, lambda: f64) {
    let grad = a.apply_transpose(&sub(&a.apply(u), x));
    let weights: Vec<f64> = partition.sizes().iter().map(|&s| lambda * (s as f64).sqrt()).collect();
    let support = block_sparsity_level(u, partition, ZERO_TOL).unwrap().support;
    let gamma = (0..partition.len())
        .filter(|j| !support.contains(j))
        .map(|j| {
            let g: Vec<f64> = partition.group(j).iter().map(|&i| grad[i]).collect();
            norm_2(&g) / (g.len() as f64).sqrt()
        })
        .fold(0.0, f64::max);
    let residual = group_fermat_residual(&grad, u, partition, &weights, ZERO_TOL).unwrap();
    record(label.to_string(), lambda, gamma, residual);
}

fn c3_lasso_levels() -> Outcome {
    let mut rng = SeededRng::new(303, 0);
    let x = rng.gaussian_vec(LASSO_N);
    let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    mags.sort_by(f64::total_cmp);
    ensure(mags.windows(2).all(|w| w[0] < w[1]), || "magnitudes are not distinct".into())?;
    let t = lasso_identity_thresholds(&x);
    let omega = SquaredDistance { target: x.clone() };
    let c = Identity { n: LASSO_N };
    let mut levels = Vec::new();
    for l in 0..=LASSO_N {
        let lambda = lambda_for_sparsity(&t, l).unwrap() + LEVEL_OFFSET;
        let cfg = FppaConfig::for_operator(&c, 2000).unwrap().rel_tol(1e-15);
        let r = fppa_solve(&L1Norm { weight: lambda }, &omega, &c, &cfg).unwrap();
        let u = r.u_inf.as_slice();
        let expected = l.min(x.iter().filter(|v| v.abs() > lambda).count());
        let got = sparsity_level(u, ZERO_TOL).level;
        ensure(got == expected, || format!("l={l}: sparsity {got}, expected {expected}"))?;
        levels.push(got);
        let v = verify_general_characterization(&sub(u, &x), u, lambda, VERIFY_TOL, ZERO_TOL).unwrap();
        record(format!("identity lasso l={l}"), lambda, v.gamma, v.equality_residual);
    }
    Ok(format!("sparsity equals min(l, #|x_j| > lambda) for l = 0..={LASSO_N}: {levels:?}"))
}

fn c4_group_levels() -> Outcome {
    let f = doppler_signal(GROUP_N).unwrap();
    let (x, _) = add_gaussian_noise(f.as_slice(), NoiseLevel::Snr(7.0), &mut SeededRng::new(404, 0)).unwrap();
    let w = Wavelet::new(GROUP_N, 6, 3).unwrap();
    let partition = w.partition();
    let d = partition.len();
    ensure(d == 10, || format!("{d} blocks"))?;
    let a = Transposed(w);
    let t = group_lasso_thresholds(&a, &x, &partition).unwrap();
    let mut desc = t.sorted();
    desc.reverse();
    let omega = SquaredDistance { target: x.clone() };
    let solve = |lambda: f64| {
        let phi = GroupL2::group_lasso(partition.clone(), lambda);
        let cfg = FppaConfig::for_operator(&a, 3000).unwrap().rel_tol(1e-14);
        fppa_solve(&phi, &omega, &a, &cfg).unwrap().u_inf.into_inner()
    };
    let mut at_threshold = Vec::new();
    let mut strict = Vec::new();
    for l in GROUP_LEVELS {
        let lambda = lambda_for_sparsity(&t, l).unwrap();
        let u = solve(lambda);
        let bsl = block_sparsity_level(&u, &partition, ZERO_TOL).unwrap().level;
        ensure(bsl <= l, || format!("l={l}: BSL {bsl} at the threshold"))?;
        at_threshold.push(bsl);
        record_group(&format!("group lasso l={l}"), &a, &x, &u, &partition, lambda);

        // strictly between the l-th and (l+1)-th largest thresholds
        let upper = if l == 0 { 2.0 * desc[0] } else { desc[l - 1] };
        let lower = if l == d { 0.0 } else { desc[l] };
        let mid = 0.5 * (lower + upper);
        let u = solve(mid);
        let bsl = block_sparsity_level(&u, &partition, ZERO_TOL).unwrap().level;
        ensure(bsl == l, || format!("l={l}: BSL {bsl} at inter-threshold lambda {mid}"))?;
        strict.push(bsl);
        record_group(&format!("group lasso between thresholds l={l}"), &a, &x, &u, &partition, mid);
    }
    Ok(format!("BSL at thresholds {at_threshold:?}, strictly between {strict:?}"))
}

fn tv_solve(x: &[f64], lambda: f64) -> (Vec<f64>, usize) {
    let d = FirstDifference::new(x.len()).unwrap();
    let cfg = FppaConfig::for_operator(&d, 400_000).unwrap().rel_tol(1e-13);
    let r = fppa_solve(&SquaredDistance { target: x.to_vec() }, &L1Norm { weight: lambda }, &d, &cfg).unwrap();
    (r.u_inf.into_inner(), r.iterations_run)
}

fn record_tv(label: String, x: &[f64], u: &[f64], lambda: f64) {
    let z = FirstDifference::new(x.len()).unwrap().apply(u);
    let (g, kernel) = difference_multipliers(&sub(u, x));
    let ranges: Vec<(f64, f64)> = g.iter().chain([&kernel]).map(|&v| (v, v)).collect();
    let v = verify_projected(&ranges, &z, lambda, VERIFY_TOL, ZERO_TOL).unwrap();
    record(label, lambda, v.gamma, v.equality_residual.max(v.kernel_residual));
}

fn c5_tv_lambda_max() -> Outcome {
    let mut rng = SeededRng::new(505, 0);
    let mut worst_du: f64 = 0.0;
    let mut worst_mean: f64 = 0.0;
    let mut min_sharp = f64::INFINITY;
    let mut max_iters = 0;
    for s in 0..TV_SIGNALS {
        let n = 8 + rng.below(256 - 8 + 1);
        let mut level = 0.0;
        let x: Vec<f64> = (0..n)
            .map(|_| {
                if rng.uniform() < 0.1 {
                    level = rng.uniform_in(-2.0, 2.0);
                }
                level + 0.3 * rng.gaussian()
            })
            .collect();
        let (lambda_max, _) = tv_lambda_max_fast(&x).unwrap();
        let d = FirstDifference::new(n).unwrap();

        let (u, it) = tv_solve(&x, lambda_max);
        max_iters = max_iters.max(it);
        let du = norm_inf(&d.apply(&u));
        let m = mean(&x);
        let dev = u.iter().map(|v| (v - m).abs()).fold(0.0, f64::max);
        worst_du = worst_du.max(du);
        worst_mean = worst_mean.max(dev);
        ensure(du <= TV_TOL && dev <= TV_TOL, || format!("signal {s} (n={n}): |Du| {du:e}, |u - mean| {dev:e}"))?;
        record_tv(format!("tv signal {s} at lambda_max"), &x, &u, lambda_max);

        let below = TV_SHARPNESS * lambda_max;
        let (u, it) = tv_solve(&x, below);
        max_iters = max_iters.max(it);
        let du = norm_inf(&d.apply(&u));
        min_sharp = min_sharp.min(du);
        ensure(du > TV_TOL, || format!("signal {s} (n={n}): |Du| {du:e} at {TV_SHARPNESS} lambda_max"))?;
        record_tv(format!("tv signal {s} below lambda_max"), &x, &u, below);
    }
    Ok(format!(
        "{TV_SIGNALS} signals: at lambda_max |Du| <= {worst_du:.1e}, |u - mean| <= {worst_mean:.1e}; \
         at {TV_SHARPNESS} lambda_max |Du| >= {min_sharp:.1e}; at most {max_iters} iterations"
    ))
}

fn c6_characterization() -> Outcome {
    let cases = CASES.lock().unwrap();
    ensure(!cases.is_empty(), || "no solves were recorded".into())?;
    let mut gamma_slack = f64::NEG_INFINITY;
    let mut residual: f64 = 0.0;
    for c in cases.iter() {
        ensure(c.gamma <= c.lambda + VERIFY_TOL, || format!("{}: gamma {} > lambda {}", c.label, c.gamma, c.lambda))?;
        ensure(c.equality_residual <= VERIFY_TOL, || {
            format!("{}: equality residual {:e}", c.label, c.equality_residual)
        })?;
        gamma_slack = gamma_slack.max(c.gamma - c.lambda);
        residual = residual.max(c.equality_residual);
    }
    Ok(format!(
        "{} solves verified, max(gamma - lambda) = {gamma_slack:.2e}, max equality residual {residual:.2e}",
        cases.len()
    ))
}

fn c7_svm_logistic() -> Outcome {
    let (x, y) = synth_two_class(SVM_N, 2, 2.0, 707).unwrap();
    let k = gaussian_kernel_matrix(&x, 1.0).unwrap();
    let kp = k.hstack(&Matrix::from_fn(SVM_N, 1, |_, _| 1.0)).unwrap();
    let (lambda, u_star) = svm_square_lambda_max(&k, &y).unwrap();
    let cfg = FppaConfig::for_operator(&kp, 50_000).unwrap().rel_tol(1e-15);
    let r =
        fppa_solve(&LeadingL1 { weight: lambda, penalized: SVM_N }, &SquaredDistance { target: y.clone() }, &kp, &cfg)
            .unwrap();
    let u = r.u_inf.as_slice();
    let weights = norm_inf(&u[..SVM_N]);
    let bias_err = (u[SVM_N] - mean(&y)).abs();
    ensure(weights <= SVM_TOL, || format!("|Bu|_inf = {weights:e}"))?;
    ensure(bias_err <= SVM_TOL, || format!("bias off by {bias_err:e}"))?;
    ensure(u_star.as_slice()[SVM_N] == mean(&y), || "closed-form bias differs from mean(y)".into())?;

    let chk = logistic_lambda_max(&x, &y).unwrap();
    let b = (chk.positives as f64 / chk.negatives as f64).ln();
    ensure(chk.ytc.abs() <= LOGISTIC_TOL, || format!("y^T c = {:e}", chk.ytc))?;
    ensure(chk.b_star == b, || format!("b* = {} != {b}", chk.b_star))?;
    Ok(format!(
        "square loss at lambda_max {lambda:.4}: |Bu| {weights:.1e}, bias error {bias_err:.1e} ({} iterations); \
         logistic y^T c = {:.1e}, b* = {b:.6}",
        r.iterations_run, chk.ytc
    ))
}

fn c8_balance() -> Outcome {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::new(Experiment::Balance);
    cfg.n = Some(BALANCE_N);
    cfg.seed = Some(808);
    cfg.noise = Some(NoiseSpec::Deltas(BALANCE_DELTAS.to_vec()));
    cfg.lambda = Some(l1pc::cli::sweep::LambdaSpec::Scaled(BALANCE_C));
    let table = run_sweep(&cfg).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(table.rows.len() == BALANCE_DELTAS.len(), || format!("{} rows", table.rows.len()))?;
    // orthogonal A: |soft(u~ + A^T eta, C delta) - u~|_2 <= delta + C delta sqrt(n)
    let bound = 1.0 + BALANCE_C * (BALANCE_N as f64).sqrt();
    let mut ratios = Vec::new();
    for row in &table.rows {
        let delta = row.delta.unwrap();
        ensure(row.level == row.predicted_level, || {
            format!("delta {delta}: observed sparsity {:?}, implied {:?}", row.level, row.predicted_level)
        })?;
        let ratio = row.error_ratio.unwrap();
        ensure(ratio <= bound, || format!("delta {delta}: ratio {ratio} > {bound}"))?;
        ratios.push(ratio);
    }
    ensure(elapsed < BALANCE_TIME, || format!("took {elapsed:?}"))?;
    let levels: Vec<usize> = table.rows.iter().map(|r| r.level.unwrap()).collect();
    Ok(format!(
        "levels {levels:?} match implied levels; |u - u~|/delta = {:?} <= {bound:.2}; {elapsed:.2?}",
        ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>()
    ))
}

fn c9_determinism() -> Outcome {
    let runs: [&[&str]; 6] = [
        &["lasso-identity", "--n", "20", "--sigma", "0.1", "--seed", "3"],
        &["image-dwt", "--n", "16", "--seed", "2", "--iters", "50", "--wavelet", "2,1"],
        &["group-lasso", "--n", "256", "--wavelet", "2,2", "--seed", "4", "--iters", "200"],
        &["tv-signal", "--n", "128", "--seed", "9", "--iters", "3000"],
        &["svm-hinge", "--n", "40", "--seed", "5", "--iters", "500"],
        &["balance", "--n", "128", "--seed", "6", "--iters", "300"],
    ];
    let dir = std::env::temp_dir().join(format!("l1pc-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut bytes = 0;
    for (k, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let path = dir.join(format!("run{k}-{rep}.csv"));
            let status = Command::new(env!("CARGO_BIN_EXE_l1pc"))
                .args(*args)
                .arg("--out")
                .arg(&path)
                .status()
                .map_err(|e| e.to_string())?;
            ensure(status.success(), || format!("{args:?} exited with {status}"))?;
            outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
        }
        ensure(outputs[0] == outputs[1], || format!("{args:?}: outputs differ"))?;
        bytes += outputs[0].len();
    }
    std::fs::remove_dir_all(&dir).ok();
    Ok(format!("{} sweeps run twice, {bytes} bytes byte-identical", runs.len()))
}

fn c10_svd() -> Outcome {
    let mut rng = SeededRng::new(1010, 0);
    let (mut rec, mut trip) = (0.0f64, 0.0f64);
    let mut deficient = 0;
    for k in 0..SVD_MATRICES {
        let m = 1 + rng.below(SVD_MAX_DIM);
        let n = 1 + rng.below(SVD_MAX_DIM);
        let r = 1 + rng.below(m.min(n));
        let g1 = Matrix::new(m, r, rng.gaussian_vec(m * r)).unwrap();
        let g2 = Matrix::new(r, n, rng.gaussian_vec(r * n)).unwrap();
        let b = g1.matmul(&g2).unwrap();
        let t = svd(&b).unwrap();
        ensure(t.rank() == r, || format!("matrix {k} ({m}x{n}): rank {} != {r}", t.rank()))?;
        deficient += usize::from(r < m.min(n));
        rec = rec.max(t.reconstruct().max_abs_diff(&b));

        let u = rng.gaussian_vec(n);
        let (z, v) = t.mapping_b(&u).unwrap();
        let back = t.inverse_mapping(z.as_slice(), v.as_slice()).unwrap();
        trip = trip.max(norm_inf(&sub(back.as_slice(), &u)));

        // injective: the stacked map [B; V2^T] has full column rank
        let (z1, v1) = (0..n).fold((Vec::new(), Vec::new()), |(mut zs, mut vs), j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let (z, v) = t.mapping_b(&e).unwrap();
            zs.push(z.into_inner());
            vs.push(v.into_inner());
            (zs, vs)
        });
        let stacked = Matrix::from_fn(m + n - r, n, |i, j| if i < m { z1[j][i] } else { v1[j][i - m] });
        let srank = svd(&stacked).unwrap().rank();
        ensure(srank == n, || format!("matrix {k}: mapping has rank {srank} < {n}"))?;
    }
    ensure(rec <= SVD_TOL, || format!("reconstruction error {rec:e}"))?;
    ensure(trip <= SVD_TOL, || format!("round-trip error {trip:e}"))?;
    Ok(format!(
        "{SVD_MATRICES} matrices ({deficient} rank-deficient): reconstruction {rec:.1e}, round trip {trip:.1e}, mapping injective"
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("prox operators match the grid oracle", c1_prox_oracles),
        ("FPPA matches orthogonal closed forms", c2_closed_form),
        ("Lasso sparsity levels are exact", c3_lasso_levels),
        ("group Lasso block sparsity levels", c4_group_levels),
        ("TV solution at lambda_max is constant", c5_tv_lambda_max),
        ("solutions pass the characterization verifiers", c6_characterization),
        ("SVM square-loss and logistic lambda_max", c7_svm_logistic),
        ("balance strategy levels and error ratio", c8_balance),
        ("CLI sweeps are deterministic", c9_determinism),
        ("SVD reconstruction and mapping", c10_svd),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
