//! Regularization parameters for a target sparsity, `lambda_max` formulas, and
//! verifiers of the optimality characterizations.
//!
//! Thresholds are nonnegative numbers, one per coordinate or block, such that
//! the coordinate (block) vanishes in the solution exactly when `lambda` is at
//! least its threshold. Choosing `lambda` as the `(l+1)`-th largest threshold
//! therefore leaves at most `l` nonzero coordinates.

use crate::error::{Error, Result};
use crate::linalg::{check_len, mean, norm_2, norm_inf, sparsity_level, LinearOperator, Matrix, Partition, Vector};
use crate::prox::SubdiffInterval;
use crate::transforms::{svd, SvdTransform};

/// Default verifier tolerance `1e-6 * max(1, lambda)`.
pub fn default_tolerance(lambda: f64) -> f64 {
    1e-6 * lambda.max(1.0)
}

/// Thresholds `t_j` with the stable permutation sorting them nondecreasingly.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSet {
    values: Vec<f64>,
    order: Vec<usize>,
}

impl ThresholdSet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if let Some(j) = values.iter().position(|&v| v < 0.0) {
            return Err(Error::InvalidArgument(format!("threshold {j} is negative: {}", values[j])));
        }
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        Ok(ThresholdSet { values, order })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Indices `k_1, ..., k_d` with `t_{k_1} <= ... <= t_{k_d}`.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn sorted(&self) -> Vec<f64> {
        self.order.iter().map(|&k| self.values[k]).collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of thresholds strictly above `lambda`; the sparsity level the
    /// thresholds predict at `lambda`.
    pub fn count_above(&self, lambda: f64) -> usize {
        self.values.iter().filter(|&&t| t > lambda).count()
    }
}

/// The `(l+1)`-th largest threshold, or 0 for `l = d`.
pub fn lambda_for_sparsity(t: &ThresholdSet, l: usize) -> Result<f64> {
    let d = t.len();
    if l > d {
        return Err(Error::InvalidArgument(format!("sparsity level {l} exceeds dimension {d}")));
    }
    Ok(if l == d { 0.0 } else { t.values[t.order[d - 1 - l]] })
}

/// `t_j = |x_j|` for the Lasso with identity design.
pub fn lasso_identity_thresholds(x: &[f64]) -> ThresholdSet {
    ThresholdSet::new(x.iter().map(|v| v.abs()).collect()).expect("absolute values of finite data")
}

/// Whether every cross-block Gram entry `(A_(j)^T A_(k))_{pq}` has magnitude at
/// most `tol * |A|_inf^2`, with `|A|_inf` the maximum absolute row sum.
pub fn check_block_separability(a: &Matrix, partition: &Partition, tol: f64) -> Result<bool> {
    check_len(a.ncols(), partition.dim())?;
    let scale = (0..a.nrows()).map(|i| a.row(i).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let bound = tol * scale * scale;
    let mut block_of = vec![0usize; a.ncols()];
    for (j, g) in partition.groups().iter().enumerate() {
        g.iter().for_each(|&i| block_of[i] = j);
    }
    let gram = a.transpose().matmul(a)?;
    for p in 0..a.ncols() {
        for q in p + 1..a.ncols() {
            if block_of[p] != block_of[q] && gram.get(p, q).abs() > bound {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn block_correlations(a: &dyn LinearOperator, x: &[f64], partition: &Partition) -> Result<Vec<Vec<f64>>> {
    check_len(a.rows(), x.len())?;
    check_len(a.cols(), partition.dim())?;
    let atx = a.apply_transpose(x);
    Ok(partition.groups().iter().map(|g| g.iter().map(|&i| atx[i]).collect()).collect())
}

/// `t_j = |A_(j)^T x|_inf` for a block-separable Lasso.
pub fn block_thresholds(a: &dyn LinearOperator, x: &[f64], partition: &Partition) -> Result<ThresholdSet> {
    ThresholdSet::new(block_correlations(a, x, partition)?.iter().map(|b| norm_inf(b)).collect())
}

/// `t_j = |A_(j)^T x|_2 / sqrt(n_j)` for the group Lasso with weights
/// `lambda sqrt(n_j)`.
pub fn group_lasso_thresholds(a: &dyn LinearOperator, x: &[f64], partition: &Partition) -> Result<ThresholdSet> {
    ThresholdSet::new(
        block_correlations(a, x, partition)?.iter().map(|b| norm_2(b) / (b.len() as f64).sqrt()).collect(),
    )
}

/// Per coordinate, whether `u_j = 0` is admissible: `lambda >= max(psi'_-(0), -psi'_+(0))`.
pub fn verify_separable_zero(psi_at_zero: &[SubdiffInterval], lambda: f64) -> Vec<bool> {
    psi_at_zero.iter().map(|s| lambda >= s.lo.max(-s.hi)).collect()
}

/// Outcome of checking an optimality characterization.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterizationVerdict {
    pub holds: bool,
    /// Largest off-support multiplier magnitude; must not exceed `lambda`.
    pub gamma: f64,
    /// Largest deviation on the equality side.
    pub equality_residual: f64,
    /// Largest deviation from zero of the kernel rows (transform case only).
    pub kernel_residual: f64,
    pub support_used: Vec<usize>,
}

/// Checks `lambda = -grad_k sign(u_k)` on the support and `|grad_j| <= lambda`
/// off it, at absolute tolerance `tol`. The support is read off `u_star` with
/// the relative zero test at `zero_tol`.
pub fn verify_general_characterization(
    grad: &[f64],
    u_star: &[f64],
    lambda: f64,
    tol: f64,
    zero_tol: f64,
) -> Result<CharacterizationVerdict> {
    check_len(u_star.len(), grad.len())?;
    let boxes: Vec<(f64, f64)> = grad.iter().map(|&g| (g, g)).collect();
    Ok(verdict_from_ranges(&boxes, u_star, lambda, tol, zero_tol))
}

// Core check over interval-valued multipliers g_j in [lo, hi], j < z.len(),
// followed by kernel rows.
fn verdict_from_ranges(
    ranges: &[(f64, f64)],
    z_star: &[f64],
    lambda: f64,
    tol: f64,
    zero_tol: f64,
) -> CharacterizationVerdict {
    let m = z_star.len();
    let support = sparsity_level(z_star, zero_tol).support;
    let mut on_support = vec![false; m];
    support.iter().for_each(|&k| on_support[k] = true);
    let mut gamma: f64 = 0.0;
    let mut equality: f64 = 0.0;
    for (j, &(lo, hi)) in ranges[..m].iter().enumerate() {
        if on_support[j] {
            // -sign(z) g ranges over an interval; distance from lambda to it
            let s = z_star[j].signum();
            let (a, b) = if s > 0.0 { (-hi, -lo) } else { (lo, hi) };
            equality = equality.max(distance_to_interval(lambda, a, b));
        } else {
            gamma = gamma.max(distance_to_interval(0.0, lo, hi));
        }
    }
    let kernel = ranges[m..].iter().map(|&(lo, hi)| distance_to_interval(0.0, lo, hi)).fold(0.0, f64::max);
    CharacterizationVerdict {
        holds: gamma <= lambda + tol && equality <= tol && kernel <= tol,
        gamma,
        equality_residual: equality,
        kernel_residual: kernel,
        support_used: support,
    }
}

fn distance_to_interval(x: f64, lo: f64, hi: f64) -> f64 {
    if x < lo {
        lo - x
    } else if x > hi {
        x - hi
    } else {
        0.0
    }
}

/// `lambda > |grad_j(v)| + eps L_j` for every `j` outside `support`.
pub fn sufficient_sparsity_bound(
    grad_at_v: &[f64],
    eps: f64,
    lipschitz: &[f64],
    lambda: f64,
    support: &[usize],
) -> Result<bool> {
    check_len(grad_at_v.len(), lipschitz.len())?;
    if eps < 0.0 || lipschitz.iter().any(|&l| l < 0.0) {
        return Err(Error::InvalidArgument("eps and Lipschitz constants must be nonnegative".into()));
    }
    let mut in_support = vec![false; grad_at_v.len()];
    for &j in support {
        *in_support.get_mut(j).ok_or(Error::IndexOutOfRange { index: j, len: grad_at_v.len() })? = true;
    }
    Ok((0..grad_at_v.len()).filter(|&j| !in_support[j]).all(|j| lambda > grad_at_v[j].abs() + eps * lipschitz[j]))
}

/// Ranges of `g = P^T c` for `c` in coordinate boxes, by interval arithmetic.
pub fn project_boxes(p: &Matrix, boxes: &[SubdiffInterval]) -> Result<Vec<(f64, f64)>> {
    check_len(p.nrows(), boxes.len())?;
    let mut ranges = vec![(0.0, 0.0); p.ncols()];
    for (i, b) in boxes.iter().enumerate() {
        for (j, r) in ranges.iter_mut().enumerate() {
            let w = p.get(i, j);
            let (x, y) = (w * b.lo, w * b.hi);
            r.0 += x.min(y);
            r.1 += x.max(y);
        }
    }
    Ok(ranges)
}

/// Checks the transform characterization for `min psi(u) + lambda |B u|_1`.
///
/// The subgradient is `a = M^T c` with `c` ranging over `boxes` (`M` defaults
/// to the identity), and the multipliers are `g = B'^T a`. Requires `B` of
/// full row rank, so that the kernel of `B^T` is trivial.
pub fn verify_transform_characterization(
    t: &SvdTransform,
    outer: Option<&Matrix>,
    boxes: &[SubdiffInterval],
    lambda: f64,
    z_star: &[f64],
    tol: f64,
    zero_tol: f64,
) -> Result<CharacterizationVerdict> {
    if !t.is_full_row_rank() {
        return Err(Error::InvalidArgument(format!(
            "transform has rank {} < {} rows; kernel of B^T not supported",
            t.rank(),
            t.b().nrows()
        )));
    }
    check_len(t.b().nrows(), z_star.len())?;
    let p = match outer {
        Some(m) => m.matmul(t.b_prime())?,
        None => t.b_prime().clone(),
    };
    let ranges = project_boxes(&p, boxes)?;
    Ok(verdict_from_ranges(&ranges, z_star, lambda, tol, zero_tol))
}

/// Transform characterization from precomputed multiplier ranges: the first
/// `z_star.len()` ranges pair with `z_star`, the rest are kernel rows.
pub fn verify_projected(
    ranges: &[(f64, f64)],
    z_star: &[f64],
    lambda: f64,
    tol: f64,
    zero_tol: f64,
) -> Result<CharacterizationVerdict> {
    if ranges.len() < z_star.len() {
        return Err(Error::DimensionMismatch { expected: z_star.len(), found: ranges.len() });
    }
    Ok(verdict_from_ranges(ranges, z_star, lambda, tol, zero_tol))
}

/// `(D^+)^T a` for the first difference `D`, in closed form: the negated
/// cumulative sums of `a - mean(a)`. The second value is the kernel
/// coordinate `1^T a / sqrt(n)`.
pub fn difference_multipliers(a: &[f64]) -> (Vec<f64>, f64) {
    let n = a.len();
    let abar = mean(a);
    let mut acc = 0.0;
    let mut g = Vec::with_capacity(n.saturating_sub(1));
    for &v in &a[..n.saturating_sub(1)] {
        acc += v - abar;
        g.push(-acc);
    }
    (g, a.iter().sum::<f64>() / (n as f64).sqrt())
}

/// `lambda_max = |(D~')^T x|_inf` and the mean solution, through the SVD of `D`.
pub fn tv_lambda_max(x: &[f64], t: &SvdTransform) -> Result<(f64, Vector)> {
    let n = x.len();
    check_len(t.b().ncols(), n)?;
    if !t.is_full_row_rank() || t.b().nrows() + 1 != n {
        return Err(Error::InvalidArgument("expected the SVD of a first-difference matrix".into()));
    }
    let g = t.b_prime().matvec_t(x)?;
    let lambda = norm_inf(&g[..n - 1]);
    Ok((lambda, Vector::from_raw(vec![mean(x); n])))
}

/// [`tv_lambda_max`] in `O(n)` through [`difference_multipliers`].
pub fn tv_lambda_max_fast(x: &[f64]) -> Result<(f64, Vector)> {
    if x.len() < 2 {
        return Err(Error::InvalidArgument(format!("signal length must be >= 2, got {}", x.len())));
    }
    let (g, _) = difference_multipliers(x);
    Ok((norm_inf(&g), Vector::from_raw(vec![mean(x); x.len()])))
}

/// SVM with square loss, `min 1/2 |K u + b 1 - y|^2 + lambda |u|_1`:
/// `lambda_max = |K^T (mean(y) 1 - y)|_inf` and `u* = [0; mean(y)]`.
pub fn svm_square_lambda_max(k: &Matrix, y: &[f64]) -> Result<(f64, Vector)> {
    check_len(k.nrows(), y.len())?;
    let ybar = mean(y);
    let r: Vec<f64> = y.iter().map(|v| ybar - v).collect();
    let lambda = norm_inf(&k.matvec_t(&r)?);
    let mut u = vec![0.0; k.ncols() + 1];
    u[k.ncols()] = ybar;
    Ok((lambda, Vector::from_raw(u)))
}

/// Quantities of the most-sparse logistic regression solution.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticCheck {
    pub lambda_max: f64,
    pub b_star: f64,
    pub c: Vec<f64>,
    /// `y^T c`, zero up to rounding.
    pub ytc: f64,
    pub positives: usize,
    pub negatives: usize,
}

/// `b* = ln(n+/n-)`, `c_j = 1/(1 + (n+/n-)^{y_j})` and
/// `lambda_max = |(Y X)^T c|_inf / n`.
pub fn logistic_lambda_max(x: &Matrix, y: &[f64]) -> Result<LogisticCheck> {
    check_len(x.nrows(), y.len())?;
    if let Some(j) = y.iter().position(|&v| v != 1.0 && v != -1.0) {
        return Err(Error::InvalidArgument(format!("label {j} is {} (expected +-1)", y[j])));
    }
    let positives = y.iter().filter(|&&v| v > 0.0).count();
    let negatives = y.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::SingleClass { positives, negatives });
    }
    let q = positives as f64 / negatives as f64;
    let c: Vec<f64> = y.iter().map(|&v| 1.0 / (1.0 + q.powf(v))).collect();
    let yc: Vec<f64> = y.iter().zip(&c).map(|(a, b)| a * b).collect();
    let lambda_max = norm_inf(&x.matvec_t(&yc)?) / y.len() as f64;
    let ytc = yc.iter().sum::<f64>();
    Ok(LogisticCheck { lambda_max, b_star: q.ln(), c, ytc, positives, negatives })
}

/// How the balance strategy picks `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BalanceMode {
    /// `lambda` is the threshold leaving at most `l` nonzero blocks.
    TargetLevel(usize),
    /// `lambda = C delta`.
    ScaledNoise { c: f64, delta: f64 },
}

/// Returns `lambda` and the sparsity level it implies.
///
/// At `l = d` the threshold is 0; the smallest positive double is returned in
/// its place so that the problem stays regularized.
pub fn balance_strategy(t: &ThresholdSet, mode: BalanceMode) -> Result<(f64, usize)> {
    match mode {
        BalanceMode::TargetLevel(l) => {
            let lambda = lambda_for_sparsity(t, l)?;
            Ok((if l == t.len() { f64::MIN_POSITIVE } else { lambda }, l))
        }
        BalanceMode::ScaledNoise { c, delta } => {
            if !(c > 0.0) || !(delta > 0.0) {
                return Err(Error::InvalidArgument(format!("C and delta must be positive (C={c}, delta={delta})")));
            }
            let lambda = c * delta;
            Ok((lambda, t.count_above(lambda)))
        }
    }
}

/// Verdict of the uniqueness check for a minimal-norm solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Uniqueness {
    Unique,
    /// The sufficient condition failed; uniqueness is neither shown nor refuted.
    Inconclusive,
    Violated,
}

/// Checks `A u~ = x`, full column rank of the support columns `A'`, and
/// `|A''^T y|_inf < 1` for the least-norm `y` with `A'^T y = sign(u~_S)`.
pub fn min_norm_uniqueness_check(a: &Matrix, x: &[f64], u_tilde: &[f64], tol: f64) -> Result<Uniqueness> {
    check_len(a.nrows(), x.len())?;
    check_len(a.ncols(), u_tilde.len())?;
    let residual = crate::linalg::sub(&a.matvec(u_tilde)?, x);
    if norm_inf(&residual) > tol * norm_inf(x).max(1.0) {
        return Ok(Uniqueness::Violated);
    }
    let support = sparsity_level(u_tilde, tol).support;
    if support.is_empty() {
        return Ok(Uniqueness::Unique);
    }
    let off: Vec<usize> = (0..a.ncols()).filter(|j| !support.contains(j)).collect();
    let a1 = a.select_columns(&support);
    let t = svd(&a1.transpose())?;
    if t.rank() < support.len() {
        return Ok(Uniqueness::Violated);
    }
    // least-norm solution of A'^T y = v is the pseudo-inverse applied to v
    let v: Vec<f64> = support.iter().map(|&j| u_tilde[j].signum()).collect();
    let y: Vec<f64> = (0..a.nrows()).map(|i| (0..support.len()).map(|c| t.b_prime().get(i, c) * v[c]).sum()).collect();
    if off.is_empty() {
        return Ok(Uniqueness::Unique);
    }
    let dual = norm_inf(&a.select_columns(&off).matvec_t(&y)?);
    Ok(if dual < 1.0 - tol { Uniqueness::Unique } else { Uniqueness::Inconclusive })
}
