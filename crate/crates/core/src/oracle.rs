//! Brute-force and closed-form reference solutions.
//!
//! These stay independent of the iterative solver so that they can certify it:
//! grid search for scalar proximity problems, and soft/block thresholding for
//! problems whose design matrix is orthogonal.

use crate::error::{Error, Result};
use crate::linalg::{check_len, norm_2, sparsity_level, LinearOperator, Partition, Vector};
use crate::prox::{prox_group_l2, prox_l1};

/// Uniform grid `lo, lo + step, ..., hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    lo: f64,
    hi: f64,
    step: f64,
}

impl GridSpec {
    pub const MAX_POINTS: f64 = 1e7;

    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(lo < hi) || !(step > 0.0) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidArgument(format!("bad grid [{lo}, {hi}] step {step}")));
        }
        if (hi - lo) / step > Self::MAX_POINTS {
            return Err(Error::InvalidArgument(format!(
                "grid [{lo}, {hi}] with step {step} exceeds {} points",
                Self::MAX_POINTS
            )));
        }
        Ok(GridSpec { lo, hi, step })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn step(&self) -> f64 {
        self.step
    }
}

/// Ternary search for the minimizer of a convex `f` on `[lo, hi]`.
pub fn ternary_minimize(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    while hi - lo > tol {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) <= f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    0.5 * (lo + hi)
}

/// Grid argmin of `f`, refined by ternary search in the neighbouring cells
/// down to `step * 1e-3`.
pub fn grid_minimize_1d(f: impl Fn(f64) -> f64, grid: &GridSpec) -> (f64, f64) {
    let count = ((grid.hi - grid.lo) / grid.step).floor() as usize;
    let mut best = (grid.lo, f(grid.lo));
    for k in 1..=count + 1 {
        let u = (grid.lo + k as f64 * grid.step).min(grid.hi);
        let v = f(u);
        if v < best.1 {
            best = (u, v);
        }
    }
    let lo = (best.0 - grid.step).max(grid.lo);
    let hi = (best.0 + grid.step).min(grid.hi);
    let arg = ternary_minimize(&f, lo, hi, grid.step * 1e-3);
    let val = f(arg);
    if val <= best.1 {
        (arg, val)
    } else {
        best
    }
}

/// Nested ternary search for a jointly convex function of two variables.
pub fn minimize_convex_2d(
    f: impl Fn(f64, f64) -> f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
    tol: f64,
) -> (f64, f64) {
    let inner = |x: f64| ternary_minimize(|y| f(x, y), y_range.0, y_range.1, tol);
    let x = ternary_minimize(|x| f(x, inner(x)), x_range.0, x_range.1, tol);
    (x, inner(x))
}

fn check_orthogonal(a: &dyn LinearOperator) -> Result<()> {
    if a.rows() != a.cols() {
        return Err(Error::InvalidShape(format!("{}x{} is not square", a.rows(), a.cols())));
    }
    let n = a.cols();
    let probes: [Vec<f64>; 3] = [
        vec![1.0; n],
        (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect(),
        (0..n).map(|i| (i as f64 + 1.0).sqrt()).collect(),
    ];
    for p in &probes {
        let back = a.apply_transpose(&a.apply(p));
        let err = norm_2(&crate::linalg::sub(&back, p));
        if err > 1e-10 * norm_2(p).max(1.0) {
            return Err(Error::InvalidArgument(format!("operator is not orthogonal (err {err:e})")));
        }
    }
    Ok(())
}

/// Solution of `min 1/2 |A u - x|^2 + lambda |u|_1` for orthogonal `A`:
/// soft thresholding of `A^T x`.
pub fn orthogonal_lasso_closed_form(a: &dyn LinearOperator, x: &[f64], lambda: f64) -> Result<Vector> {
    check_len(a.rows(), x.len())?;
    check_orthogonal(a)?;
    Ok(prox_l1(&a.apply_transpose(x), lambda))
}

/// Solution of `min 1/2 |A u - x|^2 + lambda sum_j sqrt(n_j) |u_j|_2` for
/// orthogonal `A`: block shrinkage of `A^T x` with weights `lambda sqrt(n_j)`.
pub fn orthogonal_group_lasso_closed_form(
    a: &dyn LinearOperator,
    x: &[f64],
    partition: &Partition,
    lambda: f64,
) -> Result<Vector> {
    check_len(a.rows(), x.len())?;
    check_orthogonal(a)?;
    let weights: Vec<f64> = partition.sizes().iter().map(|&s| lambda * (s as f64).sqrt()).collect();
    prox_group_l2(&a.apply_transpose(x), partition, &weights)
}

/// Violation of `0 in grad + lambda d|.|_1(u)`.
///
/// Entries passing the relative zero test at `zero_tol` are treated as zero.
pub fn fermat_residual(grad: &[f64], u: &[f64], lambda: f64, zero_tol: f64) -> Result<f64> {
    check_len(u.len(), grad.len())?;
    let support = sparsity_level(u, zero_tol).support;
    let mut on_support = vec![false; u.len()];
    support.iter().for_each(|&j| on_support[j] = true);
    Ok((0..u.len())
        .map(
            |j| {
                if on_support[j] {
                    (grad[j] + lambda * u[j].signum()).abs()
                } else {
                    (grad[j].abs() - lambda).max(0.0)
                }
            },
        )
        .fold(0.0, f64::max))
}

/// Block version: `grad_j + w_j u_j/|u_j|` on nonzero blocks, `|grad_j| - w_j`
/// on zero blocks, all in the Euclidean norm.
pub fn group_fermat_residual(
    grad: &[f64],
    u: &[f64],
    partition: &Partition,
    weights: &[f64],
    zero_tol: f64,
) -> Result<f64> {
    check_len(u.len(), grad.len())?;
    check_len(partition.len(), weights.len())?;
    let support = crate::linalg::block_sparsity_level(u, partition, zero_tol)?.support;
    let mut active = vec![false; partition.len()];
    support.iter().for_each(|&j| active[j] = true);
    let mut worst: f64 = 0.0;
    for (j, group) in partition.groups().iter().enumerate() {
        let g: Vec<f64> = group.iter().map(|&i| grad[i]).collect();
        let r = if active[j] {
            let uj: Vec<f64> = group.iter().map(|&i| u[i]).collect();
            let nu = norm_2(&uj);
            norm_2(&g.iter().zip(&uj).map(|(gi, ui)| gi + weights[j] * ui / nu).collect::<Vec<_>>())
        } else {
            (norm_2(&g) - weights[j]).max(0.0)
        };
        worst = worst.max(r);
    }
    Ok(worst)
}
