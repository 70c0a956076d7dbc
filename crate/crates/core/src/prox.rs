//! Proximity operators and scalar subdifferentials.
//!
//! `prox_f(z) = argmin_u 1/2 |u - z|^2 + f(u)`. Every operator here is either
//! separable or reduces blockwise to a scalar problem, so each has a closed form.

use crate::error::{Error, Result};
use crate::linalg::{check_len, norm_2, Partition, Vector};

#[inline]
fn soft(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

#[inline]
fn hinge_scalar(z: f64, c: f64) -> f64 {
    if z >= 1.0 {
        z
    } else if z <= 1.0 - c {
        z + c
    } else {
        1.0
    }
}

#[inline]
fn eps_scalar(z: f64, y: f64, eps: f64, c: f64) -> f64 {
    let t = z - y;
    let a = t.abs();
    if a <= eps {
        z
    } else if a <= eps + c {
        y + eps.copysign(t)
    } else {
        z - c.copysign(t)
    }
}

/// Soft thresholding `sign(z_j) max(|z_j| - t, 0)`.
pub fn prox_l1(z: &[f64], t: f64) -> Vector {
    assert!(t >= 0.0, "threshold must be nonnegative");
    Vector::from_raw(z.iter().map(|&v| soft(v, t)).collect())
}

fn group_shrink_into(z: &[f64], partition: &Partition, weights: &[f64], out: &mut [f64]) {
    for (j, group) in partition.groups().iter().enumerate() {
        let norm = norm_2(&group.iter().map(|&i| z[i]).collect::<Vec<_>>());
        let factor = if norm <= weights[j] { 0.0 } else { 1.0 - weights[j] / norm };
        for &i in group {
            out[i] = factor * z[i];
        }
    }
}

/// Block shrinkage `z_j max(0, 1 - w_j / |z_j|_2)`, one weight per group.
pub fn prox_group_l2(z: &[f64], partition: &Partition, weights: &[f64]) -> Result<Vector> {
    check_len(partition.dim(), z.len())?;
    check_len(partition.len(), weights.len())?;
    if let Some(w) = weights.iter().find(|w| !(**w >= 0.0)) {
        return Err(Error::InvalidArgument(format!("group weight {w} is negative")));
    }
    let mut out = vec![0.0; z.len()];
    group_shrink_into(z, partition, weights, &mut out);
    Ok(Vector::from_raw(out))
}

/// Prox of `c/2 |. - x|^2`: `(z + c x) / (1 + c)`.
pub fn prox_square_fidelity(z: &[f64], x: &[f64], c: f64) -> Result<Vector> {
    check_len(x.len(), z.len())?;
    assert!(c > 0.0, "scale must be positive");
    Ok(Vector::from_raw(z.iter().zip(x).map(|(zj, xj)| (zj + c * xj) / (1.0 + c)).collect()))
}

/// Prox of `c sum_j max(1 - z_j, 0)`.
pub fn prox_hinge_sum(z: &[f64], c: f64) -> Vector {
    assert!(c > 0.0, "scale must be positive");
    Vector::from_raw(z.iter().map(|&v| hinge_scalar(v, c)).collect())
}

/// Prox of `c sum_j max(|z_j - y_j| - eps, 0)`.
pub fn prox_eps_insensitive_sum(z: &[f64], y: &[f64], eps: f64, c: f64) -> Result<Vector> {
    check_len(y.len(), z.len())?;
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    assert!(c > 0.0, "scale must be positive");
    Ok(Vector::from_raw(z.iter().zip(y).map(|(&zj, &yj)| eps_scalar(zj, yj, eps, c)).collect()))
}

/// A convex function with a cheap proximity operator, as consumed by the
/// fixed-point proximity solver.
pub trait Proximable: Sync {
    fn eval(&self, u: &[f64]) -> f64;

    /// `out = prox_{scale * f}(z)`, `scale > 0`.
    fn prox_into(&self, z: &[f64], scale: f64, out: &mut [f64]);

    fn prox(&self, z: &[f64], scale: f64) -> Vec<f64> {
        let mut out = vec![0.0; z.len()];
        self.prox_into(z, scale, &mut out);
        out
    }
}

/// `weight * |u|_1`
#[derive(Debug, Clone)]
pub struct L1Norm {
    pub weight: f64,
}

impl Proximable for L1Norm {
    fn eval(&self, u: &[f64]) -> f64 {
        self.weight * crate::linalg::norm_1(u)
    }

    fn prox_into(&self, z: &[f64], scale: f64, out: &mut [f64]) {
        let t = scale * self.weight;
        for (o, &v) in out.iter_mut().zip(z) {
            *o = soft(v, t);
        }
    }
}

/// `weight * |u_{0..penalized}|_1`, leaving trailing coordinates unpenalized.
///
/// This is `weight * |B u|_1` with `B = [I 0]`, the penalty of the kernel
/// models where the last coordinate is an unregularized bias.
#[derive(Debug, Clone)]
pub struct LeadingL1 {
    pub weight: f64,
    pub penalized: usize,
}

impl Proximable for LeadingL1 {
    fn eval(&self, u: &[f64]) -> f64 {
        self.weight * crate::linalg::norm_1(&u[..self.penalized])
    }

    fn prox_into(&self, z: &[f64], scale: f64, out: &mut [f64]) {
        let t = scale * self.weight;
        for (j, (o, &v)) in out.iter_mut().zip(z).enumerate() {
            *o = if j < self.penalized { soft(v, t) } else { v };
        }
    }
}

/// `sum_j w_j |u_j|_2` over the groups of a partition.
#[derive(Debug, Clone)]
pub struct GroupL2 {
    pub partition: Partition,
    pub weights: Vec<f64>,
}

impl GroupL2 {
    /// Group-lasso weights `lambda sqrt(n_j)`.
    pub fn group_lasso(partition: Partition, lambda: f64) -> Self {
        let weights = partition.sizes().iter().map(|&s| lambda * (s as f64).sqrt()).collect();
        GroupL2 { partition, weights }
    }
}

impl Proximable for GroupL2 {
    fn eval(&self, u: &[f64]) -> f64 {
        self.partition
            .groups()
            .iter()
            .zip(&self.weights)
            .map(|(g, w)| w * norm_2(&g.iter().map(|&i| u[i]).collect::<Vec<_>>()))
            .sum()
    }

    fn prox_into(&self, z: &[f64], scale: f64, out: &mut [f64]) {
        let w: Vec<f64> = self.weights.iter().map(|w| w * scale).collect();
        group_shrink_into(z, &self.partition, &w, out);
    }
}

/// `1/2 |u - target|_2^2`
#[derive(Debug, Clone)]
pub struct SquaredDistance {
    pub target: Vec<f64>,
}

impl Proximable for SquaredDistance {
    fn eval(&self, u: &[f64]) -> f64 {
        0.5 * u.iter().zip(&self.target).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
    }

    fn prox_into(&self, z: &[f64], scale: f64, out: &mut [f64]) {
        for ((o, zj), xj) in out.iter_mut().zip(z).zip(&self.target) {
            *o = (zj + scale * xj) / (1.0 + scale);
        }
    }
}

/// `sum_j max(1 - z_j, 0)`
#[derive(Debug, Clone, Default)]
pub struct HingeSum;

impl Proximable for HingeSum {
    fn eval(&self, u: &[f64]) -> f64 {
        u.iter().map(|&z| (1.0 - z).max(0.0)).sum()
    }

    fn prox_into(&self, z: &[f64], scale: f64, out: &mut [f64]) {
        for (o, &v) in out.iter_mut().zip(z) {
            *o = hinge_scalar(v, scale);
        }
    }
}

/// `sum_j max(|z_j - y_j| - eps, 0)`
#[derive(Debug, Clone)]
pub struct EpsInsensitiveSum {
    pub target: Vec<f64>,
    pub eps: f64,
}

impl Proximable for EpsInsensitiveSum {
    fn eval(&self, u: &[f64]) -> f64 {
        u.iter().zip(&self.target).map(|(z, y)| ((z - y).abs() - self.eps).max(0.0)).sum()
    }

    fn prox_into(&self, z: &[f64], scale: f64, out: &mut [f64]) {
        for ((o, &zj), &yj) in out.iter_mut().zip(z).zip(&self.target) {
            *o = eps_scalar(zj, yj, self.eps, scale);
        }
    }
}

/// Scalar convex losses whose subdifferentials enter the sparsity verifiers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarLossKind {
    /// `1/2 (t - x)^2`
    Square { x: f64 },
    /// `max(1 - t, 0)`
    Hinge,
    /// `max(|t - y| - eps, 0)`
    EpsInsensitive { y: f64, eps: f64 },
    /// `|t|`
    Abs,
}

impl ScalarLossKind {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            ScalarLossKind::Square { x } => 0.5 * (t - x).powi(2),
            ScalarLossKind::Hinge => (1.0 - t).max(0.0),
            ScalarLossKind::EpsInsensitive { y, eps } => ((t - y).abs() - eps).max(0.0),
            ScalarLossKind::Abs => t.abs(),
        }
    }
}

/// Closed interval `[lo, hi]` of one-sided derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubdiffInterval {
    pub lo: f64,
    pub hi: f64,
}

impl SubdiffInterval {
    pub fn point(v: f64) -> Self {
        SubdiffInterval { lo: v, hi: v }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

/// Exact subdifferential `[psi'_-(t), psi'_+(t)]`.
pub fn subdiff_at(kind: ScalarLossKind, t: f64) -> SubdiffInterval {
    subdiff_near(kind, t, 0.0)
}

/// Subdifferential where any kink within `kink_tol` of `t` counts as hit.
///
/// Used on numerical solutions, which land near but rarely exactly on a kink.
pub fn subdiff_near(kind: ScalarLossKind, t: f64, kink_tol: f64) -> SubdiffInterval {
    let at = |k: f64| (t - k).abs() <= kink_tol;
    let (lo, hi) = match kind {
        ScalarLossKind::Square { x } => (t - x, t - x),
        ScalarLossKind::Hinge => {
            if at(1.0) {
                (-1.0, 0.0)
            } else if t < 1.0 {
                (-1.0, -1.0)
            } else {
                (0.0, 0.0)
            }
        }
        ScalarLossKind::EpsInsensitive { y, eps } => {
            let (left, right) = (y - eps, y + eps);
            let lo = if at(left) || t < left {
                -1.0
            } else if at(right) || t <= right {
                0.0
            } else {
                1.0
            };
            let hi = if at(right) || t > right {
                1.0
            } else if at(left) || t >= left {
                0.0
            } else {
                -1.0
            };
            (lo, hi)
        }
        ScalarLossKind::Abs => {
            if at(0.0) {
                (-1.0, 1.0)
            } else {
                (t.signum(), t.signum())
            }
        }
    };
    SubdiffInterval { lo, hi }
}
