//! Fixed-point proximity algorithm for `min_u phi(u) + omega(C u)`.
//!
//! One iteration is
//!
//! ```text
//! u+ = prox_{beta phi}(u - beta C^T v)
//! v+ = rho (I - prox_{omega/rho})(v/rho + C(2 u+ - u))
//! ```
//!
//! which converges whenever `beta * rho * |C|_2^2 < 1`. Both arrangements in
//! use are supported: the regularizer in `phi` with a data matrix as `C`, and
//! the fidelity in `phi` with the regularizer composed with a transform in
//! `omega`.

use crate::error::{Error, Result};
use crate::linalg::{norm_2, norm_inf, sparsity_level, LinearOperator, SparsityReport, Vector, DEFAULT_ZERO_TOL};
use crate::prox::Proximable;

/// Magnitude beyond which an iterate is treated as divergent.
pub const DIVERGENCE_BOUND: f64 = 1e12;

/// Default step factor: `beta = rho = STEP_FACTOR / |C|_2`.
pub const STEP_FACTOR: f64 = 0.99;

/// Power-iteration estimate of the largest singular value of `c`.
///
/// Operators that know their norm in closed form (orthogonal transforms,
/// first differences) report it through [`LinearOperator::norm_hint`];
/// everything else goes through the Rayleigh quotient of `C^T C`, which
/// never overestimates.
pub fn spectral_norm(c: &dyn LinearOperator, iters: usize) -> Result<f64> {
    if let Some(norm) = c.norm_hint() {
        return Ok(norm);
    }
    let n = c.cols();
    // deterministic start vector with no special structure
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.754_877_666).sin()).collect();
    let mut estimate: f64 = 0.0;
    for _ in 0..iters.max(1) {
        let nx = norm_2(&x);
        if nx == 0.0 {
            break;
        }
        x.iter_mut().for_each(|v| *v /= nx);
        let cx = c.apply(&x);
        estimate = estimate.max(norm_2(&cx));
        x = c.apply_transpose(&cx);
    }
    if estimate == 0.0 {
        // the start vector may lie in the kernel; fall back to unit vectors
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            if norm_inf(&c.apply(&e)) > 0.0 {
                return spectral_norm_from(c, e, iters);
            }
        }
        return Err(Error::ZeroMatrix);
    }
    Ok(estimate)
}

fn spectral_norm_from(c: &dyn LinearOperator, mut x: Vec<f64>, iters: usize) -> Result<f64> {
    let mut estimate: f64 = 0.0;
    for _ in 0..iters.max(1) {
        let nx = norm_2(&x);
        x.iter_mut().for_each(|v| *v /= nx);
        let cx = c.apply(&x);
        estimate = estimate.max(norm_2(&cx));
        x = c.apply_transpose(&cx);
    }
    Ok(estimate)
}

/// Step sizes, budget and starting point of a solve.
#[derive(Debug, Clone)]
pub struct FppaConfig {
    pub beta: f64,
    pub rho: f64,
    pub max_iters: usize,
    /// Stop once the relative change of both `u` and `v` drops below this.
    /// Zero runs the full budget.
    pub rel_tol: f64,
    pub u0: Option<Vec<f64>>,
    pub v0: Option<Vec<f64>>,
    /// Record the objective every this many iterations.
    pub trace_every: Option<usize>,
    pub zero_tol: f64,
}

impl FppaConfig {
    /// Default steps `beta = rho = 0.99 / |C|_2` and zero starting points.
    pub fn with_default_steps(operator_norm: f64, max_iters: usize) -> Self {
        let step = STEP_FACTOR / operator_norm;
        FppaConfig {
            beta: step,
            rho: step,
            max_iters,
            rel_tol: 0.0,
            u0: None,
            v0: None,
            trace_every: None,
            zero_tol: DEFAULT_ZERO_TOL,
        }
    }

    pub fn for_operator(c: &dyn LinearOperator, max_iters: usize) -> Result<Self> {
        Ok(Self::with_default_steps(spectral_norm(c, 500)?, max_iters))
    }

    pub fn rel_tol(mut self, tol: f64) -> Self {
        self.rel_tol = tol;
        self
    }

    pub fn trace_every(mut self, every: usize) -> Self {
        self.trace_every = Some(every);
        self
    }

    /// Checks `beta * rho < 1 / |C|^2` against a norm estimate.
    pub fn validate(&self, operator_norm: f64) -> Result<()> {
        let ok = self.beta > 0.0
            && self.rho > 0.0
            && self.beta * self.rho * operator_norm * operator_norm < 1.0
            && self.max_iters > 0
            && self.rel_tol >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::StepSize { beta: self.beta, rho: self.rho, norm: operator_norm })
        }
    }
}

/// Outcome of a solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub u_inf: Vector,
    /// Final dual iterate; it lies in the subdifferential of `omega` at
    /// (approximately) `C u_inf`.
    pub v_inf: Vec<f64>,
    pub iterations_run: usize,
    pub final_rel_change: f64,
    pub converged: bool,
    /// Filled in by callers that know the gradient of a smooth fidelity.
    pub fermat_residual: Option<f64>,
    pub sparsity: SparsityReport,
    /// Sparsity of `B u_inf` when the regularizer acts through a transform.
    pub transform_sparsity: Option<SparsityReport>,
    pub objective_trace: Vec<f64>,
}

impl SolveReport {
    pub fn with_transform_sparsity(mut self, bu: &[f64], tol: f64) -> Self {
        self.transform_sparsity = Some(sparsity_level(bu, tol));
        self
    }

    pub fn with_fermat_residual(mut self, residual: f64) -> Self {
        self.fermat_residual = Some(residual);
        self
    }
}

/// Scratch state for one solve.
pub struct FppaState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    ctv: Vec<f64>,
    cu: Vec<f64>,
    w: Vec<f64>,
    prox_w: Vec<f64>,
    u_next: Vec<f64>,
}

impl FppaState {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Self {
        let (n, m) = (u.len(), v.len());
        FppaState {
            u,
            v,
            ctv: vec![0.0; n],
            cu: vec![0.0; m],
            w: vec![0.0; m],
            prox_w: vec![0.0; m],
            u_next: vec![0.0; n],
        }
    }

    /// Advances one iteration; returns the relative changes of `u` and `v`.
    pub fn step(
        &mut self,
        phi: &dyn Proximable,
        omega: &dyn Proximable,
        c: &dyn LinearOperator,
        beta: f64,
        rho: f64,
    ) -> (f64, f64) {
        c.apply_transpose_into(&self.v, &mut self.ctv);
        for (t, u) in self.ctv.iter_mut().zip(&self.u) {
            *t = u - beta * *t;
        }
        phi.prox_into(&self.ctv, beta, &mut self.u_next);

        for (t, (un, u)) in self.ctv.iter_mut().zip(self.u_next.iter().zip(&self.u)) {
            *t = 2.0 * un - u;
        }
        c.apply_into(&self.ctv, &mut self.cu);
        for ((w, v), cu) in self.w.iter_mut().zip(&self.v).zip(&self.cu) {
            *w = v / rho + cu;
        }
        omega.prox_into(&self.w, 1.0 / rho, &mut self.prox_w);

        let mut du = 0.0;
        for (un, u) in self.u_next.iter().zip(&self.u) {
            du += (un - u) * (un - u);
        }
        let mut dv = 0.0;
        for ((v, w), p) in self.v.iter_mut().zip(&self.w).zip(&self.prox_w) {
            let next = rho * (w - p);
            dv += (next - *v) * (next - *v);
            *v = next;
        }
        let rel_u = du.sqrt() / norm_2(&self.u).max(1.0);
        let rel_v = dv.sqrt() / norm_2(&self.v).max(1.0);
        std::mem::swap(&mut self.u, &mut self.u_next);
        (rel_u, rel_v)
    }
}

/// Objective `phi(u) + omega(C u)`.
pub fn objective(phi: &dyn Proximable, omega: &dyn Proximable, c: &dyn LinearOperator, u: &[f64]) -> f64 {
    phi.eval(u) + omega.eval(&c.apply(u))
}

/// Runs the iteration until the budget is spent or the relative change falls
/// below `cfg.rel_tol`.
///
/// Step sizes are validated against `spectral_norm(c)` before iterating.
pub fn fppa_solve(
    phi: &dyn Proximable,
    omega: &dyn Proximable,
    c: &dyn LinearOperator,
    cfg: &FppaConfig,
) -> Result<SolveReport> {
    let norm = spectral_norm(c, 500)?;
    fppa_solve_with_norm(phi, omega, c, cfg, norm)
}

/// [`fppa_solve`] with a caller-supplied operator norm.
pub fn fppa_solve_with_norm(
    phi: &dyn Proximable,
    omega: &dyn Proximable,
    c: &dyn LinearOperator,
    cfg: &FppaConfig,
    operator_norm: f64,
) -> Result<SolveReport> {
    cfg.validate(operator_norm)?;
    let (m, n) = (c.rows(), c.cols());
    let u0 = cfg.u0.clone().unwrap_or_else(|| vec![0.0; n]);
    let v0 = cfg.v0.clone().unwrap_or_else(|| vec![0.0; m]);
    crate::linalg::check_len(n, u0.len())?;
    crate::linalg::check_len(m, v0.len())?;

    let mut state = FppaState::new(u0, v0);
    let mut trace = Vec::new();
    let mut rel = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    for k in 1..=cfg.max_iters {
        let (ru, rv) = state.step(phi, omega, c, cfg.beta, cfg.rho);
        rel = ru.max(rv);
        iterations = k;
        let mag = norm_inf(&state.u);
        if !mag.is_finite() || mag > DIVERGENCE_BOUND {
            return Err(Error::Diverged { iteration: k, magnitude: mag });
        }
        if let Some(every) = cfg.trace_every {
            if k % every == 0 {
                trace.push(objective(phi, omega, c, &state.u));
            }
        }
        if rel < cfg.rel_tol {
            converged = true;
            break;
        }
    }
    let sparsity = sparsity_level(&state.u, cfg.zero_tol);
    Ok(SolveReport {
        u_inf: Vector::from_raw(state.u),
        v_inf: state.v,
        iterations_run: iterations,
        final_rel_change: rel,
        converged,
        fermat_residual: None,
        sparsity,
        transform_sparsity: None,
        objective_trace: trace,
    })
}
