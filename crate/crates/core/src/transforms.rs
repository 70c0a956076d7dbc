//! Structured matrices and the SVD reduction of a transform.
//!
//! Difference operators, orthogonal transforms and kernels are available both
//! as dense [`Matrix`] builders and, where sizes demand it, as matrix-free
//! [`LinearOperator`]s. [`SvdTransform`] carries the factorization
//! `B = U diag(sigma) V^T` together with the matrix `B'` whose first `m`
//! columns are the pseudo-inverse of `B` and whose remaining columns span the
//! kernel of `B`, so that `u = B' [B u; v]` for the kernel coordinates `v`.

use crate::error::{Error, Result};
use crate::linalg::{check_len, dot, norm_2, LinearOperator, Matrix, Partition, Vector};
use crate::rng::SeededRng;

/// Relative threshold below which a singular value counts as zero.
pub const RANK_TOL: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 100;

/// The `(n-1) x n` first-difference matrix: `-1` on the diagonal, `1` above it.
pub fn first_difference(n: usize) -> Result<Matrix> {
    FirstDifference::new(n).map(|d| d.to_matrix())
}

/// `D^(k)` by the recursion `D^(k+1) = D^(1, n-k) D^(k)`, of size `(n-k) x n`.
pub fn kth_difference(n: usize, k: usize) -> Result<Matrix> {
    if k == 0 || n <= k {
        return Err(Error::InvalidArgument(format!("difference order {k} needs 0 < k < n = {n}")));
    }
    let mut d = first_difference(n)?;
    for j in 1..k {
        d = first_difference(n - j)?.matmul(&d)?;
    }
    Ok(d)
}

/// Matrix-free first difference, `(D u)_i = u_{i+1} - u_i`.
#[derive(Debug, Clone, Copy)]
pub struct FirstDifference {
    n: usize,
}

impl FirstDifference {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("first difference needs n >= 2, got {n}")));
        }
        Ok(FirstDifference { n })
    }
}

impl LinearOperator for FirstDifference {
    fn rows(&self) -> usize {
        self.n - 1
    }

    fn cols(&self) -> usize {
        self.n
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, w) in out.iter_mut().zip(x.windows(2)) {
            *o = w[1] - w[0];
        }
    }

    fn apply_transpose_into(&self, y: &[f64], out: &mut [f64]) {
        let m = self.n - 1;
        out[0] = -y[0];
        for i in 1..m {
            out[i] = y[i - 1] - y[i];
        }
        out[m] = y[m - 1];
    }

    // D D^T is the (n-1)-point Dirichlet Laplacian
    fn norm_hint(&self) -> Option<f64> {
        Some(2.0 * (std::f64::consts::PI / (2.0 * self.n as f64)).cos())
    }
}

/// An operator paired with its known spectral norm.
#[derive(Debug, Clone)]
pub struct WithNorm<T> {
    pub op: T,
    pub norm: f64,
}

impl<T: LinearOperator> LinearOperator for WithNorm<T> {
    fn rows(&self) -> usize {
        self.op.rows()
    }

    fn cols(&self) -> usize {
        self.op.cols()
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        self.op.apply_into(x, out)
    }

    fn apply_transpose_into(&self, y: &[f64], out: &mut [f64]) {
        self.op.apply_transpose_into(y, out)
    }

    fn norm_hint(&self) -> Option<f64> {
        Some(self.norm)
    }
}

/// The identity on `R^n`.
#[derive(Debug, Clone, Copy)]
pub struct Identity {
    pub n: usize,
}

impl LinearOperator for Identity {
    fn rows(&self) -> usize {
        self.n
    }

    fn cols(&self) -> usize {
        self.n
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x)
    }

    fn apply_transpose_into(&self, y: &[f64], out: &mut [f64]) {
        out.copy_from_slice(y)
    }

    fn norm_hint(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// The adjoint of an operator.
#[derive(Debug, Clone)]
pub struct Transposed<T>(pub T);

impl<T: LinearOperator> LinearOperator for Transposed<T> {
    fn rows(&self) -> usize {
        self.0.cols()
    }

    fn cols(&self) -> usize {
        self.0.rows()
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        self.0.apply_transpose_into(x, out)
    }

    fn apply_transpose_into(&self, y: &[f64], out: &mut [f64]) {
        self.0.apply_into(y, out)
    }

    fn norm_hint(&self) -> Option<f64> {
        self.0.norm_hint()
    }
}

/// Orthonormal DCT-II: `W_{kj} = c_k cos(pi k (2j+1) / 2n)`.
pub fn dct_matrix(n: usize) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("DCT size must be positive".into()));
    }
    let nf = n as f64;
    Ok(Matrix::from_fn(n, n, |k, j| {
        let c = if k == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
        c * (std::f64::consts::PI * k as f64 * (2 * j + 1) as f64 / (2.0 * nf)).cos()
    }))
}

/// Full-depth Haar transform.
pub fn haar_matrix(n: usize) -> Result<Matrix> {
    Ok(Wavelet::new(n, 1, 0)?.to_matrix())
}

/// Daubechies transform with `vanishing_moments` in `1..=8` down to level
/// `coarsest_level`.
pub fn daubechies_matrix(n: usize, vanishing_moments: usize, coarsest_level: u32) -> Result<Matrix> {
    Ok(Wavelet::new(n, vanishing_moments, coarsest_level)?.to_matrix())
}

// Orthonormal Daubechies scaling (reconstruction low-pass) filters, indexed by
// the number of vanishing moments.
const DB1: [f64; 2] = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];
const DB2: [f64; 4] = [0.48296291314453416, 0.8365163037378079, 0.2241438680420134, -0.12940952255126037];
const DB3: [f64; 6] = [
    0.33267055295008263,
    0.8068915093110925,
    0.45987750211849154,
    -0.13501102001025458,
    -0.08544127388202666,
    0.03522629188570953,
];
const DB4: [f64; 8] = [
    0.2303778133088965,
    0.7148465705529157,
    0.6308807679298589,
    -0.027983769416859854,
    -0.18703481171909309,
    0.030841381835560764,
    0.0328830116668852,
    -0.010597401785069032,
];
const DB5: [f64; 10] = [
    0.16010239797419293,
    0.6038292697971896,
    0.7243085284377729,
    0.13842814590132074,
    -0.24229488706638203,
    -0.032244869584638375,
    0.07757149384004572,
    -0.006241490212798274,
    -0.012580751999081999,
    0.0033357252854737712,
];
const DB6: [f64; 12] = [
    0.11154074335010947,
    0.49462389039845306,
    0.7511339080210954,
    0.31525035170919763,
    -0.22626469396543983,
    -0.12976686756726194,
    0.09750160558732304,
    0.027522865530305727,
    -0.03158203931748603,
    0.0005538422011614961,
    0.004777257510945511,
    -0.0010773010853084796,
];
const DB7: [f64; 14] = [
    0.07785205408500918,
    0.3965393194819173,
    0.7291320908462351,
    0.4697822874051931,
    -0.14390600392856498,
    -0.22403618499387498,
    0.07130921926683026,
    0.08061260915108308,
    -0.03802993693501441,
    -0.01657454163066688,
    0.01255099855609984,
    0.0004295779729213665,
    -0.0018016407040474908,
    0.00035371379997452024,
];
const DB8: [f64; 16] = [
    0.05441584224310401,
    0.31287159091429995,
    0.6756307362972898,
    0.5853546836542067,
    -0.015829105256349306,
    -0.2840155429615469,
    0.0004724845739132828,
    0.12874742662047847,
    -0.017369301001807547,
    -0.044088253930794755,
    0.013981027917398282,
    0.008746094047405777,
    -0.004870352993451574,
    -0.00039174037337694705,
    0.0006754494064505693,
    -0.00011747678412476953,
];

/// Low-pass filter of the Daubechies wavelet with `n` vanishing moments.
pub fn daubechies_filter(vanishing_moments: usize) -> Result<&'static [f64]> {
    Ok(match vanishing_moments {
        1 => &DB1,
        2 => &DB2,
        3 => &DB3,
        4 => &DB4,
        5 => &DB5,
        6 => &DB6,
        7 => &DB7,
        8 => &DB8,
        _ => {
            return Err(Error::InvalidArgument(format!("vanishing moments must be in 1..=8, got {vanishing_moments}")))
        }
    })
}

/// Periodized orthogonal Daubechies analysis operator on `R^n`, `n = 2^J`.
///
/// The cascade runs from length `n` down to length `2^(L+1)`, leaving `2^L`
/// approximation coefficients. Output order is
/// `[approx, coarsest detail, ..., finest detail]`.
#[derive(Debug, Clone)]
pub struct Wavelet {
    n: usize,
    coarsest_level: u32,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Wavelet {
    pub fn new(n: usize, vanishing_moments: usize, coarsest_level: u32) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("wavelet length must be a power of two >= 2, got {n}")));
        }
        let levels = n.trailing_zeros();
        if coarsest_level >= levels {
            return Err(Error::InvalidArgument(format!(
                "coarsest level {coarsest_level} must be below log2(n) = {levels}"
            )));
        }
        let lo = daubechies_filter(vanishing_moments)?.to_vec();
        let len = lo.len();
        let hi = (0..len).map(|k| if k % 2 == 0 { lo[len - 1 - k] } else { -lo[len - 1 - k] }).collect();
        Ok(Wavelet { n, coarsest_level, lo, hi })
    }

    /// Sizes of the coefficient blocks in output order.
    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![1usize << self.coarsest_level];
        let mut p = sizes[0];
        while p < self.n {
            sizes.push(p);
            p *= 2;
        }
        sizes
    }

    /// Partition of the coefficient vector into resolution blocks.
    pub fn partition(&self) -> Partition {
        Partition::contiguous(&self.block_sizes()).expect("block sizes are positive")
    }

    fn analysis_step(&self, src: &[f64], dst: &mut [f64]) {
        let p = src.len();
        let half = p / 2;
        for i in 0..half {
            let (mut a, mut d) = (0.0, 0.0);
            for (k, (l, h)) in self.lo.iter().zip(&self.hi).enumerate() {
                let x = src[(2 * i + k) % p];
                a += l * x;
                d += h * x;
            }
            dst[i] = a;
            dst[half + i] = d;
        }
    }

    fn synthesis_step(&self, src: &[f64], dst: &mut [f64]) {
        let p = src.len();
        let half = p / 2;
        dst.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..half {
            let (a, d) = (src[i], src[half + i]);
            for (k, (l, h)) in self.lo.iter().zip(&self.hi).enumerate() {
                dst[(2 * i + k) % p] += l * a + h * d;
            }
        }
    }
}

impl LinearOperator for Wavelet {
    fn rows(&self) -> usize {
        self.n
    }

    fn cols(&self) -> usize {
        self.n
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x);
        let mut scratch = vec![0.0; self.n];
        let mut p = self.n;
        while p > 1 << self.coarsest_level {
            self.analysis_step(&out[..p], &mut scratch[..p]);
            out[..p].copy_from_slice(&scratch[..p]);
            p /= 2;
        }
    }

    fn apply_transpose_into(&self, y: &[f64], out: &mut [f64]) {
        out.copy_from_slice(y);
        let mut scratch = vec![0.0; self.n];
        let mut p = 2usize << self.coarsest_level;
        while p <= self.n {
            self.synthesis_step(&out[..p], &mut scratch[..p]);
            out[..p].copy_from_slice(&scratch[..p]);
            p *= 2;
        }
    }

    fn norm_hint(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// `W (x) W` acting on row-major `vec(X)` as `vec(W X W^T)`.
#[derive(Debug, Clone)]
pub struct Kron2d<T> {
    w: T,
}

impl<T: LinearOperator> Kron2d<T> {
    pub fn new(w: T) -> Result<Self> {
        if w.rows() != w.cols() {
            return Err(Error::InvalidShape(format!("{}x{} factor is not square", w.rows(), w.cols())));
        }
        Ok(Kron2d { w })
    }

    pub fn side(&self) -> usize {
        self.w.cols()
    }

    fn two_sided(&self, x: &[f64], out: &mut [f64], transpose: bool) {
        let n = self.side();
        let apply = |src: &[f64], dst: &mut [f64]| {
            if transpose {
                self.w.apply_transpose_into(src, dst)
            } else {
                self.w.apply_into(src, dst)
            }
        };
        // rows: X W^T, then columns: W (X W^T)
        let mut tmp = vec![0.0; n * n];
        for (src, dst) in x.chunks_exact(n).zip(tmp.chunks_exact_mut(n)) {
            apply(src, dst);
        }
        let mut col = vec![0.0; n];
        let mut res = vec![0.0; n];
        for j in 0..n {
            for i in 0..n {
                col[i] = tmp[i * n + j];
            }
            apply(&col, &mut res);
            for i in 0..n {
                out[i * n + j] = res[i];
            }
        }
    }
}

impl<T: LinearOperator> LinearOperator for Kron2d<T> {
    fn rows(&self) -> usize {
        self.side() * self.side()
    }

    fn cols(&self) -> usize {
        self.side() * self.side()
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        self.two_sided(x, out, false)
    }

    fn apply_transpose_into(&self, y: &[f64], out: &mut [f64]) {
        self.two_sided(y, out, true)
    }

    fn norm_hint(&self) -> Option<f64> {
        self.w.norm_hint().map(|s| s * s)
    }
}

/// Explicit Kronecker product `W (x) W`.
pub fn kron_2d(w: &Matrix) -> Result<Matrix> {
    if w.nrows() != w.ncols() {
        return Err(Error::InvalidShape(format!("{}x{} factor is not square", w.nrows(), w.ncols())));
    }
    let n = w.nrows();
    Ok(Matrix::from_fn(n * n, n * n, |r, c| w.get(r / n, c / n) * w.get(r % n, c % n)))
}

/// Gaussian kernel on the rows of `x`: `K_jk = exp(-|x_j - x_k|^2 / 2 mu^2)`.
pub fn gaussian_kernel_matrix(x: &Matrix, mu: f64) -> Result<Matrix> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::InvalidArgument(format!("kernel width must be positive, got {mu}")));
    }
    let n = x.nrows();
    let scale = 1.0 / (2.0 * mu * mu);
    let mut k = Matrix::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            let d2: f64 = x.row(i).iter().zip(x.row(j)).map(|(a, b)| (a - b) * (a - b)).sum();
            let v = (-d2 * scale).exp();
            k.set(i, j, v);
            k.set(j, i, v);
        }
    }
    Ok(k)
}

/// Kernel between the rows of `a` (evaluation points) and the rows of `b`
/// (training points).
pub fn gaussian_cross_kernel(a: &Matrix, b: &Matrix, mu: f64) -> Result<Matrix> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::InvalidArgument(format!("kernel width must be positive, got {mu}")));
    }
    check_len(b.ncols(), a.ncols())?;
    let scale = 1.0 / (2.0 * mu * mu);
    Ok(Matrix::from_fn(a.nrows(), b.nrows(), |i, j| {
        let d2: f64 = a.row(i).iter().zip(b.row(j)).map(|(p, q)| (p - q) * (p - q)).sum();
        (-d2 * scale).exp()
    }))
}

// Gram-Schmidt of `v` against `basis`, applied twice for stability.
fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(v, q);
            v.iter_mut().zip(q).for_each(|(x, qi)| *x -= c * qi);
        }
    }
}

/// Haar-random orthogonal matrix from Gram-Schmidt on Gaussian columns.
pub fn random_orthogonal(n: usize, rng: &mut SeededRng) -> Matrix {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v = rng.gaussian_vec(n);
        orthogonalize(&mut v, &cols);
        let nv = norm_2(&v);
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            cols.push(v);
        }
    }
    Matrix::from_fn(n, n, |i, j| cols[j][i])
}

// Extends orthonormal `cols` in R^d to a full orthonormal basis, at each step
// adding the coordinate vector with the largest residual.
fn complete_basis(mut cols: Vec<Vec<f64>>, d: usize) -> Vec<Vec<f64>> {
    while cols.len() < d {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for i in 0..d {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            orthogonalize(&mut e, &cols);
            let ne = norm_2(&e);
            if best.as_ref().is_none_or(|(b, _)| ne > *b) {
                best = Some((ne, e));
            }
        }
        let (ne, mut e) = best.expect("d > 0");
        e.iter_mut().for_each(|x| *x /= ne);
        cols.push(e);
    }
    cols
}

// One-sided Jacobi on the columns of `a` (each of length m). Returns the
// rotated columns and the accumulated right rotations, both as column lists.
fn one_sided_jacobi(mut a: Vec<Vec<f64>>) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let k = a.len();
    let mut v: Vec<Vec<f64>> = (0..k)
        .map(|j| {
            let mut e = vec![0.0; k];
            e[j] = 1.0;
            e
        })
        .collect();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha = dot(&a[p], &a[p]);
                let beta = dot(&a[q], &a[q]);
                let gamma = dot(&a[p], &a[q]);
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = a.split_at_mut(q);
                for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = c * xp - s * yq;
                    *y = s * xp + c * yq;
                }
                let (lo, hi) = v.split_at_mut(q);
                for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = c * xp - s * yq;
                    *y = s * xp + c * yq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (a, v)
}

/// `B = U diag(sigma) V^T` with full orthogonal `U`, `V`, plus `B'`.
#[derive(Debug, Clone)]
pub struct SvdTransform {
    b: Matrix,
    u: Matrix,
    sigma: Vec<f64>,
    v: Matrix,
    b_prime: Matrix,
}

/// Singular value decomposition by one-sided Jacobi on the smaller side.
///
/// The rank is the number of singular values above `RANK_TOL * sigma_1`.
pub fn svd(b: &Matrix) -> Result<SvdTransform> {
    if b.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let (m, n) = (b.nrows(), b.ncols());
    let tall = m >= n;
    // columns of the tall orientation
    let cols: Vec<Vec<f64>> =
        if tall { (0..n).map(|j| b.column(j)).collect() } else { (0..m).map(|i| b.row(i).to_vec()).collect() };
    let (rotated, right) = one_sided_jacobi(cols);
    let mut order: Vec<(f64, usize)> = rotated.iter().map(|c| norm_2(c)).zip(0..).collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0));
    let top = order[0].0;
    let rank = order.iter().take_while(|(s, _)| *s > RANK_TOL * top).count();
    let sigma: Vec<f64> = order[..rank].iter().map(|(s, _)| *s).collect();
    let long_dim = if tall { m } else { n };
    let left: Vec<Vec<f64>> = order[..rank].iter().map(|&(s, j)| rotated[j].iter().map(|x| x / s).collect()).collect();
    let left = complete_basis(left, long_dim);
    let right: Vec<Vec<f64>> = order.iter().map(|&(_, j)| right[j].clone()).collect();
    let as_matrix = |cols: &[Vec<f64>], d: usize| Matrix::from_fn(d, cols.len(), |i, j| cols[j][i]);
    let (u, v) =
        if tall { (as_matrix(&left, m), as_matrix(&right, n)) } else { (as_matrix(&right, m), as_matrix(&left, n)) };

    let r = rank;
    let b_prime = Matrix::from_fn(n, m + n - r, |i, c| {
        if c < m {
            (0..r).map(|k| v.get(i, k) * u.get(c, k) / sigma[k]).sum()
        } else {
            v.get(i, r + c - m)
        }
    });
    Ok(SvdTransform { b: b.clone(), u, sigma, v, b_prime })
}

impl SvdTransform {
    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn u(&self) -> &Matrix {
        &self.u
    }

    /// Positive singular values in nonincreasing order.
    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn v(&self) -> &Matrix {
        &self.v
    }

    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    /// `B' = V Lambda' U'`, of size `n x (m + n - r)`.
    pub fn b_prime(&self) -> &Matrix {
        &self.b_prime
    }

    pub fn is_full_row_rank(&self) -> bool {
        self.rank() == self.b.nrows()
    }

    /// `U Lambda V^T`.
    pub fn reconstruct(&self) -> Matrix {
        let (m, n) = (self.b.nrows(), self.b.ncols());
        Matrix::from_fn(m, n, |i, j| {
            (0..self.rank()).map(|k| self.u.get(i, k) * self.sigma[k] * self.v.get(j, k)).sum()
        })
    }

    /// `(B u, last n - r entries of V^T u)`.
    pub fn mapping_b(&self, u: &[f64]) -> Result<(Vector, Vector)> {
        let z = self.b.matvec(u)?;
        let vt_u = self.v.matvec_t(u)?;
        let kernel = vt_u[self.rank()..].to_vec();
        Ok((Vector::from_raw(z), Vector::from_raw(kernel)))
    }

    /// `B' [z; v]`.
    pub fn inverse_mapping(&self, z: &[f64], v: &[f64]) -> Result<Vector> {
        check_len(self.b.nrows(), z.len())?;
        check_len(self.b.ncols() - self.rank(), v.len())?;
        let stacked: Vec<f64> = z.iter().chain(v).copied().collect();
        Ok(Vector::from_raw(self.b_prime.matvec(&stacked)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm_inf;

    fn orthogonality_error(w: &Matrix) -> f64 {
        w.transpose().matmul(w).unwrap().max_abs_diff(&Matrix::identity(w.ncols()))
    }

    #[test]
    fn difference_examples() {
        let d = first_difference(3).unwrap();
        assert_eq!(d, Matrix::from_rows(&[vec![-1.0, 1.0, 0.0], vec![0.0, -1.0, 1.0]]).unwrap());
        assert_eq!(first_difference(2).unwrap(), Matrix::from_rows(&[vec![-1.0, 1.0]]).unwrap());
        assert!(first_difference(1).is_err());
        assert_eq!(kth_difference(3, 2).unwrap(), Matrix::from_rows(&[vec![1.0, -2.0, 1.0]]).unwrap());
        assert_eq!(kth_difference(7, 1).unwrap(), first_difference(7).unwrap());
        assert!(kth_difference(3, 3).is_err());
        let d3 = kth_difference(9, 3).unwrap();
        for i in 0..d3.nrows() {
            assert_eq!(d3.row(i).iter().sum::<f64>(), 0.0);
        }
        assert_eq!(first_difference(11).unwrap().matvec(&[1.0; 11]).unwrap(), vec![0.0; 10]);
    }

    #[test]
    fn matrix_free_difference_matches_dense() {
        let op = FirstDifference::new(9).unwrap();
        let dense = first_difference(9).unwrap();
        assert_eq!(op.to_matrix(), dense);
        let y: Vec<f64> = (0..8).map(|i| (i as f64).sin()).collect();
        assert_eq!(op.apply_transpose(&y), dense.matvec_t(&y).unwrap());
        let power = crate::fppa::spectral_norm(&dense, 5000).unwrap();
        assert!((op.norm_hint().unwrap() - power).abs() < 1e-9);
    }

    #[test]
    fn orthogonal_builders() {
        let h2 = haar_matrix(2).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert!(h2.max_abs_diff(&Matrix::from_rows(&[vec![s, s], vec![s, -s]]).unwrap()) < 1e-15);
        let d4 = dct_matrix(4).unwrap();
        assert!(d4.row(0).iter().all(|&v| (v - d4.get(0, 0)).abs() < 1e-15));
        assert!(orthogonality_error(&dct_matrix(64).unwrap()) < 1e-10);
        assert!(orthogonality_error(&haar_matrix(64).unwrap()) < 1e-10);
        for n_moments in 1..=8 {
            for level in 0..6 {
                let w = daubechies_matrix(64, n_moments, level).unwrap();
                assert!(orthogonality_error(&w) < 1e-10, "N={n_moments} L={level}");
            }
        }
        assert!(daubechies_matrix(64, 9, 2).is_err());
        assert!(daubechies_matrix(48, 2, 2).is_err());
        assert!(daubechies_matrix(64, 2, 6).is_err());
    }

    #[test]
    fn daubechies_filters_are_normalized() {
        for n in 1..=8 {
            let h = daubechies_filter(n).unwrap();
            assert_eq!(h.len(), 2 * n);
            assert!((h.iter().sum::<f64>() - 2f64.sqrt()).abs() < 1e-12);
            assert!((dot(h, h) - 1.0).abs() < 1e-12);
        }
        // closed form of the four-tap filter
        let r3 = 3f64.sqrt();
        let d = 4.0 * 2f64.sqrt();
        let closed = [(1.0 + r3) / d, (3.0 + r3) / d, (3.0 - r3) / d, (1.0 - r3) / d];
        for (a, b) in daubechies_filter(2).unwrap().iter().zip(closed) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn wavelet_has_vanishing_moments() {
        // detail coefficients of low-degree polynomials vanish away from the wrap
        let w = Wavelet::new(64, 3, 3).unwrap();
        let x: Vec<f64> = (0..64).map(|i| (i as f64) * (i as f64)).collect();
        let c = w.apply(&x);
        // finest detail block is c[32..64]; filters of length 6 wrap in the last 2
        for v in &c[32..62] {
            assert!(v.abs() < 1e-8, "{v}");
        }
    }

    #[test]
    fn wavelet_block_layout() {
        let w = Wavelet::new(4096, 6, 3).unwrap();
        let sizes = w.block_sizes();
        assert_eq!(sizes.len(), 10);
        assert_eq!(sizes[0], 8);
        assert_eq!(sizes[1], 8);
        assert_eq!(sizes[9], 2048);
        assert_eq!(sizes.iter().sum::<usize>(), 4096);
        // a constant signal lives in the approximation block only
        let c = Wavelet::new(64, 2, 2).unwrap().apply(&[1.0; 64]);
        assert!(norm_inf(&c[4..]) < 1e-12);
    }

    #[test]
    fn kron_examples() {
        assert_eq!(kron_2d(&Matrix::identity(2)).unwrap(), Matrix::identity(4));
        let mut rng = SeededRng::new(5, 0);
        let w = Matrix::from_fn(4, 4, |_, _| rng.gaussian());
        let x = Matrix::from_fn(4, 4, |_, _| rng.gaussian());
        let lhs = kron_2d(&w).unwrap().matvec(x.as_slice()).unwrap();
        let rhs = w.matmul(&x).unwrap().matmul(&w.transpose()).unwrap();
        assert!(norm_inf(&crate::linalg::sub(&lhs, rhs.as_slice())) < 1e-12);
        let free = Kron2d::new(w.clone()).unwrap();
        assert!(norm_inf(&crate::linalg::sub(&free.apply(x.as_slice()), &lhs)) < 1e-12);
        let dense_t = kron_2d(&w).unwrap().matvec_t(x.as_slice()).unwrap();
        assert!(norm_inf(&crate::linalg::sub(&free.apply_transpose(x.as_slice()), &dense_t)) < 1e-12);
        let q = daubechies_matrix(8, 2, 1).unwrap();
        assert!(orthogonality_error(&kron_2d(&q).unwrap()) < 1e-10);
        assert_eq!(Kron2d::new(Wavelet::new(8, 2, 1).unwrap()).unwrap().norm_hint(), Some(1.0));
    }

    #[test]
    fn kernel_examples() {
        let mu = 0.7;
        let x = Matrix::from_rows(&[vec![0.0, 0.0], vec![mu, mu]]).unwrap();
        let k = gaussian_kernel_matrix(&x, mu).unwrap();
        assert_eq!(k.get(0, 0), 1.0);
        assert_eq!(k.get(1, 1), 1.0);
        assert!((k.get(0, 1) - (-1f64).exp()).abs() < 1e-15);
        assert_eq!(k, k.transpose());
        assert!(gaussian_kernel_matrix(&x, 0.0).is_err());
        let cross = gaussian_cross_kernel(&x, &x, mu).unwrap();
        assert!(cross.max_abs_diff(&k) < 1e-15);
    }

    #[test]
    fn adjoint_wrappers() {
        let w = Wavelet::new(16, 3, 1).unwrap();
        let t = Transposed(w.clone());
        assert!(t.to_matrix().max_abs_diff(&w.to_matrix().transpose()) < 1e-15);
        assert_eq!(Identity { n: 3 }.to_matrix(), Matrix::identity(3));
    }

    #[test]
    fn random_orthogonal_is_orthogonal() {
        let mut rng = SeededRng::new(11, 0);
        assert!(orthogonality_error(&random_orthogonal(16, &mut rng)) < 1e-12);
    }

    #[test]
    fn svd_examples() {
        let t = svd(&Matrix::identity(2)).unwrap();
        assert!(t.b_prime().max_abs_diff(&Matrix::identity(2)) < 1e-15);
        let t = svd(&Matrix::from_rows(&[vec![2.0]]).unwrap()).unwrap();
        assert!((t.b_prime().get(0, 0) - 0.5).abs() < 1e-15);
        let t = svd(&Matrix::from_rows(&[vec![1.0, 0.0]]).unwrap()).unwrap();
        assert!(t.b_prime().max_abs_diff(&Matrix::identity(2)) < 1e-15);
        assert_eq!(svd(&Matrix::zeros(2, 2)).unwrap_err(), Error::ZeroMatrix);
    }

    #[test]
    fn mapping_examples() {
        let t = svd(&Matrix::identity(3)).unwrap();
        let (z, v) = t.mapping_b(&[1.0, -2.0, 4.0]).unwrap();
        assert_eq!(z.as_slice(), &[1.0, -2.0, 4.0]);
        assert!(v.is_empty());
        let t = svd(&Matrix::from_rows(&[vec![1.0, 0.0]]).unwrap()).unwrap();
        let (z, v) = t.mapping_b(&[3.0, 5.0]).unwrap();
        assert_eq!(z.as_slice(), &[3.0]);
        assert!((v[0].abs() - 5.0).abs() < 1e-15);
        let (a, b) = (0.3, 1.9);
        let t = svd(&first_difference(2).unwrap()).unwrap();
        let (z, v) = t.mapping_b(&[a, b]).unwrap();
        assert!((z[0] - (b - a)).abs() < 1e-15);
        assert!((v[0].abs() - (a + b) / 2f64.sqrt()).abs() < 1e-15);
        let back = t.inverse_mapping(&z, &v).unwrap();
        assert!((back[0] - a).abs() < 1e-14 && (back[1] - b).abs() < 1e-14);
    }

    #[test]
    fn difference_kernel_column_is_constant() {
        let n = 12;
        let t = svd(&first_difference(n).unwrap()).unwrap();
        assert!(t.is_full_row_rank());
        let last = t.b_prime().column(n - 1);
        let c = (n as f64).sqrt() / n as f64;
        assert!(last.iter().all(|v| (v.abs() - c).abs() < 1e-12));
        assert!(last.iter().all(|v| v.signum() == last[0].signum()));
    }

    #[test]
    fn svd_rank_deficient_invariants() {
        let mut rng = SeededRng::new(2, 0);
        let left = Matrix::from_fn(7, 2, |_, _| rng.gaussian());
        let right = Matrix::from_fn(2, 5, |_, _| rng.gaussian());
        let b = left.matmul(&right).unwrap();
        let t = svd(&b).unwrap();
        assert_eq!(t.rank(), 2);
        assert!(t.reconstruct().max_abs_diff(&b) < 1e-10 * b.max_abs().max(1.0));
        assert!(orthogonality_error(t.u()) < 1e-10);
        assert!(orthogonality_error(t.v()) < 1e-10);
        assert_eq!(t.b_prime().ncols(), 7 + 5 - 2);
        let u: Vec<f64> = rng.gaussian_vec(5);
        let (z, v) = t.mapping_b(&u).unwrap();
        let back = t.inverse_mapping(&z, &v).unwrap();
        assert!(norm_inf(&crate::linalg::sub(&back, &u)) < 1e-10);
    }
}
