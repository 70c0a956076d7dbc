//! Dense vectors and matrices, index partitions and sparsity accounting.
//!
//! Indices are zero-based throughout. A [`Partition`] of `0..n` plays the role
//! of the block structure `S_1, ..., S_d` used by block and group penalties.

use std::ops::Deref;

use crate::error::{Error, Result};

/// Default relative zero tolerance used when counting nonzeros.
pub const DEFAULT_ZERO_TOL: f64 = 1e-6;

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

/// A real vector with finite entries. Dimension is fixed at construction.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Vector(Vec<f64>);

impl Vector {
    /// Wraps `values`, rejecting NaN and infinities.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_finite(&values)?;
        Ok(Vector(values))
    }

    pub fn zeros(n: usize) -> Self {
        Vector(vec![0.0; n])
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> f64) -> Self {
        Vector((0..n).map(f).collect())
    }

    pub(crate) fn from_raw(values: Vec<f64>) -> Self {
        Vector(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm_1(&self) -> f64 {
        norm_1(&self.0)
    }

    pub fn norm_2(&self) -> f64 {
        norm_2(&self.0)
    }

    pub fn norm_inf(&self) -> f64 {
        norm_inf(&self.0)
    }
}

impl Deref for Vector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for Vector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Vector::new(values)
    }
}

pub fn norm_1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

pub fn norm_2(x: &[f64]) -> f64 {
    // scaled accumulation avoids overflow for large entries
    let scale = norm_inf(x);
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    scale * x.iter().map(|v| (v / scale).powi(2)).sum::<f64>().sqrt()
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// `x - y`
pub fn sub(x: &[f64], y: &[f64]) -> Vec<f64> {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn mean(x: &[f64]) -> f64 {
    if x.is_empty() {
        0.0
    } else {
        x.iter().sum::<f64>() / x.len() as f64
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// A linear map `R^cols -> R^rows` that can be applied together with its adjoint.
///
/// Dense matrices implement it directly; structured operators (differences,
/// wavelets, separable 2-D transforms) implement it matrix-free.
pub trait LinearOperator: Sync {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;

    /// `out = C x`
    fn apply_into(&self, x: &[f64], out: &mut [f64]);

    /// `out = C^T y`
    fn apply_transpose_into(&self, y: &[f64], out: &mut [f64]);

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows()];
        self.apply_into(x, &mut out);
        out
    }

    fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols()];
        self.apply_transpose_into(y, &mut out);
        out
    }

    /// Exact spectral norm, for operators that know it in closed form.
    fn norm_hint(&self) -> Option<f64> {
        None
    }

    /// Materializes the operator column by column.
    fn to_matrix(&self) -> Matrix {
        let (m, n) = (self.rows(), self.cols());
        let mut data = vec![0.0; m * n];
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; m];
        for j in 0..n {
            e[j] = 1.0;
            self.apply_into(&e, &mut col);
            for i in 0..m {
                data[i * n + j] = col[i];
            }
            e[j] = 0.0;
        }
        Matrix { rows: m, cols: n, data }
    }
}

/// Dense row-major real matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidShape(format!("{rows}x{cols}")));
        }
        check_len(rows * cols, data.len())?;
        check_finite(&data)?;
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            check_len(cols, row.len())?;
            data.extend_from_slice(row);
        }
        Matrix::new(rows.len(), cols, data)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diag(values: &[f64]) -> Self {
        Matrix::from_fn(values.len(), values.len(), |i, j| if i == j { values[i] } else { 0.0 })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Columns listed in `indices`, in that order.
    pub fn select_columns(&self, indices: &[usize]) -> Matrix {
        Matrix::from_fn(self.rows, indices.len(), |i, k| self.get(i, indices[k]))
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        check_len(self.cols, other.rows)?;
        let (m, k, n) = (self.rows, self.cols, other.cols);
        let mut data = vec![0.0; m * n];
        for i in 0..m {
            let out = &mut data[i * n..(i + 1) * n];
            for p in 0..k {
                let a = self.data[i * k + p];
                if a == 0.0 {
                    continue;
                }
                for (o, b) in out.iter_mut().zip(other.row(p)) {
                    *o += a * b;
                }
            }
        }
        Ok(Matrix { rows: m, cols: n, data })
    }

    /// `A x`
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.cols, x.len())?;
        Ok(self.apply(x))
    }

    /// `A^T y`
    pub fn matvec_t(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len(self.rows, y.len())?;
        Ok(self.apply_transpose(y))
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        norm_inf(&self.data)
    }

    pub fn frobenius(&self) -> f64 {
        norm_2(&self.data)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `[self other]`
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        check_len(self.rows, other.rows)?;
        let cols = self.cols + other.cols;
        Ok(Matrix::from_fn(
            self.rows,
            cols,
            |i, j| {
                if j < self.cols {
                    self.get(i, j)
                } else {
                    other.get(i, j - self.cols)
                }
            },
        ))
    }

    /// `diag(d) * self`
    pub fn scale_rows(&self, d: &[f64]) -> Result<Matrix> {
        check_len(self.rows, d.len())?;
        Ok(Matrix::from_fn(self.rows, self.cols, |i, j| d[i] * self.get(i, j)))
    }
}

impl LinearOperator for Matrix {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), x);
        }
    }

    fn apply_transpose_into(&self, y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, &yi) in y.iter().enumerate() {
            if yi == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * yi;
            }
        }
    }

    fn to_matrix(&self) -> Matrix {
        self.clone()
    }
}

/// Ordered disjoint groups covering `0..n`, each nonempty with strictly
/// increasing indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    groups: Vec<Vec<usize>>,
    n: usize,
}

impl Partition {
    pub fn new(groups: Vec<Vec<usize>>, n: usize) -> Result<Self> {
        let mut seen = vec![false; n];
        for (g, group) in groups.iter().enumerate() {
            if group.is_empty() {
                return Err(Error::InvalidPartition(format!("group {g} is empty")));
            }
            if group.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidPartition(format!("indices in group {g} are not strictly increasing")));
            }
            for &i in group {
                if i >= n {
                    return Err(Error::InvalidPartition(format!("index {i} outside 0..{n}")));
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(Error::InvalidPartition(format!("index {i} appears twice")));
                }
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("index {missing} not covered")));
        }
        Ok(Partition { groups, n })
    }

    /// Singleton groups `{0}, {1}, ..., {n-1}`.
    pub fn natural(n: usize) -> Self {
        Partition { groups: (0..n).map(|i| vec![i]).collect(), n }
    }

    /// Consecutive runs of the given sizes.
    pub fn contiguous(sizes: &[usize]) -> Result<Self> {
        let mut start = 0;
        let mut groups = Vec::with_capacity(sizes.len());
        for &s in sizes {
            groups.push((start..start + s).collect());
            start += s;
        }
        Partition::new(groups, start)
    }

    /// Number of groups `d`.
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Size of the partitioned index set.
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn group(&self, j: usize) -> &[usize] {
        &self.groups[j]
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// Group cardinalities `n_j`.
    pub fn sizes(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }
}

/// Entries of `u` at the indices of group `j`, in group order.
pub fn subvector(u: &[f64], partition: &Partition, j: usize) -> Result<Vector> {
    check_len(partition.dim(), u.len())?;
    if j >= partition.len() {
        return Err(Error::IndexOutOfRange { index: j, len: partition.len() });
    }
    Ok(Vector(partition.group(j).iter().map(|&i| u[i]).collect()))
}

/// Nonzero count of a vector (or of its blocks) under a relative zero test.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsityReport {
    pub level: usize,
    /// Indices (or block indices) that fail the zero test, ascending.
    pub support: Vec<usize>,
    pub zero_tolerance: f64,
}

fn zero_threshold(u: &[f64], tol: f64) -> f64 {
    assert!(tol >= 0.0 && tol.is_finite(), "zero tolerance must be finite and >= 0");
    tol * norm_inf(u).max(1.0)
}

/// Counts entries with `|u_j| > tol * max(1, |u|_inf)`.
pub fn sparsity_level(u: &[f64], tol: f64) -> SparsityReport {
    let threshold = zero_threshold(u, tol);
    let support: Vec<usize> = (0..u.len()).filter(|&j| u[j].abs() > threshold).collect();
    SparsityReport { level: support.len(), support, zero_tolerance: tol }
}

/// Counts blocks with `|u_j|_inf > tol * max(1, |u|_inf)`.
pub fn block_sparsity_level(u: &[f64], partition: &Partition, tol: f64) -> Result<SparsityReport> {
    check_len(partition.dim(), u.len())?;
    let threshold = zero_threshold(u, tol);
    let support: Vec<usize> =
        (0..partition.len()).filter(|&j| partition.group(j).iter().any(|&i| u[i].abs() > threshold)).collect();
    Ok(SparsityReport { level: support.len(), support, zero_tolerance: tol })
}
