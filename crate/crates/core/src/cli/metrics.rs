//! Reconstruction and classification quality.

use crate::error::Result;
use crate::linalg::{check_len, norm_2};

/// `|f - u|_2^2 / n`.
pub fn mse(f: &[f64], u: &[f64]) -> Result<f64> {
    check_len(f.len(), u.len())?;
    let d: f64 = f.iter().zip(u).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(d / f.len() as f64)
}

/// `20 log10(peak / rms(f - u))`; infinite for an exact reconstruction.
pub fn psnr(f: &[f64], u: &[f64], peak: f64) -> Result<f64> {
    let rms = mse(f, u)?.sqrt();
    Ok(if rms == 0.0 { f64::INFINITY } else { 20.0 * (peak / rms).log10() })
}

/// Percentage of predictions whose sign matches the `+-1` label; a zero
/// prediction counts as `+1`.
pub fn accuracy(predictions: &[f64], labels: &[f64]) -> Result<f64> {
    check_len(labels.len(), predictions.len())?;
    if labels.is_empty() {
        return Ok(0.0);
    }
    let hits = predictions.iter().zip(labels).filter(|(p, y)| (if **p >= 0.0 { 1.0 } else { -1.0 }) == **y).count();
    Ok(100.0 * hits as f64 / labels.len() as f64)
}

/// `|u - v|_2 / delta`.
pub fn error_ratio(u: &[f64], v: &[f64], delta: f64) -> Result<f64> {
    check_len(u.len(), v.len())?;
    Ok(norm_2(&crate::linalg::sub(u, v)) / delta)
}
