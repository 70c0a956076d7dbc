//! Additive white Gaussian noise.

use crate::error::{Error, Result};
use crate::linalg::norm_2;
use crate::rng::SeededRng;

/// How the noise level is fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseLevel {
    /// Entrywise standard deviation.
    Sigma(f64),
    /// Signal-to-noise ratio in decibels, met exactly by rescaling.
    Snr(f64),
    /// Euclidean norm of the noise, met exactly by rescaling.
    Delta(f64),
}

/// Returns `f + eta` and `|eta|_2`.
pub fn add_gaussian_noise(f: &[f64], level: NoiseLevel, rng: &mut SeededRng) -> Result<(Vec<f64>, f64)> {
    let mut eta = rng.gaussian_vec(f.len());
    let target = match level {
        NoiseLevel::Sigma(s) if s >= 0.0 && s.is_finite() => s * norm_2(&eta),
        NoiseLevel::Snr(snr) if snr.is_finite() => {
            let nf = norm_2(f);
            if nf == 0.0 {
                return Err(Error::InvalidArgument("SNR is undefined for a zero signal".into()));
            }
            nf * 10f64.powf(-snr / 20.0)
        }
        NoiseLevel::Delta(d) if d >= 0.0 && d.is_finite() => d,
        other => return Err(Error::InvalidArgument(format!("invalid noise level {other:?}"))),
    };
    let ne = norm_2(&eta);
    let scale = if ne > 0.0 { target / ne } else { 0.0 };
    eta.iter_mut().for_each(|v| *v *= scale);
    let x = f.iter().zip(&eta).map(|(a, b)| a + b).collect();
    Ok((x, norm_2(&eta)))
}
