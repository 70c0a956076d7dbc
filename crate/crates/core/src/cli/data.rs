//! Test signals, a synthetic image and synthetic datasets.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::rng::SeededRng;

/// `f(t) = sqrt(t (1 - t)) sin(2.1 pi / (t + 1.05))` on `n` uniform points of `[0, 1]`.
pub fn doppler_signal(n: usize) -> Result<Vector> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("signal length must be >= 2, got {n}")));
    }
    let h = 1.0 / (n - 1) as f64;
    Ok(Vector::from_fn(n, |j| {
        let t = if j == n - 1 { 1.0 } else { j as f64 * h };
        (t * (1.0 - t)).max(0.0).sqrt() * (2.1 * std::f64::consts::PI / (t + 1.05)).sin()
    }))
}

/// Piecewise-constant scene with a textured patch, integer levels in `0..=255`.
pub fn synthetic_image(side: usize) -> Vec<f64> {
    let s = side as f64;
    let mut out = Vec::with_capacity(side * side);
    for i in 0..side {
        for j in 0..side {
            let (y, x) = ((i as f64 + 0.5) / s, (j as f64 + 0.5) / s);
            let mut v = 60.0;
            if (0.15..0.55).contains(&x) && (0.2..0.7).contains(&y) {
                v = 200.0;
            }
            if (x - 0.7).powi(2) + (y - 0.35).powi(2) < 0.04 {
                v = 120.0;
            }
            if x > 0.55 && y > 0.65 {
                let p = 2.0 * std::f64::consts::PI * 6.0;
                v = 150.0 + 40.0 * (p * x).sin() * (p * y).cos();
            }
            out.push(v.round().clamp(0.0, 255.0));
        }
    }
    out
}

/// Two Gaussian clouds in `R^d` with means `+-separation/2` along the first
/// axis and balanced random labels.
pub fn synth_two_class(n: usize, d: usize, separation: f64, seed: u64) -> Result<(Matrix, Vec<f64>)> {
    synth_two_class_stream(n, d, separation, seed, 0)
}

pub(crate) fn synth_two_class_stream(
    n: usize,
    d: usize,
    separation: f64,
    seed: u64,
    stream: u64,
) -> Result<(Matrix, Vec<f64>)> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument(format!("need n, d > 0 (n={n}, d={d})")));
    }
    let mut rng = SeededRng::new(seed, stream);
    let labels: Vec<f64> = (0..n).map(|_| if rng.uniform() < 0.5 { -1.0 } else { 1.0 }).collect();
    let mut data = Vec::with_capacity(n * d);
    for &y in &labels {
        for k in 0..d {
            let shift = if k == 0 { 0.5 * separation * y } else { 0.0 };
            data.push(shift + rng.gaussian());
        }
    }
    Ok((Matrix::new(n, d, data)?, labels))
}

/// `y = sin(pi x_1) + ... ` on uniform inputs in `[-1, 1]^d`, plus noise of
/// standard deviation `noise`.
pub fn synth_regression(n: usize, d: usize, noise: f64, seed: u64, stream: u64) -> Result<(Matrix, Vec<f64>)> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument(format!("need n, d > 0 (n={n}, d={d})")));
    }
    let mut rng = SeededRng::new(seed, stream);
    let mut data = Vec::with_capacity(n * d);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<f64> = (0..d).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
        y.push(row.iter().map(|v| (std::f64::consts::PI * v).sin()).sum::<f64>() + noise * rng.gaussian());
        data.extend(row);
    }
    Ok((Matrix::new(n, d, data)?, y))
}
