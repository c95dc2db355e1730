//! Seeded synthetic series used by examples, tests and benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const BURN_IN: usize = 500;

/// Standard normal draws from a seeded ChaCha stream.
pub fn white_noise(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// Simulates `x_t - mean = sum ar_i (x_{t-i} - mean) + e_t + sum ma_j e_{t-j}`
/// with unit-variance Gaussian innovations, discarding a burn-in prefix.
pub fn simulate_arma(ar: &[f64], ma: &[f64], mean: f64, n: usize, seed: u64) -> Vec<f64> {
    let noise = white_noise(n + BURN_IN, seed);
    let mut w = vec![0.0; n + BURN_IN];
    for t in 0..w.len() {
        let mut v = noise[t];
        for (i, a) in ar.iter().enumerate() {
            if t > i {
                v += a * w[t - 1 - i];
            }
        }
        for (j, m) in ma.iter().enumerate() {
            if t > j {
                v += m * noise[t - 1 - j];
            }
        }
        w[t] = v;
    }
    w[BURN_IN..].iter().map(|v| v + mean).collect()
}

/// Driftless Gaussian random walk starting at zero.
pub fn random_walk(n: usize, seed: u64) -> Vec<f64> {
    let mut acc = 0.0;
    white_noise(n, seed)
        .into_iter()
        .map(|e| {
            acc += e;
            acc
        })
        .collect()
}

/// `amplitude * sin(2 pi t / period)` for `t = 0..n`.
pub fn sine(n: usize, period: f64, amplitude: f64) -> Vec<f64> {
    (0..n)
        .map(|t| amplitude * (2.0 * std::f64::consts::PI * t as f64 / period).sin())
        .collect()
}
