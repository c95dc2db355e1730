use serde::Serialize;

use super::TimeSeries;
use crate::error::{Error, Result};

/// Classical additive decomposition `x = trend + seasonal + residual`.
///
/// `trend` and `residual` are `None` in the first and last `period / 2`
/// slots, where the centered window does not fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub period: usize,
    pub trend: Vec<Option<f64>>,
    pub seasonal: Vec<f64>,
    pub residual: Vec<Option<f64>>,
}

pub fn decompose(ts: &TimeSeries, period: usize) -> Result<Decomposition> {
    if period < 2 {
        return Err(Error::invalid("decomposition period must be at least 2"));
    }
    let x = ts.values();
    let n = x.len();
    if n < 2 * period {
        return Err(Error::too_short(format!(
            "decomposition with period {period} needs {} points, got {n}",
            2 * period
        )));
    }

    let weights = centered_weights(period);
    let half = period / 2;
    let mut trend = vec![None; n];
    for (t, slot) in trend.iter_mut().enumerate().take(n - half).skip(half) {
        let window = &x[t - half..=t + half];
        *slot = Some(window.iter().zip(&weights).map(|(v, w)| v * w).sum());
    }

    let mut sums = vec![0.0; period];
    let mut counts = vec![0usize; period];
    for t in 0..n {
        if let Some(tr) = trend[t] {
            sums[t % period] += x[t] - tr;
            counts[t % period] += 1;
        }
    }
    let mut pattern: Vec<f64> = sums.iter().zip(&counts).map(|(s, &c)| s / c as f64).collect();
    let mean = pattern.iter().sum::<f64>() / period as f64;
    pattern.iter_mut().for_each(|p| *p -= mean);

    let seasonal: Vec<f64> = (0..n).map(|t| pattern[t % period]).collect();
    let residual = (0..n).map(|t| trend[t].map(|tr| x[t] - tr - seasonal[t])).collect();
    Ok(Decomposition { period, trend, seasonal, residual })
}

/// Weights of the centered moving average: plain `1/m` over `m` points for
/// odd `m`, a `2 x m` average with half-weight ends for even `m`.
fn centered_weights(period: usize) -> Vec<f64> {
    let m = period as f64;
    if period % 2 == 1 {
        vec![1.0 / m; period]
    } else {
        let mut w = vec![1.0 / m; period + 1];
        w[0] = 0.5 / m;
        w[period] = 0.5 / m;
        w
    }
}
