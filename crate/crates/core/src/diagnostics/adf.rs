use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::linalg::{design, ols};

// MacKinnon (1994) p-value surface, constant-only regression, one series.
const TAU_MAX: f64 = 2.74;
const TAU_MIN: f64 = -18.83;
const TAU_STAR: f64 = -1.61;
const TAU_SMALL_P: [f64; 3] = [2.1659, 1.4412, 3.8269e-2];
const TAU_LARGE_P: [f64; 4] = [1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2];

// MacKinnon (2010) critical-value surface, constant-only regression: each row
// is a polynomial in 1/nobs for the 1%, 5% and 10% levels.
const TAU_CRIT: [[f64; 4]; 3] = [
    [-3.43035, -6.5393, -16.786, -79.433],
    [-2.86154, -2.8903, -4.234, -40.040],
    [-2.56677, -1.5384, -2.809, 0.0],
];

fn poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Approximate p-value of a Dickey-Fuller statistic (constant, no trend).
pub fn mackinnon_p_value(stat: f64) -> f64 {
    if stat > TAU_MAX {
        return 1.0;
    }
    if stat < TAU_MIN {
        return 0.0;
    }
    let z = if stat <= TAU_STAR { poly(&TAU_SMALL_P, stat) } else { poly(&TAU_LARGE_P, stat) };
    Normal::new(0.0, 1.0).expect("standard normal").cdf(z)
}

/// Critical values at 1%, 5% and 10% for a regression with `nobs` rows.
pub fn mackinnon_critical_values(nobs: usize) -> CriticalValues {
    let inv = 1.0 / nobs as f64;
    CriticalValues {
        one: poly(&TAU_CRIT[0], inv),
        five: poly(&TAU_CRIT[1], inv),
        ten: poly(&TAU_CRIT[2], inv),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValues {
    #[serde(rename = "1%")]
    pub one: f64,
    #[serde(rename = "5%")]
    pub five: f64,
    #[serde(rename = "10%")]
    pub ten: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfResult {
    pub statistic: f64,
    #[serde(rename = "pvalue")]
    pub p_value: f64,
    #[serde(rename = "lags")]
    pub lags_used: usize,
    #[serde(rename = "nobs")]
    pub n_obs: usize,
    pub critical_values: CriticalValues,
    pub stationary: bool,
}

impl AdfResult {
    pub fn conclusion(&self) -> &'static str {
        if self.stationary {
            "Reject the null hypothesis"
        } else {
            "Fail to reject the null hypothesis"
        }
    }

    pub fn verdict(&self) -> &'static str {
        if self.stationary {
            "Data is stationary"
        } else {
            "Data is non-stationary"
        }
    }
}

/// How many lagged differences enter the test regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LagPolicy {
    /// Minimize AIC over `0..=max_lag`; `None` uses `floor(12 (n/100)^(1/4))`.
    Aic { max_lag: Option<usize> },
    Fixed(usize),
}

impl Default for LagPolicy {
    fn default() -> Self {
        LagPolicy::Aic { max_lag: None }
    }
}

pub(crate) fn schwert_max_lag(n: usize) -> usize {
    (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

/// Regression rows for `lag` lagged differences, using the sample that
/// starts at difference index `first`.
fn regression(x: &[f64], lag: usize, first: usize) -> (Vec<f64>, nalgebra::DMatrix<f64>) {
    let dx: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let rows = dx.len() - first;
    let y = dx[first..].to_vec();
    // columns: level, constant, lagged differences
    let m = design(rows, 2 + lag, |r, c| {
        let t = first + r;
        match c {
            0 => x[t],
            1 => 1.0,
            j => dx[t - (j - 1)],
        }
    });
    (y, m)
}

/// Augmented Dickey-Fuller test with a constant and no trend.
///
/// Regresses `dy_t` on `y_{t-1}`, a constant and `k` lagged differences; the
/// statistic is the t-ratio of the level coefficient. Under AIC selection all
/// candidate lags are compared on a common sample, then the chosen lag is
/// refitted on every available row.
pub fn adf_test(x: &[f64], policy: LagPolicy) -> Result<AdfResult> {
    let n = x.len();
    if n < 12 {
        return Err(Error::too_short(format!("ADF test needs at least 12 points, got {n}")));
    }
    if x.iter().all(|v| *v == x[0]) {
        return Err(Error::ZeroVariance("ADF test of a constant series".into()));
    }
    let cap = (n / 2).saturating_sub(2);
    let lag = match policy {
        LagPolicy::Fixed(k) => {
            if k > cap {
                return Err(Error::too_short(format!("lag {k} too large for {n} points")));
            }
            k
        }
        LagPolicy::Aic { max_lag } => {
            let max_lag = max_lag.unwrap_or_else(|| schwert_max_lag(n)).min(cap);
            let mut best: Option<(f64, usize)> = None;
            for k in 0..=max_lag {
                let (y, m) = regression(x, k, max_lag);
                let fit = ols(&y, &m)?;
                if best.map_or(true, |(aic, _)| fit.aic < aic) {
                    best = Some((fit.aic, k));
                }
            }
            best.map(|(_, k)| k).unwrap_or(0)
        }
    };
    let (y, m) = regression(x, lag, lag);
    let fit = ols(&y, &m)?;
    let statistic = fit.coef[0] / fit.std_err[0];
    if !statistic.is_finite() {
        return Err(Error::Singular("level coefficient has zero standard error".into()));
    }
    let critical_values = mackinnon_critical_values(fit.nobs);
    Ok(AdfResult {
        statistic,
        p_value: mackinnon_p_value(statistic),
        lags_used: lag,
        n_obs: fit.nobs,
        critical_values,
        stationary: statistic < critical_values.five,
    })
}
