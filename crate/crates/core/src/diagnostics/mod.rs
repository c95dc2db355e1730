//! Stationarity and order-selection diagnostics.

mod adf;

pub use adf::{adf_test, mackinnon_critical_values, mackinnon_p_value, AdfResult, CriticalValues, LagPolicy};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-width of the 95% white-noise band, `1.96 / sqrt(n)`.
pub fn white_noise_band(n: usize) -> f64 {
    1.96 / (n as f64).sqrt()
}

/// Correlation values by lag `0..=L` plus the symmetric confidence band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correlogram {
    pub values: Vec<f64>,
    pub band: f64,
}

impl Correlogram {
    pub fn max_lag(&self) -> usize {
        self.values.len() - 1
    }

    /// Largest lag `k >= 1` whose value leaves the band, 0 if none.
    pub fn last_significant_lag(&self) -> usize {
        (1..self.values.len())
            .rev()
            .find(|&k| self.values[k].abs() > self.band)
            .unwrap_or(0)
    }
}

/// Default number of lags, `min(10 log10(n), n - 1)`.
pub fn default_max_lag(n: usize) -> usize {
    ((10.0 * (n as f64).log10()).floor() as usize).min(n.saturating_sub(1))
}

/// Sample autocovariances with the biased `1/n` normalizer.
pub(crate) fn autocovariances(x: &[f64], max_lag: usize) -> Vec<f64> {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let dev: Vec<f64> = x.iter().map(|v| v - mean).collect();
    (0..=max_lag)
        .map(|k| dev[..n - k].iter().zip(&dev[k..]).map(|(a, b)| a * b).sum::<f64>() / n as f64)
        .collect()
}

pub fn acf(x: &[f64], max_lag: usize) -> Result<Correlogram> {
    if max_lag >= x.len() {
        return Err(Error::invalid(format!(
            "max lag {max_lag} must be below the series length {}",
            x.len()
        )));
    }
    let gamma = autocovariances(x, max_lag);
    if !(gamma[0] > 0.0) {
        return Err(Error::ZeroVariance("autocorrelation of a constant series".into()));
    }
    Ok(Correlogram {
        values: gamma.iter().map(|g| g / gamma[0]).collect(),
        band: white_noise_band(x.len()),
    })
}

/// Partial autocorrelations by the Durbin-Levinson recursion over the ACF.
pub fn pacf(x: &[f64], max_lag: usize) -> Result<Correlogram> {
    if 2 * max_lag >= x.len() {
        return Err(Error::invalid(format!(
            "max lag {max_lag} must be below half the series length {}",
            x.len()
        )));
    }
    let rho = acf(x, max_lag)?;
    let (_, partial) = durbin_levinson(&rho.values, max_lag);
    let mut values = Vec::with_capacity(max_lag + 1);
    values.push(1.0);
    values.extend(partial);
    Ok(Correlogram { values, band: rho.band })
}

/// Runs Durbin-Levinson on autocorrelations `rho[0..=order]`.
///
/// Returns the order-`order` AR coefficients and the partial
/// autocorrelations at lags `1..=order`.
pub fn durbin_levinson(rho: &[f64], order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut phi: Vec<f64> = Vec::with_capacity(order);
    let mut partial = Vec::with_capacity(order);
    let mut err = 1.0;
    for k in 1..=order {
        let num = rho[k] - phi.iter().enumerate().map(|(j, p)| p * rho[k - 1 - j]).sum::<f64>();
        let kk = if err > 0.0 { num / err } else { 0.0 };
        let prev = phi.clone();
        for j in 0..k - 1 {
            phi[j] = prev[j] - kk * prev[k - 2 - j];
        }
        phi.push(kk);
        err *= 1.0 - kk * kk;
        partial.push(kk);
    }
    (phi, partial)
}

/// Yule-Walker AR coefficients estimated from the sample ACF.
pub fn yule_walker(x: &[f64], order: usize) -> Result<Vec<f64>> {
    if order == 0 {
        return Ok(Vec::new());
    }
    let rho = acf(x, order)?;
    Ok(durbin_levinson(&rho.values, order).0)
}

/// Orders suggested by the correlograms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderSuggestion {
    pub p: usize,
    pub q: usize,
}

/// `q` from the last lag where the ACF leaves its band, `p` likewise from
/// the PACF.
pub fn suggest_orders(acf: &Correlogram, pacf: &Correlogram) -> OrderSuggestion {
    OrderSuggestion { p: pacf.last_significant_lag(), q: acf.last_significant_lag() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::{simulate_arma, white_noise};
    use proptest::prelude::*;

    #[test]
    fn acf_lag_zero_is_one() {
        let x = white_noise(50, 1);
        let r = acf(&x, 5).unwrap();
        assert_eq!(r.values[0], 1.0);
        assert!((r.band - 1.96 / 50f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn acf_rejects_constant_and_long_lags() {
        assert!(matches!(acf(&[2.0; 10], 3), Err(Error::ZeroVariance(_))));
        assert!(acf(&[1.0, 2.0], 2).is_err());
        assert!(pacf(&[1.0, 2.0, 3.0, 4.0], 2).is_err());
    }

    #[test]
    fn white_noise_acf_inside_band() {
        let x = white_noise(10_000, 7);
        let r = acf(&x, 10).unwrap();
        for k in 1..=10 {
            assert!(r.values[k].abs() < 0.03, "lag {k}: {}", r.values[k]);
        }
    }

    #[test]
    fn ar1_acf_matches_phi() {
        let x = simulate_arma(&[0.5], &[], 0.0, 10_000, 11);
        let r = acf(&x, 5).unwrap();
        assert!((r.values[1] - 0.5).abs() < 0.03);
    }

    #[test]
    fn pacf_first_lag_equals_acf() {
        let x = simulate_arma(&[0.3], &[0.4], 0.0, 500, 3);
        let a = acf(&x, 10).unwrap();
        let p = pacf(&x, 10).unwrap();
        assert_eq!(p.values[0], 1.0);
        assert!((p.values[1] - a.values[1]).abs() < 1e-15);
    }

    #[test]
    fn ar2_pacf_cuts_off() {
        let x = simulate_arma(&[0.5, -0.3], &[], 0.0, 10_000, 5);
        let p = pacf(&x, 12).unwrap();
        assert!(p.values[2].abs() > p.band);
        for k in 3..=12 {
            assert!(p.values[k].abs() < p.band, "lag {k}: {}", p.values[k]);
        }
    }

    #[test]
    fn ma1_acf_cuts_off_while_pacf_decays() {
        let x = simulate_arma(&[], &[0.8], 0.0, 10_000, 9);
        let a = acf(&x, 10).unwrap();
        let p = pacf(&x, 10).unwrap();
        assert!(a.values[1].abs() > a.band);
        for k in 2..=10 {
            assert!(a.values[k].abs() < 2.0 * a.band, "acf lag {k}: {}", a.values[k]);
        }
        // theoretical MA(1) pacf alternates in sign and shrinks in modulus
        for k in 1..4 {
            assert!(p.values[k].abs() > p.band, "pacf lag {k}");
            assert!(p.values[k + 1].abs() < p.values[k].abs());
        }
    }

    #[test]
    fn suggests_orders_from_bands() {
        let acf = Correlogram { values: vec![1.0, 0.5, 0.3, 0.05, 0.25, 0.01], band: 0.2 };
        let pacf = Correlogram { values: vec![1.0, 0.5, 0.1, 0.05, 0.0, 0.01], band: 0.2 };
        assert_eq!(suggest_orders(&acf, &pacf), OrderSuggestion { p: 1, q: 4 });
        let flat = Correlogram { values: vec![1.0, 0.1], band: 0.2 };
        assert_eq!(suggest_orders(&flat, &flat), OrderSuggestion { p: 0, q: 0 });
    }

    proptest! {
        #[test]
        fn suggestion_invariant_under_positive_scaling(seed in 0u64..500, scale in 0.01f64..100.0) {
            let x = simulate_arma(&[0.6], &[0.3], 2.0, 300, seed);
            let y: Vec<f64> = x.iter().map(|v| v * scale).collect();
            let a = suggest_orders(&acf(&x, 20).unwrap(), &pacf(&x, 20).unwrap());
            let b = suggest_orders(&acf(&y, 20).unwrap(), &pacf(&y, 20).unwrap());
            prop_assert_eq!(a, b);
        }
    }
}
