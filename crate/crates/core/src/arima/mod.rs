//! Seasonal ARIMA `(p, d, q)(P, D, Q)_m` estimated by conditional sum of
//! squares.
//!
//! The model for the differenced series `x` is written around its mean `mu`:
//!
//! ```text
//! (1 - sum phi_i B^i)(1 - sum Phi_j B^{jm}) (x_t - mu)
//!     = (1 + sum theta_i B^i)(1 + sum Theta_j B^{jm}) e_t
//! ```
//!
//! Residuals are obtained recursively with presample deviations and errors
//! set to zero; the intercept `mu` is concentrated out of the sum of squares
//! exactly (the residuals are affine in `mu`), the remaining coefficients
//! are found with Nelder-Mead.

mod auto;

pub use auto::{auto_arima, AutoArimaGrid};

use serde::{Deserialize, Serialize};

use crate::diagnostics::yule_walker;
use crate::error::{Error, Result};
use crate::linalg::is_stable_ar;
use crate::optim::NelderMead;
use crate::series::{difference_lags, undifference_forecast, TimeSeries, TransformState};

/// Multiplier applied to the sum of squares of non-stationary or
/// non-invertible parameter vectors.
pub const UNIT_ROOT_PENALTY: f64 = 1e6;

/// Orders of a seasonal ARIMA model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArimaSpec {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    #[serde(rename = "P")]
    pub seasonal_p: usize,
    #[serde(rename = "D")]
    pub seasonal_d: usize,
    #[serde(rename = "Q")]
    pub seasonal_q: usize,
    pub m: usize,
    pub with_intercept: bool,
}

impl ArimaSpec {
    /// Non-seasonal `(p, d, q)` with an intercept.
    pub fn new(p: usize, d: usize, q: usize) -> Self {
        Self { p, d, q, seasonal_p: 0, seasonal_d: 0, seasonal_q: 0, m: 1, with_intercept: true }
    }

    pub fn seasonal(mut self, p: usize, d: usize, q: usize, m: usize) -> Self {
        self.seasonal_p = p;
        self.seasonal_d = d;
        self.seasonal_q = q;
        self.m = m;
        self
    }

    pub fn intercept(mut self, with_intercept: bool) -> Self {
        self.with_intercept = with_intercept;
        self
    }

    pub fn is_seasonal(&self) -> bool {
        self.seasonal_p + self.seasonal_d + self.seasonal_q > 0
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::invalid("seasonal period must be at least 1"));
        }
        if self.is_seasonal() && self.m < 2 {
            return Err(Error::invalid("seasonal orders require a period m >= 2"));
        }
        Ok(())
    }

    pub fn ar_degree(&self) -> usize {
        self.p + self.seasonal_p * self.m
    }

    pub fn ma_degree(&self) -> usize {
        self.q + self.seasonal_q * self.m
    }

    /// Lags of the differencing passes: `d` lag-1 passes then `D` lag-`m`.
    pub fn diff_lags(&self) -> Vec<usize> {
        let mut lags = vec![1; self.d];
        lags.extend(std::iter::repeat(self.m).take(self.seasonal_d));
        lags
    }

    /// Number of AR and MA coefficients (intercept excluded).
    pub fn n_coefficients(&self) -> usize {
        self.p + self.q + self.seasonal_p + self.seasonal_q
    }

    /// Estimated parameters counted by AIC: coefficients, intercept, variance.
    pub fn n_estimated(&self) -> usize {
        self.n_coefficients() + usize::from(self.with_intercept) + 1
    }
}

impl std::fmt::Display for ArimaSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ARIMA({},{},{})", self.p, self.d, self.q)?;
        if self.is_seasonal() {
            write!(f, "({},{},{})[{}]", self.seasonal_p, self.seasonal_d, self.seasonal_q, self.m)?;
        }
        Ok(())
    }
}

/// Coefficients of one model, in the packing order intercept, phi, theta,
/// Phi, Theta.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Coefficients {
    pub intercept: f64,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub seasonal_phi: Vec<f64>,
    pub seasonal_theta: Vec<f64>,
}

impl Coefficients {
    pub fn zeros(spec: &ArimaSpec) -> Self {
        Self {
            intercept: 0.0,
            phi: vec![0.0; spec.p],
            theta: vec![0.0; spec.q],
            seasonal_phi: vec![0.0; spec.seasonal_p],
            seasonal_theta: vec![0.0; spec.seasonal_q],
        }
    }

    /// Unpacks `[intercept?] ++ phi ++ theta ++ Phi ++ Theta`.
    pub fn unpack(spec: &ArimaSpec, params: &[f64]) -> Result<Self> {
        let expected = spec.n_coefficients() + usize::from(spec.with_intercept);
        if params.len() != expected {
            return Err(Error::Shape(format!(
                "{spec} takes {expected} parameters, got {}",
                params.len()
            )));
        }
        let (intercept, rest) = if spec.with_intercept { (params[0], &params[1..]) } else { (0.0, params) };
        Ok(Self::from_coefficients(spec, intercept, rest))
    }

    fn from_coefficients(spec: &ArimaSpec, intercept: f64, rest: &[f64]) -> Self {
        let (phi, rest) = rest.split_at(spec.p);
        let (theta, rest) = rest.split_at(spec.q);
        let (sphi, stheta) = rest.split_at(spec.seasonal_p);
        Self {
            intercept,
            phi: phi.to_vec(),
            theta: theta.to_vec(),
            seasonal_phi: sphi.to_vec(),
            seasonal_theta: stheta.to_vec(),
        }
    }

    fn pack_without_intercept(&self) -> Vec<f64> {
        let mut v = self.phi.clone();
        v.extend(&self.theta);
        v.extend(&self.seasonal_phi);
        v.extend(&self.seasonal_theta);
        v
    }

    fn check(&self, spec: &ArimaSpec) -> Result<()> {
        if self.phi.len() != spec.p
            || self.theta.len() != spec.q
            || self.seasonal_phi.len() != spec.seasonal_p
            || self.seasonal_theta.len() != spec.seasonal_q
        {
            return Err(Error::Shape(format!("coefficient lengths do not match {spec}")));
        }
        Ok(())
    }
}

/// Expands `(1 - sum phi B^i)(1 - sum Phi B^{jm})` and
/// `(1 + sum theta B^i)(1 + sum Theta B^{jm})`.
///
/// Returns `(ar, ma)` with `ar[k - 1]` the coefficient `a_k` of
/// `1 - sum a_k B^k` and `ma[k - 1]` the coefficient `b_k` of
/// `1 + sum b_k B^k`, dense up to degree `p + P m` and `q + Q m`.
pub fn expand_polynomials(
    spec: &ArimaSpec,
    phi: &[f64],
    theta: &[f64],
    seasonal_phi: &[f64],
    seasonal_theta: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    spec.validate()?;
    let coefs = Coefficients {
        intercept: 0.0,
        phi: phi.to_vec(),
        theta: theta.to_vec(),
        seasonal_phi: seasonal_phi.to_vec(),
        seasonal_theta: seasonal_theta.to_vec(),
    };
    coefs.check(spec)?;
    Ok(expand(spec, &coefs))
}

fn expand(spec: &ArimaSpec, c: &Coefficients) -> (Vec<f64>, Vec<f64>) {
    let m = spec.m;
    // Polynomials in B with explicit leading 1.
    let lag_poly = |coefs: &[f64], stride: usize, sign: f64| {
        let mut p = vec![0.0; coefs.len() * stride + 1];
        p[0] = 1.0;
        for (i, c) in coefs.iter().enumerate() {
            p[(i + 1) * stride] = sign * c;
        }
        p
    };
    let ar = polymul(&lag_poly(&c.phi, 1, -1.0), &lag_poly(&c.seasonal_phi, m, -1.0));
    let ma = polymul(&lag_poly(&c.theta, 1, 1.0), &lag_poly(&c.seasonal_theta, m, 1.0));
    (ar[1..].iter().map(|v| -v).collect(), ma[1..].to_vec())
}

fn polymul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `e_t = w_t - sum a_i w_{t-i} - sum b_j e_{t-j}`, zero presample.
fn filter(ar: &[f64], ma: &[f64], w: &[f64]) -> Vec<f64> {
    let mut e = Vec::with_capacity(w.len());
    for t in 0..w.len() {
        let mut v = w[t];
        for (i, a) in ar.iter().enumerate().take(t) {
            v -= a * w[t - 1 - i];
        }
        for (j, b) in ma.iter().enumerate().take(t) {
            v -= b * e[t - 1 - j];
        }
        e.push(v);
    }
    e
}

/// Conditional-sum-of-squares innovations of an already differenced series.
///
/// `params` packs `[intercept?] ++ phi ++ theta ++ Phi ++ Theta`.
pub fn css_residuals(params: &[f64], series: &[f64], spec: &ArimaSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let c = Coefficients::unpack(spec, params)?;
    let (ar, ma) = expand(spec, &c);
    let w: Vec<f64> = series.iter().map(|x| x - c.intercept).collect();
    Ok(filter(&ar, &ma, &w))
}

/// Sum of squares with the intercept profiled out; returns `(sse, mu)`.
fn profiled_sse(spec: &ArimaSpec, ar: &[f64], ma: &[f64], x: &[f64]) -> (f64, f64) {
    let ex = filter(ar, ma, x);
    if !spec.with_intercept {
        return (ex.iter().map(|v| v * v).sum(), 0.0);
    }
    let ones = vec![1.0; x.len()];
    let e1 = filter(ar, ma, &ones);
    let den: f64 = e1.iter().map(|v| v * v).sum();
    let mu = if den > 0.0 { ex.iter().zip(&e1).map(|(a, b)| a * b).sum::<f64>() / den } else { 0.0 };
    let sse = ex.iter().zip(&e1).map(|(a, b)| (a - mu * b).powi(2)).sum();
    (sse, mu)
}

fn admissible(ar: &[f64], ma: &[f64]) -> bool {
    let neg_ma: Vec<f64> = ma.iter().map(|b| -b).collect();
    is_stable_ar(ar) && is_stable_ar(&neg_ma)
}

/// A fitted model together with everything needed to forecast.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedArima {
    pub spec: ArimaSpec,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    #[serde(rename = "Phi")]
    pub seasonal_phi: Vec<f64>,
    #[serde(rename = "Theta")]
    pub seasonal_theta: Vec<f64>,
    pub intercept: f64,
    pub sigma2: f64,
    pub loglik: f64,
    pub aic: f64,
    pub diff_state: TransformState,
    /// Training series in original units.
    pub series: TimeSeries,
    /// Training series after differencing.
    pub differenced: Vec<f64>,
    /// In-sample innovations, aligned with `differenced`.
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastResult {
    pub horizon: usize,
    /// Forecasts in the units of the input series.
    pub values: Vec<f64>,
    /// Forecasts of the differenced series.
    pub transformed_values: Vec<f64>,
}

impl FittedArima {
    /// Builds a model from known coefficients without any estimation.
    pub fn with_coefficients(spec: ArimaSpec, coefs: Coefficients, series: &TimeSeries) -> Result<Self> {
        spec.validate()?;
        coefs.check(&spec)?;
        let (diffed, diff_state) = difference_lags(series, &spec.diff_lags())?;
        let differenced = diffed.into_values();
        let mut params = Vec::new();
        if spec.with_intercept {
            params.push(coefs.intercept);
        }
        params.extend(coefs.pack_without_intercept());
        let residuals = css_residuals(&params, &differenced, &spec)?;
        let n = residuals.len() as f64;
        let sse: f64 = residuals.iter().map(|e| e * e).sum();
        let sigma2 = sse / n;
        let loglik = -0.5 * n * ((2.0 * std::f64::consts::PI * sigma2).ln() + 1.0);
        let aic = -2.0 * loglik + 2.0 * spec.n_estimated() as f64;
        Ok(Self {
            spec,
            phi: coefs.phi,
            theta: coefs.theta,
            seasonal_phi: coefs.seasonal_phi,
            seasonal_theta: coefs.seasonal_theta,
            intercept: if spec.with_intercept { coefs.intercept } else { 0.0 },
            sigma2,
            loglik,
            aic,
            diff_state,
            series: series.clone(),
            differenced,
            residuals,
        })
    }

    pub fn coefficients(&self) -> Coefficients {
        Coefficients {
            intercept: self.intercept,
            phi: self.phi.clone(),
            theta: self.theta.clone(),
            seasonal_phi: self.seasonal_phi.clone(),
            seasonal_theta: self.seasonal_theta.clone(),
        }
    }

    /// Expanded `(ar, ma)` lag polynomials.
    pub fn polynomials(&self) -> (Vec<f64>, Vec<f64>) {
        expand(&self.spec, &self.coefficients())
    }

    /// One-step in-sample predictions in original units; `None` for the
    /// leading points consumed by differencing.
    pub fn fitted_values(&self) -> Vec<Option<f64>> {
        let skip = self.series.len() - self.differenced.len();
        let x = self.series.values();
        (0..x.len())
            .map(|t| (t >= skip).then(|| x[t] - self.residuals[t - skip]))
            .collect()
    }

    /// Recursive forecasts: unknown future values are replaced by their
    /// forecasts, unknown future innovations by zero.
    pub fn forecast(&self, horizon: usize) -> Result<ForecastResult> {
        if horizon == 0 {
            return Err(Error::invalid("forecast horizon must be at least 1"));
        }
        let (ar, ma) = self.polynomials();
        let n = self.differenced.len();
        let mut w: Vec<f64> = self.differenced.iter().map(|x| x - self.intercept).collect();
        for h in 0..horizon {
            let t = n + h;
            let mut v = 0.0;
            for (i, a) in ar.iter().enumerate() {
                if t > i {
                    v += a * w[t - 1 - i];
                }
            }
            for (j, b) in ma.iter().enumerate() {
                if t > j && t - 1 - j < n {
                    v += b * self.residuals[t - 1 - j];
                }
            }
            w.push(v);
        }
        let transformed_values: Vec<f64> = w[n..].iter().map(|v| v + self.intercept).collect();
        let values = undifference_forecast(&transformed_values, &self.diff_state)?;
        Ok(ForecastResult { horizon, values, transformed_values })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Fits `spec` to `series` by conditional sum of squares.
///
/// Two Nelder-Mead starts are tried (all coefficients zero, and Yule-Walker
/// AR coefficients with zero MA terms); each start is restarted from its own
/// optimum until it stops improving. Parameter vectors with AR or MA roots
/// on or inside the unit circle have their sum of squares multiplied by
/// [`UNIT_ROOT_PENALTY`].
pub fn fit(spec: ArimaSpec, series: &TimeSeries) -> Result<FittedArima> {
    spec.validate()?;
    let min_len = spec.ar_degree() + spec.ma_degree() + spec.diff_lags().iter().sum::<usize>();
    if series.len() <= min_len {
        return Err(Error::too_short(format!(
            "{spec} needs more than {min_len} points, got {}",
            series.len()
        )));
    }
    let (diffed, _) = difference_lags(series, &spec.diff_lags())?;
    let x = diffed.values();
    if x.len() <= spec.n_estimated() {
        return Err(Error::too_short(format!(
            "{} differenced points cannot support {} parameters",
            x.len(),
            spec.n_estimated()
        )));
    }

    let objective = |params: &[f64]| -> f64 {
        let c = Coefficients::from_coefficients(&spec, 0.0, params);
        let (ar, ma) = expand(&spec, &c);
        let (sse, _) = profiled_sse(&spec, &ar, &ma, x);
        if admissible(&ar, &ma) {
            sse
        } else {
            sse * UNIT_ROOT_PENALTY
        }
    };

    let dim = spec.n_coefficients();
    let mut starts = vec![vec![0.0; dim]];
    if spec.p + spec.seasonal_p > 0 {
        let mut warm = Coefficients::zeros(&spec);
        warm.phi = yule_walker(x, spec.p).unwrap_or_else(|_| vec![0.0; spec.p]);
        warm.seasonal_phi = seasonal_yule_walker(x, spec.seasonal_p, spec.m);
        let warm = warm.pack_without_intercept();
        if warm.iter().all(|v| v.is_finite()) && warm != starts[0] {
            starts.push(warm);
        }
    }

    let nm = NelderMead::new(dim);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in starts {
        let mut point = start;
        let mut value = objective(&point);
        for _ in 0..8 {
            let m = nm.minimize(objective, &point);
            let improved = value - m.value > 1e-12 * value.abs().max(1e-300);
            if m.value <= value {
                point = m.x;
                value = m.value;
            }
            if !improved {
                break;
            }
        }
        if best.as_ref().map_or(true, |(_, v)| value < *v) {
            best = Some((point, value));
        }
    }

    let (params, value) = best.expect("at least one start");
    if !value.is_finite() {
        return Err(Error::Optimization(format!("{spec}: sum of squares is not finite")));
    }
    let mut coefs = Coefficients::from_coefficients(&spec, 0.0, &params);
    let (ar, ma) = expand(&spec, &coefs);
    if !admissible(&ar, &ma) {
        return Err(Error::Optimization(format!(
            "{spec}: no stationary and invertible parameters improved on the starts"
        )));
    }
    coefs.intercept = profiled_sse(&spec, &ar, &ma, x).1;
    let fitted = FittedArima::with_coefficients(spec, coefs, series)?;
    if !(fitted.sigma2 > 0.0) {
        return Err(Error::Optimization(format!("{spec}: zero residual variance")));
    }
    Ok(fitted)
}

/// Yule-Walker on the autocorrelations at multiples of the period.
fn seasonal_yule_walker(x: &[f64], order: usize, m: usize) -> Vec<f64> {
    if order == 0 {
        return Vec::new();
    }
    let max_lag = order * m;
    if max_lag >= x.len() {
        return vec![0.0; order];
    }
    match crate::diagnostics::acf(x, max_lag) {
        Ok(r) => {
            let rho: Vec<f64> = (0..=order).map(|j| r.values[j * m]).collect();
            crate::diagnostics::durbin_levinson(&rho, order).0
        }
        Err(_) => vec![0.0; order],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::{simulate_arma, white_noise};

    fn ts(v: Vec<f64>) -> TimeSeries {
        TimeSeries::from_values(v).unwrap()
    }

    #[test]
    fn seasonal_ar_product() {
        let spec = ArimaSpec::new(1, 0, 0).seasonal(1, 0, 0, 12);
        let (ar, ma) = expand_polynomials(&spec, &[0.5], &[], &[0.3], &[]).unwrap();
        assert_eq!(ar.len(), 13);
        assert!(ma.is_empty());
        for (k, v) in ar.iter().enumerate() {
            let expected = match k + 1 {
                1 => 0.5,
                12 => 0.3,
                13 => -0.15,
                _ => 0.0,
            };
            assert!((v - expected).abs() < 1e-15, "lag {}: {v}", k + 1);
        }
    }

    #[test]
    fn non_seasonal_expansion_is_identity() {
        let spec = ArimaSpec::new(2, 0, 2);
        let (ar, ma) = expand_polynomials(&spec, &[0.4, -0.2], &[0.3, 0.1], &[], &[]).unwrap();
        assert_eq!(ar, vec![0.4, -0.2]);
        assert_eq!(ma, vec![0.3, 0.1]);
    }

    #[test]
    fn seasonal_ma_single_term() {
        let spec = ArimaSpec::new(0, 0, 0).seasonal(0, 0, 1, 4);
        let (ar, ma) = expand_polynomials(&spec, &[], &[], &[], &[0.2]).unwrap();
        assert!(ar.is_empty());
        assert_eq!(ma, vec![0.0, 0.0, 0.0, 0.2]);
    }

    #[test]
    fn expansion_length_mismatch() {
        let spec = ArimaSpec::new(1, 0, 0);
        assert!(expand_polynomials(&spec, &[0.1, 0.2], &[], &[], &[]).is_err());
        let bad = ArimaSpec::new(0, 0, 0).seasonal(1, 0, 0, 1);
        assert!(expand_polynomials(&bad, &[], &[], &[0.1], &[]).is_err());
    }

    #[test]
    fn mean_only_residuals() {
        let spec = ArimaSpec::new(0, 0, 0);
        let e = css_residuals(&[2.0], &[1.0, 2.0, 5.0], &spec).unwrap();
        assert_eq!(e, vec![-1.0, 0.0, 3.0]);
    }

    #[test]
    fn exact_ar1_has_zero_residuals() {
        let x: Vec<f64> = (0..20).map(|t| 0.7f64.powi(t)).collect();
        let spec = ArimaSpec::new(1, 0, 0).intercept(false);
        let e = css_residuals(&[0.7], &x, &spec).unwrap();
        assert_eq!(e[0], 1.0);
        assert!(e[1..].iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn ma1_hand_recursion() {
        let spec = ArimaSpec::new(0, 0, 1).intercept(false);
        let e = css_residuals(&[0.5], &[1.0, 0.0, 0.0], &spec).unwrap();
        assert_eq!(e, vec![1.0, -0.5, 0.25]);
    }

    #[test]
    fn mean_model_matches_closed_form() {
        let x = simulate_arma(&[], &[], 3.0, 200, 2);
        let fitted = fit(ArimaSpec::new(0, 0, 0), &ts(x.clone())).unwrap();
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / x.len() as f64;
        assert!((fitted.intercept - mean).abs() < 1e-8);
        assert!((fitted.sigma2 - var).abs() < 1e-8);
        let loglik = -100.0 * ((2.0 * std::f64::consts::PI * var).ln() + 1.0);
        assert!((fitted.aic - (-2.0 * loglik + 4.0)).abs() < 1e-6);
    }

    #[test]
    fn ar1_matches_ols() {
        let x = simulate_arma(&[0.5], &[], 0.0, 1000, 17);
        let fitted = fit(ArimaSpec::new(1, 0, 0), &ts(x.clone())).unwrap();
        // OLS of x_t on (1, x_{t-1})
        let d = crate::linalg::design(x.len() - 1, 2, |i, j| if j == 0 { 1.0 } else { x[i] });
        let ols = crate::linalg::ols(&x[1..], &d).unwrap();
        assert!((fitted.phi[0] - ols.coef[1]).abs() < 0.02, "{} vs {}", fitted.phi[0], ols.coef[1]);
    }

    #[test]
    fn arma11_recovery() {
        let x = simulate_arma(&[0.6], &[0.3], 0.0, 2000, 4);
        let fitted = fit(ArimaSpec::new(1, 0, 1), &ts(x)).unwrap();
        assert!((fitted.phi[0] - 0.6).abs() < 0.1);
        assert!((fitted.theta[0] - 0.3).abs() < 0.1);
        let (ar, ma) = fitted.polynomials();
        assert!(admissible(&ar, &ma));
    }

    #[test]
    fn random_walk_forecast_is_flat() {
        let x = crate::synthetic::random_walk(50, 3);
        let fitted = fit(ArimaSpec::new(0, 1, 0).intercept(false), &ts(x.clone())).unwrap();
        let f = fitted.forecast(5).unwrap();
        assert!(f.values.iter().all(|v| *v == x[49]));
    }

    #[test]
    fn second_difference_forecast_is_linear() {
        let x: Vec<f64> = (0..40).map(|t| (t as f64).sqrt() * 3.0 + white_noise(1, t)[0]).collect();
        let fitted = fit(ArimaSpec::new(0, 2, 0).intercept(false), &ts(x)).unwrap();
        let f = fitted.forecast(6).unwrap().values;
        let step = f[1] - f[0];
        for w in f.windows(2) {
            assert!((w[1] - w[0] - step).abs() < 1e-9);
        }
    }

    #[test]
    fn ar1_recursion_forecast() {
        let spec = ArimaSpec::new(1, 0, 0).intercept(false);
        let coefs = Coefficients { phi: vec![0.5], ..Coefficients::zeros(&spec) };
        let m = FittedArima::with_coefficients(spec, coefs, &ts(vec![1.0, 3.0, 4.0])).unwrap();
        assert_eq!(m.forecast(3).unwrap().values, vec![2.0, 1.0, 0.5]);
    }

    #[test]
    fn ma1_forecast_reverts_to_mean_after_one_step() {
        let x = simulate_arma(&[], &[0.5], 5.0, 300, 21);
        let fitted = fit(ArimaSpec::new(0, 0, 1), &ts(x)).unwrap();
        let f = fitted.forecast(5).unwrap();
        assert_ne!(f.values[0], fitted.intercept);
        for v in &f.values[1..] {
            assert!((v - fitted.intercept).abs() < 1e-12);
        }
        assert!(fitted.forecast(0).is_err());
    }

    #[test]
    fn fit_is_deterministic() {
        let x = simulate_arma(&[0.4], &[0.2], 1.0, 300, 5);
        let a = fit(ArimaSpec::new(1, 0, 1), &ts(x.clone())).unwrap();
        let b = fit(ArimaSpec::new(1, 0, 1), &ts(x)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn residual_mean_near_zero_with_intercept() {
        let x = simulate_arma(&[0.5], &[0.3], 7.0, 800, 13);
        let fitted = fit(ArimaSpec::new(1, 0, 1), &ts(x)).unwrap();
        let n = fitted.residuals.len() as f64;
        let mean = fitted.residuals.iter().sum::<f64>() / n;
        assert!(mean.abs() < 3.0 * fitted.sigma2.sqrt() / n.sqrt());
    }

    #[test]
    fn too_short_series() {
        let err = fit(ArimaSpec::new(2, 1, 2), &ts(vec![1.0, 2.0, 3.0, 4.0, 5.0])).unwrap_err();
        assert!(matches!(err, Error::TooShort(_)));
    }

    #[test]
    fn seasonal_fit_runs_and_forecasts() {
        let m = 4;
        let x: Vec<f64> = (0..120)
            .map(|t| 10.0 + 3.0 * ((t % m) as f64) + 0.5 * white_noise(1, 1000 + t as u64)[0])
            .collect();
        let spec = ArimaSpec::new(0, 0, 0).seasonal(1, 1, 0, m);
        let fitted = fit(spec, &ts(x)).unwrap();
        let f = fitted.forecast(8).unwrap();
        assert_eq!(f.values.len(), 8);
        for (h, v) in f.values.iter().enumerate() {
            let expected = 10.0 + 3.0 * (((120 + h) % m) as f64);
            assert!((v - expected).abs() < 2.0, "h={h}: {v} vs {expected}");
        }
    }

    #[test]
    fn json_round_trip() {
        let x = simulate_arma(&[0.4], &[], 0.0, 100, 5);
        let fitted = fit(ArimaSpec::new(1, 1, 0).intercept(false), &ts(x)).unwrap();
        let back = FittedArima::from_json(&fitted.to_json().unwrap()).unwrap();
        assert_eq!(back.forecast(4).unwrap(), fitted.forecast(4).unwrap());
    }
}
