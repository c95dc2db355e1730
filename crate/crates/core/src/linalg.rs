//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Ordinary least squares fit.
#[derive(Debug, Clone)]
pub struct OlsFit {
    pub coef: Vec<f64>,
    pub std_err: Vec<f64>,
    pub ssr: f64,
    pub nobs: usize,
    /// Gaussian log-likelihood at the MLE of the error variance.
    pub loglik: f64,
    /// `-2 loglik + 2 k`, `k` = number of regressors.
    pub aic: f64,
}

/// Least squares via Householder QR; `design` is `nobs x k`.
pub fn ols(y: &[f64], design: &DMatrix<f64>) -> Result<OlsFit> {
    let (nobs, k) = design.shape();
    if nobs != y.len() {
        return Err(Error::Shape(format!("design has {nobs} rows, response {}", y.len())));
    }
    if nobs <= k {
        return Err(Error::too_short(format!("{nobs} observations for {k} regressors")));
    }
    let qr = design.clone().qr();
    let r = qr.r();
    let scale = (0..k).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if (0..k).any(|i| r[(i, i)].abs() <= 1e-12 * scale.max(1e-300)) {
        return Err(Error::Singular("regression matrix is rank deficient".into()));
    }
    let qty = qr.q().transpose() * DVector::from_column_slice(y);
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Singular("triangular solve failed".into()))?;
    let fitted = design * &beta;
    let ssr: f64 = y.iter().zip(fitted.iter()).map(|(a, b)| (a - b).powi(2)).sum();
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| Error::Singular("cannot invert R".into()))?;
    let cov_unscaled = &r_inv * r_inv.transpose();
    let s2 = ssr / (nobs - k) as f64;
    let std_err = (0..k).map(|i| (s2 * cov_unscaled[(i, i)]).sqrt()).collect();
    let n = nobs as f64;
    let loglik = -0.5 * n * ((2.0 * std::f64::consts::PI).ln() + (ssr / n).ln() + 1.0);
    Ok(OlsFit {
        coef: beta.iter().copied().collect(),
        std_err,
        ssr,
        nobs,
        loglik,
        aic: -2.0 * loglik + 2.0 * k as f64,
    })
}

/// Builds a row-major design matrix from a closure over (row, col).
pub fn design(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, f)
}

/// Whether `1 - a_1 z - ... - a_p z^p` has every root strictly outside the
/// unit circle, via the Schur-Cohn step-down recursion: the polynomial is
/// stable iff every reflection coefficient has modulus below one.
pub fn is_stable_ar(coeffs: &[f64]) -> bool {
    let mut a: Vec<f64> = coeffs.to_vec();
    while a.last() == Some(&0.0) {
        a.pop();
    }
    while let Some(&k) = a.last() {
        if !k.is_finite() || k.abs() >= 1.0 {
            return false;
        }
        let p = a.len();
        let denom = 1.0 - k * k;
        let next: Vec<f64> = (0..p - 1).map(|j| (a[j] + k * a[p - 2 - j]) / denom).collect();
        a = next;
    }
    true
}
