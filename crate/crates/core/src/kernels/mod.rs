//! Kernel ridge regression and epsilon-support-vector regression over
//! lag-window embeddings.

mod embed;
mod krr;
mod svr;

pub use embed::{embed, forecast_one_step, forecast_recursive, Dataset, EmbeddingSpec, OneStepPredictor};
pub use krr::{krr_fit, KrrConfig, KrrModel};
pub use svr::{svr_fit, SvrConfig, SvrModel};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    /// `exp(-gamma |x - y|^2)`
    Rbf { gamma: f64 },
    /// `(x . y + coef0)^degree`
    Polynomial { degree: u32, coef0: f64 },
    /// `x . y`
    Linear,
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Rbf { gamma } if !(gamma > 0.0 && gamma.is_finite()) => {
                Err(Error::invalid(format!("rbf gamma must be positive, got {gamma}")))
            }
            KernelSpec::Polynomial { degree: 0, .. } => Err(Error::invalid("polynomial degree must be at least 1")),
            KernelSpec::Polynomial { coef0, .. } if !coef0.is_finite() => {
                Err(Error::invalid("polynomial coef0 must be finite"))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            KernelSpec::Rbf { gamma } => {
                let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum();
                (-gamma * d2).exp()
            }
            KernelSpec::Polynomial { degree, coef0 } => (dot(x, y) + coef0).powi(degree as i32),
            KernelSpec::Linear => dot(x, y),
        }
    }
}

impl std::fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KernelSpec::Rbf { gamma } => write!(f, "rbf(gamma={gamma})"),
            KernelSpec::Polynomial { degree, coef0 } => write!(f, "poly(degree={degree}, coef0={coef0})"),
            KernelSpec::Linear => write!(f, "linear"),
        }
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn common_dim(xs: &[Vec<f64>]) -> Result<Option<usize>> {
    let Some(first) = xs.first() else { return Ok(None) };
    let dim = first.len();
    if xs.iter().any(|x| x.len() != dim) {
        return Err(Error::Shape("input vectors have different lengths".into()));
    }
    Ok(Some(dim))
}

/// `K[i][j] = k(x_i, y_j)`.
pub fn gram(kernel: &KernelSpec, xs: &[Vec<f64>], ys: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    if let (Some(a), Some(b)) = (common_dim(xs)?, common_dim(ys)?) {
        if a != b {
            return Err(Error::Shape(format!("dimension {a} does not match {b}")));
        }
    }
    Ok(DMatrix::from_fn(xs.len(), ys.len(), |i, j| kernel.eval(&xs[i], &ys[j])))
}

/// Per-dimension z-score fitted on training inputs. Constant dimensions
/// keep a unit scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(xs: &[Vec<f64>]) -> Result<Self> {
        let dim = common_dim(xs)?.ok_or_else(|| Error::invalid("no inputs to standardize"))?;
        let n = xs.len() as f64;
        let mean: Vec<f64> = (0..dim).map(|j| xs.iter().map(|x| x[j]).sum::<f64>() / n).collect();
        let scale = (0..dim)
            .map(|j| {
                let sd = (xs.iter().map(|x| (x[j] - mean[j]).powi(2)).sum::<f64>() / n).sqrt();
                if sd > 0.0 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Self { mean, scale })
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(self.mean.iter().zip(&self.scale)).map(|(v, (m, s))| (v - m) / s).collect()
    }
}

/// Checks every query has the training dimension, then standardizes.
fn prepare(queries: &[Vec<f64>], dim: usize, scaler: Option<&Standardizer>) -> Result<Vec<Vec<f64>>> {
    if let Some(bad) = queries.iter().find(|q| q.len() != dim) {
        return Err(Error::Shape(format!("input of length {} for a model of dimension {dim}", bad.len())));
    }
    Ok(match scaler {
        Some(s) => queries.iter().map(|q| s.apply(q)).collect(),
        None => queries.to_vec(),
    })
}
