use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{gram, prepare, Dataset, KernelSpec, OneStepPredictor, Standardizer};
use crate::error::{Error, Result};

/// Hyperparameters of kernel ridge regression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KrrConfig {
    pub lambda: f64,
    pub kernel: KernelSpec,
    /// Z-score the inputs with statistics of the training set.
    pub standardize: bool,
}

impl KrrConfig {
    pub fn new(lambda: f64, kernel: KernelSpec) -> Self {
        Self { lambda, kernel, standardize: true }
    }

    /// Solves `(K + lambda I) alpha = y` by Cholesky with one step of
    /// iterative refinement.
    pub fn fit(&self, data: &Dataset) -> Result<KrrModel> {
        self.kernel.validate()?;
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid(format!("lambda must be non-negative, got {}", self.lambda)));
        }
        let scaler = if self.standardize { Some(Standardizer::fit(&data.inputs)?) } else { None };
        let inputs = prepare(&data.inputs, data.dim(), scaler.as_ref())?;
        let n = data.len();
        let system = gram(&self.kernel, &inputs, &inputs)? + DMatrix::identity(n, n) * self.lambda;
        let chol = system.clone().cholesky().ok_or_else(|| {
            Error::Singular(format!("K + {} I is not positive definite", self.lambda))
        })?;
        let y = DVector::from_column_slice(&data.targets);
        let mut alpha = chol.solve(&y);
        let residual = &y - &system * &alpha;
        alpha += chol.solve(&residual);
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(Error::Singular("kernel system is numerically singular".into()));
        }
        Ok(KrrModel {
            alpha: alpha.iter().copied().collect(),
            lambda: self.lambda,
            kernel: self.kernel,
            scaler,
            train_inputs: inputs,
        })
    }
}

/// Kernel ridge regression without input standardization.
pub fn krr_fit(data: &Dataset, lambda: f64, kernel: KernelSpec) -> Result<KrrModel> {
    KrrConfig { lambda, kernel, standardize: false }.fit(data)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrrModel {
    pub alpha: Vec<f64>,
    pub lambda: f64,
    pub kernel: KernelSpec,
    pub scaler: Option<Standardizer>,
    /// Training inputs after standardization.
    pub train_inputs: Vec<Vec<f64>>,
}

impl KrrModel {
    pub fn dim(&self) -> usize {
        self.scaler.as_ref().map_or_else(|| self.train_inputs[0].len(), |s| s.mean.len())
    }

    /// `f(x) = sum alpha_i k(x_i, x)`.
    pub fn predict(&self, inputs: &[Vec<f64>]) -> Result<Vec<f64>> {
        let queries = prepare(inputs, self.dim(), self.scaler.as_ref())?;
        let k = gram(&self.kernel, &queries, &self.train_inputs)?;
        Ok((k * DVector::from_column_slice(&self.alpha)).iter().copied().collect())
    }
}

impl OneStepPredictor for KrrModel {
    fn predict_one(&self, input: &[f64]) -> Result<f64> {
        Ok(self.predict(&[input.to_vec()])?[0])
    }
}
