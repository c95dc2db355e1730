//! Epsilon-SVR solved by sequential minimal optimization.
//!
//! The dual is written over `z = (alpha, alpha*)` with signs `s = (+1, -1)`:
//!
//! ```text
//! min  1/2 z'Qz + p'z   s.t.  s'z = 0,  0 <= z <= C
//! Q_tu = s_t s_u K(i_t, i_u),   p = (eps - y, eps + y)
//! ```
//!
//! Each iteration moves the maximal violating pair along the feasible
//! direction by the exact minimizer of the two-variable subproblem, clipped
//! to the box.

use serde::{Deserialize, Serialize};

use super::{gram, prepare, Dataset, KernelSpec, OneStepPredictor, Standardizer};
use crate::error::{Error, Result};

/// Curvature floor for pairs whose kernel distance vanishes.
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvrConfig {
    pub c: f64,
    pub epsilon: f64,
    pub kernel: KernelSpec,
    /// Stop once the maximal KKT violation `m - M` is below this value.
    pub tol: f64,
    pub max_iter: usize,
    pub standardize: bool,
}

impl SvrConfig {
    pub fn new(c: f64, epsilon: f64, kernel: KernelSpec) -> Self {
        Self { c, epsilon, kernel, tol: 1e-3, max_iter: 1_000_000, standardize: true }
    }

    /// Fits the model. Running out of iterations is not an error: the
    /// partial model is returned with `converged == false`.
    pub fn fit(&self, data: &Dataset) -> Result<SvrModel> {
        self.kernel.validate()?;
        if !(self.c > 0.0) {
            return Err(Error::invalid(format!("C must be positive, got {}", self.c)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::invalid(format!("epsilon must be non-negative, got {}", self.epsilon)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tolerance must be positive"));
        }
        let scaler = if self.standardize { Some(Standardizer::fit(&data.inputs)?) } else { None };
        let inputs = prepare(&data.inputs, data.dim(), scaler.as_ref())?;
        let k = gram(&self.kernel, &inputs, &inputs)?;
        let n = data.len();
        let c = self.c;
        let y = &data.targets;

        let sign = |t: usize| if t < n { 1.0 } else { -1.0 };
        let mut z = vec![0.0; 2 * n];
        let mut g: Vec<f64> = (0..2 * n)
            .map(|t| if t < n { self.epsilon - y[t] } else { self.epsilon + y[t - n] })
            .collect();
        let objective = |z: &[f64], g: &[f64]| -> f64 {
            // dual value = -(1/2 z'Qz + p'z) = -1/2 z'(G + p)
            let p = |t: usize| if t < n { self.epsilon - y[t] } else { self.epsilon + y[t - n] };
            -0.5 * z.iter().enumerate().map(|(t, zt)| zt * (g[t] + p(t))).sum::<f64>()
        };
        let mut history = vec![objective(&z, &g)];

        let in_up = |t: usize, zt: f64| if t < n { zt < c } else { zt > 0.0 };
        let in_low = |t: usize, zt: f64| if t < n { zt > 0.0 } else { zt < c };

        let mut iterations = 0;
        let mut converged = false;
        let (mut m_up, mut m_low);
        loop {
            let mut i = None;
            let mut j = None;
            m_up = f64::NEG_INFINITY;
            m_low = f64::INFINITY;
            for t in 0..2 * n {
                let v = -sign(t) * g[t];
                if in_up(t, z[t]) && v > m_up {
                    m_up = v;
                    i = Some(t);
                }
                if in_low(t, z[t]) && v < m_low {
                    m_low = v;
                    j = Some(t);
                }
            }
            let (Some(i), Some(j)) = (i, j) else {
                converged = true;
                break;
            };
            if m_up - m_low < self.tol {
                converged = true;
                break;
            }
            if iterations >= self.max_iter {
                break;
            }
            iterations += 1;

            let (pi, pj) = (i % n, j % n);
            let eta = (k[(pi, pi)] + k[(pj, pj)] - 2.0 * k[(pi, pj)]).max(TAU);
            let mut step = (m_up - m_low) / eta;
            step = step.min(if sign(i) > 0.0 { c - z[i] } else { z[i] });
            step = step.min(if sign(j) > 0.0 { z[j] } else { c - z[j] });
            z[i] += sign(i) * step;
            z[j] -= sign(j) * step;
            for (t, gt) in g.iter_mut().enumerate() {
                let u = t % n;
                *gt += sign(t) * step * (k[(u, pi)] - k[(u, pj)]);
            }
            // snap to the bounds to keep the index sets exact
            for t in [i, j] {
                if z[t] < c * 1e-14 {
                    z[t] = 0.0;
                } else if z[t] > c * (1.0 - 1e-14) {
                    z[t] = c;
                }
            }
            history.push(objective(&z, &g));
        }

        let free: Vec<f64> = (0..2 * n).filter(|&t| z[t] > 0.0 && z[t] < c).map(|t| -sign(t) * g[t]).collect();
        let b = if free.is_empty() {
            if m_up.is_finite() && m_low.is_finite() {
                (m_up + m_low) / 2.0
            } else {
                0.0
            }
        } else {
            free.iter().sum::<f64>() / free.len() as f64
        };
        let beta: Vec<f64> = (0..n).map(|t| z[t] - z[t + n]).collect();
        let fitted: Vec<f64> =
            (0..n).map(|t| (0..n).map(|u| beta[u] * k[(t, u)]).sum::<f64>() + b).collect();
        let xi = (0..n).map(|t| (y[t] - fitted[t] - self.epsilon).max(0.0)).collect();
        let xi_star = (0..n).map(|t| (fitted[t] - y[t] - self.epsilon).max(0.0)).collect();
        Ok(SvrModel {
            beta,
            b,
            c,
            epsilon: self.epsilon,
            kernel: self.kernel,
            scaler,
            train_inputs: inputs,
            xi,
            xi_star,
            converged,
            iterations,
            dual_history: history,
        })
    }
}

/// SVR without input standardization and default tolerances.
pub fn svr_fit(data: &Dataset, c: f64, epsilon: f64, kernel: KernelSpec) -> Result<SvrModel> {
    SvrConfig { standardize: false, ..SvrConfig::new(c, epsilon, kernel) }.fit(data)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrModel {
    /// `alpha - alpha*` per training point.
    pub beta: Vec<f64>,
    pub b: f64,
    pub c: f64,
    pub epsilon: f64,
    pub kernel: KernelSpec,
    pub scaler: Option<Standardizer>,
    pub train_inputs: Vec<Vec<f64>>,
    /// Excess of `y - f(x)` over the tube.
    pub xi: Vec<f64>,
    /// Excess of `f(x) - y` over the tube.
    pub xi_star: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// Dual objective after every iteration, starting from `z = 0`.
    pub dual_history: Vec<f64>,
}

impl SvrModel {
    pub fn dim(&self) -> usize {
        self.scaler.as_ref().map_or_else(|| self.train_inputs[0].len(), |s| s.mean.len())
    }

    /// Final value of the dual objective.
    pub fn dual_objective(&self) -> f64 {
        *self.dual_history.last().expect("history starts non-empty")
    }

    /// `f(x) = sum beta_i k(x_i, x) + b`.
    pub fn predict(&self, inputs: &[Vec<f64>]) -> Result<Vec<f64>> {
        let queries = prepare(inputs, self.dim(), self.scaler.as_ref())?;
        let k = gram(&self.kernel, &queries, &self.train_inputs)?;
        Ok((0..queries.len())
            .map(|i| self.beta.iter().enumerate().map(|(j, bj)| bj * k[(i, j)]).sum::<f64>() + self.b)
            .collect())
    }

    pub fn support_count(&self) -> usize {
        self.beta.iter().filter(|b| **b != 0.0).count()
    }
}

impl OneStepPredictor for SvrModel {
    fn predict_one(&self, input: &[f64]) -> Result<f64> {
        Ok(self.predict(&[input.to_vec()])?[0])
    }
}
