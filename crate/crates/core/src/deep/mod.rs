//! Recurrent networks (simple, LSTM, GRU, optionally bidirectional) with a
//! single recurrent layer and an affine output head, trained by
//! backpropagation through time and Adam.

mod cell;
mod model;
mod train;

pub use cell::{gru_step, lstm_step, simple_step, CellKind, CellParams};
pub use model::{bptt_gradients, mse_loss, RecurrentState, RnnConfig, RnnModel, SeriesScaler};
pub use train::{train, Adam, TrainConfig, TrainedRnn};

use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Sigmoid,
    Tanh,
    Relu,
    Softplus,
    Linear,
}

impl Activation {
    pub fn apply(&self, a: f64) -> f64 {
        match self {
            Activation::Sigmoid => {
                if a >= 0.0 {
                    1.0 / (1.0 + (-a).exp())
                } else {
                    let e = a.exp();
                    e / (1.0 + e)
                }
            }
            Activation::Tanh => a.tanh(),
            Activation::Relu => a.max(0.0),
            Activation::Softplus => {
                // log(1 + e^a) without overflow
                a.max(0.0) + (-a.abs()).exp().ln_1p()
            }
            Activation::Linear => a,
        }
    }

    /// Derivative with respect to the pre-activation `a`.
    pub fn derivative(&self, a: f64) -> f64 {
        match self {
            Activation::Sigmoid => {
                let s = self.apply(a);
                s * (1.0 - s)
            }
            Activation::Tanh => 1.0 - a.tanh().powi(2),
            Activation::Relu => {
                if a > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Softplus => Activation::Sigmoid.apply(a),
            Activation::Linear => 1.0,
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name.trim().to_ascii_lowercase().as_str() {
            "sigmoid" => Activation::Sigmoid,
            "tanh" => Activation::Tanh,
            "relu" => Activation::Relu,
            "softplus" => Activation::Softplus,
            "linear" => Activation::Linear,
            other => return Err(Error::invalid(format!("unknown activation '{other}'"))),
        })
    }
}

/// Distribution of the initial weights. Biases start at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Initializer {
    Uniform { low: f64, high: f64 },
    Normal { mean: f64, std: f64 },
    /// Normal draws redrawn until within two standard deviations.
    TruncatedNormal { mean: f64, std: f64 },
}

impl Default for Initializer {
    fn default() -> Self {
        Initializer::Uniform { low: -0.5, high: 0.5 }
    }
}

impl Initializer {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Initializer::Uniform { low, high } if !(low < high) => {
                Err(Error::invalid(format!("uniform initializer needs low < high, got [{low}, {high})")))
            }
            Initializer::Normal { std, .. } | Initializer::TruncatedNormal { std, .. } if !(std > 0.0) => {
                Err(Error::invalid(format!("initializer std must be positive, got {std}")))
            }
            _ => Ok(()),
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            Initializer::Uniform { low, high } => Uniform::new(low, high).sample(rng),
            Initializer::Normal { mean, std } => Normal::new(mean, std).expect("validated std").sample(rng),
            Initializer::TruncatedNormal { mean, std } => {
                let dist = Normal::new(mean, std).expect("validated std");
                loop {
                    let z: f64 = dist.sample(rng);
                    if (z - mean).abs() <= 2.0 * std {
                        return z;
                    }
                }
            }
        }
    }
}
