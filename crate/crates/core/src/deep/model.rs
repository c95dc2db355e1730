use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cell::{cell_len, gate_len, Cell, CellKind, CellParams, StepCache};
use super::{Activation, Initializer};
use crate::error::{Error, Result};
use crate::kernels::{Dataset, OneStepPredictor};

/// Architecture and initialization of a network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RnnConfig {
    pub cell: CellKind,
    pub hidden: usize,
    /// Input steps per sample.
    pub window: usize,
    pub bidirectional: bool,
    /// Carry the recurrent state across consecutive training batches.
    pub stateful: bool,
    /// Replaces `tanh` in the candidate and output paths of every cell.
    pub activation: Activation,
    pub initializer: Initializer,
    /// Initial LSTM forget-gate bias.
    pub forget_bias: f64,
    pub seed: u64,
}

impl RnnConfig {
    pub fn new(cell: CellKind, hidden: usize, window: usize) -> Self {
        Self {
            cell,
            hidden,
            window,
            bidirectional: false,
            stateful: false,
            activation: Activation::Tanh,
            initializer: Initializer::default(),
            forget_bias: 1.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.hidden == 0 || self.window == 0 {
            return Err(Error::invalid("hidden size and window must be at least 1"));
        }
        if self.stateful && self.bidirectional {
            return Err(Error::invalid("stateful training is not supported for bidirectional networks"));
        }
        self.initializer.validate()
    }

    fn directions(&self) -> usize {
        if self.bidirectional {
            2
        } else {
            1
        }
    }

    fn cell_len(&self) -> usize {
        cell_len(self.cell, self.hidden, 1)
    }

    fn head_offset(&self) -> usize {
        self.directions() * self.cell_len()
    }

    pub fn n_params(&self) -> usize {
        self.head_offset() + self.directions() * self.hidden + 1
    }
}

/// Z-score constants of the training series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesScaler {
    pub mean: f64,
    pub std: f64,
}

impl SeriesScaler {
    /// Population standard deviation; a constant series keeps unit scale.
    pub fn fit(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("cannot standardize an empty series"));
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
        Ok(Self { mean, std: if sd > 0.0 { sd } else { 1.0 } })
    }

    pub fn identity() -> Self {
        Self { mean: 0.0, std: 1.0 }
    }

    pub fn forward(&self, v: f64) -> f64 {
        (v - self.mean) / self.std
    }

    pub fn inverse(&self, v: f64) -> f64 {
        v * self.std + self.mean
    }
}

/// Hidden (and LSTM cell) state of the forward direction.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrentState {
    pub h: Vec<f64>,
    pub c: Vec<f64>,
}

/// A network with flat parameters: each direction's cell block, then the
/// head weights over the concatenated final states, then the head bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RnnModel {
    pub config: RnnConfig,
    pub params: Vec<f64>,
    pub scaler: SeriesScaler,
}

struct Unrolled {
    prediction: f64,
    features: Vec<f64>,
    caches: Vec<Vec<StepCache>>,
    final_state: RecurrentState,
}

impl RnnModel {
    /// Draws weights from the initializer, zero biases, forget bias as
    /// configured.
    pub fn new(config: RnnConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut params = vec![0.0; config.n_params()];
        let (h, cols) = (config.hidden, config.hidden + 1);
        let glen = gate_len(h, 1);
        for d in 0..config.directions() {
            for g in 0..config.cell.gates() {
                let start = d * config.cell_len() + g * glen;
                for w in &mut params[start..start + h * cols] {
                    *w = config.initializer.sample(&mut rng);
                }
                if config.cell == CellKind::Lstm && g == 0 {
                    params[start + h * cols..start + glen].fill(config.forget_bias);
                }
            }
        }
        let head = config.head_offset();
        for w in &mut params[head..head + config.directions() * h] {
            *w = config.initializer.sample(&mut rng);
        }
        Ok(Self { config, params, scaler: SeriesScaler::identity() })
    }

    pub fn with_params(config: RnnConfig, params: Vec<f64>) -> Result<Self> {
        config.validate()?;
        if params.len() != config.n_params() {
            return Err(Error::Shape(format!("expected {} parameters, got {}", config.n_params(), params.len())));
        }
        Ok(Self { config, params, scaler: SeriesScaler::identity() })
    }

    /// Parameters of direction `d` (0 forward, 1 backward).
    pub fn cell_params(&self, d: usize) -> CellParams {
        let len = self.config.cell_len();
        CellParams {
            kind: self.config.cell,
            hidden: self.config.hidden,
            input: 1,
            data: self.params[d * len..(d + 1) * len].to_vec(),
        }
    }

    fn cell<'a>(&self, params: &'a [f64], d: usize) -> Cell<'a> {
        let len = self.config.cell_len();
        Cell {
            kind: self.config.cell,
            hidden: self.config.hidden,
            input: 1,
            p: &params[d * len..(d + 1) * len],
            act: self.config.activation,
        }
    }

    pub fn zero_state(&self) -> RecurrentState {
        let c = if self.config.cell == CellKind::Lstm { vec![0.0; self.config.hidden] } else { Vec::new() };
        RecurrentState { h: vec![0.0; self.config.hidden], c }
    }

    fn check_window(&self, window: &[f64]) -> Result<()> {
        if window.len() != self.config.window {
            return Err(Error::Shape(format!(
                "window of length {} for a model with window {}",
                window.len(),
                self.config.window
            )));
        }
        Ok(())
    }

    fn unroll(&self, params: &[f64], window: &[f64], init: Option<&RecurrentState>) -> Unrolled {
        let zero = self.zero_state();
        let mut features = Vec::with_capacity(self.config.directions() * self.config.hidden);
        let mut caches = Vec::with_capacity(self.config.directions());
        let mut final_state = zero.clone();
        for d in 0..self.config.directions() {
            let cell = self.cell(params, d);
            let start = if d == 0 { init.unwrap_or(&zero) } else { &zero };
            let (mut h, mut c) = (start.h.clone(), start.c.clone());
            let mut steps = Vec::with_capacity(window.len());
            let order: Box<dyn Iterator<Item = &f64>> =
                if d == 0 { Box::new(window.iter()) } else { Box::new(window.iter().rev()) };
            for &x in order {
                let s = cell.step(&[x], &h, &c);
                h = s.h.clone();
                c = s.c.clone();
                steps.push(s);
            }
            if d == 0 {
                final_state = RecurrentState { h: h.clone(), c };
            }
            features.extend(h);
            caches.push(steps);
        }
        let head = &params[self.config.head_offset()..];
        let nf = features.len();
        let prediction = head[..nf].iter().zip(&features).map(|(w, f)| w * f).sum::<f64>() + head[nf];
        Unrolled { prediction, features, caches, final_state }
    }

    /// Network output for one window, in the network's own units.
    pub fn forward(&self, window: &[f64]) -> Result<f64> {
        self.check_window(window)?;
        Ok(self.unroll(&self.params, window, None).prediction)
    }

    /// Forward pass from a given forward-direction state; returns the
    /// prediction and the state after the window.
    pub fn forward_from(&self, window: &[f64], state: &RecurrentState) -> Result<(f64, RecurrentState)> {
        self.check_window(window)?;
        let zero = self.zero_state();
        if state.h.len() != zero.h.len() || state.c.len() != zero.c.len() {
            return Err(Error::Shape("recurrent state has the wrong size".into()));
        }
        let u = self.unroll(&self.params, window, Some(state));
        Ok((u.prediction, u.final_state))
    }

    /// Mean squared error over `data` and its exact gradient. When `init`
    /// is given, sample `i` starts from `init[i]` and the final states are
    /// returned; gradients do not flow into the initial states.
    pub(crate) fn loss_and_gradient(
        &self,
        params: &[f64],
        data: &Dataset,
        init: Option<&[RecurrentState]>,
    ) -> (f64, Vec<f64>, Vec<RecurrentState>) {
        let n = data.len() as f64;
        let mut grad = vec![0.0; params.len()];
        let mut loss = 0.0;
        let mut finals = Vec::new();
        let hn = self.config.hidden;
        let head = self.config.head_offset();
        let clen = self.config.cell_len();
        for (s, (window, &target)) in data.inputs.iter().zip(&data.targets).enumerate() {
            let u = self.unroll(params, window, init.map(|states| &states[s]));
            let err = u.prediction - target;
            loss += err * err / n;
            let dpred = 2.0 * err / n;
            let nf = u.features.len();
            for k in 0..nf {
                grad[head + k] += dpred * u.features[k];
            }
            grad[head + nf] += dpred;
            for (d, steps) in u.caches.iter().enumerate() {
                let cell = self.cell(params, d);
                let mut dh: Vec<f64> = params[head + d * hn..head + (d + 1) * hn].iter().map(|w| w * dpred).collect();
                let mut dc = cell.initial_c();
                let g = &mut grad[d * clen..(d + 1) * clen];
                for cache in steps.iter().rev() {
                    let (dh_prev, dc_prev) = cell.backward(cache, &dh, &dc, g);
                    dh = dh_prev;
                    dc = dc_prev;
                }
            }
            finals.push(u.final_state);
        }
        (loss, grad, finals)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(s)?;
        if m.params.len() != m.config.n_params() {
            return Err(Error::Shape("parameter count does not match the configuration".into()));
        }
        Ok(m)
    }
}

impl OneStepPredictor for RnnModel {
    /// Standardizes the raw window, runs the network from a zero state and
    /// maps the output back to series units.
    fn predict_one(&self, input: &[f64]) -> Result<f64> {
        let window: Vec<f64> = input.iter().map(|v| self.scaler.forward(*v)).collect();
        Ok(self.scaler.inverse(self.forward(&window)?))
    }
}

/// Mean squared error of the network over `data` (network units).
pub fn mse_loss(model: &RnnModel, data: &Dataset) -> Result<f64> {
    check_dataset(model, data)?;
    Ok(model.loss_and_gradient(&model.params, data, None).0)
}

/// Exact gradient of the batch MSE with respect to every parameter, in the
/// layout of `model.params`.
pub fn bptt_gradients(model: &RnnModel, data: &Dataset) -> Result<Vec<f64>> {
    check_dataset(model, data)?;
    Ok(model.loss_and_gradient(&model.params, data, None).1)
}

fn check_dataset(model: &RnnModel, data: &Dataset) -> Result<()> {
    if data.is_empty() {
        return Err(Error::invalid("empty batch"));
    }
    if data.dim() != model.config.window {
        return Err(Error::Shape(format!("windows of length {} for window {}", data.dim(), model.config.window)));
    }
    Ok(())
}
