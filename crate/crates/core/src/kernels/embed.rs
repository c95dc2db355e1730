use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lag-window featurization of a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingSpec {
    pub window: usize,
    /// Appends the index of the target point as an extra feature.
    pub time_index: bool,
}

impl EmbeddingSpec {
    pub fn new(window: usize) -> Self {
        Self { window, time_index: false }
    }

    pub fn with_time_index(mut self) -> Self {
        self.time_index = true;
        self
    }

    pub fn dim(&self) -> usize {
        self.window + usize::from(self.time_index)
    }

    /// Input vector predicting the point at index `target` from the `window`
    /// values preceding it in `values`.
    pub fn input(&self, values: &[f64], target: usize) -> Vec<f64> {
        let mut v = values[target - self.window..target].to_vec();
        if self.time_index {
            v.push(target as f64);
        }
        v
    }
}

impl Default for EmbeddingSpec {
    fn default() -> Self {
        Self::new(4)
    }
}

/// Supervised pairs `inputs[i] -> targets[i]`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Dataset {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
}

impl Dataset {
    pub fn new(inputs: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self> {
        if inputs.len() != targets.len() {
            return Err(Error::Shape(format!("{} inputs but {} targets", inputs.len(), targets.len())));
        }
        if inputs.is_empty() {
            return Err(Error::invalid("empty dataset"));
        }
        let dim = inputs[0].len();
        if inputs.iter().any(|x| x.len() != dim) {
            return Err(Error::Shape("input vectors have different lengths".into()));
        }
        if inputs.iter().flatten().chain(&targets).any(|v| !v.is_finite()) {
            return Err(Error::invalid("dataset contains non-finite values"));
        }
        Ok(Self { inputs, targets })
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.inputs.first().map_or(0, Vec::len)
    }
}

/// `n - w` pairs `([x_{t-w}, ..., x_{t-1}], x_t)` in time order.
pub fn embed(values: &[f64], spec: &EmbeddingSpec) -> Result<Dataset> {
    if spec.window == 0 {
        return Err(Error::invalid("embedding window must be at least 1"));
    }
    if values.len() <= spec.window {
        return Err(Error::too_short(format!(
            "window {} needs more than {} points",
            spec.window,
            values.len()
        )));
    }
    let targets: Vec<usize> = (spec.window..values.len()).collect();
    Dataset::new(targets.iter().map(|&t| spec.input(values, t)).collect(), targets.iter().map(|&t| values[t]).collect())
}

/// A model mapping one input vector to a one-step prediction.
pub trait OneStepPredictor {
    fn predict_one(&self, input: &[f64]) -> Result<f64>;
}

/// Iterated one-step forecasts: each prediction is appended to the history
/// and becomes part of the next window.
pub fn forecast_recursive<M: OneStepPredictor + ?Sized>(
    model: &M,
    history: &[f64],
    horizon: usize,
    spec: &EmbeddingSpec,
) -> Result<Vec<f64>> {
    check_history(history, horizon, spec)?;
    let mut values = history.to_vec();
    for _ in 0..horizon {
        let next = model.predict_one(&spec.input(&values, values.len()))?;
        values.push(next);
    }
    Ok(values.split_off(history.len()))
}

/// Teacher-forced one-step predictions over `actual`: the window for each
/// point holds observed values only.
pub fn forecast_one_step<M: OneStepPredictor + ?Sized>(
    model: &M,
    history: &[f64],
    actual: &[f64],
    spec: &EmbeddingSpec,
) -> Result<Vec<f64>> {
    check_history(history, actual.len(), spec)?;
    let mut values = history.to_vec();
    let mut out = Vec::with_capacity(actual.len());
    for &a in actual {
        out.push(model.predict_one(&spec.input(&values, values.len()))?);
        values.push(a);
    }
    Ok(out)
}

fn check_history(history: &[f64], horizon: usize, spec: &EmbeddingSpec) -> Result<()> {
    if horizon == 0 {
        return Err(Error::invalid("forecast horizon must be at least 1"));
    }
    if spec.window == 0 || history.len() < spec.window {
        return Err(Error::too_short(format!(
            "history of {} points for window {}",
            history.len(),
            spec.window
        )));
    }
    Ok(())
}
