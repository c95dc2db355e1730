use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::TimeSeries;
use crate::error::{Error, Result};

pub const DEFAULT_ARCSIN_MARGIN: f64 = 1e-3;

/// One differencing pass `y_t = x_t - x_{t-lag}`.
///
/// `head` holds the first `lag` values of the pass input (for exact
/// reconstruction), `tail` the last `lag` values (for integrating forecasts).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffPass {
    pub lag: usize,
    pub head: Vec<f64>,
    pub tail: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    Difference,
    SeasonalDifference,
    ArcsinMinmax,
    Log,
    Ewma,
    MovingAverage,
}

impl TransformKind {
    pub fn name(self) -> &'static str {
        match self {
            TransformKind::Difference => "difference",
            TransformKind::SeasonalDifference => "seasonal_difference",
            TransformKind::ArcsinMinmax => "arcsin_minmax",
            TransformKind::Log => "log",
            TransformKind::Ewma => "ewma",
            TransformKind::MovingAverage => "moving_average",
        }
    }
}

/// Everything needed to undo a transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransformState {
    /// Passes in the order they were applied.
    Difference { passes: Vec<DiffPass> },
    ArcsinMinmax { min: f64, max: f64, margin: f64 },
    Log,
    MovingAverage { window: usize },
    Ewma { alpha: f64 },
}

impl TransformState {
    pub fn kind(&self) -> TransformKind {
        match self {
            TransformState::Difference { passes } => {
                if passes.iter().all(|p| p.lag == 1) {
                    TransformKind::Difference
                } else {
                    TransformKind::SeasonalDifference
                }
            }
            TransformState::ArcsinMinmax { .. } => TransformKind::ArcsinMinmax,
            TransformState::Log => TransformKind::Log,
            TransformState::MovingAverage { .. } => TransformKind::MovingAverage,
            TransformState::Ewma { .. } => TransformKind::Ewma,
        }
    }

    /// Smoothing transforms discard information and cannot be undone.
    pub fn is_invertible(&self) -> bool {
        !matches!(
            self,
            TransformState::MovingAverage { .. } | TransformState::Ewma { .. }
        )
    }

    /// Applies a pointwise transform with the stored parameters to new data.
    ///
    /// Arcsin inputs falling outside the fitted `[min, max]` are clamped to
    /// the domain of `asin` after the affine map.
    pub fn apply_pointwise(&self, values: &[f64]) -> Result<Vec<f64>> {
        match *self {
            TransformState::ArcsinMinmax { min, max, margin } => Ok(values
                .iter()
                .map(|&x| to_unit(x, min, max, margin).clamp(-1.0, 1.0).asin())
                .collect()),
            TransformState::Log => values
                .iter()
                .map(|&x| {
                    if x <= -1.0 {
                        Err(Error::invalid(format!("log1p undefined for {x}")))
                    } else {
                        Ok(x.ln_1p())
                    }
                })
                .collect(),
            _ => Err(Error::StateKind {
                expected: "a pointwise transform",
                found: self.kind().name(),
            }),
        }
    }

    /// Inverse of [`apply_pointwise`](Self::apply_pointwise).
    pub fn invert_pointwise(&self, values: &[f64]) -> Result<Vec<f64>> {
        match *self {
            TransformState::ArcsinMinmax { min, max, margin } => {
                Ok(values.iter().map(|&y| restore_arcsin(y, min, max, margin)).collect())
            }
            TransformState::Log => Ok(values.iter().map(|&y| y.exp_m1()).collect()),
            _ => Err(Error::StateKind {
                expected: "a pointwise transform",
                found: self.kind().name(),
            }),
        }
    }
}

/// `d` lag-1 passes followed by one lag-`seasonal_lag` pass (skipped when 0).
pub fn difference(ts: &TimeSeries, d: usize, seasonal_lag: usize) -> Result<(TimeSeries, TransformState)> {
    let mut lags = vec![1; d];
    if seasonal_lag > 0 {
        lags.push(seasonal_lag);
    }
    difference_lags(ts, &lags)
}

/// Applies one differencing pass per entry of `lags`, in order.
pub fn difference_lags(ts: &TimeSeries, lags: &[usize]) -> Result<(TimeSeries, TransformState)> {
    let total: usize = lags.iter().sum();
    if ts.len() <= total {
        return Err(Error::too_short(format!(
            "differencing with total lag {total} needs more than {total} points, got {}",
            ts.len()
        )));
    }
    if lags.contains(&0) {
        return Err(Error::invalid("differencing lag must be positive"));
    }
    let mut current = ts.values().to_vec();
    let mut passes = Vec::with_capacity(lags.len());
    for &lag in lags {
        let head = current[..lag].to_vec();
        let tail = current[current.len() - lag..].to_vec();
        current = (lag..current.len()).map(|t| current[t] - current[t - lag]).collect();
        passes.push(DiffPass { lag, head, tail });
    }
    Ok((ts.shifted(total, current)?, TransformState::Difference { passes }))
}

fn diff_passes(state: &TransformState) -> Result<&[DiffPass]> {
    match state {
        TransformState::Difference { passes } => Ok(passes),
        other => Err(Error::StateKind { expected: "difference", found: other.kind().name() }),
    }
}

/// Exact inverse of [`difference`]: prepends the stored head values and
/// integrates pass by pass.
pub fn undifference(diffed: &TimeSeries, state: &TransformState) -> Result<TimeSeries> {
    let passes = diff_passes(state)?;
    let mut current = diffed.values().to_vec();
    for pass in passes.iter().rev() {
        let mut restored = Vec::with_capacity(current.len() + pass.lag);
        restored.extend_from_slice(&pass.head);
        for (t, &delta) in current.iter().enumerate() {
            let prev = restored[t];
            restored.push(delta + prev);
        }
        current = restored;
    }
    let total: usize = passes.iter().map(|p| p.lag).sum();
    diffed.shifted_back(total, current)
}

/// Integrates forecasts made in differenced space onto the end of the
/// observed series, using the stored tail of every pass.
pub fn undifference_forecast(deltas: &[f64], state: &TransformState) -> Result<Vec<f64>> {
    let passes = diff_passes(state)?;
    let mut current = deltas.to_vec();
    for pass in passes.iter().rev() {
        let mut history = pass.tail.clone();
        for &delta in &current {
            let prev = history[history.len() - pass.lag];
            history.push(delta + prev);
        }
        current = history.split_off(pass.lag);
    }
    Ok(current)
}

fn to_unit(x: f64, min: f64, max: f64, margin: f64) -> f64 {
    let lo = -1.0 + margin;
    let hi = 1.0 - margin;
    lo + (x - min) / (max - min) * (hi - lo)
}

fn restore_arcsin(y: f64, min: f64, max: f64, margin: f64) -> f64 {
    let lo = -1.0 + margin;
    let hi = 1.0 - margin;
    // Outside [asin(lo), asin(hi)] sin would leave the fitted range.
    let y = y.clamp(lo.asin(), hi.asin()).clamp(-FRAC_PI_2, FRAC_PI_2);
    let s = y.sin();
    min + (s - lo) / (hi - lo) * (max - min)
}

/// Maps `[min, max]` affinely onto `[-1 + margin, 1 - margin]`, then `asin`.
pub fn arcsin_transform(ts: &TimeSeries, margin: f64) -> Result<(TimeSeries, TransformState)> {
    if ts.len() < 2 {
        return Err(Error::too_short("arcsin transform needs at least two points"));
    }
    if !(0.0..1.0).contains(&margin) {
        return Err(Error::invalid(format!("margin {margin} must lie in [0, 1)")));
    }
    let (min, max) = ts
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    if !(max > min) {
        return Err(Error::ZeroVariance("arcsin transform of a constant series".into()));
    }
    let state = TransformState::ArcsinMinmax { min, max, margin };
    let values = ts.values().iter().map(|&x| to_unit(x, min, max, margin).asin()).collect();
    Ok((ts.shifted(0, values)?, state))
}

/// Inverse of [`arcsin_transform`]; forecasts beyond the transformed range
/// are clamped to its endpoints before `sin`.
pub fn sin_restore(ts: &TimeSeries, state: &TransformState) -> Result<TimeSeries> {
    match state {
        TransformState::ArcsinMinmax { .. } => ts.shifted(0, state.invert_pointwise(ts.values())?),
        other => Err(Error::StateKind { expected: "arcsin_minmax", found: other.kind().name() }),
    }
}

/// Elementwise `ln(1 + x)`.
pub fn log_transform(ts: &TimeSeries) -> Result<(TimeSeries, TransformState)> {
    let state = TransformState::Log;
    let values = state.apply_pointwise(ts.values())?;
    Ok((ts.shifted(0, values)?, state))
}

/// Elementwise `exp(y) - 1`.
pub fn exp_restore(ts: &TimeSeries, state: &TransformState) -> Result<TimeSeries> {
    match state {
        TransformState::Log => ts.shifted(0, state.invert_pointwise(ts.values())?),
        other => Err(Error::StateKind { expected: "log", found: other.kind().name() }),
    }
}

/// Trailing moving average; output starts `window - 1` steps later.
pub fn moving_average(ts: &TimeSeries, window: usize) -> Result<(TimeSeries, TransformState)> {
    if window == 0 || window > ts.len() {
        return Err(Error::invalid(format!(
            "window {window} must lie in 1..={}",
            ts.len()
        )));
    }
    let x = ts.values();
    let mut sum: f64 = x[..window].iter().sum();
    let mut out = Vec::with_capacity(x.len() - window + 1);
    out.push(sum / window as f64);
    for t in window..x.len() {
        sum += x[t] - x[t - window];
        out.push(sum / window as f64);
    }
    Ok((ts.shifted(window - 1, out)?, TransformState::MovingAverage { window }))
}

/// Exponentially weighted average with `y_0 = x_0`.
pub fn ewma(ts: &TimeSeries, alpha: f64) -> Result<(TimeSeries, TransformState)> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid(format!("alpha {alpha} must lie in (0, 1]")));
    }
    let mut out = Vec::with_capacity(ts.len());
    let mut prev = ts.values()[0];
    for &x in ts.values() {
        prev = alpha * x + (1.0 - alpha) * prev;
        out.push(prev);
    }
    Ok((ts.shifted(0, out)?, TransformState::Ewma { alpha }))
}
