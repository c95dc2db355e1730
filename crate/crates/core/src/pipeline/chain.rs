use super::config::TransformStep;
use crate::error::{Error, Result};
use crate::series::{arcsin_transform, difference_lags, undifference_forecast, TimeSeries, TransformState};

/// A transform chain fitted on the training part of a series and applied to
/// the whole of it.
///
/// `levels[k]` is the full series after `k` steps. Differencing drops points
/// from the front, so the last `n_test` entries of every level belong to the
/// test period.
#[derive(Debug, Clone)]
pub struct FittedChain {
    pub states: Vec<TransformState>,
    levels: Vec<Vec<f64>>,
    n_test: usize,
}

impl FittedChain {
    pub fn fit(steps: &[TransformStep], full: &[f64], n_train: usize) -> Result<Self> {
        if n_train == 0 || n_train >= full.len() {
            return Err(Error::invalid(format!("train length {n_train} must lie inside 1..{}", full.len())));
        }
        let n_test = full.len() - n_train;
        let mut levels = vec![full.to_vec()];
        let mut states = Vec::with_capacity(steps.len());
        for step in steps {
            let cur = levels.last().expect("level 0 exists");
            let train = TimeSeries::from_values(cur[..cur.len() - n_test].to_vec())?;
            let (state, next) = match *step {
                TransformStep::Difference { .. } | TransformStep::SeasonalDifference { .. } => {
                    let lags = match *step {
                        TransformStep::Difference { d } => vec![1; d],
                        TransformStep::SeasonalDifference { lag } => vec![lag],
                        _ => unreachable!(),
                    };
                    let total: usize = lags.iter().sum();
                    if train.len() <= total + 1 {
                        return Err(Error::too_short(format!(
                            "{} training points cannot be differenced at lags {lags:?}",
                            train.len()
                        )));
                    }
                    let (_, state) = difference_lags(&train, &lags)?;
                    let (diffed, _) = difference_lags(&TimeSeries::from_values(cur.clone())?, &lags)?;
                    (state, diffed.into_values())
                }
                TransformStep::Arcsin { margin } => {
                    let (_, state) = arcsin_transform(&train, margin)?;
                    let next = state.apply_pointwise(cur)?;
                    (state, next)
                }
                TransformStep::Log => {
                    let state = TransformState::Log;
                    let next = state.apply_pointwise(cur)?;
                    (state, next)
                }
                TransformStep::MovingAverage { .. } | TransformStep::Ewma { .. } => {
                    return Err(Error::Config(format!(
                        "{step:?} cannot be inverted, so forecasts could not return to original units"
                    )))
                }
            };
            states.push(state);
            levels.push(next);
        }
        Ok(Self { states, levels, n_test })
    }

    fn last(&self) -> &[f64] {
        self.levels.last().expect("level 0 exists")
    }

    /// Training part of the modelled (fully transformed) series.
    pub fn model_train(&self) -> &[f64] {
        let z = self.last();
        &z[..z.len() - self.n_test]
    }

    /// Test part of the modelled series.
    pub fn model_test(&self) -> &[f64] {
        let z = self.last();
        &z[z.len() - self.n_test..]
    }

    /// Original index of the first modelled point.
    pub fn offset(&self) -> usize {
        self.levels[0].len() - self.last().len()
    }

    /// Maps predictions of the modelled series back to original units.
    ///
    /// Each prediction at modelled position `positions[i]` is treated as a
    /// one-step forecast: every earlier value is taken from the observed
    /// series, so a differenced prediction is added to the observed history.
    pub fn invert_at(&self, positions: &[usize], preds: &[f64]) -> Result<Vec<f64>> {
        if positions.len() != preds.len() {
            return Err(Error::Shape(format!("{} positions for {} predictions", positions.len(), preds.len())));
        }
        let top = self.levels.len() - 1;
        let mut out = preds.to_vec();
        for k in (0..top).rev() {
            let (lower, upper) = (&self.levels[k], &self.levels[k + 1]);
            let shift = lower.len() - self.last().len();
            let shift_upper = upper.len() - self.last().len();
            out = match &self.states[k] {
                TransformState::Difference { .. } => positions
                    .iter()
                    .zip(&out)
                    .map(|(&p, &y)| lower[p + shift] - (upper[p + shift_upper] - y))
                    .collect(),
                state => state.invert_pointwise(&out)?,
            };
        }
        Ok(out)
    }

    /// Maps a forecast path that starts right after the training period back
    /// to original units, integrating differenced forecasts from the
    /// training tail.
    pub fn invert_forecast(&self, preds: &[f64]) -> Result<Vec<f64>> {
        let mut out = preds.to_vec();
        for state in self.states.iter().rev() {
            out = match state {
                TransformState::Difference { .. } => undifference_forecast(&out, state)?,
                state => state.invert_pointwise(&out)?,
            };
        }
        Ok(out)
    }
}
