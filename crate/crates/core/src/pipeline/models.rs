use serde_json::{json, Value};

use super::config::{ModelConfig, PredictMode};
use crate::arima::{self, ArimaSpec, FittedArima};
use crate::deep::{self, RnnConfig, TrainConfig, TrainedRnn};
use crate::error::{Error, Result};
use crate::kernels::{
    embed, forecast_one_step, forecast_recursive, EmbeddingSpec, KrrConfig, KrrModel, OneStepPredictor, SvrConfig,
    SvrModel,
};
use crate::TimeSeries;

/// One concrete, fully specified model.
#[derive(Debug, Clone, PartialEq)]
pub enum Candidate {
    Arima(ArimaSpec),
    Krr { config: KrrConfig, embedding: EmbeddingSpec },
    Svr { config: SvrConfig, embedding: EmbeddingSpec },
    Rnn { config: RnnConfig, train: TrainConfig },
}

/// Expands a model section into its candidate list.
pub fn candidates(model: &ModelConfig) -> Result<Vec<Candidate>> {
    Ok(match model {
        ModelConfig::Arima(spec) => vec![Candidate::Arima(*spec)],
        ModelConfig::AutoArima(grid) => grid.specs()?.into_iter().map(Candidate::Arima).collect(),
        ModelConfig::Krr { embedding, lambdas, kernels, .. } => kernels
            .iter()
            .flat_map(|&kernel| {
                lambdas.iter().map(move |&lambda| Candidate::Krr {
                    config: KrrConfig { lambda, kernel, standardize: true },
                    embedding: *embedding,
                })
            })
            .collect(),
        ModelConfig::Svr { embedding, cs, epsilons, kernels, tol, max_iter, .. } => {
            let mut out = Vec::new();
            for &kernel in kernels {
                for &c in cs {
                    for &epsilon in epsilons {
                        let config =
                            SvrConfig { c, epsilon, kernel, tol: *tol, max_iter: *max_iter, standardize: true };
                        out.push(Candidate::Svr { config, embedding: *embedding });
                    }
                }
            }
            out
        }
        ModelConfig::Rnn { configs, train, .. } => {
            configs.iter().map(|&config| Candidate::Rnn { config, train: *train }).collect()
        }
    })
}

impl Candidate {
    pub fn describe(&self) -> Value {
        match self {
            Candidate::Arima(spec) => json!({ "family": "arima", "order": spec.to_string(), "spec": spec }),
            Candidate::Krr { config, embedding } => json!({ "family": "krr", "config": config, "embedding": embedding }),
            Candidate::Svr { config, embedding } => json!({ "family": "svr", "config": config, "embedding": embedding }),
            Candidate::Rnn { config, train } => json!({ "family": "rnn", "config": config, "train": train }),
        }
    }

    pub fn fit(&self, series: &[f64]) -> Result<FittedModel> {
        Ok(match self {
            Candidate::Arima(spec) => FittedModel::Arima(arima::fit(*spec, &TimeSeries::from_values(series.to_vec())?)?),
            Candidate::Krr { config, embedding } => {
                FittedModel::Krr { model: config.fit(&embed(series, embedding)?)?, embedding: *embedding }
            }
            Candidate::Svr { config, embedding } => {
                FittedModel::Svr { model: config.fit(&embed(series, embedding)?)?, embedding: *embedding }
            }
            Candidate::Rnn { config, train } => FittedModel::Rnn(deep::train(*config, train, series)?),
        })
    }

    /// Fits on `series[..train_end]` and predicts `series[test_start..test_end]`.
    pub fn holdout(&self, series: &[f64], train_end: usize, test: std::ops::Range<usize>, mode: PredictMode) -> Result<Vec<f64>> {
        let fitted = self.fit(&series[..train_end])?;
        match mode {
            PredictMode::OneStep if !fitted.is_arima() => {
                fitted.one_step(&series[..test.start], &series[test.clone()])
            }
            _ => {
                let path = fitted.forecast(&series[..train_end], test.end - train_end)?;
                Ok(path[test.start - train_end..].to_vec())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FittedModel {
    Arima(FittedArima),
    Krr { model: KrrModel, embedding: EmbeddingSpec },
    Svr { model: SvrModel, embedding: EmbeddingSpec },
    Rnn(TrainedRnn),
}

impl FittedModel {
    pub fn is_arima(&self) -> bool {
        matches!(self, FittedModel::Arima(_))
    }

    fn predictor(&self) -> Option<(&dyn OneStepPredictor, EmbeddingSpec)> {
        match self {
            FittedModel::Arima(_) => None,
            FittedModel::Krr { model, embedding } => Some((model, *embedding)),
            FittedModel::Svr { model, embedding } => Some((model, *embedding)),
            FittedModel::Rnn(t) => Some((&t.model, EmbeddingSpec::new(t.model.config.window))),
        }
    }

    /// In-sample one-step predictions; `None` where no prediction exists.
    pub fn fitted(&self, train: &[f64]) -> Result<Vec<Option<f64>>> {
        match self.predictor() {
            None => match self {
                FittedModel::Arima(m) => Ok(m.fitted_values()),
                _ => unreachable!(),
            },
            Some((model, spec)) => {
                let mut out = vec![None; spec.window.min(train.len())];
                for t in spec.window..train.len() {
                    out.push(Some(model.predict_one(&spec.input(train, t))?));
                }
                Ok(out)
            }
        }
    }

    /// Recursive forecast of `horizon` points after `history`.
    pub fn forecast(&self, history: &[f64], horizon: usize) -> Result<Vec<f64>> {
        match self.predictor() {
            None => match self {
                FittedModel::Arima(m) => Ok(m.forecast(horizon)?.values),
                _ => unreachable!(),
            },
            Some((model, spec)) => forecast_recursive(model, history, horizon, &spec),
        }
    }

    /// Teacher-forced predictions of `actual`, which follows `history`.
    pub fn one_step(&self, history: &[f64], actual: &[f64]) -> Result<Vec<f64>> {
        match self.predictor() {
            None => Err(Error::invalid("ARIMA forecasts are recursive only")),
            Some((model, spec)) => forecast_one_step(model, history, actual, &spec),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(match self {
            FittedModel::Arima(m) => m.to_json()?,
            FittedModel::Krr { model, embedding } => {
                serde_json::to_string_pretty(&json!({ "embedding": embedding, "model": model }))?
            }
            FittedModel::Svr { model, embedding } => {
                serde_json::to_string_pretty(&json!({ "embedding": embedding, "model": model }))?
            }
            FittedModel::Rnn(t) => serde_json::to_string_pretty(t)?,
        })
    }
}
