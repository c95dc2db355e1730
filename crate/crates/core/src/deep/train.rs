use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{RnnConfig, RnnModel, SeriesScaler};
use crate::error::{Error, Result};
use crate::kernels::{embed, Dataset, EmbeddingSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { learning_rate: 0.01, epochs: 100, batch_size: 32 }
    }
}

/// Adam with bias-corrected moments.
#[derive(Debug, Clone)]
pub struct Adam {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(learning_rate: f64, n: usize) -> Self {
        Self { learning_rate, beta1: 0.9, beta2: 0.999, eps: 1e-8, m: vec![0.0; n], v: vec![0.0; n], t: 0 }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for k in 0..params.len() {
            self.m[k] = self.beta1 * self.m[k] + (1.0 - self.beta1) * grad[k];
            self.v[k] = self.beta2 * self.v[k] + (1.0 - self.beta2) * grad[k] * grad[k];
            params[k] -= self.learning_rate * (self.m[k] / c1) / ((self.v[k] / c2).sqrt() + self.eps);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedRnn {
    pub model: RnnModel,
    /// Mean batch loss of every epoch, standardized units.
    pub loss_history: Vec<f64>,
}

/// Trains on a series in original units.
///
/// The series is z-scored with its own statistics (kept in the model) and
/// cut into windows. Non-stateful training shuffles the windows every epoch
/// with a generator seeded from the model seed. Stateful training splits
/// the series into `batch_size` contiguous streams of non-overlapping
/// windows; batch `k` holds window `k` of every stream and each stream
/// starts from the state the previous batch left behind. The state is reset
/// at the start of every epoch and batches are never shuffled.
pub fn train(config: RnnConfig, train_config: &TrainConfig, series: &[f64]) -> Result<TrainedRnn> {
    if train_config.epochs == 0 || train_config.batch_size == 0 {
        return Err(Error::invalid("epochs and batch size must be at least 1"));
    }
    if !(train_config.learning_rate > 0.0) {
        return Err(Error::invalid("learning rate must be positive"));
    }
    let mut model = RnnModel::new(config)?;
    model.scaler = SeriesScaler::fit(series)?;
    let z: Vec<f64> = series.iter().map(|v| model.scaler.forward(*v)).collect();
    let mut adam = Adam::new(train_config.learning_rate, model.params.len());
    let mut history = Vec::with_capacity(train_config.epochs);

    if config.stateful {
        let streams = stateful_batches(&z, config.window, train_config.batch_size)?;
        for _ in 0..train_config.epochs {
            let mut states = vec![model.zero_state(); streams[0].len()];
            let mut total = 0.0;
            for batch in &streams {
                let (loss, grad, finals) = model.loss_and_gradient(&model.params, batch, Some(&states));
                check_finite(loss)?;
                adam.step(&mut model.params, &grad);
                states = finals;
                total += loss;
            }
            history.push(total / streams.len() as f64);
        }
    } else {
        let data = embed(&z, &EmbeddingSpec::new(config.window))?;
        let mut order: Vec<usize> = (0..data.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(1));
        for _ in 0..train_config.epochs {
            order.shuffle(&mut rng);
            let mut total = 0.0;
            let mut batches = 0;
            for chunk in order.chunks(train_config.batch_size) {
                let batch = Dataset {
                    inputs: chunk.iter().map(|&i| data.inputs[i].clone()).collect(),
                    targets: chunk.iter().map(|&i| data.targets[i]).collect(),
                };
                let (loss, grad, _) = model.loss_and_gradient(&model.params, &batch, None);
                check_finite(loss)?;
                adam.step(&mut model.params, &grad);
                total += loss;
                batches += 1;
            }
            history.push(total / batches as f64);
        }
    }
    if model.params.iter().any(|p| !p.is_finite()) {
        return Err(Error::Divergence("parameters became non-finite".into()));
    }
    Ok(TrainedRnn { model, loss_history: history })
}

fn check_finite(loss: f64) -> Result<()> {
    if loss.is_finite() {
        Ok(())
    } else {
        Err(Error::Divergence(format!("training loss became {loss}")))
    }
}

/// Equal-sized batches for stateful training (see [`train`]).
fn stateful_batches(z: &[f64], window: usize, batch_size: usize) -> Result<Vec<Dataset>> {
    // non-overlapping windows, each followed by its target
    let windows = (z.len() - 1) / window;
    let streams = batch_size.min(windows);
    if streams == 0 {
        return Err(Error::too_short(format!("{} points cannot fill a window of {window}", z.len())));
    }
    let per_stream = windows / streams;
    Ok((0..per_stream)
        .map(|k| {
            let starts: Vec<usize> = (0..streams).map(|s| (s * per_stream + k) * window).collect();
            Dataset {
                inputs: starts.iter().map(|&a| z[a..a + window].to_vec()).collect(),
                targets: starts.iter().map(|&a| z[a + window]).collect(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deep::CellKind;

    #[test]
    fn deterministic_given_seed() {
        let x: Vec<f64> = (0..60).map(|t| (t as f64 * 0.3).sin()).collect();
        let cfg = RnnConfig::new(CellKind::Gru, 4, 5);
        let tc = TrainConfig { epochs: 5, batch_size: 8, learning_rate: 0.01 };
        let a = train(cfg, &tc, &x).unwrap();
        let b = train(cfg, &tc, &x).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn linear_trend_loss_drops() {
        let x: Vec<f64> = (0..80).map(f64::from).collect();
        let cfg = RnnConfig::new(CellKind::Simple, 4, 3);
        let tc = TrainConfig { epochs: 30, batch_size: 16, learning_rate: 0.01 };
        let r = train(cfg, &tc, &x).unwrap();
        assert!(r.loss_history.last().unwrap() < &r.loss_history[0]);
    }

    #[test]
    fn small_learning_rate_full_batch_is_monotone() {
        let x: Vec<f64> = (0..40).map(|t| (t as f64 * 0.5).cos()).collect();
        let cfg = RnnConfig::new(CellKind::Lstm, 3, 4);
        let tc = TrainConfig { epochs: 10, batch_size: 1000, learning_rate: 1e-4 };
        let h = train(cfg, &tc, &x).unwrap().loss_history;
        for w in h.windows(2) {
            assert!(w[1] <= w[0], "{h:?}");
        }
    }

    #[test]
    fn stateful_streams_are_contiguous() {
        let z: Vec<f64> = (0..23).map(f64::from).collect();
        let batches = stateful_batches(&z, 2, 3).unwrap();
        // 11 windows, 3 streams of 3
        assert_eq!(batches.len(), 3);
        assert_eq!(batches[0].inputs, vec![vec![0.0, 1.0], vec![6.0, 7.0], vec![12.0, 13.0]]);
        assert_eq!(batches[1].inputs[0], vec![2.0, 3.0]);
        assert_eq!(batches[0].targets, vec![2.0, 8.0, 14.0]);
    }

    #[test]
    fn stateful_training_runs() {
        let x: Vec<f64> = (0..100).map(|t| (t as f64 * 0.2).sin()).collect();
        let mut cfg = RnnConfig::new(CellKind::Lstm, 4, 5);
        cfg.stateful = true;
        let tc = TrainConfig { epochs: 20, batch_size: 4, learning_rate: 0.02 };
        let r = train(cfg, &tc, &x).unwrap();
        assert!(r.loss_history.last().unwrap() < &r.loss_history[0]);
        cfg.bidirectional = true;
        assert!(train(cfg, &tc, &x).is_err());
    }

    #[test]
    fn divergence_reported() {
        let x: Vec<f64> = (0..30).map(|t| (t as f64).sin()).collect();
        let mut cfg = RnnConfig::new(CellKind::Simple, 2, 3);
        cfg.activation = crate::deep::Activation::Linear;
        cfg.initializer = crate::deep::Initializer::Uniform { low: 1e200, high: 2e200 };
        let tc = TrainConfig { epochs: 50, batch_size: 4, learning_rate: 0.01 };
        assert!(matches!(train(cfg, &tc, &x), Err(Error::Divergence(_))));
    }
}
