//! An LSTM and a GRU trained by backpropagation through time.

use tsforge::deep::{train, CellKind, RnnConfig, TrainConfig};
use tsforge::kernels::{forecast_one_step, EmbeddingSpec};
use tsforge::synthetic::sine;

fn main() -> tsforge::Result<()> {
    let x = sine(300, 25.0, 1.0);
    let (tr, te) = x.split_at(250);
    let tc = TrainConfig { epochs: 60, batch_size: 32, learning_rate: 0.01 };
    for cell in [CellKind::Lstm, CellKind::Gru] {
        let cfg = RnnConfig::new(cell, 8, 8);
        let r = train(cfg, &tc, tr)?;
        let p = forecast_one_step(&r.model, tr, te, &EmbeddingSpec::new(8))?;
        let mse = p.iter().zip(te).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / te.len() as f64;
        println!(
            "{}: {} parameters, loss {:.4} -> {:.5}, test mse {mse:.5}",
            cell.name(),
            cfg.n_params(),
            r.loss_history[0],
            r.loss_history.last().unwrap()
        );
    }
    Ok(())
}
