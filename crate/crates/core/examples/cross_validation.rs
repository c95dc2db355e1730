//! Expanding-window cross-validation over a small hyperparameter grid.

use tsforge::kernels::{embed, forecast_one_step, EmbeddingSpec, KernelSpec, KrrConfig};
use tsforge::synthetic::simulate_arma;
use tsforge::validation::{expanding_splits, grid_search, mse, CvSpec};

fn main() -> tsforge::Result<()> {
    let x = simulate_arma(&[0.7], &[], 0.0, 200, 3);
    let cv = CvSpec::new(4, 2);
    for fold in expanding_splits(x.len(), cv)? {
        println!("train {:?} test {:?}", fold.train, fold.test);
    }

    let spec = EmbeddingSpec::new(3);
    let grid: Vec<KrrConfig> = [1e-3, 1e-1, 10.0]
        .iter()
        .flat_map(|&l| [KernelSpec::Linear, KernelSpec::Rbf { gamma: 0.5 }].map(|k| KrrConfig::new(l, k)))
        .collect();
    let result = grid_search(&grid, cv, x.len(), |cfg, fold| {
        let model = cfg.fit(&embed(&x[fold.train.clone()], &spec)?)?;
        let pred = forecast_one_step(&model, &x[..fold.test.start], &x[fold.test.clone()], &spec)?;
        mse(&x[fold.test.clone()], &pred)
    })?;
    for s in &result.scores {
        println!("{:>4} {:<16} mean mse {:?}", grid[s.index].lambda, grid[s.index].kernel.to_string(), s.mean);
    }
    println!("best: {:?}", grid[result.best]);
    Ok(())
}
