//! Kernel ridge and support vector regression over lag windows.

use tsforge::kernels::{embed, forecast_one_step, forecast_recursive, EmbeddingSpec, KernelSpec, KrrConfig, SvrConfig};
use tsforge::synthetic::sine;

fn main() -> tsforge::Result<()> {
    let x: Vec<f64> = sine(160, 20.0, 5.0).iter().enumerate().map(|(t, v)| v + 0.05 * t as f64).collect();
    let (train, test) = x.split_at(140);
    let spec = EmbeddingSpec::new(6);
    let data = embed(train, &spec)?;

    let krr = KrrConfig::new(1e-3, KernelSpec::Polynomial { degree: 2, coef0: 1.0 }).fit(&data)?;
    let svr = SvrConfig::new(10.0, 0.05, KernelSpec::Rbf { gamma: 0.2 }).fit(&data)?;
    println!("svr: {} support vectors, converged {} after {} iterations", svr.support_count(), svr.converged, svr.iterations);

    let rmse = |p: &[f64]| (p.iter().zip(test).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / p.len() as f64).sqrt();
    println!("krr one-step rmse {:.4}", rmse(&forecast_one_step(&krr, train, test, &spec)?));
    println!("krr recursive rmse {:.4}", rmse(&forecast_recursive(&krr, train, test.len(), &spec)?));
    println!("svr one-step rmse {:.4}", rmse(&forecast_one_step(&svr, train, test, &spec)?));
    Ok(())
}
