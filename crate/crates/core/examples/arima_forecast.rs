//! Seasonal ARIMA estimated by conditional sum of squares.

use tsforge::arima::{fit, ArimaSpec};
use tsforge::synthetic::simulate_arma;
use tsforge::TimeSeries;

fn main() -> tsforge::Result<()> {
    let noise = simulate_arma(&[0.5], &[0.3], 0.0, 240, 7);
    let values = noise.iter().enumerate().map(|(t, v)| 50.0 + 6.0 * [1.0, -1.0][t % 2] + v).collect();
    let ts = TimeSeries::from_values(values)?;

    let spec = ArimaSpec::new(1, 0, 1).seasonal(0, 1, 1, 2);
    let model = fit(spec, &ts)?;
    println!("{spec}: phi {:.3?} theta {:.3?} Theta {:.3?}", model.phi, model.theta, model.seasonal_theta);
    println!("sigma2 {:.3}, aic {:.2}", model.sigma2, model.aic);
    let f = model.forecast(6)?;
    println!("next 6: {:.2?}", f.values);
    Ok(())
}
