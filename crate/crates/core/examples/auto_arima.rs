//! Order selection by AIC over a grid of candidate models.

use tsforge::arima::{auto_arima, AutoArimaGrid};
use tsforge::synthetic::simulate_arma;
use tsforge::TimeSeries;

fn main() -> tsforge::Result<()> {
    let ts = TimeSeries::from_values(simulate_arma(&[0.5, -0.3], &[], 2.0, 800, 11))?;
    let grid = AutoArimaGrid::new(3, 2, vec![0, 1]);
    println!("{} candidates", grid.specs()?.len());
    let best = auto_arima(&ts, &grid)?;
    println!("chosen {} with aic {:.2}, phi {:.3?}", best.spec, best.aic, best.phi);
    Ok(())
}
