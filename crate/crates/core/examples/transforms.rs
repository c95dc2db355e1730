//! The invertible transforms and their round trips.

use tsforge::series::{
    arcsin_transform, difference, exp_restore, log_transform, sin_restore, undifference, undifference_forecast,
    DEFAULT_ARCSIN_MARGIN,
};
use tsforge::TimeSeries;

fn main() -> tsforge::Result<()> {
    let ts = TimeSeries::from_values(vec![12.0, 15.0, 11.0, 19.0, 22.0, 18.0, 25.0, 29.0])?;

    let (d, state) = difference(&ts, 1, 4)?;
    println!("differenced at lags 1 and 4: {:?}", d.values());
    assert_eq!(undifference(&d, &state)?, ts);
    println!("two zero-change forecasts integrate to {:?}", undifference_forecast(&[0.0, 0.0], &state)?);

    let (z, state) = arcsin_transform(&ts, DEFAULT_ARCSIN_MARGIN)?;
    println!("arcsin: {:.3?}", z.values());
    println!("restored: {:.3?}", sin_restore(&z, &state)?.values());

    let (z, state) = log_transform(&ts)?;
    println!("log1p: {:.3?}", z.values());
    println!("restored: {:.3?}", exp_restore(&z, &state)?.values());
    Ok(())
}
