//! Unit-root test and correlograms before and after differencing.

use tsforge::diagnostics::{acf, adf_test, default_max_lag, pacf, suggest_orders, LagPolicy};
use tsforge::series::difference;
use tsforge::synthetic::simulate_arma;
use tsforge::TimeSeries;

fn main() -> tsforge::Result<()> {
    // integrated AR(1): stationary only after one difference
    let steps = simulate_arma(&[0.6], &[], 0.0, 300, 1);
    let level: Vec<f64> = steps.iter().scan(0.0, |acc, v| { *acc += v; Some(*acc) }).collect();
    let ts = TimeSeries::from_values(level)?;
    let (diffed, _) = difference(&ts, 1, 0)?;

    for (name, x) in [("level", ts.values()), ("differenced", diffed.values())] {
        let adf = adf_test(x, LagPolicy::default())?;
        println!(
            "{name}: statistic {:.3}, p {:.4}, lags {}, 5% critical {:.3} -> {}",
            adf.statistic, adf.p_value, adf.lags_used, adf.critical_values.five, adf.verdict()
        );
    }
    let lag = default_max_lag(diffed.len()).min(20);
    let (a, p) = (acf(diffed.values(), lag)?, pacf(diffed.values(), lag)?);
    println!("ACF  {:.2?}", &a.values[1..6]);
    println!("PACF {:.2?}", &p.values[1..6]);
    let s = suggest_orders(&a, &p);
    println!("band +/-{:.3}; suggested p = {}, q = {}", a.band, s.p, s.q);
    Ok(())
}
