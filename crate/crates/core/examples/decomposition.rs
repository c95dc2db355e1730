//! Classical additive decomposition of a seasonal series.

use tsforge::series::decompose;
use tsforge::TimeSeries;

fn main() -> tsforge::Result<()> {
    let values = (0..48).map(|t| 10.0 + 0.2 * t as f64 + [3.0, -1.0, -4.0, 2.0][t % 4]).collect();
    let ts = TimeSeries::from_values(values)?;
    let d = decompose(&ts, 4)?;
    println!("seasonal pattern {:.3?}", &d.seasonal[..4]);
    for t in [0, 2, 20, 45] {
        println!("t={t:>2} x={:>6.2} trend={:?} residual={:?}", ts.values()[t], d.trend[t], d.residual[t]);
    }
    Ok(())
}
