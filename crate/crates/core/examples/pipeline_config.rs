//! The whole pipeline driven by a configuration file, as the CLI runs it.

use tsforge::pipeline::{cmd_run, PipelineConfig};
use tsforge::series::io;
use tsforge::synthetic::simulate_arma;
use tsforge::TimeSeries;

const CONFIG: &str = "
seed = 42
[data]
step_months = 6
test_fraction = 0.2
[transform]
chain = arcsin, difference
[model]
family = svr
window = 4
kernel = rbf, poly2
gamma = 0.1, 1
c = 1, 10
epsilon = 0.05
[cv]
n_splits = 3
[metrics]
group_size = 2
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("tsforge-pipeline-example");
    std::fs::create_dir_all(&dir)?;
    let values = simulate_arma(&[0.6], &[], 0.0, 120, 9).iter().map(|v| 25.0 + 3.0 * v).collect();
    let ts = TimeSeries::new(chrono::NaiveDate::from_ymd_opt(1950, 1, 1).unwrap(), 6, values)?;
    let input = dir.join("series.csv");
    io::write_series_file(&ts, &input)?;

    let cfg = PipelineConfig::parse(CONFIG)?;
    let metrics = cmd_run(&cfg, &input, &dir)?;
    println!("{}", serde_json::to_string_pretty(&metrics)?);
    println!("outputs in {}", dir.display());
    Ok(())
}
