use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Parser, Subcommand};

use tsforge::pipeline::{self, DiagnoseOptions, Failure};

#[derive(Parser)]
#[command(name = "tsforge", version, about = "Univariate time-series diagnostics and forecasting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Aggregate an event CSV (with a `Date` column) into a series CSV.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        /// Months per interval.
        #[arg(long, default_value_t = 12)]
        step: u32,
        /// First interval start, YYYY-MM-DD.
        #[arg(long)]
        origin: Option<NaiveDate>,
        /// Output file; defaults to <output-dir>/series.csv.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        output_dir: PathBuf,
    },
    /// Unit-root test, correlograms and decomposition.
    Diagnose {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = ".")]
        output_dir: PathBuf,
        /// Decomposition period in steps.
        #[arg(long)]
        period: Option<usize>,
        /// Lag-1 differencing passes before testing.
        #[arg(long, default_value_t = 0)]
        difference: usize,
        /// Correlogram lags.
        #[arg(long)]
        lags: Option<usize>,
        /// Months per interval when the input is an event CSV.
        #[arg(long)]
        step: Option<u32>,
    },
    /// Fit, forecast the test period and score it.
    Run(RunArgs),
    /// Cross-validate every candidate of the model grid.
    Cv(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `[data] input`.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Ingest { input, step, origin, output, output_dir } => {
            let output = output.unwrap_or_else(|| output_dir.join("series.csv"));
            let summary = pipeline::cmd_ingest(&input, step, origin, &output)?;
            println!("{summary}");
        }
        Command::Diagnose { input, output_dir, period, difference, lags, step } => {
            let options = DiagnoseOptions { period, differences: difference, max_lag: lags, step_months: step, origin: None };
            let report = pipeline::cmd_diagnose(&input, &options, &output_dir)?;
            println!(
                "ADF statistic {} p-value {}: {}",
                report["adf"]["statistic"], report["adf"]["pvalue"], report["verdict"].as_str().unwrap_or_default()
            );
        }
        Command::Run(args) => {
            let (cfg, input) = pipeline::load_config(&args.config, args.input, args.seed)?;
            let m = pipeline::cmd_run(&cfg, &input, &args.output_dir)?;
            println!("{} ({}): MAPE {:.4} RMSE {:.4} MAE {:.4}", m.family, m.mode, m.mape, m.rmse, m.mae);
        }
        Command::Cv(args) => {
            let (cfg, input) = pipeline::load_config(&args.config, args.input, args.seed)?;
            let report = pipeline::cmd_cv(&cfg, &input, &args.output_dir)?;
            println!("best candidate {}: {}", report["best"], report["best_model"]);
        }
    }
    Ok(())
}
