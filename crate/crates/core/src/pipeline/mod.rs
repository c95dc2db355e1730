//! End-to-end commands behind the `tsforge` binary.
//!
//! Every command returns a [`Failure`] carrying the process exit code:
//! 2 for unreadable or malformed input, 3 when the data cannot support the
//! requested analysis, 4 when a model fails, 5 for configuration errors and
//! 1 for output I/O errors.

mod chain;
pub mod config;
mod models;

pub use chain::FittedChain;
pub use config::{DataConfig, Ini, ModelConfig, PipelineConfig, PredictMode, TransformStep};
pub use models::{candidates, Candidate, FittedModel};

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arima::auto_arima;
use crate::diagnostics::{acf, adf_test, default_max_lag, pacf, suggest_orders, LagPolicy};
use crate::error::Error;
use crate::series::{
    aggregate_events, decompose, difference, io, train_test_split, SplitSpec, TimeSeries,
};
use crate::validation::{self, CvSpec, GridResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    Output,
    Input,
    Diagnostic,
    Model,
    Config,
}

impl FailureKind {
    pub fn exit_code(self) -> i32 {
        match self {
            FailureKind::Output => 1,
            FailureKind::Input => 2,
            FailureKind::Diagnostic => 3,
            FailureKind::Model => 4,
            FailureKind::Config => 5,
        }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub kind: FailureKind,
    pub error: Error,
}

impl Failure {
    /// Configuration errors keep their kind wherever they surface.
    fn new(kind: FailureKind, error: Error) -> Self {
        let kind = if matches!(error, Error::Config(_)) { FailureKind::Config } else { kind };
        Self { kind, error }
    }

    pub fn exit_code(&self) -> i32 {
        self.kind.exit_code()
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.error)
    }
}

impl std::error::Error for Failure {}

pub type Outcome<T> = std::result::Result<T, Failure>;

trait Stage<T> {
    fn at(self, kind: FailureKind) -> Outcome<T>;
}

impl<T, E: Into<Error>> Stage<T> for std::result::Result<T, E> {
    fn at(self, kind: FailureKind) -> Outcome<T> {
        self.map_err(|e| Failure::new(kind, e.into()))
    }
}

/// Reads a series CSV, or aggregates an event CSV (one with a `Date`
/// column) at the given step.
pub fn load_series(path: &Path, step_months: u32, origin: Option<NaiveDate>) -> Outcome<TimeSeries> {
    let mut rdr = csv::Reader::from_path(path).at(FailureKind::Input)?;
    let is_events = rdr.headers().at(FailureKind::Input)?.iter().any(|h| h.trim() == "Date");
    if is_events {
        let events = io::read_events_file(path).at(FailureKind::Input)?;
        aggregate_events(&events, step_months, origin).at(FailureKind::Input)
    } else {
        io::read_series_file(path).at(FailureKind::Input)
    }
}

fn create(path: &Path) -> Outcome<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::new(FailureKind::Output, Error::invalid(format!("cannot create {}: {e}", path.display()))))
}

fn write_json(path: &Path, value: &impl Serialize) -> Outcome<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).at(FailureKind::Output)?;
    writeln!(w).at(FailureKind::Output)?;
    w.flush().at(FailureKind::Output)
}

fn ensure_dir(dir: &Path) -> Outcome<()> {
    std::fs::create_dir_all(dir).at(FailureKind::Output)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IngestSummary {
    pub n: usize,
    pub sum: f64,
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl fmt::Display for IngestSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} sum={} span={}..{}", self.n, self.sum, self.start, self.end)
    }
}

/// Aggregates an event CSV into a series CSV written to `output`.
pub fn cmd_ingest(input: &Path, step_months: u32, origin: Option<NaiveDate>, output: &Path) -> Outcome<IngestSummary> {
    let events = io::read_events_file(input).at(FailureKind::Input)?;
    let ts = aggregate_events(&events, step_months, origin).at(FailureKind::Input)?;
    if let Some(dir) = output.parent().filter(|d| !d.as_os_str().is_empty()) {
        ensure_dir(dir)?;
    }
    io::write_series(&ts, create(output)?).at(FailureKind::Output)?;
    Ok(IngestSummary { n: ts.len(), sum: ts.values().iter().sum(), start: ts.start(), end: ts.end() })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiagnoseOptions {
    /// Decomposition period; defaults to the number of steps per year (at least 2).
    pub period: Option<usize>,
    /// Lag-1 differencing passes applied before testing.
    pub differences: usize,
    pub max_lag: Option<usize>,
    /// Step used when the input is an event CSV.
    pub step_months: Option<u32>,
    pub origin: Option<NaiveDate>,
}

/// Unit-root test, correlograms and decomposition of a series.
///
/// Writes `diagnose.json`; when the decomposition fits, also
/// `trend.csv`, `seasonal.csv` and `residual.csv`.
pub fn cmd_diagnose(input: &Path, options: &DiagnoseOptions, output_dir: &Path) -> Outcome<Value> {
    let ts = load_series(input, options.step_months.unwrap_or(12), options.origin)?;
    let ts = if options.differences > 0 {
        difference(&ts, options.differences, 0).at(FailureKind::Diagnostic)?.0
    } else {
        ts
    };
    let x = ts.values();
    let adf = adf_test(x, LagPolicy::default()).at(FailureKind::Diagnostic)?;
    let n = x.len();
    let lag = options.max_lag.unwrap_or_else(|| default_max_lag(n)).min((n - 1) / 2);
    let a = acf(x, lag).at(FailureKind::Diagnostic)?;
    let p = pacf(x, lag).at(FailureKind::Diagnostic)?;
    let orders = suggest_orders(&a, &p);

    ensure_dir(output_dir)?;
    let period = options.period.unwrap_or_else(|| ((12.0 / ts.step_months() as f64).round() as usize).max(2));
    let decomposition = match decompose(&ts, period) {
        Ok(d) => {
            for (name, values) in [
                ("trend", d.trend.clone()),
                ("seasonal", d.seasonal.iter().map(|v| Some(*v)).collect()),
                ("residual", d.residual.clone()),
            ] {
                let w = create(&output_dir.join(format!("{name}.csv")))?;
                io::write_optional_series(&ts, &values, w).at(FailureKind::Output)?;
            }
            json!({ "period": period, "files": ["trend.csv", "seasonal.csv", "residual.csv"] })
        }
        Err(e) if options.period.is_some() => return Err(Failure::new(FailureKind::Diagnostic, e)),
        Err(_) => Value::Null,
    };

    let report = json!({
        "n": n,
        "differences": options.differences,
        "adf": adf,
        "verdict": adf.verdict(),
        "conclusion": adf.conclusion(),
        "max_lag": lag,
        "band": a.band,
        "acf": a.values,
        "pacf": p.values,
        "suggested_orders": orders,
        "decomposition": decomposition,
    });
    write_json(&output_dir.join("diagnose.json"), &report)?;
    Ok(report)
}

/// Loads and parses a config, applying command-line overrides.
pub fn load_config(path: &Path, input: Option<PathBuf>, seed: Option<u64>) -> Outcome<(PipelineConfig, PathBuf)> {
    let mut cfg = PipelineConfig::from_file(path).at(FailureKind::Config)?;
    if let Some(seed) = seed {
        cfg = cfg.with_seed(seed);
    }
    let input = input.or_else(|| {
        // relative inputs in a config file resolve against the file's directory
        cfg.data.input.as_ref().map(|p| match path.parent() {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.clone(),
        })
    });
    let input = input.ok_or_else(|| {
        Failure::new(FailureKind::Config, Error::Config("no input: pass --input or set [data] input".into()))
    })?;
    Ok((cfg, input))
}

struct Prepared {
    ts: TimeSeries,
    n_train: usize,
    chain: FittedChain,
    candidates: Vec<Candidate>,
    mode: PredictMode,
}

fn prepare(cfg: &PipelineConfig, input: &Path) -> Outcome<Prepared> {
    let ts = load_series(input, cfg.data.step_months, cfg.data.origin)?;
    let (train, _) = train_test_split(&ts, SplitSpec { test_fraction: cfg.data.test_fraction })
        .at(FailureKind::Diagnostic)?;
    let n_train = train.len();
    let chain = FittedChain::fit(&cfg.transforms, ts.values(), n_train).at(FailureKind::Diagnostic)?;
    let candidates = candidates(&cfg.model).at(FailureKind::Config)?;
    let mode = match &cfg.model {
        ModelConfig::Krr { mode, .. } | ModelConfig::Svr { mode, .. } | ModelConfig::Rnn { mode, .. } => *mode,
        _ => PredictMode::Recursive,
    };
    Ok(Prepared { ts, n_train, chain, candidates, mode })
}

fn search(p: &Prepared, cv: CvSpec) -> Outcome<GridResult> {
    let z = p.chain.model_train();
    validation::grid_search(&p.candidates, cv, z.len(), |cand, fold| {
        let pred = cand.holdout(z, fold.train.end, fold.test.clone(), p.mode)?;
        validation::mse(&z[fold.test.clone()], &pred)
    })
    .at(FailureKind::Model)
}

fn grid_report(p: &Prepared, grid: &GridResult, cv: CvSpec) -> Value {
    json!({
        "score": "mse",
        "units": "transformed",
        "mode": p.mode.name(),
        "n_splits": cv.n_splits,
        "gap": cv.gap,
        "folds": grid.folds.iter().map(|f| json!({ "train": [f.train.start, f.train.end], "test": [f.test.start, f.test.end] })).collect::<Vec<_>>(),
        "candidates": grid.scores.iter().map(|s| json!({
            "index": s.index,
            "model": p.candidates[s.index].describe(),
            "fold_scores": s.fold_scores,
            "mean": s.mean,
            "error": s.error,
        })).collect::<Vec<_>>(),
        "best": grid.best,
        "best_model": p.candidates[grid.best].describe(),
    })
}

/// Expanding-window cross-validation of every candidate on the training
/// part; writes `cv.json`.
pub fn cmd_cv(cfg: &PipelineConfig, input: &Path, output_dir: &Path) -> Outcome<Value> {
    let p = prepare(cfg, input)?;
    let cv = cfg.cv.unwrap_or(CvSpec::new(3, 0));
    let grid = search(&p, cv)?;
    let report = grid_report(&p, &grid, cv);
    ensure_dir(output_dir)?;
    write_json(&output_dir.join("cv.json"), &report)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetrics {
    pub family: String,
    pub mode: String,
    pub n_train: usize,
    pub n_test: usize,
    pub mape: f64,
    pub mape_excluded: usize,
    pub grouped_mape: Option<f64>,
    pub group_size: Option<usize>,
    pub mse: f64,
    pub rmse: f64,
    pub mae: f64,
    pub model: Value,
    pub selection: Value,
}

/// Split, transform, fit (selecting by cross-validation when the model
/// section defines a grid), forecast the test period and score it in
/// original units.
///
/// Writes `fit.csv`, `forecast.csv`, `metrics.json` and `model.json`, plus
/// `loss.csv` for recurrent models and `cv.json` when a grid was searched.
pub fn cmd_run(cfg: &PipelineConfig, input: &Path, output_dir: &Path) -> Outcome<RunMetrics> {
    let p = prepare(cfg, input)?;
    let z = p.chain.model_train();
    ensure_dir(output_dir)?;

    let (fitted, chosen, selection) = if let ModelConfig::AutoArima(grid) = &cfg.model {
        let model = auto_arima(&TimeSeries::from_values(z.to_vec()).at(FailureKind::Model)?, grid)
            .at(FailureKind::Model)?;
        let chosen = Candidate::Arima(model.spec);
        let selection = json!({ "method": "aic", "candidates": p.candidates.len(), "aic": model.aic });
        (FittedModel::Arima(model), chosen, selection)
    } else if p.candidates.len() > 1 {
        let cv = cfg.cv.unwrap_or(CvSpec::new(3, 0));
        let grid = search(&p, cv)?;
        write_json(&output_dir.join("cv.json"), &grid_report(&p, &grid, cv))?;
        let chosen = p.candidates[grid.best].clone();
        let selection = json!({ "method": "cv", "candidates": p.candidates.len(), "mean_mse": grid.best_score().mean });
        (chosen.fit(z).at(FailureKind::Model)?, chosen, selection)
    } else {
        let chosen = p.candidates[0].clone();
        (chosen.fit(z).at(FailureKind::Model)?, chosen, json!({ "method": "fixed" }))
    };

    // test period
    let n = p.ts.len();
    let n_test = n - p.n_train;
    let zt = p.chain.model_test();
    let predicted = match p.mode {
        PredictMode::OneStep if !fitted.is_arima() => {
            let pred = fitted.one_step(z, zt).at(FailureKind::Model)?;
            let positions: Vec<usize> = (z.len()..z.len() + zt.len()).collect();
            p.chain.invert_at(&positions, &pred).at(FailureKind::Model)?
        }
        _ => {
            let pred = fitted.forecast(z, n_test).at(FailureKind::Model)?;
            p.chain.invert_forecast(&pred).at(FailureKind::Model)?
        }
    };
    if predicted.iter().any(|v| !v.is_finite()) {
        return Err(Failure::new(FailureKind::Model, Error::Optimization("non-finite forecast".into())));
    }
    let actual = &p.ts.values()[p.n_train..];

    // in-sample
    let in_sample = fitted.fitted(z).at(FailureKind::Model)?;
    let positions: Vec<usize> = (0..z.len()).filter(|&i| in_sample[i].is_some()).collect();
    let values: Vec<f64> = positions.iter().map(|&i| in_sample[i].expect("filtered")).collect();
    let restored = p.chain.invert_at(&positions, &values).at(FailureKind::Model)?;
    let mut fit_col = vec![None; p.n_train];
    for (&i, v) in positions.iter().zip(restored) {
        fit_col[i + p.chain.offset()] = Some(v);
    }

    let mut w = csv::Writer::from_writer(create(&output_dir.join("fit.csv"))?);
    w.write_record(["timestamp", "actual", "fitted"]).at(FailureKind::Output)?;
    for (i, f) in fit_col.iter().enumerate() {
        let cell = f.map(|v| v.to_string()).unwrap_or_default();
        w.write_record([stamp(&p.ts, i), p.ts.values()[i].to_string(), cell]).at(FailureKind::Output)?;
    }
    w.flush().at(FailureKind::Output)?;

    let mut w = csv::Writer::from_writer(create(&output_dir.join("forecast.csv"))?);
    w.write_record(["timestamp", "actual", "predicted"]).at(FailureKind::Output)?;
    for (k, (a, f)) in actual.iter().zip(&predicted).enumerate() {
        w.write_record([stamp(&p.ts, p.n_train + k), a.to_string(), f.to_string()]).at(FailureKind::Output)?;
    }
    w.flush().at(FailureKind::Output)?;

    std::fs::write(output_dir.join("model.json"), fitted.to_json().at(FailureKind::Output)? + "\n")
        .at(FailureKind::Output)?;
    if let FittedModel::Rnn(t) = &fitted {
        let mut w = csv::Writer::from_writer(create(&output_dir.join("loss.csv"))?);
        w.write_record(["epoch", "loss"]).at(FailureKind::Output)?;
        for (e, l) in t.loss_history.iter().enumerate() {
            w.write_record([(e + 1).to_string(), l.to_string()]).at(FailureKind::Output)?;
        }
        w.flush().at(FailureKind::Output)?;
    }

    let mape = validation::mape(actual, &predicted).at(FailureKind::Diagnostic)?;
    let grouped = cfg
        .group_size
        .map(|g| validation::grouped_mape(actual, &predicted, g))
        .transpose()
        .at(FailureKind::Diagnostic)?;
    let metrics = RunMetrics {
        family: cfg.model.family().to_string(),
        mode: p.mode.name().to_string(),
        n_train: p.n_train,
        n_test,
        mape: mape.value,
        mape_excluded: mape.excluded,
        grouped_mape: grouped.map(|g| g.value),
        group_size: cfg.group_size,
        mse: validation::mse(actual, &predicted).at(FailureKind::Model)?,
        rmse: validation::rmse(actual, &predicted).at(FailureKind::Model)?,
        mae: validation::mae(actual, &predicted).at(FailureKind::Model)?,
        model: chosen.describe(),
        selection,
    };
    write_json(&output_dir.join("metrics.json"), &metrics)?;
    Ok(metrics)
}

fn stamp(ts: &TimeSeries, i: usize) -> String {
    ts.timestamp(i).format("%Y-%m-%d").to_string()
}
