//! Sectioned `key = value` configuration files.
//!
//! ```text
//! # comment            ; also a comment
//! seed = 7             # keys before the first section are global
//! [data]
//! step_months = 12
//! [model]
//! family = krr
//! lambda = 0.01, 1     # comma-separated values form a grid
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use chrono::NaiveDate;

use crate::arima::{ArimaSpec, AutoArimaGrid};
use crate::deep::{Activation, CellKind, Initializer, RnnConfig, TrainConfig};
use crate::error::{Error, Result};
use crate::kernels::{EmbeddingSpec, KernelSpec};
use crate::series::DEFAULT_ARCSIN_MARGIN;
use crate::validation::CvSpec;

/// Raw sections of an INI file; the global section is named `""`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ini {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl Ini {
    pub fn parse(text: &str) -> Result<Self> {
        let mut ini = Ini::default();
        ini.sections.insert(String::new(), BTreeMap::new());
        let mut current = String::new();
        for (no, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| config_err(no, "unterminated section header"))?
                    .trim()
                    .to_ascii_lowercase();
                if name.is_empty() {
                    return Err(config_err(no, "empty section name"));
                }
                if ini.sections.contains_key(&name) {
                    return Err(config_err(no, &format!("section [{name}] appears twice")));
                }
                ini.sections.insert(name.clone(), BTreeMap::new());
                current = name;
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| config_err(no, "expected key = value"))?;
            let key = key.trim().to_ascii_lowercase();
            if key.is_empty() {
                return Err(config_err(no, "empty key"));
            }
            let section = ini.sections.get_mut(&current).expect("current section exists");
            if section.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(config_err(no, &format!("key '{key}' set twice")));
            }
        }
        Ok(ini)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section).and_then(|s| s.get(key)).map(String::as_str)
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    fn check_keys(&self, allowed: &[(&str, &[&str])]) -> Result<()> {
        for (section, keys) in &self.sections {
            let Some((_, ok)) = allowed.iter().find(|(s, _)| s == section) else {
                return Err(Error::Config(format!("unknown section [{section}]")));
            };
            if let Some(bad) = keys.keys().find(|k| !ok.contains(&k.as_str())) {
                let shown = if section.is_empty() { "global".to_string() } else { format!("[{section}]") };
                return Err(Error::Config(format!("unknown key '{bad}' in {shown} section")));
            }
        }
        Ok(())
    }
}

fn strip_comment(line: &str) -> &str {
    let t = line.trim_start();
    if t.starts_with('#') || t.starts_with(';') {
        return "";
    }
    match line.find(" #").or_else(|| line.find("\t#")) {
        Some(i) => &line[..i],
        None => line,
    }
}

fn config_err(line: usize, msg: &str) -> Error {
    Error::Config(format!("line {}: {msg}", line + 1))
}

fn parse_value<T: FromStr>(section: &str, key: &str, raw: &str) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| Error::Config(format!("[{section}] {key}: cannot parse '{}'", raw.trim())))
}

fn parse_bool(section: &str, key: &str, raw: &str) -> Result<bool> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => Err(Error::Config(format!("[{section}] {key}: expected a boolean, got '{other}'"))),
    }
}

fn split_list(raw: &str) -> Vec<&str> {
    raw.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

/// One step of the transform chain applied before modelling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransformStep {
    /// `d` lag-1 differencing passes.
    Difference { d: usize },
    /// One differencing pass at `lag`.
    SeasonalDifference { lag: usize },
    Arcsin { margin: f64 },
    Log,
    MovingAverage { window: usize },
    Ewma { alpha: f64 },
}

impl TransformStep {
    /// Parses `name` or `name(arg)`.
    pub fn parse(item: &str) -> Result<Self> {
        let item = item.trim();
        let (name, arg) = match item.split_once('(') {
            Some((n, rest)) => {
                let a = rest
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Config(format!("transform '{item}': missing ')'")))?;
                (n.trim(), Some(a.trim()))
            }
            None => (item, None),
        };
        let need = |what: &str| Error::Config(format!("transform '{name}' needs {what}, e.g. {name}(...)"));
        let num = |a: Option<&str>| -> Result<f64> { parse_value("transform", name, a.unwrap_or_default()) };
        Ok(match name.to_ascii_lowercase().as_str() {
            "difference" | "diff" => TransformStep::Difference {
                d: match arg {
                    Some(a) => parse_value("transform", name, a)?,
                    None => 1,
                },
            },
            "seasonal_difference" => {
                TransformStep::SeasonalDifference { lag: parse_value("transform", name, arg.ok_or_else(|| need("a lag"))?)? }
            }
            "arcsin" | "arcsin_minmax" => TransformStep::Arcsin {
                margin: if arg.is_some() { num(arg)? } else { DEFAULT_ARCSIN_MARGIN },
            },
            "log" => TransformStep::Log,
            "moving_average" => TransformStep::MovingAverage {
                window: parse_value("transform", name, arg.ok_or_else(|| need("a window"))?)?,
            },
            "ewma" => TransformStep::Ewma { alpha: num(Some(arg.ok_or_else(|| need("an alpha"))?))? },
            other => return Err(Error::Config(format!("unknown transform '{other}'"))),
        })
    }

    pub fn is_differencing(&self) -> bool {
        matches!(self, TransformStep::Difference { .. } | TransformStep::SeasonalDifference { .. })
    }

    pub fn is_invertible(&self) -> bool {
        !matches!(self, TransformStep::MovingAverage { .. } | TransformStep::Ewma { .. })
    }
}

/// How test-period predictions are produced by window-based models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictMode {
    /// Every prediction sees observed values only.
    OneStep,
    /// Predictions are fed back into the window.
    Recursive,
}

impl PredictMode {
    pub fn name(&self) -> &'static str {
        match self {
            PredictMode::OneStep => "one_step",
            PredictMode::Recursive => "recursive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelConfig {
    Arima(ArimaSpec),
    AutoArima(AutoArimaGrid),
    Krr {
        embedding: EmbeddingSpec,
        lambdas: Vec<f64>,
        kernels: Vec<KernelSpec>,
        mode: PredictMode,
    },
    Svr {
        embedding: EmbeddingSpec,
        cs: Vec<f64>,
        epsilons: Vec<f64>,
        kernels: Vec<KernelSpec>,
        tol: f64,
        max_iter: usize,
        mode: PredictMode,
    },
    Rnn {
        configs: Vec<RnnConfig>,
        train: TrainConfig,
        mode: PredictMode,
    },
}

impl ModelConfig {
    pub fn family(&self) -> &'static str {
        match self {
            ModelConfig::Arima(_) => "arima",
            ModelConfig::AutoArima(_) => "auto_arima",
            ModelConfig::Krr { .. } => "krr",
            ModelConfig::Svr { .. } => "svr",
            ModelConfig::Rnn { configs, .. } => match (configs[0].cell, configs[0].bidirectional) {
                (CellKind::Lstm, true) => "bilstm",
                (CellKind::Lstm, false) => "lstm",
                (CellKind::Gru, _) => "gru",
                (CellKind::Simple, _) => "rnn",
            },
        }
    }

    pub fn is_arima(&self) -> bool {
        matches!(self, ModelConfig::Arima(_) | ModelConfig::AutoArima(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataConfig {
    pub input: Option<PathBuf>,
    pub step_months: u32,
    pub origin: Option<NaiveDate>,
    pub test_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub seed: u64,
    pub data: DataConfig,
    pub transforms: Vec<TransformStep>,
    pub model: ModelConfig,
    pub cv: Option<CvSpec>,
    pub group_size: Option<usize>,
}

const DEFAULT_LAMBDAS: [f64; 4] = [1e-4, 1e-2, 1.0, 10.0];
const DEFAULT_CS: [f64; 4] = [0.1, 1.0, 10.0, 100.0];
const DEFAULT_EPSILONS: [f64; 4] = [0.01, 0.05, 0.1, 0.5];
const DEFAULT_GAMMAS: [f64; 4] = [0.01, 0.1, 1.0, 10.0];

const MODEL_KEYS: &[&str] = &[
    "family", "p", "d", "q", "sp", "sd", "sq", "m", "intercept", "max_p", "max_q", "max_sp", "max_sq", "d_range",
    "sd_range", "window", "time_index", "lambda", "kernel", "gamma", "coef0", "c", "epsilon", "tol", "max_iter",
    "mode", "hidden", "epochs", "batch_size", "learning_rate", "activation", "stateful", "bidirectional",
    "initializer", "init_low", "init_high", "init_std", "forget_bias",
];

impl PipelineConfig {
    pub fn from_file(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let ini = Ini::parse(text)?;
        ini.check_keys(&[
            ("", &["seed"]),
            ("data", &["input", "step_months", "origin", "test_fraction"]),
            ("transform", &["chain"]),
            ("model", MODEL_KEYS),
            ("cv", &["n_splits", "gap"]),
            ("metrics", &["group_size"]),
        ])?;
        let get = |s: &str, k: &str| ini.get(s, k);
        let num = |s: &str, k: &str, default: f64| -> Result<f64> {
            get(s, k).map_or(Ok(default), |v| parse_value(s, k, v))
        };
        let int = |s: &str, k: &str, default: usize| -> Result<usize> {
            get(s, k).map_or(Ok(default), |v| parse_value(s, k, v))
        };

        let seed = get("", "seed").map_or(Ok(0), |v| parse_value("global", "seed", v))?;
        let step_months: u32 = get("data", "step_months").map_or(Ok(12), |v| parse_value("data", "step_months", v))?;
        if step_months == 0 {
            return Err(Error::Config("[data] step_months must be at least 1".into()));
        }
        let origin = get("data", "origin")
            .map(|v| {
                NaiveDate::parse_from_str(v, "%Y-%m-%d")
                    .map_err(|_| Error::Config(format!("[data] origin: expected YYYY-MM-DD, got '{v}'")))
            })
            .transpose()?;
        let test_fraction = num("data", "test_fraction", 0.2)?;
        if !(test_fraction > 0.0 && test_fraction < 1.0) {
            return Err(Error::Config(format!("[data] test_fraction {test_fraction} must lie in (0, 1)")));
        }
        let data = DataConfig { input: get("data", "input").map(PathBuf::from), step_months, origin, test_fraction };

        let transforms = get("transform", "chain")
            .map(|chain| split_chain(chain).into_iter().map(TransformStep::parse).collect::<Result<Vec<_>>>())
            .transpose()?
            .unwrap_or_default();
        let count = |f: fn(&TransformStep) -> bool| transforms.iter().filter(|t| f(t)).count();
        if count(|t| matches!(t, TransformStep::Arcsin { .. })) > 1 || count(|t| matches!(t, TransformStep::Log)) > 1 {
            return Err(Error::Config("the transform chain may contain at most one arcsin and one log".into()));
        }

        let family = get("model", "family").ok_or_else(|| Error::Config("[model] family is required".into()))?;
        let default_m = ((12.0 / step_months as f64).round() as usize).max(1);
        let mode = match get("model", "mode").unwrap_or("one_step") {
            "one_step" => PredictMode::OneStep,
            "recursive" => PredictMode::Recursive,
            other => return Err(Error::Config(format!("[model] mode must be one_step or recursive, got '{other}'"))),
        };
        let embedding = || -> Result<EmbeddingSpec> {
            let window = int("model", "window", 4)?;
            if window == 0 {
                return Err(Error::Config("[model] window must be at least 1".into()));
            }
            let time_index = get("model", "time_index").map_or(Ok(false), |v| parse_bool("model", "time_index", v))?;
            Ok(EmbeddingSpec { window, time_index })
        };
        let list = |k: &str, default: &[f64]| -> Result<Vec<f64>> {
            match get("model", k) {
                Some(v) => {
                    let items = split_list(v);
                    if items.is_empty() {
                        return Err(Error::Config(format!("[model] {k} is empty")));
                    }
                    items.iter().map(|s| parse_value("model", k, s)).collect()
                }
                None => Ok(default.to_vec()),
            }
        };
        let usize_list = |k: &str, default: &[usize]| -> Result<Vec<usize>> {
            match get("model", k) {
                Some(v) => split_list(v).iter().map(|s| parse_value("model", k, s)).collect(),
                None => Ok(default.to_vec()),
            }
        };
        let kernels = || -> Result<Vec<KernelSpec>> {
            let gammas = list("gamma", &DEFAULT_GAMMAS)?;
            let coef0 = num("model", "coef0", 1.0)?;
            let names = get("model", "kernel").map_or_else(|| vec!["rbf", "poly2", "poly3", "linear"], split_list);
            let mut out = Vec::new();
            for name in names {
                match name.to_ascii_lowercase().as_str() {
                    "rbf" => out.extend(gammas.iter().map(|&gamma| KernelSpec::Rbf { gamma })),
                    "linear" => out.push(KernelSpec::Linear),
                    poly if poly.starts_with("poly") => {
                        let degree = parse_value("model", "kernel", &poly[4..])?;
                        out.push(KernelSpec::Polynomial { degree, coef0 });
                    }
                    other => return Err(Error::Config(format!("[model] unknown kernel '{other}'"))),
                }
            }
            for k in &out {
                k.validate().map_err(|e| Error::Config(e.to_string()))?;
            }
            Ok(out)
        };
        let intercept = |default: Option<bool>| -> Result<Option<bool>> {
            match get("model", "intercept") {
                None | Some("auto") => Ok(default),
                Some(v) => parse_bool("model", "intercept", v).map(Some),
            }
        };

        let model = match family {
            "arima" => {
                let spec = ArimaSpec {
                    p: int("model", "p", 1)?,
                    d: int("model", "d", 0)?,
                    q: int("model", "q", 0)?,
                    seasonal_p: int("model", "sp", 0)?,
                    seasonal_d: int("model", "sd", 0)?,
                    seasonal_q: int("model", "sq", 0)?,
                    m: int("model", "m", default_m)?,
                    with_intercept: false,
                };
                let with_intercept = intercept(None)?.unwrap_or(spec.d + spec.seasonal_d == 0);
                let spec = ArimaSpec { with_intercept, ..spec };
                spec.validate().map_err(|e| Error::Config(format!("[model] {e}")))?;
                ModelConfig::Arima(spec)
            }
            "auto_arima" => {
                let grid = AutoArimaGrid {
                    max_p: int("model", "max_p", 2)?,
                    max_q: int("model", "max_q", 2)?,
                    max_seasonal_p: int("model", "max_sp", 0)?,
                    max_seasonal_q: int("model", "max_sq", 0)?,
                    d_range: usize_list("d_range", &[0, 1])?,
                    seasonal_d_range: usize_list("sd_range", &[0])?,
                    m: int("model", "m", default_m)?,
                    with_intercept: intercept(None)?,
                };
                grid.specs().map_err(|e| Error::Config(format!("[model] {e}")))?;
                ModelConfig::AutoArima(grid)
            }
            "krr" => ModelConfig::Krr {
                embedding: embedding()?,
                lambdas: list("lambda", &DEFAULT_LAMBDAS)?,
                kernels: kernels()?,
                mode,
            },
            "svr" => ModelConfig::Svr {
                embedding: embedding()?,
                cs: list("c", &DEFAULT_CS)?,
                epsilons: list("epsilon", &DEFAULT_EPSILONS)?,
                kernels: kernels()?,
                tol: num("model", "tol", 1e-3)?,
                max_iter: int("model", "max_iter", 1_000_000)?,
                mode,
            },
            "rnn" | "lstm" | "bilstm" | "gru" => {
                let cell = match family {
                    "rnn" => CellKind::Simple,
                    "gru" => CellKind::Gru,
                    _ => CellKind::Lstm,
                };
                let bidirectional = family == "bilstm"
                    || get("model", "bidirectional").map_or(Ok(false), |v| parse_bool("model", "bidirectional", v))?;
                let initializer = match get("model", "initializer").unwrap_or("uniform") {
                    "uniform" => Initializer::Uniform {
                        low: num("model", "init_low", -0.5)?,
                        high: num("model", "init_high", 0.5)?,
                    },
                    "normal" => Initializer::Normal { mean: 0.0, std: num("model", "init_std", 0.1)? },
                    "truncated_normal" => Initializer::TruncatedNormal { mean: 0.0, std: num("model", "init_std", 0.1)? },
                    other => return Err(Error::Config(format!("[model] unknown initializer '{other}'"))),
                };
                let activation = Activation::parse(get("model", "activation").unwrap_or("tanh"))
                    .map_err(|e| Error::Config(format!("[model] {e}")))?;
                let stateful = get("model", "stateful").map_or(Ok(false), |v| parse_bool("model", "stateful", v))?;
                let forget_bias = num("model", "forget_bias", 1.0)?;
                let mut configs = Vec::new();
                for window in usize_list("window", &[4])? {
                    for hidden in usize_list("hidden", &[8])? {
                        let cfg = RnnConfig {
                            cell,
                            hidden,
                            window,
                            bidirectional,
                            stateful,
                            activation,
                            initializer,
                            forget_bias,
                            seed,
                        };
                        cfg.validate().map_err(|e| Error::Config(format!("[model] {e}")))?;
                        configs.push(cfg);
                    }
                }
                if configs.is_empty() {
                    return Err(Error::Config("[model] window and hidden must not be empty".into()));
                }
                let train = TrainConfig {
                    learning_rate: num("model", "learning_rate", 0.01)?,
                    epochs: int("model", "epochs", 100)?,
                    batch_size: int("model", "batch_size", 16)?,
                };
                if train.epochs == 0 || train.batch_size == 0 || !(train.learning_rate > 0.0) {
                    return Err(Error::Config("[model] epochs, batch_size and learning_rate must be positive".into()));
                }
                ModelConfig::Rnn { configs, train, mode }
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown model family '{other}' (expected arima, auto_arima, krr, svr, rnn, lstm, bilstm or gru)"
                )))
            }
        };
        if let ModelConfig::Krr { lambdas, .. } = &model {
            if lambdas.iter().any(|l| !(*l >= 0.0)) {
                return Err(Error::Config("[model] lambda must be non-negative".into()));
            }
        }
        if let ModelConfig::Svr { cs, epsilons, tol, .. } = &model {
            if cs.iter().any(|c| !(*c > 0.0)) || epsilons.iter().any(|e| !(*e >= 0.0)) || !(*tol > 0.0) {
                return Err(Error::Config("[model] C and tol must be positive, epsilon non-negative".into()));
            }
        }
        if model.is_arima() {
            if transforms.iter().any(TransformStep::is_differencing) {
                return Err(Error::Config(
                    "differencing belongs in the ARIMA orders (d, sd), not in the transform chain".into(),
                ));
            }
        }

        let cv = if ini.has_section("cv") {
            let spec = CvSpec { n_splits: int("cv", "n_splits", 3)?, gap: int("cv", "gap", 0)? };
            if spec.n_splits == 0 {
                return Err(Error::Config("[cv] n_splits must be at least 1".into()));
            }
            Some(spec)
        } else {
            None
        };
        let group_size = get("metrics", "group_size").map(|v| parse_value("metrics", "group_size", v)).transpose()?;
        if group_size == Some(0) {
            return Err(Error::Config("[metrics] group_size must be at least 1".into()));
        }
        Ok(Self { seed, data, transforms, model, cv, group_size })
    }

    /// Replaces the seed everywhere it is used.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        if let ModelConfig::Rnn { configs, .. } = &mut self.model {
            for c in configs {
                c.seed = seed;
            }
        }
        self
    }
}

/// Splits a chain on commas that are not inside parentheses.
fn split_chain(chain: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in chain.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(chain[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(chain[start..].trim());
    out.into_iter().filter(|s| !s.is_empty()).collect()
}
