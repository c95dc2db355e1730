use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fit, ArimaSpec, FittedArima};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

const MAX_GRID: usize = 10_000;

/// Order ranges searched by [`auto_arima`]. `p` runs over `0..=max_p`, and
/// likewise for the other orders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutoArimaGrid {
    pub max_p: usize,
    pub max_q: usize,
    pub max_seasonal_p: usize,
    pub max_seasonal_q: usize,
    pub d_range: Vec<usize>,
    pub seasonal_d_range: Vec<usize>,
    pub m: usize,
    /// `None` fits an intercept exactly when no differencing is applied.
    pub with_intercept: Option<bool>,
}

impl AutoArimaGrid {
    /// Non-seasonal grid over `p <= max_p`, `q <= max_q` and the given `d`.
    pub fn new(max_p: usize, max_q: usize, d_range: Vec<usize>) -> Self {
        Self {
            max_p,
            max_q,
            max_seasonal_p: 0,
            max_seasonal_q: 0,
            d_range,
            seasonal_d_range: vec![0],
            m: 1,
            with_intercept: None,
        }
    }

    pub fn seasonal(mut self, max_p: usize, max_q: usize, d_range: Vec<usize>, m: usize) -> Self {
        self.max_seasonal_p = max_p;
        self.max_seasonal_q = max_q;
        self.seasonal_d_range = d_range;
        self.m = m;
        self
    }

    /// Candidate specs in lexicographic `(p, q, P, Q, d, D)` order, skipping
    /// seasonal orders when `m < 2`.
    pub fn specs(&self) -> Result<Vec<ArimaSpec>> {
        if self.d_range.is_empty() || self.seasonal_d_range.is_empty() {
            return Err(Error::invalid("differencing ranges must not be empty"));
        }
        let mut d_range = self.d_range.clone();
        d_range.sort_unstable();
        d_range.dedup();
        let mut sd_range = self.seasonal_d_range.clone();
        sd_range.sort_unstable();
        sd_range.dedup();
        let size = (self.max_p + 1)
            * (self.max_q + 1)
            * (self.max_seasonal_p + 1)
            * (self.max_seasonal_q + 1)
            * d_range.len()
            * sd_range.len();
        if size > MAX_GRID {
            return Err(Error::invalid(format!("grid of {size} models exceeds {MAX_GRID}")));
        }
        let mut specs = Vec::with_capacity(size);
        for p in 0..=self.max_p {
            for q in 0..=self.max_q {
                for sp in 0..=self.max_seasonal_p {
                    for sq in 0..=self.max_seasonal_q {
                        for &d in &d_range {
                            for &sd in &sd_range {
                                let m = if sp + sq + sd > 0 { self.m } else { 1 };
                                let spec = ArimaSpec {
                                    p,
                                    d,
                                    q,
                                    seasonal_p: sp,
                                    seasonal_d: sd,
                                    seasonal_q: sq,
                                    m,
                                    with_intercept: self.with_intercept.unwrap_or(d + sd == 0),
                                };
                                if spec.validate().is_ok() {
                                    specs.push(spec);
                                }
                            }
                        }
                    }
                }
            }
        }
        if specs.is_empty() {
            return Err(Error::invalid("grid contains no valid specification"));
        }
        Ok(specs)
    }
}

/// Fits every model of the grid and returns the one with the lowest AIC.
///
/// Failed fits are skipped. Ties go to the lexicographically smallest
/// `(p, q, P, Q, d, D)`; the result does not depend on the thread count.
pub fn auto_arima(series: &TimeSeries, grid: &AutoArimaGrid) -> Result<FittedArima> {
    let specs = grid.specs()?;
    let fits: Vec<Result<FittedArima>> = specs.par_iter().map(|spec| fit(*spec, series)).collect();
    let mut best: Option<FittedArima> = None;
    let mut last_error = None;
    for fitted in fits {
        match fitted {
            Ok(f) if f.aic.is_finite() => {
                if best.as_ref().map_or(true, |b| f.aic < b.aic) {
                    best = Some(f);
                }
            }
            Ok(f) => last_error = Some(Error::Optimization(format!("{}: AIC is not finite", f.spec))),
            Err(e) => last_error = Some(e),
        }
    }
    best.ok_or_else(|| {
        Error::AllFailed(format!(
            "all {} candidate models failed; last error: {}",
            specs.len(),
            last_error.map_or_else(|| "none".to_string(), |e| e.to_string())
        ))
    })
}
