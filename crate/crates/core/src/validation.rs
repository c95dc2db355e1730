//! Expanding-window cross-validation, forecast metrics and a generic grid
//! search driver.

use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CvSpec {
    pub n_splits: usize,
    pub gap: usize,
}

impl CvSpec {
    pub fn new(n_splits: usize, gap: usize) -> Self {
        Self { n_splits, gap }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Range<usize>,
    pub test: Range<usize>,
}

/// Expanding-window folds over `n` points.
///
/// With `t = n / (n_splits + 1)`, fold `i` trains on `[0, i t)` and tests on
/// `[i t + gap, i t + gap + t)`. Folds whose test window would run past `n`
/// are dropped, so every test window has length `t`.
pub fn expanding_splits(n: usize, spec: CvSpec) -> Result<Vec<Fold>> {
    if spec.n_splits == 0 {
        return Err(Error::invalid("n_splits must be at least 1"));
    }
    let test_size = n / (spec.n_splits + 1);
    if test_size == 0 {
        return Err(Error::too_short(format!("{n} points cannot hold {} splits", spec.n_splits)));
    }
    if n < spec.gap + 2 * test_size {
        return Err(Error::too_short(format!(
            "{n} points cannot hold a gap of {} between folds of {test_size}",
            spec.gap
        )));
    }
    Ok((1..=spec.n_splits)
        .map(|i| {
            let end = i * test_size;
            let start = end + spec.gap;
            Fold { train: 0..end, test: start..start + test_size }
        })
        .filter(|f| f.test.end <= n)
        .collect())
}

/// Mean absolute percentage error with the number of excluded zero targets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mape {
    pub value: f64,
    pub excluded: usize,
}

fn check_pair(y: &[f64], yhat: &[f64]) -> Result<()> {
    if y.len() != yhat.len() {
        return Err(Error::Shape(format!("{} actuals but {} predictions", y.len(), yhat.len())));
    }
    if y.is_empty() {
        return Err(Error::invalid("metrics need at least one point"));
    }
    Ok(())
}

/// `100 mean(|y - yhat| / |y|)` over the points with `y != 0`.
pub fn mape(y: &[f64], yhat: &[f64]) -> Result<Mape> {
    check_pair(y, yhat)?;
    let terms: Vec<f64> = y.iter().zip(yhat).filter(|(a, _)| **a != 0.0).map(|(a, p)| 100.0 * (a - p).abs() / a.abs()).collect();
    if terms.is_empty() {
        return Err(Error::invalid("MAPE is undefined when every actual value is zero"));
    }
    Ok(Mape { value: terms.iter().sum::<f64>() / terms.len() as f64, excluded: y.len() - terms.len() })
}

/// MAPE between the means of consecutive groups of `group_size` points; the
/// last group may be shorter.
pub fn grouped_mape(y: &[f64], yhat: &[f64], group_size: usize) -> Result<Mape> {
    check_pair(y, yhat)?;
    if group_size == 0 {
        return Err(Error::invalid("group size must be at least 1"));
    }
    let means = |v: &[f64]| -> Vec<f64> { v.chunks(group_size).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect() };
    mape(&means(y), &means(yhat))
}

pub fn mse(y: &[f64], yhat: &[f64]) -> Result<f64> {
    check_pair(y, yhat)?;
    Ok(y.iter().zip(yhat).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / y.len() as f64)
}

pub fn rmse(y: &[f64], yhat: &[f64]) -> Result<f64> {
    Ok(mse(y, yhat)?.sqrt())
}

pub fn mae(y: &[f64], yhat: &[f64]) -> Result<f64> {
    check_pair(y, yhat)?;
    Ok(y.iter().zip(yhat).map(|(a, b)| (a - b).abs()).sum::<f64>() / y.len() as f64)
}

/// Outcome of one candidate across all folds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateScore {
    pub index: usize,
    /// Per-fold scores; empty when the candidate failed.
    pub fold_scores: Vec<f64>,
    pub mean: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub folds: Vec<Fold>,
    pub scores: Vec<CandidateScore>,
    /// Index of the winning candidate.
    pub best: usize,
}

impl GridResult {
    pub fn best_score(&self) -> &CandidateScore {
        &self.scores[self.best]
    }

    pub fn failures(&self) -> impl Iterator<Item = &CandidateScore> {
        self.scores.iter().filter(|s| s.error.is_some())
    }
}

/// Scores every candidate on every fold and picks the lowest mean score.
///
/// A candidate whose evaluation fails (or returns a non-finite score) on any
/// fold is excluded and its error kept in the result. Ties go to the
/// earliest candidate. Evaluations run in parallel; the reduction is
/// sequential, so the outcome does not depend on scheduling.
pub fn grid_search<C, F>(candidates: &[C], cv: CvSpec, n: usize, evaluate: F) -> Result<GridResult>
where
    C: Sync,
    F: Fn(&C, &Fold) -> Result<f64> + Sync,
{
    if candidates.is_empty() {
        return Err(Error::invalid("grid search needs at least one candidate"));
    }
    let folds = expanding_splits(n, cv)?;
    let cells: Vec<(usize, usize)> =
        (0..candidates.len()).flat_map(|c| (0..folds.len()).map(move |f| (c, f))).collect();
    let results: Vec<Result<f64>> = cells
        .par_iter()
        .map(|&(c, f)| {
            evaluate(&candidates[c], &folds[f]).and_then(|s| {
                if s.is_finite() {
                    Ok(s)
                } else {
                    Err(Error::invalid(format!("non-finite score {s}")))
                }
            })
        })
        .collect();

    let mut scores = Vec::with_capacity(candidates.len());
    let mut results = results.into_iter();
    for index in 0..candidates.len() {
        let mut fold_scores = Vec::with_capacity(folds.len());
        let mut error = None;
        for f in 0..folds.len() {
            match results.next().expect("one result per cell") {
                Ok(s) => fold_scores.push(s),
                Err(e) if error.is_none() => error = Some(format!("fold {}: {e}", f + 1)),
                Err(_) => {}
            }
        }
        if error.is_some() {
            fold_scores.clear();
        }
        let mean = error.is_none().then(|| fold_scores.iter().sum::<f64>() / fold_scores.len() as f64);
        scores.push(CandidateScore { index, fold_scores, mean, error });
    }
    let best = scores
        .iter()
        .filter_map(|s| s.mean.map(|m| (s.index, m)))
        .fold(None, |acc: Option<(usize, f64)>, (i, m)| match acc {
            Some((_, bm)) if bm <= m => acc,
            _ => Some((i, m)),
        })
        .map(|(i, _)| i)
        .ok_or_else(|| {
            let first = scores.iter().find_map(|s| s.error.clone()).unwrap_or_default();
            Error::AllFailed(format!("all {} candidates failed; first error: {first}", candidates.len()))
        })?;
    Ok(GridResult { folds, scores, best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn folds_without_gap() {
        let folds = expanding_splits(8, CvSpec::new(3, 0)).unwrap();
        assert_eq!(
            folds,
            vec![
                Fold { train: 0..2, test: 2..4 },
                Fold { train: 0..4, test: 4..6 },
                Fold { train: 0..6, test: 6..8 },
            ]
        );
    }

    #[test]
    fn gap_drops_overrunning_fold() {
        let folds = expanding_splits(8, CvSpec::new(3, 1)).unwrap();
        assert_eq!(folds, vec![Fold { train: 0..2, test: 3..5 }, Fold { train: 0..4, test: 5..7 }]);
    }

    #[test]
    fn infeasible_specs() {
        assert!(expanding_splits(3, CvSpec::new(3, 0)).is_err());
        assert!(expanding_splits(8, CvSpec::new(0, 0)).is_err());
        assert!(expanding_splits(8, CvSpec::new(3, 5)).is_err());
    }

    #[test]
    fn metric_examples() {
        assert_eq!(mape(&[100.0, 200.0], &[110.0, 180.0]).unwrap(), Mape { value: 10.0, excluded: 0 });
        assert_eq!(mape(&[0.0, 10.0], &[5.0, 10.0]).unwrap(), Mape { value: 0.0, excluded: 1 });
        assert!(mape(&[0.0, 0.0], &[1.0, 1.0]).is_err());
        let y = [1.0, -2.0, 3.5];
        assert_eq!(mse(&y, &y).unwrap(), 0.0);
        assert_eq!(mae(&y, &y).unwrap(), 0.0);
        assert_eq!(mape(&y, &y).unwrap().value, 0.0);
        assert_eq!(rmse(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 12.5f64.sqrt());
        assert!(mse(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn grouped_mape_examples() {
        let y = [0.0, 10.0, 10.0, 0.0];
        let p = [10.0, 0.0, 0.0, 10.0];
        assert_eq!(grouped_mape(&y, &p, 2).unwrap().value, 0.0);
        let all = grouped_mape(&[1.0, 3.0, 5.0], &[2.0, 2.0, 2.0], 10).unwrap();
        assert!((all.value - 100.0 * 1.0 / 3.0).abs() < 1e-12);
        assert!(grouped_mape(&y, &p, 0).is_err());
    }

    #[test]
    fn grid_search_policies() {
        let cands = [3.0, 1.0, 2.0, 1.0];
        let r = grid_search(&cands, CvSpec::new(2, 0), 9, |c, _| Ok(*c)).unwrap();
        assert_eq!(r.best, 1);
        assert_eq!(r.folds.len(), 2);
        let single = grid_search(&[5.0], CvSpec::new(2, 0), 9, |c, _| Ok(*c)).unwrap();
        assert_eq!(single.best, 0);

        let r = grid_search(&cands, CvSpec::new(2, 0), 9, |c, f| {
            if *c == 1.0 && f.train.end > 3 {
                Err(Error::invalid("boom"))
            } else {
                Ok(*c)
            }
        })
        .unwrap();
        assert_eq!(r.best, 2);
        assert_eq!(r.failures().count(), 2);
        assert!(r.scores[1].mean.is_none());

        let err = grid_search(&cands, CvSpec::new(2, 0), 9, |_, _| Err(Error::invalid("no"))).unwrap_err();
        assert!(matches!(err, Error::AllFailed(_)));
    }

    proptest! {
        #[test]
        fn folds_never_leak_and_grow(n in 2usize..500, k in 1usize..20, gap in 0usize..30) {
            if let Ok(folds) = expanding_splits(n, CvSpec::new(k, gap)) {
                prop_assert!(!folds.is_empty());
                for f in &folds {
                    prop_assert!(f.train.start == 0 && !f.train.is_empty() && !f.test.is_empty());
                    prop_assert!(f.train.end + gap <= f.test.start);
                    prop_assert!(f.test.end <= n);
                }
                for w in folds.windows(2) {
                    prop_assert!(w[0].train.end < w[1].train.end);
                }
            }
        }

        #[test]
        fn grouped_with_unit_groups_is_mape(
            pairs in prop::collection::vec((1.0f64..100.0, -100.0f64..100.0), 1..50),
        ) {
            let (y, p): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            prop_assert_eq!(grouped_mape(&y, &p, 1).unwrap(), mape(&y, &p).unwrap());
        }

        #[test]
        fn mape_is_scale_invariant(
            pairs in prop::collection::vec((1.0f64..100.0, 0.0f64..100.0), 1..50),
            c in 0.01f64..100.0,
        ) {
            let (y, p): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let ys: Vec<f64> = y.iter().map(|v| v * c).collect();
            let ps: Vec<f64> = p.iter().map(|v| v * c).collect();
            let a = mape(&y, &p).unwrap().value;
            let b = mape(&ys, &ps).unwrap().value;
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
        }
    }
}
