use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::scaler::check_matrix;
use super::svr::{svr_train, SvrModel, SvrParams, DEFAULT_EPSILON};
use crate::error::{Error, Result};

pub const DEFAULT_FOLDS: usize = 5;

/// A 3x3 grid of `(C, gamma)` candidates scored by k-fold cross-validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSearchPlan {
    pub c_values: [f64; 3],
    pub gamma_values: [f64; 3],
    pub folds: usize,
    pub epsilon: f64,
}

impl GridSearchPlan {
    /// `C in {1, 10, 100}`, `gamma in {1/D, 10/D, 100/D}`, five folds.
    pub fn default_for(dim: usize) -> Self {
        let d = dim.max(1) as f64;
        GridSearchPlan {
            c_values: [1.0, 10.0, 100.0],
            gamma_values: [1.0 / d, 10.0 / d, 100.0 / d],
            folds: DEFAULT_FOLDS,
            epsilon: DEFAULT_EPSILON,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.folds < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid search needs at least 2 folds, got {}",
                self.folds
            )));
        }
        for &v in self.c_values.iter().chain(&self.gamma_values) {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "grid values must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    fn candidates(&self) -> Vec<(f64, f64)> {
        self.c_values
            .iter()
            .flat_map(|&c| self.gamma_values.iter().map(move |&g| (c, g)))
            .collect()
    }
}

/// `(train, validate)` index pairs from a seeded shuffle split into
/// contiguous folds; the first `n % folds` folds get one extra element.
pub fn kfold_indices(n: usize, folds: usize, seed: u64) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    if folds < 2 || folds > n {
        return Err(Error::InvalidParameter(format!(
            "cannot make {folds} folds from {n} samples"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let base = n / folds;
    let extra = n % folds;
    let mut out = Vec::with_capacity(folds);
    let mut start = 0;
    for f in 0..folds {
        let len = base + usize::from(f < extra);
        let validate = order[start..start + len].to_vec();
        let train = order[..start].iter().chain(&order[start + len..]).copied().collect();
        out.push((train, validate));
        start += len;
    }
    Ok(out)
}

/// Cross-validated RMSE of one `(C, gamma)` candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateScore {
    pub c: f64,
    pub gamma: f64,
    pub rmse: f64,
}

#[derive(Debug, Clone)]
pub struct GridSearchResult {
    pub model: SvrModel,
    pub best: CandidateScore,
    /// Every candidate in plan order (C major, gamma minor).
    pub scores: Vec<CandidateScore>,
}

fn subset<T: Clone>(data: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| data[i].clone()).collect()
}

/// Scores all nine candidates by mean validation RMSE across folds and
/// retrains the best on all data. Ties go to the smaller C, then the smaller
/// gamma.
///
/// With fewer rows than folds the fold count drops to the row count; a
/// single row skips validation and uses the smallest C and gamma.
pub fn grid_search_train(x: &[Vec<f64>], y: &[f64], plan: &GridSearchPlan, seed: u64) -> Result<GridSearchResult> {
    plan.validate()?;
    check_matrix(x)?;
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let params = |c, gamma| SvrParams::new(c, gamma).with_epsilon(plan.epsilon);
    let n = x.len();

    let scores: Vec<CandidateScore> = if n < 2 {
        plan.candidates()
            .into_iter()
            .map(|(c, gamma)| CandidateScore { c, gamma, rmse: 0.0 })
            .collect()
    } else {
        let folds = kfold_indices(n, plan.folds.min(n), seed)?;
        plan.candidates()
            .into_par_iter()
            .map(|(c, gamma)| -> Result<CandidateScore> {
                let mut total = 0.0;
                for (train, validate) in &folds {
                    let model = svr_train(&subset(x, train), &subset(y, train), &params(c, gamma))?;
                    let sse: f64 = validate
                        .iter()
                        .map(|&i| Ok((model.predict(&x[i])? - y[i]).powi(2)))
                        .sum::<Result<f64>>()?;
                    total += (sse / validate.len() as f64).sqrt();
                }
                Ok(CandidateScore {
                    c,
                    gamma,
                    rmse: total / folds.len() as f64,
                })
            })
            .collect::<Result<_>>()?
    };

    let best = *scores
        .iter()
        .min_by(|a, b| {
            a.rmse
                .total_cmp(&b.rmse)
                .then(a.c.total_cmp(&b.c))
                .then(a.gamma.total_cmp(&b.gamma))
        })
        .expect("nine candidates");
    let model = svr_train(x, y, &params(best.c, best.gamma))?;
    Ok(GridSearchResult { model, best, scores })
}
