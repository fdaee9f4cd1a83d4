//! Seeded split/trial evaluation of pooling methods.
//!
//! Each trial draws its own train/test split from a seed derived from the
//! master seed and the trial index. Every method in a trial sees the same
//! test split; non-learned poolers simply ignore the training part. Per
//! trial and method the harness records SRCC and logistic-mapped PLCC
//! between the pooled predictions and MOS on the test videos, and reports
//! medians across trials.

use rayon::prelude::*;

use super::dataset::Dataset;
use super::split::{derive_seed, split_indices};
use crate::ensemble::{default_pooling_set, pooled_vector, predict_frame_scores, train_frame_predictor};
use crate::error::{Error, Result};
use crate::pooling::{pool, FrameScores, PoolingSpec};
use crate::regression::{grid_search_train, GridSearchPlan};
use crate::stats::{median_of, plcc_after_logistic, srcc};

pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_TRAIN_FRACTION: f64 = 0.8;

#[derive(Debug, Clone, PartialEq)]
pub enum EvalMethod {
    Pool(PoolingSpec),
    /// Learned fusion of the listed poolers.
    EPooling {
        pooling_set: Vec<PoolingSpec>,
    },
}

impl EvalMethod {
    pub fn epooling_default() -> Self {
        EvalMethod::EPooling {
            pooling_set: default_pooling_set(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            EvalMethod::Pool(spec) => spec.label().to_string(),
            EvalMethod::EPooling { .. } => "EPooling".to_string(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            EvalMethod::Pool(spec) => spec.validate(),
            EvalMethod::EPooling { pooling_set } if pooling_set.is_empty() => {
                Err(Error::InvalidParameter("EPooling needs a nonempty pooling set".into()))
            }
            EvalMethod::EPooling { pooling_set } => pooling_set.iter().try_for_each(PoolingSpec::validate),
        }
    }
}

/// How phase-1 (frame predictor) training relates to fusion training when
/// the dataset carries features instead of frame scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseOneMode {
    /// Phase 1 and fusion both train on the whole training split.
    InSample,
    /// The training split is halved: phase 1 trains on one half, the fusion
    /// regressor on the other half's predicted scores.
    Nested,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub methods: Vec<EvalMethod>,
    pub trials: usize,
    pub seed: u64,
    pub train_fraction: f64,
    pub parallel: bool,
    /// Fusion grid; `None` uses [`GridSearchPlan::default_for`] the pooling
    /// set size.
    pub fusion_plan: Option<GridSearchPlan>,
    /// Phase-1 grid; `None` uses the default for the feature dimension.
    pub frame_plan: Option<GridSearchPlan>,
    pub phase_one: PhaseOneMode,
    /// Keep every `frame_stride`-th frame when training the phase-1 model.
    pub frame_stride: usize,
}

impl EvalConfig {
    pub fn new(methods: Vec<EvalMethod>, trials: usize, seed: u64) -> Self {
        EvalConfig {
            methods,
            trials,
            seed,
            train_fraction: DEFAULT_TRAIN_FRACTION,
            parallel: false,
            fusion_plan: None,
            frame_plan: None,
            phase_one: PhaseOneMode::InSample,
            frame_stride: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialScores {
    pub srcc: f64,
    pub plcc: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub trial: usize,
    pub seed: u64,
    pub result: std::result::Result<TrialScores, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodReport {
    pub label: String,
    pub trials: Vec<TrialOutcome>,
    pub median_srcc: Option<f64>,
    pub median_plcc: Option<f64>,
}

impl MethodReport {
    fn from_trials(label: String, trials: Vec<TrialOutcome>) -> Self {
        let ok: Vec<TrialScores> = trials.iter().filter_map(|t| t.result.clone().ok()).collect();
        let med = |f: fn(&TrialScores) -> f64| {
            let v: Vec<f64> = ok.iter().map(f).collect();
            median_of(&v).ok()
        };
        MethodReport {
            median_srcc: med(|t| t.srcc),
            median_plcc: med(|t| t.plcc),
            label,
            trials,
        }
    }

    /// True when no trial produced a score.
    pub fn failed(&self) -> bool {
        self.median_srcc.is_none()
    }

    pub fn successful_trials(&self) -> usize {
        self.trials.iter().filter(|t| t.result.is_ok()).count()
    }

    pub fn first_error(&self) -> Option<&str> {
        self.trials
            .iter()
            .find_map(|t| t.result.as_ref().err().map(String::as_str))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub methods: Vec<MethodReport>,
    pub trials: usize,
    pub seed: u64,
    pub train_fraction: f64,
}

type Cell<T> = std::result::Result<T, String>;

/// Pooled values for every video, one column per method. Single poolers
/// store a score, EPooling stores the quality vector.
enum PooledColumn {
    Single(Vec<Cell<f64>>),
    Vector(Vec<Cell<Vec<f64>>>),
}

fn pooled_columns(ids: &[&str], series: &[Cell<FrameScores>], methods: &[EvalMethod]) -> Vec<PooledColumn> {
    let tag = |id: &str, e: Error| format!("video `{id}`: {e}");
    methods
        .iter()
        .map(|m| match m {
            EvalMethod::Pool(spec) => PooledColumn::Single(
                ids.par_iter()
                    .zip(series)
                    .map(|(id, s)| s.clone().and_then(|s| pool(&s, spec).map_err(|e| tag(id, e))))
                    .collect(),
            ),
            EvalMethod::EPooling { pooling_set } => PooledColumn::Vector(
                ids.par_iter()
                    .zip(series)
                    .map(|(id, s)| {
                        s.clone()
                            .and_then(|s| pooled_vector(&s, pooling_set).map_err(|e| tag(id, e)))
                    })
                    .collect(),
            ),
        })
        .collect()
}

fn correlate(pred: &[f64], mos: &[f64]) -> Cell<TrialScores> {
    let s = srcc(pred, mos).map_err(|e| e.to_string())?;
    let p = plcc_after_logistic(pred, mos).map_err(|e| e.to_string())?;
    Ok(TrialScores { srcc: s, plcc: p })
}

struct Context<'a> {
    dataset: &'a Dataset,
    config: &'a EvalConfig,
    ids: Vec<&'a str>,
    mos: Vec<f64>,
    /// Pooled columns computed once when frame scores are given directly.
    cached: Option<Vec<PooledColumn>>,
}

impl Context<'_> {
    fn run_trial(&self, trial: usize) -> Vec<TrialOutcome> {
        let seed = derive_seed(self.config.seed, trial as u64);
        let wrap = |result| TrialOutcome { trial, seed, result };
        let results = match self.trial_results(seed) {
            Ok(r) => r,
            Err(e) => vec![Err(e); self.config.methods.len()],
        };
        results.into_iter().map(wrap).collect()
    }

    fn trial_results(&self, seed: u64) -> Cell<Vec<Cell<TrialScores>>> {
        let n = self.dataset.len();
        let (train, test) = split_indices(n, self.config.train_fraction, seed).map_err(|e| e.to_string())?;

        let (columns_owned, fusion_train);
        let columns: &[PooledColumn] = match &self.cached {
            Some(c) => {
                fusion_train = train;
                c
            }
            None => {
                let (phase_one, fusion) = match self.config.phase_one {
                    PhaseOneMode::InSample => (train.clone(), train),
                    PhaseOneMode::Nested => {
                        let (a, b) = split_indices(train.len(), 0.5, seed ^ 0x5EED).map_err(|e| e.to_string())?;
                        (
                            a.iter().map(|&i| train[i]).collect(),
                            b.iter().map(|&i| train[i]).collect(),
                        )
                    }
                };
                fusion_train = fusion;
                let series = self.predicted_series(&phase_one, seed)?;
                columns_owned = pooled_columns(&self.ids, &series, &self.config.methods);
                &columns_owned
            }
        };

        let test_mos: Vec<f64> = test.iter().map(|&i| self.mos[i]).collect();
        Ok(columns
            .iter()
            .map(|column| {
                let pred: Vec<f64> = match column {
                    PooledColumn::Single(values) => test.iter().map(|&i| values[i].clone()).collect::<Cell<_>>()?,
                    PooledColumn::Vector(vectors) => {
                        let x: Vec<Vec<f64>> = fusion_train.iter().map(|&i| vectors[i].clone()).collect::<Cell<_>>()?;
                        let y: Vec<f64> = fusion_train.iter().map(|&i| self.mos[i]).collect();
                        let plan = self
                            .config
                            .fusion_plan
                            .unwrap_or_else(|| GridSearchPlan::default_for(x.first().map_or(1, Vec::len)));
                        let model = grid_search_train(&x, &y, &plan, seed).map_err(|e| e.to_string())?.model;
                        test.iter()
                            .map(|&i| {
                                let v = vectors[i].clone()?;
                                model.predict(&v).map_err(|e| e.to_string())
                            })
                            .collect::<Cell<_>>()?
                    }
                };
                correlate(&pred, &test_mos)
            })
            .collect())
    }

    /// Trains the phase-1 frame predictor on `train` and predicts frame
    /// scores for every video.
    fn predicted_series(&self, train: &[usize], seed: u64) -> Cell<Vec<Cell<FrameScores>>> {
        let records = &self.dataset.records;
        let stride = self.config.frame_stride.max(1);
        let strided: Vec<Vec<Vec<f64>>> = train
            .iter()
            .map(|&i| {
                let f = records[i].frame_features.as_ref().expect("feature mode");
                f.iter().step_by(stride).cloned().collect()
            })
            .collect();
        let borrowed: Vec<&[Vec<f64>]> = strided.iter().map(Vec::as_slice).collect();
        let mos: Vec<f64> = train.iter().map(|&i| self.mos[i]).collect();
        let dim = borrowed.first().and_then(|f| f.first()).map_or(1, Vec::len);
        let plan = self
            .config
            .frame_plan
            .unwrap_or_else(|| GridSearchPlan::default_for(dim));
        let model = train_frame_predictor(&borrowed, &mos, &plan, seed).map_err(|e| e.to_string())?;
        Ok(records
            .par_iter()
            .map(|r| {
                let f = r.frame_features.as_ref().expect("feature mode");
                predict_frame_scores(&model, f).map_err(|e| format!("video `{}`: {e}", r.id))
            })
            .collect())
    }
}

/// Runs the split/trial protocol for every configured method.
///
/// Configuration and data-shape problems are returned as errors; failures
/// inside a trial (pooling domain errors, undefined correlations) are
/// recorded per trial in the report.
pub fn run_pooling_evaluation(dataset: &Dataset, config: &EvalConfig) -> Result<EvalReport> {
    if config.methods.is_empty() {
        return Err(Error::InvalidParameter("no methods to evaluate".into()));
    }
    if config.trials == 0 {
        return Err(Error::InvalidParameter("trial count must be at least 1".into()));
    }
    config.methods.iter().try_for_each(EvalMethod::validate)?;
    if dataset.is_empty() {
        return Err(Error::InvalidInput("dataset is empty".into()));
    }
    // reject a bad fraction up front rather than in every trial
    split_indices(dataset.len(), config.train_fraction, 0)?;

    let ids: Vec<&str> = dataset.records.iter().map(|r| r.id.as_str()).collect();
    let cached = if dataset.has_scores() {
        let series: Vec<Cell<FrameScores>> = dataset
            .records
            .iter()
            .map(|r| Ok(r.frame_scores.clone().expect("checked")))
            .collect();
        Some(pooled_columns(&ids, &series, &config.methods))
    } else if dataset.has_features() {
        None
    } else {
        return Err(Error::InvalidInput(
            "every video needs frame scores, or every video needs frame features".into(),
        ));
    };
    let ctx = Context {
        dataset,
        config,
        mos: dataset.mos(),
        ids,
        cached,
    };

    let per_trial: Vec<Vec<TrialOutcome>> = if config.parallel {
        (0..config.trials).into_par_iter().map(|t| ctx.run_trial(t)).collect()
    } else {
        (0..config.trials).map(|t| ctx.run_trial(t)).collect()
    };

    let mut columns: Vec<Vec<TrialOutcome>> = vec![Vec::with_capacity(config.trials); config.methods.len()];
    for outcomes in per_trial {
        for (m, o) in outcomes.into_iter().enumerate() {
            columns[m].push(o);
        }
    }
    let methods = config
        .methods
        .iter()
        .zip(columns)
        .map(|(m, trials)| MethodReport::from_trials(m.label(), trials))
        .collect();
    Ok(EvalReport {
        methods,
        trials: config.trials,
        seed: config.seed,
        train_fraction: config.train_fraction,
    })
}
