//! Ensemble temporal pooling (EPooling).
//!
//! Several pooled scores of one video are stacked into a quality vector and
//! fused by a learned regressor. When only per-frame feature vectors are
//! available, a first regressor maps features to frame-level predicted MOS
//! before pooling.

use std::fmt::Write as _;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::pooling::{pool, FrameScores, PoolingSpec};
use crate::regression::{grid_search_train, GridSearchPlan, SvrModel};

const FORMAT_HEADER: &str = "vqpool-ensemble 1";
const FORMAT_END: &str = "end-ensemble";

/// Minimum number of training videos for fusion training.
pub const MIN_TRAINING_VIDEOS: usize = 5;

/// Mean, VQPooling and Hysteresis with default parameters, in that order.
pub fn default_pooling_set() -> Vec<PoolingSpec> {
    ["mean", "vqpooling", "hysteresis"]
        .iter()
        .map(|n| PoolingSpec::with_defaults(n).expect("known pooler"))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleModel {
    /// Poolers producing the fusion inputs, in regressor-input order.
    pub pooling_set: Vec<PoolingSpec>,
    pub fusion: SvrModel,
    /// Phase-1 regressor mapping frame features to frame scores, present
    /// when the ensemble was trained from features.
    pub frame_predictor: Option<SvrModel>,
    pub seed: u64,
    /// SHA-256 of the training inputs.
    pub fingerprint: String,
}

/// Trains the frame-level regressor. Every frame is labelled with the MOS of
/// the video it belongs to.
pub fn train_frame_predictor(
    frame_features: &[&[Vec<f64>]],
    video_mos: &[f64],
    plan: &GridSearchPlan,
    seed: u64,
) -> Result<SvrModel> {
    if frame_features.is_empty() {
        return Err(Error::InvalidInput("no training videos".into()));
    }
    if frame_features.len() != video_mos.len() {
        return Err(Error::DimensionMismatch {
            expected: frame_features.len(),
            found: video_mos.len(),
        });
    }
    let dim = frame_features[0].first().map(Vec::len).unwrap_or(0);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (frames, &mos) in frame_features.iter().zip(video_mos) {
        if frames.is_empty() {
            return Err(Error::InvalidInput("video without frames".into()));
        }
        for f in frames.iter() {
            if f.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: f.len(),
                });
            }
            rows.push(f.clone());
            labels.push(mos);
        }
    }
    Ok(grid_search_train(&rows, &labels, plan, seed)?.model)
}

/// One predicted score per feature row, order preserved.
pub fn predict_frame_scores(model: &SvrModel, frame_features: &[Vec<f64>]) -> Result<FrameScores> {
    if frame_features.is_empty() {
        return Err(Error::InvalidInput("no frames to predict".into()));
    }
    FrameScores::new(model.predict_many(frame_features)?)
}

/// The quality vector `(Q_1, ..., Q_I)` of one video.
pub fn pooled_vector(series: &FrameScores, pooling_set: &[PoolingSpec]) -> Result<Vec<f64>> {
    pooling_set.iter().map(|spec| pool(series, spec)).collect()
}

fn check_pooling_set(pooling_set: &[PoolingSpec]) -> Result<()> {
    if pooling_set.is_empty() {
        return Err(Error::InvalidParameter("ensemble pooling set is empty".into()));
    }
    pooling_set.iter().try_for_each(PoolingSpec::validate)
}

fn fingerprint(videos: &[(&str, &FrameScores)], mos: &[f64]) -> String {
    let mut h = Sha256::new();
    for ((id, series), m) in videos.iter().zip(mos) {
        h.update((id.len() as u64).to_le_bytes());
        h.update(id.as_bytes());
        h.update((series.len() as u64).to_le_bytes());
        for q in series.iter() {
            h.update(q.to_bits().to_le_bytes());
        }
        h.update(m.to_bits().to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Stacks the pooled scores of each training video and grid-search trains
/// the fusion regressor on `(quality vector, MOS)` pairs.
pub fn epooling_train(
    videos: &[(&str, &FrameScores)],
    mos: &[f64],
    pooling_set: &[PoolingSpec],
    plan: &GridSearchPlan,
    seed: u64,
) -> Result<EnsembleModel> {
    check_pooling_set(pooling_set)?;
    if videos.len() != mos.len() {
        return Err(Error::DimensionMismatch {
            expected: videos.len(),
            found: mos.len(),
        });
    }
    if videos.len() < MIN_TRAINING_VIDEOS {
        return Err(Error::InvalidInput(format!(
            "ensemble training needs at least {MIN_TRAINING_VIDEOS} videos, got {}",
            videos.len()
        )));
    }
    // collect() keeps input order regardless of scheduling
    let features: Vec<Vec<f64>> = videos
        .par_iter()
        .map(|(id, series)| pooled_vector(series, pooling_set).map_err(|e| e.in_video(id)))
        .collect::<Result<_>>()?;
    let fusion = grid_search_train(&features, mos, plan, seed)?.model;
    Ok(EnsembleModel {
        pooling_set: pooling_set.to_vec(),
        fusion,
        frame_predictor: None,
        seed,
        fingerprint: fingerprint(videos, mos),
    })
}

pub fn epooling_predict(model: &EnsembleModel, series: &FrameScores) -> Result<f64> {
    model.fusion.predict(&pooled_vector(series, &model.pooling_set)?)
}

impl EnsembleModel {
    /// Predicts from per-frame features through the phase-1 regressor.
    pub fn predict_from_features(&self, frame_features: &[Vec<f64>]) -> Result<f64> {
        let predictor = self
            .frame_predictor
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("ensemble was trained on frame scores, not features".into()))?;
        let series = predict_frame_scores(predictor, frame_features)?;
        epooling_predict(self, &series)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{FORMAT_HEADER}");
        let _ = writeln!(out, "seed {}", self.seed);
        let _ = writeln!(out, "fingerprint {}", self.fingerprint);
        let _ = writeln!(out, "poolers {}", self.pooling_set.len());
        for spec in &self.pooling_set {
            let _ = writeln!(out, "{spec}");
        }
        match &self.frame_predictor {
            Some(m) => {
                let _ = writeln!(out, "frame_predictor");
                out.push_str(&m.to_text());
            }
            None => {
                let _ = writeln!(out, "frame_predictor none");
            }
        }
        let _ = writeln!(out, "fusion");
        out.push_str(&self.fusion.to_text());
        let _ = writeln!(out, "{FORMAT_END}");
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let mut next = |what: &str| -> Result<(usize, String)> {
            lines
                .next()
                .map(|(n, l)| (n + 1, l.trim().to_string()))
                .ok_or_else(|| Error::Format(format!("unexpected end of ensemble, expected {what}")))
        };
        let value = |(n, line): (usize, String), key: &str| -> Result<String> {
            match line.split_once(' ') {
                Some((k, v)) if k == key => Ok(v.trim().to_string()),
                _ => Err(Error::Format(format!("line {n}: expected `{key}`, found `{line}`"))),
            }
        };

        let (n, header) = next("header")?;
        if header != FORMAT_HEADER {
            return Err(Error::Format(format!(
                "line {n}: expected header `{FORMAT_HEADER}`, found `{header}`"
            )));
        }
        let line = next("seed")?;
        let at = line.0;
        let seed = value(line, "seed")?
            .parse()
            .map_err(|_| Error::Format(format!("line {at}: bad seed")))?;
        let fingerprint = value(next("fingerprint")?, "fingerprint")?;
        let line = next("poolers")?;
        let at = line.0;
        let count: usize = value(line, "poolers")?
            .parse()
            .map_err(|_| Error::Format(format!("line {at}: bad pooler count")))?;
        let mut pooling_set = Vec::with_capacity(count);
        for _ in 0..count {
            let (n, line) = next("pooler")?;
            pooling_set.push(
                line.parse::<PoolingSpec>()
                    .map_err(|e| Error::Format(format!("line {n}: {e}")))?,
            );
        }
        check_pooling_set(&pooling_set).map_err(|e| Error::Format(e.to_string()))?;

        // the remaining lines hold one or two embedded SVR blocks
        let rest: Vec<(usize, String)> = std::iter::from_fn(|| next("").ok()).collect();
        let mut rest_iter = rest.iter().map(|(n, l)| (*n - 1, l.as_str()));
        let (n, marker) = rest_iter
            .next()
            .ok_or_else(|| Error::Format("missing frame_predictor line".into()))?;
        let frame_predictor = match marker {
            "frame_predictor none" => None,
            "frame_predictor" => Some(SvrModel::read_block(&mut rest_iter)?),
            other => {
                return Err(Error::Format(format!(
                    "line {}: expected `frame_predictor`, found `{other}`",
                    n + 1
                )))
            }
        };
        match rest_iter.next() {
            Some((_, "fusion")) => {}
            Some((n, other)) => {
                return Err(Error::Format(format!(
                    "line {}: expected `fusion`, found `{other}`",
                    n + 1
                )))
            }
            None => return Err(Error::Format("missing fusion block".into())),
        }
        let fusion = SvrModel::read_block(&mut rest_iter)?;
        match rest_iter.next() {
            Some((_, FORMAT_END)) => {}
            _ => return Err(Error::Format(format!("missing `{FORMAT_END}` marker"))),
        }
        if fusion.dim() != pooling_set.len() {
            return Err(Error::Format(format!(
                "fusion regressor expects {} inputs but {} poolers are listed",
                fusion.dim(),
                pooling_set.len()
            )));
        }
        Ok(EnsembleModel {
            pooling_set,
            fusion,
            frame_predictor,
            seed,
            fingerprint,
        })
    }
}
