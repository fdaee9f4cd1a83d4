//! Seeded synthetic datasets with known MOS-generating rules.
//!
//! Each video has a base quality level, slow AR(1) drift, and a random
//! number of quality dips of random depth and length. MOS is derived from
//! the frame scores by one of a few pooling rules plus Gaussian noise.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::dataset::{Dataset, VideoRecord};
use crate::error::{Error, Result};
use crate::pooling::{pool_hysteresis, pool_mean, pool_percentile, FrameScores};

const MIN_SCORE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MosRule {
    /// Arithmetic mean of the frame scores.
    Mean,
    /// Mean of the worst 10% of frames.
    WorstPercentile,
    /// Hysteresis pooling with window 60 and blend 0.8.
    HysteresisLike,
}

impl MosRule {
    pub fn apply(&self, series: &FrameScores) -> f64 {
        match self {
            MosRule::Mean => pool_mean(series),
            MosRule::WorstPercentile => pool_percentile(series, 10.0, true).expect("valid percentage"),
            MosRule::HysteresisLike => pool_hysteresis(series, 60, 0.8).expect("valid parameters"),
        }
    }
}

impl FromStr for MosRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(MosRule::Mean),
            "worst_percentile" => Ok(MosRule::WorstPercentile),
            "hysteresis_like" => Ok(MosRule::HysteresisLike),
            other => Err(Error::InvalidParameter(format!(
                "unknown MOS rule `{other}` (expected mean, worst_percentile or hysteresis_like)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub n_videos: usize,
    pub frames_per_video: usize,
    pub mos_rule: MosRule,
    pub noise_sd: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            n_videos: 200,
            frames_per_video: 150,
            mos_rule: MosRule::Mean,
            noise_sd: 0.1,
            seed: 0,
        }
    }
}

fn trajectory(rng: &mut ChaCha8Rng, frames: usize) -> Vec<f64> {
    let base = rng.random_range(1.5..4.5);
    let step = Normal::new(0.0, 0.04).expect("valid sd");
    let mut drift = 0.0;
    let mut scores: Vec<f64> = (0..frames)
        .map(|_| {
            drift = 0.92 * drift + step.sample(rng);
            base + drift
        })
        .collect();

    let dips = rng.random_range(0..=3);
    for _ in 0..dips {
        let len = rng.random_range(1..=(frames / 5).max(1));
        let start = rng.random_range(0..frames);
        let depth = rng.random_range(0.2..2.0);
        for (k, q) in scores.iter_mut().skip(start).take(len).enumerate() {
            // raised-cosine dip profile
            let phase = (k as f64 + 0.5) / len as f64;
            *q -= depth * (std::f64::consts::PI * phase).sin();
        }
    }
    scores.into_iter().map(|q| q.max(MIN_SCORE)).collect()
}

pub fn synth_generate(spec: &SynthSpec) -> Result<Dataset> {
    if spec.n_videos == 0 || spec.frames_per_video == 0 {
        return Err(Error::InvalidParameter(
            "synthetic datasets need at least one video and one frame".into(),
        ));
    }
    if !(spec.noise_sd.is_finite() && spec.noise_sd >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "noise standard deviation must be nonnegative, got {}",
            spec.noise_sd
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise = Normal::new(0.0, spec.noise_sd).expect("checked sd");
    let width = spec.n_videos.to_string().len().max(4);
    let records: Vec<VideoRecord> = (0..spec.n_videos)
        .map(|v| {
            let series = FrameScores::new(trajectory(&mut rng, spec.frames_per_video))?;
            let mos = spec.mos_rule.apply(&series) + noise.sample(&mut rng);
            Ok(VideoRecord {
                id: format!("synth_{v:0width$}"),
                mos,
                frame_scores: Some(series),
                frame_features: None,
            })
        })
        .collect::<Result<_>>()?;
    let lo = records.iter().map(|r| r.mos).fold(f64::INFINITY, f64::min);
    let hi = records.iter().map(|r| r.mos).fold(f64::NEG_INFINITY, f64::max);
    Dataset::new(records, (lo, hi), true)
}
