//! Temporal hysteresis pooling.
//!
//! Each frame blends a *memory* term (worst score over the preceding `tau`
//! frames) with a *current* term (the upcoming `tau + 1` frames sorted
//! ascending and weighted by the descending half of a Gaussian, so the worst
//! upcoming frames dominate). The pooled score is the mean of the blend.

use super::series::{accurate_mean, accurate_sum, FrameScores};
use crate::error::{Error, Result};

/// Per-frame components of the hysteresis transform; all three have the
/// same length as the input series.
#[derive(Debug, Clone, PartialEq)]
pub struct HysteresisTrace {
    pub memory: Vec<f64>,
    pub current: Vec<f64>,
    pub combined: Vec<f64>,
}

/// Half-Gaussian weights `exp(-j^2 / (2 sigma^2))`, `j = 0..len`,
/// `sigma = len / 3`, normalized to sum to one.
pub fn half_gaussian_weights(len: usize) -> Vec<f64> {
    let sigma = len as f64 / 3.0;
    let raw: Vec<f64> = (0..len)
        .map(|j| (-((j * j) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total = accurate_sum(raw.iter().copied());
    raw.into_iter().map(|g| g / total).collect()
}

fn check(window: usize, blend: f64) -> Result<()> {
    if window == 0 {
        return Err(Error::InvalidParameter(
            "hysteresis window must be at least 1 frame".into(),
        ));
    }
    if !(0.0..=1.0).contains(&blend) {
        return Err(Error::InvalidParameter(format!(
            "hysteresis blend must lie in [0, 1], got {blend}"
        )));
    }
    Ok(())
}

pub fn hysteresis_transform(series: &FrameScores, window: usize, blend: f64) -> Result<HysteresisTrace> {
    check(window, blend)?;
    let n = series.len();
    let mut memory = Vec::with_capacity(n);
    let mut current = Vec::with_capacity(n);
    let mut combined = Vec::with_capacity(n);

    // Forward windows shorter than tau+1 only occur near the end; cache
    // weights per length.
    let mut weights_by_len: Vec<Option<Vec<f64>>> = vec![None; window + 2];
    let mut ahead = Vec::with_capacity(window + 1);

    for i in 0..n {
        let mem = if i == 0 {
            series[0]
        } else {
            series[i.saturating_sub(window)..i]
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min)
        };

        let end = (i + window).min(n - 1);
        ahead.clear();
        ahead.extend_from_slice(&series[i..=end]);
        ahead.sort_by(f64::total_cmp);
        let weights = weights_by_len[ahead.len()].get_or_insert_with(|| half_gaussian_weights(ahead.len()));
        let cur = accurate_sum(ahead.iter().zip(weights.iter()).map(|(v, w)| v * w));

        memory.push(mem);
        current.push(cur);
        combined.push(blend * cur + (1.0 - blend) * mem);
    }
    Ok(HysteresisTrace {
        memory,
        current,
        combined,
    })
}

pub fn pool_hysteresis(series: &FrameScores, window: usize, blend: f64) -> Result<f64> {
    let trace = hysteresis_transform(series, window, blend)?;
    Ok(accurate_mean(&trace.combined))
}
