//! Serial-position (primacy and recency) poolers: exponentially decaying
//! weights anchored at the start or the end of the video.

use super::series::{accurate_sum, FrameScores};
use crate::error::{Error, Result};

fn check(horizon: usize, alpha: f64) -> Result<()> {
    if horizon == 0 {
        return Err(Error::InvalidParameter(
            "memory horizon must be at least 1 frame".into(),
        ));
    }
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "memory decay rate must be finite and nonnegative, got {alpha}"
        )));
    }
    Ok(())
}

/// Weighted average of `frames` (ordered by distance from the anchor) with
/// weights `exp(-alpha * d)` for `d = 0..=L'`, `L' = min(horizon, N - 1)`.
fn decayed_average<I>(frames: I, n: usize, horizon: usize, alpha: f64) -> f64
where
    I: Iterator<Item = f64>,
{
    let effective = horizon.min(n - 1);
    let weights: Vec<f64> = (0..=effective).map(|d| (-alpha * d as f64).exp()).collect();
    let total = accurate_sum(weights.iter().copied());
    let weighted = accurate_sum(frames.zip(&weights).map(|(q, w)| w * q));
    weighted / total
}

/// Exponentially decreasing weights over the first `min(horizon, N-1) + 1`
/// frames, renormalized to sum to one. Later frames get zero weight.
pub fn pool_primacy(series: &FrameScores, horizon: usize, alpha: f64) -> Result<f64> {
    check(horizon, alpha)?;
    Ok(decayed_average(series.iter().copied(), series.len(), horizon, alpha))
}

/// Mirror image of [`pool_primacy`]: the window covers the last
/// `min(horizon, N-1) + 1` frames and the weight peaks at the final frame.
pub fn pool_recency(series: &FrameScores, horizon: usize, alpha: f64) -> Result<f64> {
    check(horizon, alpha)?;
    Ok(decayed_average(
        series.iter().rev().copied(),
        series.len(),
        horizon,
        alpha,
    ))
}
