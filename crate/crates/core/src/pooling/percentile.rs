//! Worst-fraction percentile pooling and temporal-variation pooling.

use super::series::{accurate_mean, check_percent, percent_count, FrameScores};
use crate::error::{Error, Result};

/// Mean of the worst `ceil(k/100 * N)` frames.
///
/// "Worst" means lowest when `higher_is_better`, highest otherwise. Ties are
/// resolved toward the earlier frame.
pub fn pool_percentile(series: &FrameScores, k_percent: f64, higher_is_better: bool) -> Result<f64> {
    check_percent(k_percent)?;
    let count = percent_count(k_percent, series.len());
    let mut order: Vec<usize> = (0..series.len()).collect();
    // stable sort keeps earlier frames first among equal scores
    if higher_is_better {
        order.sort_by(|&a, &b| series[a].total_cmp(&series[b]));
    } else {
        order.sort_by(|&a, &b| series[b].total_cmp(&series[a]));
    }
    let worst: Vec<f64> = order[..count].iter().map(|&n| series[n]).collect();
    Ok(accurate_mean(&worst))
}

/// Absolute forward differences `|q_{n+1} - q_n|`, `N - 1` values.
pub fn frame_gradients(series: &FrameScores) -> Vec<f64> {
    series.windows(2).map(|w| (w[1] - w[0]).abs()).collect()
}

/// Mean of the largest `ceil(k/100 * (N-1))` absolute frame-to-frame changes.
///
/// The result is a variation magnitude, not a quality on the input scale.
pub fn pool_variation(series: &FrameScores, k_percent: f64) -> Result<f64> {
    check_percent(k_percent)?;
    if series.len() < 2 {
        return Err(Error::InvalidInput(
            "temporal variation needs at least two frames".into(),
        ));
    }
    let mut grads = frame_gradients(series);
    let count = percent_count(k_percent, grads.len());
    grads.sort_by(|a, b| b.total_cmp(a));
    Ok(accurate_mean(&grads[..count]))
}
