//! Two-cluster 1-D k-means and the VQPooling temporal pooler built on it.

use super::series::{accurate_sum, FrameScores};
use crate::error::{Error, Result};

const MAX_LLOYD_ITERATIONS: usize = 100;

/// Partition of frame indices (0-based) into a low-score and a high-score
/// cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSplit {
    pub low_group: Vec<usize>,
    pub high_group: Vec<usize>,
    pub low_mean: f64,
    pub high_mean: f64,
}

/// Lloyd's algorithm with two centroids seeded at the minimum and maximum
/// score. Points equidistant from both centroids join the low cluster.
///
/// Returns `None` when every score is identical, in which case no split
/// exists.
pub fn kmeans_1d_two(series: &FrameScores) -> Option<ClusterSplit> {
    if series.is_constant() {
        return None;
    }
    let (mut low_c, mut high_c) = (series.min(), series.max());
    let mut is_high: Vec<bool> = Vec::new();
    for _ in 0..MAX_LLOYD_ITERATIONS {
        let next: Vec<bool> = series.iter().map(|&q| (q - high_c).abs() < (q - low_c).abs()).collect();
        if next == is_high {
            break;
        }
        is_high = next;
        // min and max each stay on their own side, so neither cluster empties
        low_c = cluster_mean(series, &is_high, false);
        high_c = cluster_mean(series, &is_high, true);
    }
    let (high_group, low_group): (Vec<usize>, Vec<usize>) = (0..series.len()).partition(|&n| is_high[n]);
    Some(ClusterSplit {
        low_group,
        high_group,
        low_mean: low_c,
        high_mean: high_c,
    })
}

fn cluster_mean(series: &FrameScores, is_high: &[bool], high: bool) -> f64 {
    let members: Vec<f64> = series
        .iter()
        .zip(is_high)
        .filter(|(_, &h)| h == high)
        .map(|(&q, _)| q)
        .collect();
    accurate_sum(members.iter().copied()) / members.len() as f64
}

/// VQPooling: low-quality frames keep unit weight while high-quality frames
/// are down-weighted by `w = (1 - M_L / M_H)^2`.
pub fn pool_vqpooling(series: &FrameScores) -> Result<f64> {
    let Some(split) = kmeans_1d_two(series) else {
        return Ok(series[0]);
    };
    if split.high_mean == 0.0 {
        return Err(Error::Domain(
            "VQPooling weight undefined: high-quality cluster mean is zero".into(),
        ));
    }
    let w = (1.0 - split.low_mean / split.high_mean).powi(2);
    let low_sum = accurate_sum(split.low_group.iter().map(|&n| series[n]));
    let high_sum = accurate_sum(split.high_group.iter().map(|&n| series[n]));
    let denom = split.low_group.len() as f64 + w * split.high_group.len() as f64;
    Ok((low_sum + w * high_sum) / denom)
}
