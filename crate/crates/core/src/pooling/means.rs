//! Central-tendency poolers: arithmetic, harmonic, geometric and Minkowski
//! means, plus the sample median.

use super::series::{accurate_mean, accurate_sum, FrameScores};
use crate::error::{Error, Result};
use crate::stats::median_of;

pub fn pool_mean(series: &FrameScores) -> f64 {
    accurate_mean(series)
}

pub fn pool_median(series: &FrameScores) -> f64 {
    // nonempty by construction
    median_of(series).expect("FrameScores is never empty")
}

/// `N / Σ 1/q_n`. Scores must be strictly positive.
pub fn pool_harmonic(series: &FrameScores) -> Result<f64> {
    series.require_positive("harmonic mean")?;
    let inv = accurate_sum(series.iter().map(|q| 1.0 / q));
    Ok(series.len() as f64 / inv)
}

/// Geometric mean evaluated in the log domain.
pub fn pool_geometric(series: &FrameScores) -> Result<f64> {
    series.require_positive("geometric mean")?;
    let log_mean = accurate_sum(series.iter().map(|q| q.ln())) / series.len() as f64;
    Ok(log_mean.exp())
}

/// Power mean `((1/N) Σ q_n^p)^(1/p)`.
///
/// Scores must be strictly positive unless `p` is a positive integer. For
/// odd `p` a negative power sum yields the negative real root.
pub fn pool_minkowski(series: &FrameScores, p: f64) -> Result<f64> {
    if !p.is_finite() || p == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "Minkowski exponent must be finite and nonzero, got {p}"
        )));
    }
    let integral = p.fract() == 0.0 && p > 0.0;
    if !integral {
        series.require_positive("Minkowski mean with non-integral or negative exponent")?;
    }
    let power_mean = if integral && p <= i32::MAX as f64 {
        let e = p as i32;
        accurate_sum(series.iter().map(|q| q.powi(e))) / series.len() as f64
    } else {
        accurate_sum(series.iter().map(|q| q.powf(p))) / series.len() as f64
    };
    if power_mean >= 0.0 {
        Ok(power_mean.powf(1.0 / p))
    } else if integral && (p as i64) % 2 == 1 {
        Ok(-(-power_mean).powf(1.0 / p))
    } else {
        Err(Error::Domain(format!(
            "Minkowski power sum is negative ({power_mean}) for exponent {p}"
        )))
    }
}
