use std::ops::Deref;

use crate::error::{Error, Result};

/// Ordered frame-level quality scores of one video.
///
/// Always nonempty and free of NaN/infinite values.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameScores(Vec<f64>);

impl FrameScores {
    pub fn new(scores: Vec<f64>) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::InvalidInput("frame score series is empty".into()));
        }
        if let Some(n) = scores.iter().position(|q| !q.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "frame {n} has non-finite score {}",
                scores[n]
            )));
        }
        Ok(FrameScores(scores))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_constant(&self) -> bool {
        let first = self.0[0];
        self.0.iter().all(|&q| q == first)
    }

    /// Fails with a domain error unless every score is strictly positive.
    pub(crate) fn require_positive(&self, what: &str) -> Result<()> {
        match self.0.iter().position(|&q| q <= 0.0) {
            Some(n) => Err(Error::Domain(format!(
                "{what} requires strictly positive scores; frame {n} is {} (rescale scores first)",
                self.0[n]
            ))),
            None => Ok(()),
        }
    }
}

impl Deref for FrameScores {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for FrameScores {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        FrameScores::new(v)
    }
}

impl TryFrom<&[f64]> for FrameScores {
    type Error = Error;

    fn try_from(v: &[f64]) -> Result<Self> {
        FrameScores::new(v.to_vec())
    }
}

/// Compensated (Neumaier) summation.
pub(crate) fn accurate_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub(crate) fn accurate_mean(values: &[f64]) -> f64 {
    accurate_sum(values.iter().copied()) / values.len() as f64
}

/// Number of elements making up `k_percent` of `n`, rounded up and never
/// less than one.
pub(crate) fn percent_count(k_percent: f64, n: usize) -> usize {
    let raw = (k_percent * n as f64 / 100.0).ceil();
    (raw as usize).clamp(1, n.max(1))
}

pub(crate) fn check_percent(k_percent: f64) -> Result<()> {
    if k_percent.is_finite() && k_percent > 0.0 && k_percent <= 100.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "percentage must lie in (0, 100], got {k_percent}"
        )))
    }
}
