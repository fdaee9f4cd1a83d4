//! Four-parameter monotone logistic mapping used before computing PLCC.

use super::correlation::plcc;
use super::nelder_mead;
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 2000;
const DIAMETER_TOL: f64 = 1e-8;

/// `f(x) = beta2 + (beta1 - beta2) / (1 + exp(-(x - beta3) / |beta4|))`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticParams {
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub beta4: f64,
}

impl LogisticParams {
    pub fn eval(&self, x: f64) -> f64 {
        logistic(&[self.beta1, self.beta2, self.beta3, self.beta4], x)
    }

    pub fn apply(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }
}

fn logistic(b: &[f64], x: f64) -> f64 {
    let scale = b[3].abs().max(f64::MIN_POSITIVE);
    b[1] + (b[0] - b[1]) / (1.0 + (-(x - b[2]) / scale).exp())
}

/// Least-squares fit of the logistic by Nelder-Mead, started from
/// `beta = (max mos, min mos, mean pred, std pred)`.
pub fn fit_logistic(pred: &[f64], mos: &[f64]) -> Result<LogisticParams> {
    if pred.len() != mos.len() {
        return Err(Error::DimensionMismatch {
            expected: pred.len(),
            found: mos.len(),
        });
    }
    if pred.len() < 5 {
        return Err(Error::Degenerate(format!(
            "logistic fit needs at least 5 pairs, got {}",
            pred.len()
        )));
    }
    if pred.iter().chain(mos).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("logistic fit inputs must be finite".into()));
    }
    let n = pred.len() as f64;
    let mean = pred.iter().sum::<f64>() / n;
    let std = (pred.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / n).sqrt();
    if std == 0.0 {
        return Err(Error::Degenerate("predictions are constant".into()));
    }
    let (lo, hi) = mos
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &m| (l.min(m), h.max(m)));
    if lo == hi {
        return Err(Error::Degenerate("target scores are constant".into()));
    }

    let sse = |b: &[f64]| -> f64 { pred.iter().zip(mos).map(|(&x, &y)| (logistic(b, x) - y).powi(2)).sum() };
    let fit = nelder_mead::minimize(sse, &[hi, lo, mean, std], MAX_ITERATIONS, DIAMETER_TOL);
    if !fit.converged {
        log::debug!(
            "logistic fit stopped after {} iterations without simplex convergence (sse {})",
            fit.iterations,
            fit.value
        );
    }
    let b = fit.point;
    Ok(LogisticParams {
        beta1: b[0],
        beta2: b[1],
        beta3: b[2],
        beta4: b[3],
    })
}

/// PLCC between logistic-mapped predictions and MOS.
pub fn plcc_after_logistic(pred: &[f64], mos: &[f64]) -> Result<f64> {
    let params = fit_logistic(pred, mos)?;
    plcc(&params.apply(pred), mos)
}
