//! Correlation metrics and the logistic mapping applied before PLCC.

mod correlation;
mod logistic;
pub mod nelder_mead;

pub use correlation::{median_of, plcc, rank_with_ties, srcc};
pub use logistic::{fit_logistic, plcc_after_logistic, LogisticParams};
