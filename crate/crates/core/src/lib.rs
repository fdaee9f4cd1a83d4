//! Temporal pooling of frame-level video quality scores.
//!
//! The crate is organised bottom-up:
//!
//! - [`pooling`]: pure pooling functions that collapse a [`FrameScores`]
//!   series into a single video-level score (means, percentile, VQPooling,
//!   temporal variation, primacy/recency and temporal hysteresis).
//! - [`stats`]: SRCC, PLCC and the four-parameter logistic mapping applied
//!   before PLCC.
//! - [`regression`]: epsilon-SVR with an RBF kernel trained by SMO, plus
//!   k-fold grid search.
//! - [`ensemble`]: the two-phase ensemble pooler (frame predictor and fusion
//!   regressor over several pooled scores).
//! - [`harness`]: dataset ingestion, seeded split/trial protocol, reports and
//!   a synthetic data generator.

pub mod ensemble;
pub mod error;
pub mod harness;
pub mod pooling;
pub mod regression;
pub mod stats;

pub use error::{Error, Result};
pub use pooling::{pool, FrameScores, PoolingSpec};
