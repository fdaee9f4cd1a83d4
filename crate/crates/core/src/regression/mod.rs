//! Epsilon-SVR with an RBF kernel, trained by SMO, and a cross-validated
//! 3x3 `(C, gamma)` grid search on top of it.

mod grid;
mod scaler;
pub mod smo;
mod svr;

pub use grid::{grid_search_train, kfold_indices, CandidateScore, GridSearchPlan, GridSearchResult, DEFAULT_FOLDS};
pub use scaler::Scaler;
pub use svr::{rbf, svr_train, SvrModel, SvrParams, DEFAULT_EPSILON, DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE};
