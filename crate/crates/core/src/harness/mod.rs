//! Dataset ingestion, the seeded split/trial protocol, reporting and
//! synthetic data.

mod dataset;
mod eval;
pub mod io;
mod report;
mod split;
mod synth;

pub use dataset::{assemble_dataset, Dataset, FeaturesFragment, MosFragment, ScoresFragment, VideoRecord};
pub use eval::{
    run_pooling_evaluation, EvalConfig, EvalMethod, EvalReport, MethodReport, PhaseOneMode, TrialOutcome, TrialScores,
    DEFAULT_TRAIN_FRACTION, DEFAULT_TRIALS,
};
pub use io::{load_features, load_frame_scores, load_mos};
pub use report::{emit_report, parse_report_csv, ReportFormat, SummaryRow, TrialRow, APPENDIX_HEADER, SUMMARY_HEADER};
pub use split::{derive_seed, split_dataset, split_indices};
pub use synth::{synth_generate, MosRule, SynthSpec};
