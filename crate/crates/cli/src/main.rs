//! `vqpool`: temporal pooling, evaluation and ensemble pooling from the
//! command line.
//!
//! Exit status: 0 success, 1 usage or parse error, 2 domain or data error,
//! 3 internal error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use vqpool::ensemble::{self, EnsembleModel};
use vqpool::harness::{self, Dataset, EvalConfig, EvalMethod, MosRule, PhaseOneMode, ReportFormat, SynthSpec};
use vqpool::pooling::{self, PoolingSpec};
use vqpool::regression::GridSearchPlan;
use vqpool::{Error, FrameScores};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "vqpool",
    version,
    about = "Temporal pooling of frame-level video quality scores"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pool each video's frame scores into one value and print `video_id,score`.
    Pool(PoolCmd),
    /// Run the seeded split/trial protocol and write a median SRCC/PLCC report.
    Evaluate(EvaluateCmd),
    /// Train an ensemble (EPooling) model and write it to a file.
    EnsembleTrain(EnsembleTrainCmd),
    /// Predict video scores with a trained ensemble model.
    EnsemblePredict(EnsemblePredictCmd),
    /// Generate a synthetic frame-scores + MOS dataset.
    Synth(SynthCmd),
}

/// Parameters applied when a pooling method is named without inline
/// parameters (e.g. `percentile` rather than `percentile:k=20`).
#[derive(Args, Debug, Clone)]
struct PoolingArgs {
    /// Minkowski exponent p.
    #[arg(long, default_value_t = pooling::DEFAULT_MINKOWSKI_P)]
    minkowski_p: f64,
    /// Percentile pooling: percentage of worst frames averaged.
    #[arg(long, default_value_t = pooling::DEFAULT_PERCENT)]
    percentile_k: f64,
    /// Temporal variation: percentage of largest frame-to-frame changes averaged.
    #[arg(long, default_value_t = pooling::DEFAULT_PERCENT)]
    variation_k: f64,
    /// Negate the temporal variation output.
    #[arg(long)]
    variation_negate: bool,
    /// Primacy horizon L in frames.
    #[arg(long, default_value_t = pooling::DEFAULT_MEMORY_HORIZON)]
    primacy_horizon: usize,
    /// Primacy decay rate alpha_p.
    #[arg(long, default_value_t = pooling::DEFAULT_MEMORY_DECAY)]
    primacy_alpha: f64,
    /// Recency horizon L in frames.
    #[arg(long, default_value_t = pooling::DEFAULT_MEMORY_HORIZON)]
    recency_horizon: usize,
    /// Recency decay rate alpha_r.
    #[arg(long, default_value_t = pooling::DEFAULT_MEMORY_DECAY)]
    recency_alpha: f64,
    /// Hysteresis window tau in frames.
    #[arg(long, default_value_t = pooling::DEFAULT_HYSTERESIS_WINDOW)]
    hysteresis_window: usize,
    /// Hysteresis blend alpha between the current and memory terms.
    #[arg(long, default_value_t = pooling::DEFAULT_HYSTERESIS_BLEND)]
    hysteresis_blend: f64,
    /// Scores are better when lower (e.g. raw NIQE); affects which frames
    /// percentile pooling treats as worst.
    #[arg(long)]
    lower_is_better: bool,
}

impl PoolingArgs {
    fn spec(&self, name: &str) -> Result<PoolingSpec, Error> {
        let spec = if name.contains(':') {
            name.parse::<PoolingSpec>()?
        } else {
            match PoolingSpec::with_defaults(name)? {
                PoolingSpec::Minkowski { .. } => PoolingSpec::Minkowski { p: self.minkowski_p },
                PoolingSpec::Percentile { .. } => PoolingSpec::Percentile {
                    k_percent: self.percentile_k,
                    higher_is_better: !self.lower_is_better,
                },
                PoolingSpec::Variation { .. } => PoolingSpec::Variation {
                    k_percent: self.variation_k,
                    negate: self.variation_negate,
                },
                PoolingSpec::Primacy { .. } => PoolingSpec::Primacy {
                    horizon: self.primacy_horizon,
                    alpha: self.primacy_alpha,
                },
                PoolingSpec::Recency { .. } => PoolingSpec::Recency {
                    horizon: self.recency_horizon,
                    alpha: self.recency_alpha,
                },
                PoolingSpec::Hysteresis { .. } => PoolingSpec::Hysteresis {
                    window: self.hysteresis_window,
                    blend: self.hysteresis_blend,
                },
                other => other,
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    fn specs(&self, names: &[String]) -> Result<Vec<PoolingSpec>, Error> {
        names.iter().map(|n| self.spec(n)).collect()
    }
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
struct FrameSource {
    /// Frame-scores CSV (`video_id,frame_index,score`).
    #[arg(long)]
    scores: Option<PathBuf>,
    /// Per-frame features CSV (`video_id,frame_index,f0,f1,...`).
    #[arg(long)]
    features: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PoolCmd {
    /// Frame-scores CSV (`video_id,frame_index,score`).
    #[arg(long)]
    scores: PathBuf,
    /// Pooling method: mean, median, harmonic, geometric, minkowski,
    /// percentile, vqpooling, variation, primacy, recency, hysteresis.
    #[arg(long)]
    method: String,
    #[command(flatten)]
    pooling: PoolingArgs,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Markdown,
}

#[derive(Args, Debug)]
struct EvaluateCmd {
    #[command(flatten)]
    source: FrameSource,
    /// MOS CSV (`video_id,mos`).
    #[arg(long)]
    mos: PathBuf,
    /// Methods to evaluate, comma separated; `epooling` adds the ensemble.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "mean,median,harmonic,geometric,minkowski,percentile,vqpooling,variation,primacy,recency,hysteresis,epooling"
    )]
    methods: Vec<String>,
    /// Poolers fused by `epooling`, in regressor-input order.
    #[arg(long, value_delimiter = ',', default_value = "mean,vqpooling,hysteresis")]
    ensemble_set: Vec<String>,
    /// Number of random train/test splits.
    #[arg(long, default_value_t = harness::DEFAULT_TRIALS)]
    trials: usize,
    /// Master seed; per-trial seeds are derived from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fraction of videos used for training in each trial.
    #[arg(long, default_value_t = harness::DEFAULT_TRAIN_FRACTION)]
    train_fraction: f64,
    /// Run trials on all cores (output is identical either way).
    #[arg(long)]
    parallel: bool,
    /// With features: train the frame predictor and the fusion regressor on
    /// disjoint halves of each training split.
    #[arg(long)]
    nested_phase1: bool,
    /// With features: use every n-th frame to train the frame predictor.
    #[arg(long, default_value_t = 1)]
    frame_stride: usize,
    #[command(flatten)]
    pooling: PoolingArgs,
    #[arg(long, value_enum, default_value_t = Format::Markdown)]
    format: Format,
    /// Write the report to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EnsembleTrainCmd {
    #[command(flatten)]
    source: FrameSource,
    /// MOS CSV (`video_id,mos`).
    #[arg(long)]
    mos: PathBuf,
    /// Poolers fused by the ensemble, in regressor-input order.
    #[arg(long, value_delimiter = ',', default_value = "mean,vqpooling,hysteresis")]
    pooling_set: Vec<String>,
    #[command(flatten)]
    pooling: PoolingArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output model file.
    #[arg(long)]
    model_out: PathBuf,
}

#[derive(Args, Debug)]
struct EnsemblePredictCmd {
    /// Model file written by `ensemble-train`.
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    source: FrameSource,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Rule {
    Mean,
    WorstPercentile,
    HysteresisLike,
}

#[derive(Args, Debug)]
struct SynthCmd {
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    videos: u64,
    #[arg(long, default_value_t = 150, value_parser = clap::value_parser!(u64).range(1..))]
    frames: u64,
    /// Rule turning frame scores into MOS before noise is added.
    #[arg(long, value_enum, default_value_t = Rule::Mean)]
    rule: Rule,
    /// Standard deviation of the Gaussian noise added to MOS.
    #[arg(long, default_value_t = 0.1)]
    noise_sd: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Writes `<prefix>_scores.csv` and `<prefix>_mos.csv`.
    #[arg(long)]
    out_prefix: PathBuf,
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e.root() {
            Error::Parse { .. } | Error::Format(_) | Error::InvalidParameter(_) | Error::Io { .. } => EXIT_USAGE,
            _ => EXIT_DATA,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn load_dataset(source: &FrameSource, mos: &Path, higher_is_better: bool) -> Result<Dataset, Error> {
    let mos = harness::load_mos(mos)?;
    let scores = source.scores.as_ref().map(harness::load_frame_scores).transpose()?;
    let features = source.features.as_ref().map(harness::load_features).transpose()?;
    harness::assemble_dataset(mos, scores, features, higher_is_better)
}

fn run_pool(cmd: PoolCmd) -> CmdResult {
    let spec = cmd.pooling.spec(&cmd.method)?;
    let scores = harness::load_frame_scores(&cmd.scores)?;
    let mut out = String::from("video_id,score\n");
    for (id, series) in &scores {
        let q = pooling::pool(series, &spec).map_err(|e| Error::Video {
            video: id.clone(),
            source: Box::new(e),
        })?;
        out.push_str(&format!("{id},{q}\n"));
    }
    emit(cmd.out.as_deref(), &out)?;
    Ok(())
}

fn run_evaluate(cmd: EvaluateCmd) -> CmdResult {
    let mut methods = Vec::with_capacity(cmd.methods.len());
    for name in &cmd.methods {
        if name.eq_ignore_ascii_case("epooling") {
            methods.push(EvalMethod::EPooling {
                pooling_set: cmd.pooling.specs(&cmd.ensemble_set)?,
            });
        } else {
            methods.push(EvalMethod::Pool(cmd.pooling.spec(name)?));
        }
    }
    let dataset = load_dataset(&cmd.source, &cmd.mos, !cmd.pooling.lower_is_better)?;

    let mut config = EvalConfig::new(methods, cmd.trials, cmd.seed);
    config.train_fraction = cmd.train_fraction;
    config.parallel = cmd.parallel;
    config.frame_stride = cmd.frame_stride;
    if cmd.nested_phase1 {
        config.phase_one = PhaseOneMode::Nested;
    }
    let report = harness::run_pooling_evaluation(&dataset, &config)?;
    for m in &report.methods {
        if let Some(e) = m.first_error() {
            log::warn!(
                "{}: {} of {} trials failed (first: {e})",
                m.label,
                m.trials.len() - m.successful_trials(),
                m.trials.len()
            );
        }
    }
    let format = match cmd.format {
        Format::Csv => ReportFormat::Csv,
        Format::Markdown => ReportFormat::Markdown,
    };
    emit(cmd.out.as_deref(), &harness::emit_report(&report, format))?;
    if report.methods.iter().all(|m| m.failed()) {
        let first = report.methods[0].first_error().unwrap_or("unknown error");
        return Err(Failure {
            code: EXIT_DATA,
            message: format!("every method failed in every trial ({first})"),
        });
    }
    Ok(())
}

fn run_ensemble_train(cmd: EnsembleTrainCmd) -> CmdResult {
    let pooling_set = cmd.pooling.specs(&cmd.pooling_set)?;
    let dataset = load_dataset(&cmd.source, &cmd.mos, !cmd.pooling.lower_is_better)?;
    let mos = dataset.mos();

    let (series, frame_predictor) = if dataset.has_scores() {
        let series: Vec<FrameScores> = dataset
            .records
            .iter()
            .map(|r| r.frame_scores.clone().expect("scores present"))
            .collect();
        (series, None)
    } else {
        let features: Vec<&[Vec<f64>]> = dataset
            .records
            .iter()
            .map(|r| r.frame_features.as_deref().expect("features present"))
            .collect();
        let dim = features[0].first().map_or(1, Vec::len);
        let predictor = ensemble::train_frame_predictor(&features, &mos, &GridSearchPlan::default_for(dim), cmd.seed)?;
        let series = features
            .iter()
            .map(|f| ensemble::predict_frame_scores(&predictor, f))
            .collect::<Result<Vec<_>, _>>()?;
        (series, Some(predictor))
    };

    let videos: Vec<(&str, &FrameScores)> = dataset
        .records
        .iter()
        .zip(&series)
        .map(|(r, s)| (r.id.as_str(), s))
        .collect();
    let plan = GridSearchPlan::default_for(pooling_set.len());
    let mut model = ensemble::epooling_train(&videos, &mos, &pooling_set, &plan, cmd.seed)?;
    model.frame_predictor = frame_predictor;
    emit(Some(&cmd.model_out), &model.to_text())?;
    Ok(())
}

fn run_ensemble_predict(cmd: EnsemblePredictCmd) -> CmdResult {
    let text = fs::read_to_string(&cmd.model).map_err(|source| Error::Io {
        path: cmd.model.clone(),
        source,
    })?;
    let model = EnsembleModel::from_text(&text)?;
    let tag = |id: &str| {
        let id = id.to_string();
        move |e: Error| Error::Video {
            video: id,
            source: Box::new(e),
        }
    };
    let mut out = String::from("video_id,score\n");
    if let Some(path) = &cmd.source.scores {
        for (id, series) in &harness::load_frame_scores(path)? {
            let q = ensemble::epooling_predict(&model, series).map_err(tag(id))?;
            out.push_str(&format!("{id},{q}\n"));
        }
    } else if let Some(path) = &cmd.source.features {
        for (id, frames) in &harness::load_features(path)? {
            let q = model.predict_from_features(frames).map_err(tag(id))?;
            out.push_str(&format!("{id},{q}\n"));
        }
    }
    emit(cmd.out.as_deref(), &out)?;
    Ok(())
}

fn run_synth(cmd: SynthCmd) -> CmdResult {
    let spec = SynthSpec {
        n_videos: cmd.videos as usize,
        frames_per_video: cmd.frames as usize,
        mos_rule: match cmd.rule {
            Rule::Mean => MosRule::Mean,
            Rule::WorstPercentile => MosRule::WorstPercentile,
            Rule::HysteresisLike => MosRule::HysteresisLike,
        },
        noise_sd: cmd.noise_sd,
        seed: cmd.seed,
    };
    let dataset = harness::synth_generate(&spec)?;
    let prefix = cmd.out_prefix.display().to_string();
    harness::io::write_frame_scores(format!("{prefix}_scores.csv"), &dataset)?;
    harness::io::write_mos(format!("{prefix}_mos.csv"), &dataset)?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    let outcome = std::panic::catch_unwind(|| match cli.command {
        Command::Pool(c) => run_pool(c),
        Command::Evaluate(c) => run_evaluate(c),
        Command::EnsembleTrain(c) => run_ensemble_train(c),
        Command::EnsemblePredict(c) => run_ensemble_predict(c),
        Command::Synth(c) => run_synth(c),
    });
    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(f)) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
        Err(_) => {
            eprintln!("error: internal failure");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}
