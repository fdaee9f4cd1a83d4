//! Temporal pooling functions `F(q_1, ..., q_N) -> Q`.
//!
//! Every function here is pure: it reads an immutable [`FrameScores`] and
//! returns a value, so all of them may be called concurrently.

mod hysteresis;
mod means;
mod memory;
mod percentile;
mod series;
mod vqpooling;

use std::fmt;
use std::str::FromStr;

pub use hysteresis::{half_gaussian_weights, hysteresis_transform, pool_hysteresis, HysteresisTrace};
pub use means::{pool_geometric, pool_harmonic, pool_mean, pool_median, pool_minkowski};
pub use memory::{pool_primacy, pool_recency};
pub use percentile::{frame_gradients, pool_percentile, pool_variation};
pub use series::FrameScores;
pub use vqpooling::{kmeans_1d_two, pool_vqpooling, ClusterSplit};

use crate::error::{Error, Result};

pub const DEFAULT_MINKOWSKI_P: f64 = 2.0;
pub const DEFAULT_PERCENT: f64 = 10.0;
pub const DEFAULT_MEMORY_HORIZON: usize = 180;
pub const DEFAULT_MEMORY_DECAY: f64 = 0.01;
pub const DEFAULT_HYSTERESIS_WINDOW: usize = 60;
pub const DEFAULT_HYSTERESIS_BLEND: f64 = 0.8;

/// A pooling method together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PoolingSpec {
    Mean,
    Median,
    Harmonic,
    Geometric,
    Minkowski {
        p: f64,
    },
    Percentile {
        k_percent: f64,
        higher_is_better: bool,
    },
    VqPooling,
    /// `negate` flips the sign of the pooled variation magnitude.
    Variation {
        k_percent: f64,
        negate: bool,
    },
    Primacy {
        horizon: usize,
        alpha: f64,
    },
    Recency {
        horizon: usize,
        alpha: f64,
    },
    Hysteresis {
        window: usize,
        blend: f64,
    },
}

impl PoolingSpec {
    pub const NAMES: [&'static str; 11] = [
        "mean",
        "median",
        "harmonic",
        "geometric",
        "minkowski",
        "percentile",
        "vqpooling",
        "variation",
        "primacy",
        "recency",
        "hysteresis",
    ];

    /// The method with default parameters, looked up by its lowercase name.
    pub fn with_defaults(name: &str) -> Result<Self> {
        Ok(match name.to_ascii_lowercase().as_str() {
            "mean" => PoolingSpec::Mean,
            "median" => PoolingSpec::Median,
            "harmonic" => PoolingSpec::Harmonic,
            "geometric" => PoolingSpec::Geometric,
            "minkowski" => PoolingSpec::Minkowski { p: DEFAULT_MINKOWSKI_P },
            "percentile" => PoolingSpec::Percentile {
                k_percent: DEFAULT_PERCENT,
                higher_is_better: true,
            },
            "vqpooling" => PoolingSpec::VqPooling,
            "variation" => PoolingSpec::Variation {
                k_percent: DEFAULT_PERCENT,
                negate: false,
            },
            "primacy" => PoolingSpec::Primacy {
                horizon: DEFAULT_MEMORY_HORIZON,
                alpha: DEFAULT_MEMORY_DECAY,
            },
            "recency" => PoolingSpec::Recency {
                horizon: DEFAULT_MEMORY_HORIZON,
                alpha: DEFAULT_MEMORY_DECAY,
            },
            "hysteresis" => PoolingSpec::Hysteresis {
                window: DEFAULT_HYSTERESIS_WINDOW,
                blend: DEFAULT_HYSTERESIS_BLEND,
            },
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown pooling method `{other}` (expected one of {})",
                    Self::NAMES.join(", ")
                )))
            }
        })
    }

    /// All eleven methods with default parameters, in table order.
    pub fn all_defaults() -> Vec<Self> {
        Self::NAMES
            .iter()
            .map(|n| Self::with_defaults(n).expect("known name"))
            .collect()
    }

    pub fn name(&self) -> &'static str {
        match self {
            PoolingSpec::Mean => "mean",
            PoolingSpec::Median => "median",
            PoolingSpec::Harmonic => "harmonic",
            PoolingSpec::Geometric => "geometric",
            PoolingSpec::Minkowski { .. } => "minkowski",
            PoolingSpec::Percentile { .. } => "percentile",
            PoolingSpec::VqPooling => "vqpooling",
            PoolingSpec::Variation { .. } => "variation",
            PoolingSpec::Primacy { .. } => "primacy",
            PoolingSpec::Recency { .. } => "recency",
            PoolingSpec::Hysteresis { .. } => "hysteresis",
        }
    }

    /// Human-facing label used in reports.
    pub fn label(&self) -> &'static str {
        match self {
            PoolingSpec::Mean => "Mean",
            PoolingSpec::Median => "Median",
            PoolingSpec::Harmonic => "Harmonic",
            PoolingSpec::Geometric => "Geometric",
            PoolingSpec::Minkowski { .. } => "Minkowski",
            PoolingSpec::Percentile { .. } => "Percentile",
            PoolingSpec::VqPooling => "VQPooling",
            PoolingSpec::Variation { .. } => "Variation",
            PoolingSpec::Primacy { .. } => "Primacy",
            PoolingSpec::Recency { .. } => "Recency",
            PoolingSpec::Hysteresis { .. } => "Hysteresis",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            PoolingSpec::Minkowski { p } if !p.is_finite() || p == 0.0 => {
                bad(format!("Minkowski exponent must be finite and nonzero, got {p}"))
            }
            PoolingSpec::Percentile { k_percent, .. } | PoolingSpec::Variation { k_percent, .. } => {
                series::check_percent(k_percent)
            }
            PoolingSpec::Primacy { horizon, alpha } | PoolingSpec::Recency { horizon, alpha } => {
                if horizon == 0 {
                    bad("memory horizon must be at least 1 frame".into())
                } else if !(alpha.is_finite() && alpha >= 0.0) {
                    bad(format!("memory decay rate must be nonnegative, got {alpha}"))
                } else {
                    Ok(())
                }
            }
            PoolingSpec::Hysteresis { window, blend } => {
                if window == 0 {
                    bad("hysteresis window must be at least 1 frame".into())
                } else if !(0.0..=1.0).contains(&blend) {
                    bad(format!("hysteresis blend must lie in [0, 1], got {blend}"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Same method with its orientation-dependent parameter set.
    pub fn with_orientation(self, higher_is_better: bool) -> Self {
        match self {
            PoolingSpec::Percentile { k_percent, .. } => PoolingSpec::Percentile {
                k_percent,
                higher_is_better,
            },
            other => other,
        }
    }
}

impl fmt::Display for PoolingSpec {
    /// `name` or `name:key=value,...`; parsed back by [`FromStr`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        match *self {
            PoolingSpec::Minkowski { p } => write!(f, ":p={p}"),
            PoolingSpec::Percentile {
                k_percent,
                higher_is_better,
            } => write!(f, ":k={k_percent},higher_is_better={higher_is_better}"),
            PoolingSpec::Variation { k_percent, negate } => write!(f, ":k={k_percent},negate={negate}"),
            PoolingSpec::Primacy { horizon, alpha } | PoolingSpec::Recency { horizon, alpha } => {
                write!(f, ":horizon={horizon},alpha={alpha}")
            }
            PoolingSpec::Hysteresis { window, blend } => write!(f, ":tau={window},alpha={blend}"),
            _ => Ok(()),
        }
    }
}

impl FromStr for PoolingSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = match s.split_once(':') {
            Some((n, p)) => (n.trim(), p),
            None => (s.trim(), ""),
        };
        let mut spec = PoolingSpec::with_defaults(name)?;
        for kv in params.split(',').map(str::trim).filter(|kv| !kv.is_empty()) {
            let (key, value) = kv
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("expected key=value, got `{kv}`")))?;
            spec.set(key.trim(), value.trim())?;
        }
        spec.validate()?;
        Ok(spec)
    }
}

impl PoolingSpec {
    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad value `{value}` for `{key}`")))
        }
        match (self, key) {
            (PoolingSpec::Minkowski { p }, "p") => *p = num(key, value)?,
            (PoolingSpec::Percentile { k_percent, .. }, "k") | (PoolingSpec::Variation { k_percent, .. }, "k") => {
                *k_percent = num(key, value)?
            }
            (PoolingSpec::Percentile { higher_is_better, .. }, "higher_is_better") => {
                *higher_is_better = num(key, value)?
            }
            (PoolingSpec::Variation { negate, .. }, "negate") => *negate = num(key, value)?,
            (PoolingSpec::Primacy { horizon, .. }, "horizon") | (PoolingSpec::Recency { horizon, .. }, "horizon") => {
                *horizon = num(key, value)?
            }
            (PoolingSpec::Primacy { alpha, .. }, "alpha") | (PoolingSpec::Recency { alpha, .. }, "alpha") => {
                *alpha = num(key, value)?
            }
            (PoolingSpec::Hysteresis { window, .. }, "tau") => *window = num(key, value)?,
            (PoolingSpec::Hysteresis { blend, .. }, "alpha") => *blend = num(key, value)?,
            (spec, _) => {
                return Err(Error::InvalidParameter(format!(
                    "`{key}` is not a parameter of {}",
                    spec.name()
                )))
            }
        }
        Ok(())
    }
}

/// Pools `series` with the method described by `spec`.
pub fn pool(series: &FrameScores, spec: &PoolingSpec) -> Result<f64> {
    spec.validate()?;
    match *spec {
        PoolingSpec::Mean => Ok(pool_mean(series)),
        PoolingSpec::Median => Ok(pool_median(series)),
        PoolingSpec::Harmonic => pool_harmonic(series),
        PoolingSpec::Geometric => pool_geometric(series),
        PoolingSpec::Minkowski { p } => pool_minkowski(series, p),
        PoolingSpec::Percentile {
            k_percent,
            higher_is_better,
        } => pool_percentile(series, k_percent, higher_is_better),
        PoolingSpec::VqPooling => pool_vqpooling(series),
        PoolingSpec::Variation { k_percent, negate } => {
            let v = pool_variation(series, k_percent)?;
            Ok(if negate { -v } else { v })
        }
        PoolingSpec::Primacy { horizon, alpha } => pool_primacy(series, horizon, alpha),
        PoolingSpec::Recency { horizon, alpha } => pool_recency(series, horizon, alpha),
        PoolingSpec::Hysteresis { window, blend } => pool_hysteresis(series, window, blend),
    }
}
