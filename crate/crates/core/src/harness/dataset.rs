use std::collections::HashSet;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::pooling::FrameScores;

/// One video: its MOS plus frame-level scores and/or per-frame features.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoRecord {
    pub id: String,
    pub mos: f64,
    pub frame_scores: Option<FrameScores>,
    /// Rows are frames.
    pub frame_features: Option<Vec<Vec<f64>>>,
}

impl VideoRecord {
    pub fn frame_count(&self) -> usize {
        match (&self.frame_scores, &self.frame_features) {
            (Some(s), _) => s.len(),
            (None, Some(f)) => f.len(),
            (None, None) => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub records: Vec<VideoRecord>,
    pub mos_scale: (f64, f64),
    pub higher_is_better: bool,
}

impl Dataset {
    pub fn new(records: Vec<VideoRecord>, mos_scale: (f64, f64), higher_is_better: bool) -> Result<Self> {
        let mut seen = HashSet::new();
        for r in &records {
            if !seen.insert(r.id.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate video id `{}`", r.id)));
            }
            if !r.mos.is_finite() || r.mos < mos_scale.0 || r.mos > mos_scale.1 {
                return Err(Error::InvalidInput(format!(
                    "video `{}` has MOS {} outside scale [{}, {}]",
                    r.id, r.mos, mos_scale.0, mos_scale.1
                )));
            }
            match (&r.frame_scores, &r.frame_features) {
                (None, None) => {
                    return Err(Error::InvalidInput(format!(
                        "video `{}` has neither frame scores nor features",
                        r.id
                    )))
                }
                (Some(s), Some(f)) if s.len() != f.len() => {
                    return Err(Error::InvalidInput(format!(
                        "video `{}` has {} frame scores but {} feature rows",
                        r.id,
                        s.len(),
                        f.len()
                    )))
                }
                _ => {}
            }
        }
        Ok(Dataset {
            records,
            mos_scale,
            higher_is_better,
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn mos(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.mos).collect()
    }

    pub fn has_scores(&self) -> bool {
        self.records.iter().all(|r| r.frame_scores.is_some())
    }

    pub fn has_features(&self) -> bool {
        self.records.iter().all(|r| r.frame_features.is_some())
    }

    /// The records at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            records: indices.iter().map(|&i| self.records[i].clone()).collect(),
            mos_scale: self.mos_scale,
            higher_is_better: self.higher_is_better,
        }
    }
}

pub type ScoresFragment = IndexMap<String, FrameScores>;
pub type FeaturesFragment = IndexMap<String, Vec<Vec<f64>>>;
pub type MosFragment = IndexMap<String, f64>;

fn mismatches<A, B>(reference: &IndexMap<String, A>, other: &IndexMap<String, B>, what: &str) -> Vec<String> {
    let mut out: Vec<String> = reference
        .keys()
        .filter(|k| !other.contains_key(*k))
        .map(|k| format!("`{k}` (no {what})"))
        .collect();
    out.extend(
        other
            .keys()
            .filter(|k| !reference.contains_key(*k))
            .map(|k| format!("`{k}` (in {what} but not in MOS file)")),
    );
    out
}

/// Joins the per-file fragments by video id, in MOS-file order. The MOS
/// scale is taken from the observed range.
pub fn assemble_dataset(
    mos: MosFragment,
    scores: Option<ScoresFragment>,
    features: Option<FeaturesFragment>,
    higher_is_better: bool,
) -> Result<Dataset> {
    if scores.is_none() && features.is_none() {
        return Err(Error::InvalidInput(
            "a dataset needs frame scores or frame features".into(),
        ));
    }
    let mut offenders = Vec::new();
    if let Some(s) = &scores {
        offenders.extend(mismatches(&mos, s, "frame scores"));
    }
    if let Some(f) = &features {
        offenders.extend(mismatches(&mos, f, "features"));
    }
    if !offenders.is_empty() {
        return Err(Error::UnmatchedIds(offenders.join(", ")));
    }
    let (mut scores, mut features) = (scores, features);
    let lo = mos.values().copied().fold(f64::INFINITY, f64::min);
    let hi = mos.values().copied().fold(f64::NEG_INFINITY, f64::max);
    let records = mos
        .into_iter()
        .map(|(id, m)| VideoRecord {
            frame_scores: scores.as_mut().and_then(|s| s.swap_remove(&id)),
            frame_features: features.as_mut().and_then(|f| f.swap_remove(&id)),
            id,
            mos: m,
        })
        .collect();
    Dataset::new(records, (lo, hi), higher_is_better)
}
