//! CSV readers and writers for frame scores, per-frame features and MOS.
//!
//! All files are UTF-8 with a mandatory header:
//!
//! - frame scores: `video_id,frame_index,score`
//! - features: `video_id,frame_index,f0,f1,...`
//! - MOS: `video_id,mos`
//!
//! Frame indices are 0-based and must be dense per video; rows may appear in
//! any order.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use indexmap::IndexMap;

use super::dataset::{Dataset, FeaturesFragment, MosFragment, ScoresFragment};
use crate::error::{Error, Result};
use crate::pooling::FrameScores;

fn parse_err(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

fn reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn check_header(path: &Path, rdr: &mut csv::Reader<fs::File>, expected: &[&str], open_ended: bool) -> Result<usize> {
    let headers = rdr.headers().map_err(|e| parse_err(path, 1, e.to_string()))?.clone();
    let ok = if open_ended {
        headers.len() > expected.len() && headers.iter().zip(expected).all(|(h, e)| h == *e)
    } else {
        headers.iter().eq(expected.iter().copied())
    };
    if !ok {
        let want = if open_ended {
            format!("{},f0,f1,...", expected.join(","))
        } else {
            expected.join(",")
        };
        return Err(parse_err(
            path,
            1,
            format!(
                "expected header `{want}`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    Ok(headers.len())
}

fn records(path: &Path, rdr: &mut csv::Reader<fs::File>) -> Result<Vec<(u64, csv::StringRecord)>> {
    rdr.records()
        .map(|r| {
            r.map(|rec| (rec.position().map_or(0, |p| p.line()), rec)).map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                parse_err(path, line, e.to_string())
            })
        })
        .collect()
}

fn number<T: std::str::FromStr>(path: &Path, line: u64, field: &str, what: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| parse_err(path, line, format!("cannot parse {what} `{field}`")))
}

fn finite(path: &Path, line: u64, field: &str, what: &str) -> Result<f64> {
    let v: f64 = number(path, line, field, what)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(parse_err(path, line, format!("{what} `{field}` is not finite")))
    }
}

/// Groups `(frame_index, value)` rows by video and checks index density.
fn densify<T>(path: &Path, rows: IndexMap<String, Vec<(usize, u64, T)>>) -> Result<IndexMap<String, Vec<T>>> {
    let mut out = IndexMap::with_capacity(rows.len());
    for (id, mut frames) in rows {
        frames.sort_by_key(|(idx, _, _)| *idx);
        for (expected, (idx, line, _)) in frames.iter().enumerate() {
            if *idx != expected {
                let msg = if *idx < expected {
                    format!("video `{id}` repeats frame index {idx}")
                } else {
                    format!("video `{id}` is missing frame index {expected}")
                };
                return Err(parse_err(path, *line, msg));
            }
        }
        out.insert(id, frames.into_iter().map(|(_, _, v)| v).collect());
    }
    Ok(out)
}

pub fn load_frame_scores(path: impl AsRef<Path>) -> Result<ScoresFragment> {
    let path = path.as_ref();
    let mut rdr = reader(path)?;
    check_header(path, &mut rdr, &["video_id", "frame_index", "score"], false)?;
    let mut rows: IndexMap<String, Vec<(usize, u64, f64)>> = IndexMap::new();
    for (line, rec) in records(path, &mut rdr)? {
        let idx = number(path, line, &rec[1], "frame index")?;
        let score = finite(path, line, &rec[2], "score")?;
        rows.entry(rec[0].to_string()).or_default().push((idx, line, score));
    }
    densify(path, rows)?
        .into_iter()
        .map(|(id, v)| Ok((id, FrameScores::new(v)?)))
        .collect()
}

pub fn load_features(path: impl AsRef<Path>) -> Result<FeaturesFragment> {
    let path = path.as_ref();
    let mut rdr = reader(path)?;
    let width = check_header(path, &mut rdr, &["video_id", "frame_index"], true)?;
    let mut rows: IndexMap<String, Vec<(usize, u64, Vec<f64>)>> = IndexMap::new();
    for (line, rec) in records(path, &mut rdr)? {
        if rec.len() != width {
            return Err(parse_err(
                path,
                line,
                format!("expected {width} columns, found {}", rec.len()),
            ));
        }
        let idx = number(path, line, &rec[1], "frame index")?;
        let feats = rec
            .iter()
            .skip(2)
            .map(|f| finite(path, line, f, "feature"))
            .collect::<Result<Vec<f64>>>()?;
        rows.entry(rec[0].to_string()).or_default().push((idx, line, feats));
    }
    densify(path, rows)
}

pub fn load_mos(path: impl AsRef<Path>) -> Result<MosFragment> {
    let path = path.as_ref();
    let mut rdr = reader(path)?;
    check_header(path, &mut rdr, &["video_id", "mos"], false)?;
    let mut out = MosFragment::new();
    for (line, rec) in records(path, &mut rdr)? {
        let mos = finite(path, line, &rec[1], "MOS")?;
        if out.insert(rec[0].to_string(), mos).is_some() {
            return Err(parse_err(path, line, format!("duplicate video id `{}`", &rec[0])));
        }
    }
    Ok(out)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Frame-scores CSV text for every record that carries scores.
pub fn frame_scores_csv(dataset: &Dataset) -> String {
    let mut out = String::from("video_id,frame_index,score\n");
    for r in &dataset.records {
        if let Some(s) = &r.frame_scores {
            for (i, q) in s.iter().enumerate() {
                let _ = writeln!(out, "{},{i},{q}", r.id);
            }
        }
    }
    out
}

pub fn mos_csv(dataset: &Dataset) -> String {
    let mut out = String::from("video_id,mos\n");
    for r in &dataset.records {
        let _ = writeln!(out, "{},{}", r.id, r.mos);
    }
    out
}

pub fn write_frame_scores(path: impl AsRef<Path>, dataset: &Dataset) -> Result<()> {
    write(path.as_ref(), &frame_scores_csv(dataset))
}

pub fn write_mos(path: impl AsRef<Path>, dataset: &Dataset) -> Result<()> {
    write(path.as_ref(), &mos_csv(dataset))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn reads_scores_in_any_row_order() {
        let f = file("video_id,frame_index,score\na,1,2.5\nb,0,1\na,0,3.5\n");
        let s = load_frame_scores(f.path()).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s["a"].as_slice(), &[3.5, 2.5]);
        assert_eq!(s.get_index(0).unwrap().0, "a");
    }

    #[test]
    fn non_numeric_score_reports_line() {
        let f = file("video_id,frame_index,score\na,0,2.5\na,1,oops\n");
        match load_frame_scores(f.path()) {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 3);
                assert!(message.contains("oops"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sparse_or_repeated_indices_rejected() {
        let f = file("video_id,frame_index,score\na,0,1\na,2,1\n");
        assert!(matches!(load_frame_scores(f.path()), Err(Error::Parse { .. })));
        let f = file("video_id,frame_index,score\na,0,1\na,0,1\n");
        assert!(matches!(load_frame_scores(f.path()), Err(Error::Parse { .. })));
    }

    #[test]
    fn header_is_required() {
        let f = file("a,0,1\na,1,2\n");
        assert!(matches!(load_frame_scores(f.path()), Err(Error::Parse { line: 1, .. })));
        let f = file("id,mos\na,1\n");
        assert!(matches!(load_mos(f.path()), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn features_need_constant_arity() {
        let f = file("video_id,frame_index,f0,f1\na,0,1,2\na,1,3,4\n");
        let feats = load_features(f.path()).unwrap();
        assert_eq!(feats["a"], vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        let f = file("video_id,frame_index,f0,f1\na,0,1,2\na,1,3\n");
        assert!(load_features(f.path()).is_err());
        let f = file("video_id,frame_index\na,0\n");
        assert!(load_features(f.path()).is_err());
    }

    #[test]
    fn mos_duplicates_and_missing_file() {
        let f = file("video_id,mos\na,1\na,2\n");
        assert!(matches!(load_mos(f.path()), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(load_mos("/nonexistent/mos.csv"), Err(Error::Io { .. })));
    }
}
