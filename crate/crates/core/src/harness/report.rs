//! Report rendering.
//!
//! The CSV form carries full-precision medians followed by one appendix row
//! per (method, trial); the markdown form mirrors the usual
//! `SRCC / PLCC` table with the three best values of each column in bold.

use std::fmt::Write as _;

use super::eval::EvalReport;
use crate::error::{Error, Result};

pub const SUMMARY_HEADER: &str = "method,median_srcc,median_plcc,trials";
pub const APPENDIX_HEADER: &str = "method,trial,seed,srcc,plcc";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

pub fn emit_report(report: &EvalReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => to_csv(report),
        ReportFormat::Markdown => to_markdown(report),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn to_csv(report: &EvalReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{SUMMARY_HEADER}");
    for m in &report.methods {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            m.label,
            opt(m.median_srcc),
            opt(m.median_plcc),
            m.trials.len()
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "{APPENDIX_HEADER}");
    for m in &report.methods {
        for t in &m.trials {
            let (s, p) = match &t.result {
                Ok(r) => (r.srcc.to_string(), r.plcc.to_string()),
                Err(_) => (String::new(), String::new()),
            };
            let _ = writeln!(out, "{},{},{},{s},{p}", m.label, t.trial, t.seed);
        }
    }
    out
}

/// Indices of the (up to) three largest values; ties keep table order.
fn top_three(values: &[Option<f64>]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).filter(|&i| values[i].is_some()).collect();
    idx.sort_by(|&a, &b| values[b].unwrap().total_cmp(&values[a].unwrap()));
    idx.truncate(3);
    idx
}

fn to_markdown(report: &EvalReport) -> String {
    let srcc: Vec<Option<f64>> = report.methods.iter().map(|m| m.median_srcc).collect();
    let plcc: Vec<Option<f64>> = report.methods.iter().map(|m| m.median_plcc).collect();
    let (best_s, best_p) = (top_three(&srcc), top_three(&plcc));
    let cell = |v: Option<f64>, bold: bool| match (v, bold) {
        (Some(x), true) => format!("**{x:.3}**"),
        (Some(x), false) => format!("{x:.3}"),
        (None, _) => "failed".to_string(),
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        "Median SRCC / PLCC over {} trials ({:.0}%/{:.0}% train/test split, seed {}).",
        report.trials,
        report.train_fraction * 100.0,
        (1.0 - report.train_fraction) * 100.0,
        report.seed
    );
    let _ = writeln!(out);
    let _ = writeln!(out, "| Pool/Model | SRCC / PLCC |");
    let _ = writeln!(out, "|:-----------|:-----------:|");
    for (i, m) in report.methods.iter().enumerate() {
        let body = if m.failed() {
            "failed".to_string()
        } else {
            format!(
                "{} / {}",
                cell(m.median_srcc, best_s.contains(&i)),
                cell(m.median_plcc, best_p.contains(&i))
            )
        };
        let _ = writeln!(out, "| {} | {body} |", m.label);
    }
    out
}

/// One summary row read back from a CSV report.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub method: String,
    pub median_srcc: Option<f64>,
    pub median_plcc: Option<f64>,
    pub trials: usize,
}

/// One appendix row read back from a CSV report.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    pub method: String,
    pub trial: usize,
    pub seed: u64,
    pub srcc: Option<f64>,
    pub plcc: Option<f64>,
}

/// Parses the CSV produced by [`emit_report`].
pub fn parse_report_csv(text: &str) -> Result<(Vec<SummaryRow>, Vec<TrialRow>)> {
    let err = |line: usize, msg: &str| Error::Parse {
        path: "<report>".into(),
        line: line as u64,
        message: msg.to_string(),
    };
    fn cell<T: std::str::FromStr>(s: &str) -> std::result::Result<Option<T>, ()> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|_| ())
        }
    }

    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, SUMMARY_HEADER)) => {}
        _ => return Err(err(1, "missing summary header")),
    }
    let mut summary = Vec::new();
    for (n, line) in lines.by_ref() {
        if line.is_empty() {
            break;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(err(n, "summary row needs 4 fields"));
        }
        summary.push(SummaryRow {
            method: f[0].to_string(),
            median_srcc: cell(f[1]).map_err(|_| err(n, "bad median_srcc"))?,
            median_plcc: cell(f[2]).map_err(|_| err(n, "bad median_plcc"))?,
            trials: f[3].parse().map_err(|_| err(n, "bad trial count"))?,
        });
    }
    match lines.next() {
        Some((_, APPENDIX_HEADER)) => {}
        Some((n, _)) => return Err(err(n, "missing appendix header")),
        None => return Ok((summary, Vec::new())),
    }
    let mut trials = Vec::new();
    for (n, line) in lines {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(err(n, "appendix row needs 5 fields"));
        }
        trials.push(TrialRow {
            method: f[0].to_string(),
            trial: f[1].parse().map_err(|_| err(n, "bad trial index"))?,
            seed: f[2].parse().map_err(|_| err(n, "bad seed"))?,
            srcc: cell(f[3]).map_err(|_| err(n, "bad srcc"))?,
            plcc: cell(f[4]).map_err(|_| err(n, "bad plcc"))?,
        });
    }
    Ok((summary, trials))
}
