//! Reference implementations used by the acceptance suite. Each one is a
//! direct, unoptimised transcription of the pooling formulas and shares no
//! code with the library.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn mean(q: &[f64]) -> f64 {
    q.iter().sum::<f64>() / q.len() as f64
}

pub fn median(q: &[f64]) -> f64 {
    let mut v = q.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

pub fn harmonic(q: &[f64]) -> f64 {
    let inv: f64 = q.iter().map(|x| 1.0 / x).sum::<f64>() / q.len() as f64;
    1.0 / inv
}

pub fn geometric(q: &[f64]) -> f64 {
    let n = q.len() as f64;
    q.iter().map(|x| x.powf(1.0 / n)).product()
}

pub fn minkowski(q: &[f64], p: f64) -> f64 {
    (q.iter().map(|x| x.powf(p)).sum::<f64>() / q.len() as f64).powf(1.0 / p)
}

/// Size of a k% subset of `n` items for integral `k`: ceil(k n / 100), at
/// least one.
pub fn subset_size(k: u32, n: usize) -> usize {
    ((k as usize * n).div_ceil(100)).max(1)
}

pub fn percentile(q: &[f64], k: u32, higher_is_better: bool) -> f64 {
    let mut order: Vec<usize> = (0..q.len()).collect();
    order.sort_by(|&a, &b| {
        let by_value = if higher_is_better {
            q[a].partial_cmp(&q[b]).unwrap()
        } else {
            q[b].partial_cmp(&q[a]).unwrap()
        };
        by_value.then(a.cmp(&b))
    });
    let m = subset_size(k, q.len());
    order[..m].iter().map(|&i| q[i]).sum::<f64>() / m as f64
}

/// Two-cluster Lloyd iteration started from the extreme values. Returns
/// `(G_L, G_H)` as frame index lists, or `None` when every score is equal.
pub fn two_means(q: &[f64]) -> Option<(Vec<usize>, Vec<usize>)> {
    let lo = q.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = q.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return None;
    }
    let (mut c_low, mut c_high) = (lo, hi);
    let mut labels: Vec<bool> = vec![false; q.len()];
    for round in 0..100 {
        let next: Vec<bool> = q.iter().map(|&x| (x - c_high).abs() < (x - c_low).abs()).collect();
        if round > 0 && next == labels {
            break;
        }
        labels = next;
        let high: Vec<f64> = q.iter().zip(&labels).filter(|(_, &h)| h).map(|(x, _)| *x).collect();
        let low: Vec<f64> = q.iter().zip(&labels).filter(|(_, &h)| !h).map(|(x, _)| *x).collect();
        if !low.is_empty() {
            c_low = mean(&low);
        }
        if !high.is_empty() {
            c_high = mean(&high);
        }
    }
    let g_l = (0..q.len()).filter(|&i| !labels[i]).collect();
    let g_h = (0..q.len()).filter(|&i| labels[i]).collect();
    Some((g_l, g_h))
}

pub fn vqpooling(q: &[f64]) -> f64 {
    let Some((g_l, g_h)) = two_means(q) else {
        return q[0];
    };
    let m_l = g_l.iter().map(|&i| q[i]).sum::<f64>() / g_l.len() as f64;
    let m_h = g_h.iter().map(|&i| q[i]).sum::<f64>() / g_h.len() as f64;
    let w = (1.0 - m_l / m_h).powi(2);
    let num = g_l.iter().map(|&i| q[i]).sum::<f64>() + w * g_h.iter().map(|&i| q[i]).sum::<f64>();
    num / (g_l.len() as f64 + w * g_h.len() as f64)
}

pub fn variation(q: &[f64], k: u32) -> f64 {
    let mut g: Vec<f64> = q.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    g.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let m = subset_size(k, g.len());
    g[..m].iter().sum::<f64>() / m as f64
}

pub fn primacy(q: &[f64], l: usize, alpha: f64) -> f64 {
    let l = l.min(q.len() - 1);
    let denom: f64 = (0..=l).map(|k| (-alpha * k as f64).exp()).sum();
    (0..=l).map(|n| (-alpha * n as f64).exp() / denom * q[n]).sum()
}

pub fn recency(q: &[f64], l: usize, alpha: f64) -> f64 {
    let l = l.min(q.len() - 1);
    let start = q.len() - 1 - l;
    let denom: f64 = (0..=l).map(|k| (-alpha * (l - k) as f64).exp()).sum();
    (0..=l)
        .map(|n| (-alpha * (l - n) as f64).exp() / denom * q[start + n])
        .sum()
}

/// Frame-by-frame hysteresis blend, 1-based as written in the model:
/// `l_n` is the minimum over frames `max(1, n-tau) ..= n-1` (`l_1 = q_1`),
/// `m_n` weights the ascending sort of frames `n ..= min(n+tau, N)` by a
/// normalised descending half-Gaussian with sigma = J/3.
pub fn hysteresis_trace(q: &[f64], tau: usize, alpha: f64) -> Vec<f64> {
    let big_n = q.len();
    let at = |n: usize| q[n - 1];
    let mut out = Vec::with_capacity(big_n);
    for n in 1..=big_n {
        let l_n = if n == 1 {
            at(1)
        } else {
            let first = if n > tau { n - tau } else { 1 };
            (first..n).map(at).fold(f64::INFINITY, f64::min)
        };
        let mut v: Vec<f64> = (n..=(n + tau).min(big_n)).map(at).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let j_len = v.len();
        let sigma = j_len as f64 / 3.0;
        let gauss: Vec<f64> = (0..j_len)
            .map(|j| (-(j as f64).powi(2) / (2.0 * sigma * sigma)).exp())
            .collect();
        let total: f64 = gauss.iter().sum();
        let m_n: f64 = v.iter().zip(&gauss).map(|(x, g)| x * g / total).sum();
        out.push(alpha * m_n + (1.0 - alpha) * l_n);
    }
    out
}

pub fn hysteresis(q: &[f64], tau: usize, alpha: f64) -> f64 {
    mean(&hysteresis_trace(q, tau, alpha))
}

/// Tie-averaged ranks by counting.
pub fn ranks(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|&x| {
            let below = v.iter().filter(|&&y| y < x).count() as f64;
            let equal = v.iter().filter(|&&y| y == x).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let mx = mean(x);
    let my = mean(y);
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx.sqrt() * vy.sqrt())
}

pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    pearson(&ranks(x), &ranks(y))
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn vqpool(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vqpool"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("run vqpool binary")
}
