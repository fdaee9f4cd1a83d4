use std::fmt::Write as _;

use super::scaler::{check_matrix, Scaler};
use super::smo::{self, DenseKernel, KernelSource, SmoSettings};
use crate::error::{Error, Result};

pub const DEFAULT_EPSILON: f64 = 0.1;
pub const DEFAULT_TOLERANCE: f64 = 1e-3;
pub const DEFAULT_MAX_ITERATIONS: usize = 10_000;

/// Above this many training rows the kernel matrix is computed row by row
/// instead of being materialised.
const DENSE_KERNEL_LIMIT: usize = 3000;

const FORMAT_HEADER: &str = "vqpool-svr 1";
const FORMAT_END: &str = "end-svr";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvrParams {
    pub c: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl SvrParams {
    pub fn new(c: f64, gamma: f64) -> Self {
        SvrParams {
            c,
            gamma,
            epsilon: DEFAULT_EPSILON,
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::InvalidParameter(format!("C must be positive, got {}", self.c)));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be nonnegative, got {}",
                self.epsilon
            )));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidParameter("KKT tolerance must be positive".into()));
        }
        Ok(())
    }
}

pub fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

/// A trained epsilon-SVR with RBF kernel. Support vectors are stored in the
/// standardised feature space of `scaler`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvrModel {
    pub scaler: Scaler,
    pub support_vectors: Vec<Vec<f64>>,
    pub dual_coefficients: Vec<f64>,
    pub bias: f64,
    pub gamma: f64,
    pub c: f64,
    pub epsilon: f64,
    pub converged: bool,
    pub iterations: usize,
}

struct RowKernel<'a> {
    rows: &'a [Vec<f64>],
    gamma: f64,
}

impl KernelSource for RowKernel<'_> {
    fn len(&self) -> usize {
        self.rows.len()
    }

    fn fill_row(&mut self, i: usize, out: &mut [f64]) {
        for (o, r) in out.iter_mut().zip(self.rows) {
            *o = rbf(&self.rows[i], r, self.gamma);
        }
    }

    fn diag(&self, _i: usize) -> f64 {
        1.0
    }
}

fn dense_kernel(rows: &[Vec<f64>], gamma: f64) -> DenseKernel {
    let n = rows.len();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = 1.0;
        for j in 0..i {
            let k = rbf(&rows[i], &rows[j], gamma);
            values[i * n + j] = k;
            values[j * n + i] = k;
        }
    }
    DenseKernel { n, values }
}

/// Standardises `x`, then solves the epsilon-SVR dual by SMO.
///
/// Hitting the iteration cap is not an error: the model is returned with
/// `converged == false` and a warning is logged.
pub fn svr_train(x: &[Vec<f64>], y: &[f64], params: &SvrParams) -> Result<SvrModel> {
    params.validate()?;
    check_matrix(x)?;
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("regression targets must be finite".into()));
    }

    let scaler = Scaler::fit(x)?;
    let rows = scaler.apply(x)?;
    let settings = SmoSettings {
        c: params.c,
        epsilon: params.epsilon,
        tolerance: params.tolerance,
        max_iterations: params.max_iterations,
    };
    let solution = if rows.len() <= DENSE_KERNEL_LIMIT {
        smo::solve(&mut dense_kernel(&rows, params.gamma), y, &settings)
    } else {
        smo::solve(
            &mut RowKernel {
                rows: &rows,
                gamma: params.gamma,
            },
            y,
            &settings,
        )
    };
    if !solution.converged {
        log::warn!(
            "SMO stopped at the iteration cap ({}) before reaching KKT tolerance {} (n = {}, C = {}, gamma = {})",
            params.max_iterations,
            params.tolerance,
            rows.len(),
            params.c,
            params.gamma
        );
    }

    let (support_vectors, dual_coefficients) = rows
        .into_iter()
        .zip(&solution.coef)
        .filter(|(_, &a)| a != 0.0)
        .map(|(r, &a)| (r, a))
        .unzip();
    Ok(SvrModel {
        scaler,
        support_vectors,
        dual_coefficients,
        bias: -solution.rho,
        gamma: params.gamma,
        c: params.c,
        epsilon: params.epsilon,
        converged: solution.converged,
        iterations: solution.iterations,
    })
}

impl SvrModel {
    pub fn dim(&self) -> usize {
        self.scaler.dim()
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        let z = self.scaler.apply_row(x)?;
        Ok(self.predict_scaled(&z))
    }

    pub fn predict_many(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        rows.iter().map(|r| self.predict(r)).collect()
    }

    fn predict_scaled(&self, z: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.dual_coefficients)
            .map(|(sv, a)| a * rbf(sv, z, self.gamma))
            .sum::<f64>()
            + self.bias
    }

    /// Versioned plain-text serialisation; every float is written in its
    /// shortest round-trip decimal form so parsing restores identical bits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "{FORMAT_HEADER}");
        let _ = writeln!(out, "dimension {}", self.dim());
        let _ = writeln!(out, "scaler_mean {}", join(&self.scaler.mean));
        let _ = writeln!(out, "scaler_std {}", join(&self.scaler.std));
        let _ = writeln!(out, "gamma {}", self.gamma);
        let _ = writeln!(out, "c {}", self.c);
        let _ = writeln!(out, "epsilon {}", self.epsilon);
        let _ = writeln!(out, "bias {}", self.bias);
        let _ = writeln!(out, "converged {}", self.converged);
        let _ = writeln!(out, "iterations {}", self.iterations);
        let _ = writeln!(out, "support_vectors {}", self.support_vectors.len());
        for (sv, a) in self.support_vectors.iter().zip(&self.dual_coefficients) {
            let _ = writeln!(out, "{a} {}", join(sv));
        }
        let _ = writeln!(out, "{FORMAT_END}");
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let model = Self::read_block(&mut lines)?;
        if let Some((n, line)) = lines.find(|(_, l)| !l.trim().is_empty()) {
            return Err(Error::Format(format!("line {}: trailing content `{line}`", n + 1)));
        }
        Ok(model)
    }

    /// Reads one model block (header through end marker) from a numbered
    /// line stream.
    pub(crate) fn read_block<'a, I>(lines: &mut I) -> Result<Self>
    where
        I: Iterator<Item = (usize, &'a str)>,
    {
        let mut next = |what: &str| -> Result<(usize, &'a str)> {
            lines
                .next()
                .map(|(n, l)| (n + 1, l.trim()))
                .ok_or_else(|| Error::Format(format!("unexpected end of model, expected {what}")))
        };
        let (n, header) = next("header")?;
        if header != FORMAT_HEADER {
            return Err(Error::Format(format!(
                "line {n}: expected header `{FORMAT_HEADER}`, found `{header}`"
            )));
        }
        fn field<'b>(line: (usize, &'b str), key: &str) -> Result<&'b str> {
            let (n, text) = line;
            match text.split_once(' ') {
                Some((k, v)) if k == key => Ok(v.trim()),
                None if text == key => Ok(""),
                _ => Err(Error::Format(format!("line {n}: expected `{key}`, found `{text}`"))),
            }
        }
        fn num<T: std::str::FromStr>(n: usize, s: &str) -> Result<T> {
            s.parse()
                .map_err(|_| Error::Format(format!("line {n}: cannot parse `{s}`")))
        }
        fn floats(n: usize, s: &str) -> Result<Vec<f64>> {
            s.split_whitespace().map(|t| num(n, t)).collect()
        }

        let l = next("dimension")?;
        let dim: usize = num(l.0, field(l, "dimension")?)?;
        let l = next("scaler_mean")?;
        let mean = floats(l.0, field(l, "scaler_mean")?)?;
        let l = next("scaler_std")?;
        let std = floats(l.0, field(l, "scaler_std")?)?;
        if mean.len() != dim || std.len() != dim {
            return Err(Error::Format(format!("scaler does not have {dim} entries")));
        }
        let l = next("gamma")?;
        let gamma = num(l.0, field(l, "gamma")?)?;
        let l = next("c")?;
        let c = num(l.0, field(l, "c")?)?;
        let l = next("epsilon")?;
        let epsilon = num(l.0, field(l, "epsilon")?)?;
        let l = next("bias")?;
        let bias = num(l.0, field(l, "bias")?)?;
        let l = next("converged")?;
        let converged = num(l.0, field(l, "converged")?)?;
        let l = next("iterations")?;
        let iterations = num(l.0, field(l, "iterations")?)?;
        let l = next("support_vectors")?;
        let count: usize = num(l.0, field(l, "support_vectors")?)?;

        let mut support_vectors = Vec::with_capacity(count);
        let mut dual_coefficients = Vec::with_capacity(count);
        for _ in 0..count {
            let (n, line) = next("support vector")?;
            let mut values = floats(n, line)?;
            if values.len() != dim + 1 {
                return Err(Error::Format(format!(
                    "line {n}: support vector has {} values, expected {}",
                    values.len(),
                    dim + 1
                )));
            }
            dual_coefficients.push(values.remove(0));
            support_vectors.push(values);
        }
        let (n, end) = next(FORMAT_END)?;
        if end != FORMAT_END {
            return Err(Error::Format(format!(
                "line {n}: expected `{FORMAT_END}`, found `{end}`"
            )));
        }
        Ok(SvrModel {
            scaler: Scaler { mean, std },
            support_vectors,
            dual_coefficients,
            bias,
            gamma,
            c,
            epsilon,
            converged,
            iterations,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_predicts_its_target() {
        let m = svr_train(&[vec![0.7, -2.0]], &[3.25], &SvrParams::new(1.0, 0.5)).unwrap();
        assert!((m.predict(&[0.7, -2.0]).unwrap() - 3.25).abs() <= m.epsilon);
        assert!(m.converged);
    }

    #[test]
    fn noiseless_linear_fit() {
        let x: Vec<Vec<f64>> = (0..50).map(|i| vec![i as f64 / 10.0]).collect();
        let y: Vec<f64> = x.iter().map(|r| 0.8 * r[0] + 1.0).collect();
        let params = SvrParams::new(100.0, 1.0);
        let m = svr_train(&x, &y, &params).unwrap();
        let rmse = (x
            .iter()
            .zip(&y)
            .map(|(r, t)| (m.predict(r).unwrap() - t).powi(2))
            .sum::<f64>()
            / 50.0)
            .sqrt();
        assert!(rmse <= 2.0 * params.epsilon, "rmse {rmse}");
        assert!(m.dual_coefficients.iter().all(|a| a.abs() <= params.c));
    }

    #[test]
    fn duplicate_rows_predict_identically() {
        let x = vec![vec![1.0, 2.0], vec![1.0, 2.0], vec![3.0, 0.5], vec![-1.0, 1.0]];
        let y = [1.0, 1.2, 3.0, 0.0];
        let m = svr_train(&x, &y, &SvrParams::new(10.0, 0.5)).unwrap();
        assert_eq!(m.predict(&x[0]).unwrap(), m.predict(&x[1]).unwrap());
    }

    #[test]
    fn prediction_is_continuous() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![(i as f64).sin(), i as f64]).collect();
        let y: Vec<f64> = x.iter().map(|r| r[0] * 2.0 + r[1] * 0.1).collect();
        let m = svr_train(&x, &y, &SvrParams::new(10.0, 0.5)).unwrap();
        let at = m.predict(&[0.3, 4.0]).unwrap();
        let mut prev = f64::INFINITY;
        for k in 1..8 {
            let h = 10f64.powi(-k);
            let d = (m.predict(&[0.3 + h, 4.0 - h]).unwrap() - at).abs();
            assert!(d <= prev + 1e-15);
            prev = d;
        }
        assert!(prev < 1e-6);
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let x: Vec<Vec<f64>> = (0..15)
            .map(|i| vec![(i as f64 * 0.7).cos(), 1.0 / (1.0 + i as f64)])
            .collect();
        let y: Vec<f64> = x.iter().map(|r| r[0] - 3.0 * r[1]).collect();
        let m = svr_train(&x, &y, &SvrParams::new(10.0, 0.37)).unwrap();
        let back = SvrModel::from_text(&m.to_text()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_text(), m.to_text());
    }

    #[test]
    fn corrupted_header_is_a_format_error() {
        let m = svr_train(&[vec![1.0]], &[1.0], &SvrParams::new(1.0, 1.0)).unwrap();
        let text = m.to_text().replacen("vqpool-svr 1", "vqpool-svr 9", 1);
        assert!(matches!(SvrModel::from_text(&text), Err(Error::Format(_))));
        let truncated: String = m.to_text().lines().take(5).collect::<Vec<_>>().join("\n");
        assert!(matches!(SvrModel::from_text(&truncated), Err(Error::Format(_))));
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = SvrParams::new(1.0, 1.0);
        assert!(svr_train(&[vec![1.0]], &[f64::NAN], &p).is_err());
        assert!(svr_train(&[vec![1.0], vec![2.0]], &[1.0], &p).is_err());
        assert!(svr_train(&[vec![1.0]], &[1.0], &SvrParams::new(0.0, 1.0)).is_err());
        let m = svr_train(&[vec![1.0, 2.0]], &[1.0], &p).unwrap();
        assert!(matches!(m.predict(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }
}
