//! Sequential minimal optimisation for the epsilon-SVR dual.
//!
//! The dual is written over `2l` variables `beta = [alpha; alpha*]` with
//! labels `s_t = +1` for the first half and `-1` for the second:
//!
//! ```text
//! min  1/2 beta' Qbar beta + p' beta
//! s.t. 0 <= beta_t <= C,  sum_t s_t beta_t = 0
//! Qbar_ts = s_t s_s K(t mod l, s mod l),  p = [eps - y; eps + y]
//! ```
//!
//! Each step takes the maximal violator `i`, pairs it with the `j` of largest
//! second-order objective decrease, and solves the two-variable subproblem
//! analytically.

const TAU: f64 = 1e-12;

/// Source of kernel rows `K(i, .)` over the training points.
pub trait KernelSource {
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn fill_row(&mut self, i: usize, out: &mut [f64]);
    fn diag(&self, i: usize) -> f64;
}

/// Fully materialised `l x l` kernel matrix, row-major.
pub struct DenseKernel {
    pub n: usize,
    pub values: Vec<f64>,
}

impl KernelSource for DenseKernel {
    fn len(&self) -> usize {
        self.n
    }

    fn fill_row(&mut self, i: usize, out: &mut [f64]) {
        out.copy_from_slice(&self.values[i * self.n..(i + 1) * self.n]);
    }

    fn diag(&self, i: usize) -> f64 {
        self.values[i * self.n + i]
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SmoSettings {
    pub c: f64,
    pub epsilon: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

#[derive(Debug, Clone)]
pub struct DualSolution {
    /// `alpha - alpha*` per training point; the decision function is
    /// `sum_i coef_i K(x_i, x) - rho`.
    pub coef: Vec<f64>,
    /// Raw dual variables `[alpha; alpha*]`.
    pub beta: Vec<f64>,
    pub rho: f64,
    /// Dual objective `1/2 beta' Qbar beta + p' beta` at the solution.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub fn solve<K: KernelSource>(kernel: &mut K, y: &[f64], settings: &SmoSettings) -> DualSolution {
    let l = kernel.len();
    let n = 2 * l;
    let c = settings.c;
    let sign = |t: usize| if t < l { 1.0 } else { -1.0 };
    let p: Vec<f64> = (0..n)
        .map(|t| {
            if t < l {
                settings.epsilon - y[t]
            } else {
                settings.epsilon + y[t - l]
            }
        })
        .collect();

    let mut beta = vec![0.0; n];
    let mut grad = p.clone();
    let mut row_i = vec![0.0; l];
    let mut row_j = vec![0.0; l];
    let mut iterations = 0;
    let mut converged = false;

    loop {
        // i: maximal violator in I_up. The stopping gap uses the extreme
        // of I_low; j itself is picked by second-order gain. Ties go to the
        // lowest index.
        let mut g_max = f64::NEG_INFINITY;
        let mut i_sel = usize::MAX;
        let mut g_min = f64::INFINITY;
        for t in 0..n {
            let s = sign(t);
            let v = -s * grad[t];
            let up = if s > 0.0 { beta[t] < c } else { beta[t] > 0.0 };
            let low = if s > 0.0 { beta[t] > 0.0 } else { beta[t] < c };
            if up && v > g_max {
                g_max = v;
                i_sel = t;
            }
            if low && v < g_min {
                g_min = v;
            }
        }
        if i_sel == usize::MAX || g_min == f64::INFINITY || g_max - g_min < settings.tolerance {
            converged = true;
            break;
        }
        if iterations >= settings.max_iterations {
            break;
        }
        iterations += 1;

        let i = i_sel;
        let pi = i % l;
        kernel.fill_row(pi, &mut row_i);
        let k_ii = kernel.diag(pi);
        let mut j_sel = usize::MAX;
        let mut best_gain = f64::INFINITY;
        for t in 0..n {
            let s = sign(t);
            let low = if s > 0.0 { beta[t] > 0.0 } else { beta[t] < c };
            let b = g_max + s * grad[t];
            if !low || b <= 0.0 {
                continue;
            }
            let pt = t % l;
            let a = (k_ii + kernel.diag(pt) - 2.0 * row_i[pt]).max(TAU);
            let gain = -(b * b) / a;
            if gain < best_gain {
                best_gain = gain;
                j_sel = t;
            }
        }

        let j = j_sel;
        let pj = j % l;
        let (si, sj) = (sign(i), sign(j));
        kernel.fill_row(pj, &mut row_j);
        let k_jj = kernel.diag(pj);
        let q_ij = si * sj * row_i[pj];

        let (old_i, old_j) = (beta[i], beta[j]);
        if si != sj {
            let quad = (k_ii + k_jj + 2.0 * q_ij).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = beta[i] - beta[j];
            beta[i] += delta;
            beta[j] += delta;
            if diff > 0.0 {
                if beta[j] < 0.0 {
                    beta[j] = 0.0;
                    beta[i] = diff;
                }
            } else if beta[i] < 0.0 {
                beta[i] = 0.0;
                beta[j] = -diff;
            }
            if diff > 0.0 {
                if beta[i] > c {
                    beta[i] = c;
                    beta[j] = c - diff;
                }
            } else if beta[j] > c {
                beta[j] = c;
                beta[i] = c + diff;
            }
        } else {
            let quad = (k_ii + k_jj - 2.0 * q_ij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = beta[i] + beta[j];
            beta[i] -= delta;
            beta[j] += delta;
            if sum > c {
                if beta[i] > c {
                    beta[i] = c;
                    beta[j] = sum - c;
                }
            } else if beta[j] < 0.0 {
                beta[j] = 0.0;
                beta[i] = sum;
            }
            if sum > c {
                if beta[j] > c {
                    beta[j] = c;
                    beta[i] = sum - c;
                }
            } else if beta[i] < 0.0 {
                beta[i] = 0.0;
                beta[j] = sum;
            }
        }

        let d_i = beta[i] - old_i;
        let d_j = beta[j] - old_j;
        // Qbar_{t,i} = s_t s_i K(t mod l, i mod l)
        for (t, g) in grad.iter_mut().enumerate() {
            let k = t % l;
            *g += sign(t) * (si * row_i[k] * d_i + sj * row_j[k] * d_j);
        }
    }

    let rho = compute_rho(&beta, &grad, c, l);
    let objective = beta
        .iter()
        .zip(grad.iter().zip(&p))
        .map(|(b, (g, pp))| b * (g + pp))
        .sum::<f64>()
        / 2.0;
    let coef = (0..l).map(|k| beta[k] - beta[k + l]).collect();
    DualSolution {
        coef,
        beta,
        rho,
        objective,
        iterations,
        converged,
    }
}

fn compute_rho(beta: &[f64], grad: &[f64], c: f64, l: usize) -> f64 {
    let mut upper = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    let mut free_sum = 0.0;
    let mut free_count = 0usize;
    for t in 0..beta.len() {
        let s = if t < l { 1.0 } else { -1.0 };
        let yg = s * grad[t];
        if beta[t] >= c {
            if s < 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else if beta[t] <= 0.0 {
            if s > 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else {
            free_count += 1;
            free_sum += yg;
        }
    }
    if free_count > 0 {
        free_sum / free_count as f64
    } else {
        (upper + lower) / 2.0
    }
}
