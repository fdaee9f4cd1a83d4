//! Derivative-free simplex minimiser.

/// Outcome of a [`minimize`] run.
#[derive(Debug, Clone)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Nelder-Mead with the standard coefficients. The initial simplex offsets
/// each coordinate by 5% of its value (0.00025 when the value is zero).
/// Stops once the largest vertex distance from the best vertex falls below
/// `diameter_tol`, or after `max_iterations`.
pub fn minimize<F>(f: F, start: &[f64], max_iterations: usize, diameter_tol: f64) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let dim = start.len();
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(start.to_vec());
    for k in 0..dim {
        let mut v = start.to_vec();
        v[k] = if v[k] != 0.0 { v[k] * 1.05 } else { 0.00025 };
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();

    let mut iterations = 0;
    let mut converged = false;
    loop {
        // order vertices best-first; stable so ties keep insertion order
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let diameter = simplex[1..]
            .iter()
            .map(|v| distance(v, &simplex[0]))
            .fold(0.0, f64::max);
        if diameter < diameter_tol {
            converged = true;
            break;
        }
        if iterations >= max_iterations {
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..dim)
            .map(|k| simplex[..dim].iter().map(|v| v[k]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();
        let toward = |coef: f64| -> Vec<f64> { centroid.iter().zip(&worst).map(|(c, w)| c + coef * (c - w)).collect() };

        let reflected = toward(REFLECT);
        let f_r = eval(&reflected);
        if f_r < values[0] {
            let expanded = toward(REFLECT * EXPAND);
            let f_e = eval(&expanded);
            if f_e < f_r {
                simplex[dim] = expanded;
                values[dim] = f_e;
            } else {
                simplex[dim] = reflected;
                values[dim] = f_r;
            }
            continue;
        }
        if f_r < values[dim - 1] {
            simplex[dim] = reflected;
            values[dim] = f_r;
            continue;
        }
        let (candidate, f_c) = if f_r < values[dim] {
            let c = toward(REFLECT * CONTRACT);
            let fc = eval(&c);
            (c, if fc <= f_r { fc } else { f64::INFINITY })
        } else {
            let c = toward(-CONTRACT);
            let fc = eval(&c);
            (c, if fc < values[dim] { fc } else { f64::INFINITY })
        };
        if f_c.is_finite() {
            simplex[dim] = candidate;
            values[dim] = f_c;
            continue;
        }
        let best = simplex[0].clone();
        for j in 1..=dim {
            for k in 0..dim {
                simplex[j][k] = best[k] + SHRINK * (simplex[j][k] - best[k]);
            }
            values[j] = eval(&simplex[j]);
        }
    }

    Minimum {
        point: simplex[0].clone(),
        value: values[0],
        iterations,
        converged,
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}
