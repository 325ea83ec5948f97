//! Nelder-Mead simplex minimization with restarts.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadOptions {
    /// Evaluation budget of each run.
    pub max_evaluations: usize,
    /// Restarts from the best point after the first run.
    pub restarts: usize,
    /// Stop when `(f_worst − f_best) ≤ f_tol · |f_best|` (plus a tiny absolute floor).
    pub f_tol: f64,
    /// ... and every vertex is within `x_tol` (relative) of the best one.
    pub x_tol: f64,
    /// Initial simplex edge relative to each coordinate.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_evaluations: 2000,
            restarts: 3,
            f_tol: 1e-10,
            x_tol: 1e-8,
            initial_step: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// Whether the last run met both tolerances within its budget.
    pub converged: bool,
}

const ABS_FLOOR: f64 = 1e-300;

fn relative_spread(simplex: &[Vec<f64>]) -> f64 {
    let best = &simplex[0];
    simplex[1..]
        .iter()
        .flat_map(|v| {
            v.iter()
                .zip(best)
                .map(|(a, b)| (a - b).abs() / b.abs().max(1e-12))
        })
        .fold(0.0, f64::max)
}

fn run<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    start: &[f64],
    step: f64,
    opts: &NelderMeadOptions,
) -> Minimum {
    let n = start.len();
    let mut simplex: Vec<Vec<f64>> = vec![start.to_vec()];
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] = if v[i] != 0.0 { v[i] * (1.0 + step) } else { step };
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut evaluations = n + 1;
    let mut converged = false;

    let eval = |f: &mut F, x: &[f64], evaluations: &mut usize| {
        *evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    while evaluations < opts.max_evaluations {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[n] - values[0];
        if spread <= opts.f_tol * values[0].abs() + ABS_FLOOR && relative_spread(&simplex) <= opts.x_tol {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64)
            .collect();
        let towards = |t: f64, worst: &[f64]| -> Vec<f64> {
            centroid
                .iter()
                .zip(worst)
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };

        let reflected = towards(-1.0, &simplex[n]);
        let fr = eval(f, &reflected, &mut evaluations);
        if fr < values[0] {
            let expanded = towards(-2.0, &simplex[n]);
            let fe = eval(f, &expanded, &mut evaluations);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[n] {
            let c = towards(-0.5, &simplex[n]);
            let fc = eval(f, &c, &mut evaluations);
            (c, fc)
        } else {
            let c = towards(0.5, &simplex[n]);
            let fc = eval(f, &c, &mut evaluations);
            (c, fc)
        };
        if fc < values[n].min(fr) {
            simplex[n] = contracted;
            values[n] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=n {
            simplex[i] = best.iter().zip(&simplex[i]).map(|(b, v)| b + 0.5 * (v - b)).collect();
            values[i] = eval(f, &simplex[i], &mut evaluations);
        }
    }

    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).expect("non-empty simplex");
    Minimum {
        x: simplex[best].clone(),
        value: values[best],
        evaluations,
        converged,
    }
}

/// Minimize `f` from `x0`. After the first run the simplex is rebuilt around
/// the best point `restarts` times; each run has its own evaluation budget.
pub fn minimize<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> Minimum {
    let mut best = run(&mut f, x0, opts.initial_step, opts);
    let mut total = best.evaluations;
    let mut step = opts.initial_step;
    for _ in 0..opts.restarts {
        step *= 0.5;
        let next = run(&mut f, &best.x, step, opts);
        total += next.evaluations;
        if next.value <= best.value {
            best = next;
        } else {
            best.converged = next.converged && best.converged;
        }
    }
    best.evaluations = total;
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = minimize(
            f,
            &[-1.2, 1.0],
            &NelderMeadOptions {
                max_evaluations: 5000,
                ..Default::default()
            },
        );
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6, "{m:?}");
    }

    #[test]
    fn shifted_quadratic_four_parameters() {
        let target = [6.0, 2.0, 7.0, 280.0];
        let f = |x: &[f64]| {
            x.iter()
                .zip(&target)
                .map(|(a, b)| ((a - b) / b).powi(2))
                .sum::<f64>()
        };
        let m = minimize(f, &[6.3, 2.1, 7.3, 282.0], &NelderMeadOptions::default());
        for (a, b) in m.x.iter().zip(&target) {
            assert!((a / b - 1.0).abs() < 1e-7);
        }
        assert!(m.converged);
    }

    #[test]
    fn deterministic() {
        let f = |x: &[f64]| (x[0] - 3.0).powi(2) + (x[1] + 1.0).powi(4);
        let a = minimize(f, &[0.5, 0.5], &NelderMeadOptions::default());
        let b = minimize(f, &[0.5, 0.5], &NelderMeadOptions::default());
        assert_eq!(a, b);
    }
}
