//! Derivative-free local minimization.

use alloc::vec::Vec;

#[allow(unused_imports)] // float math is std-only without this
use num_traits::Float;

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub fx: f64,
    pub evals: usize,
    /// Best value seen after each evaluation.
    pub history: Vec<f64>,
    pub converged: bool,
}

/// `minimize(cost, initial point, evaluation budget) -> point`.
pub trait Minimizer {
    fn minimize(&self, cost: &mut dyn FnMut(&[f64]) -> f64, x0: &[f64], budget: usize) -> Minimum;
}

/// Nelder–Mead simplex search with the standard coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    /// Edge length of the initial simplex.
    pub step: f64,
    /// Stop when the spread of simplex values drops below this.
    pub ftol: f64,
    /// ... and the simplex diameter below this.
    pub xtol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            step: 0.5,
            ftol: 1e-10,
            xtol: 1e-7,
        }
    }
}

struct Tracker<'a> {
    cost: &'a mut dyn FnMut(&[f64]) -> f64,
    evals: usize,
    best: f64,
    best_x: Vec<f64>,
    history: Vec<f64>,
}

impl Tracker<'_> {
    fn eval(&mut self, x: &[f64]) -> f64 {
        let mut v = (self.cost)(x);
        if v.is_nan() {
            v = f64::INFINITY;
        }
        self.evals += 1;
        if v < self.best {
            self.best = v;
            self.best_x = x.to_vec();
        }
        self.history.push(self.best);
        v
    }
}

impl Minimizer for NelderMead {
    fn minimize(&self, cost: &mut dyn FnMut(&[f64]) -> f64, x0: &[f64], budget: usize) -> Minimum {
        let d = x0.len();
        let mut t = Tracker {
            cost,
            evals: 0,
            best: f64::INFINITY,
            best_x: x0.to_vec(),
            history: Vec::new(),
        };
        if d == 0 || budget == 0 {
            let fx = if budget > 0 { t.eval(x0) } else { f64::INFINITY };
            return Minimum {
                x: x0.to_vec(),
                fx,
                evals: t.evals,
                history: t.history,
                converged: budget > 0,
            };
        }
        let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
        let f0 = t.eval(x0);
        simplex.push((x0.to_vec(), f0));
        for i in 0..d {
            if t.evals >= budget {
                break;
            }
            let mut x = x0.to_vec();
            x[i] += self.step;
            let f = t.eval(&x);
            simplex.push((x, f));
        }
        let mut converged = false;
        while simplex.len() == d + 1 && t.evals < budget {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let spread = simplex[d].1 - simplex[0].1;
            let diameter = simplex[1..]
                .iter()
                .map(|(x, _)| {
                    x.iter()
                        .zip(&simplex[0].0)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if spread.abs() <= self.ftol && diameter <= self.xtol {
                converged = true;
                break;
            }
            let mut centroid = alloc::vec![0.0; d];
            for (x, _) in &simplex[..d] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / d as f64;
                }
            }
            let along = |coef: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[d].0)
                    .map(|(c, w)| c + coef * (c - w))
                    .collect()
            };
            let xr = along(alpha);
            let fr = t.eval(&xr);
            if fr < simplex[0].1 {
                let xe = along(gamma);
                let fe = if t.evals < budget { t.eval(&xe) } else { f64::INFINITY };
                simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[d - 1].1 {
                simplex[d] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < simplex[d].1 {
                let xc = along(alpha * rho);
                let fc = if t.evals < budget { t.eval(&xc) } else { f64::INFINITY };
                (xc, fc)
            } else {
                let xc = along(-rho);
                let fc = if t.evals < budget { t.eval(&xc) } else { f64::INFINITY };
                (xc, fc)
            };
            if fc < simplex[d].1.min(fr) {
                simplex[d] = (xc, fc);
                continue;
            }
            let best = simplex[0].0.clone();
            for v in simplex.iter_mut().skip(1) {
                if t.evals >= budget {
                    break;
                }
                let x: Vec<f64> = best.iter().zip(&v.0).map(|(b, xi)| b + sigma * (xi - b)).collect();
                let f = t.eval(&x);
                *v = (x, f);
            }
        }
        Minimum {
            x: t.best_x,
            fx: t.best,
            evals: t.evals,
            history: t.history,
            converged,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_rosenbrock() {
        let mut f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = NelderMead::default().minimize(&mut f, &[-1.2, 1.0], 5000);
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-4 && (m.x[1] - 1.0).abs() < 1e-4);
        assert_eq!(m.history.len(), m.evals);
    }

    #[test]
    fn respects_budget_and_history_is_monotone() {
        let mut calls = 0;
        let mut f = |x: &[f64]| {
            calls += 1;
            x.iter().map(|v| (v - 0.3).powi(2)).sum::<f64>()
        };
        let m = NelderMead::default().minimize(&mut f, &[2.0; 6], 40);
        assert!(m.evals <= 40);
        assert_eq!(calls, m.evals);
        assert!(m.history.windows(2).all(|w| w[1] <= w[0]));
        assert!(!m.converged);
    }
}
