//! Trust-region nonlinear least squares (Levenberg–Marquardt form) with a
//! caller-supplied analytic Jacobian.
//!
//! Minimizes `½‖r(x)‖²`. The damping parameter plays the role of the
//! inverse trust radius: a step is accepted only when it lowers the cost,
//! so the recorded cost history is non-increasing by construction.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub trait LeastSquaresProblem {
    fn residuals(&self, params: &DVector<f64>) -> DVector<f64>;
    fn jacobian(&self, params: &DVector<f64>) -> DMatrix<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Stop when `‖Jᵀr‖∞ ≤ gradient_tol`.
    pub gradient_tol: f64,
    /// Stop when `‖δ‖ ≤ step_tol·(‖x‖ + step_tol)`.
    pub step_tol: f64,
    /// Stop when the cost itself falls below this.
    pub cost_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            gradient_tol: 1e-12,
            step_tol: 1e-12,
            cost_tol: 1e-30,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    SmallGradient,
    SmallStep,
    SmallCost,
    /// Damping ran away without finding a descent step; the iterate is a
    /// numerical stationary point.
    NoProgress,
    MaxIterations,
}

impl Termination {
    pub fn converged(self) -> bool {
        !matches!(self, Termination::MaxIterations)
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub params: DVector<f64>,
    pub residuals: DVector<f64>,
    /// `½‖r‖²` at the solution.
    pub cost: f64,
    pub iterations: usize,
    pub termination: Termination,
    /// Cost after every accepted step, starting with the initial cost.
    pub cost_history: Vec<f64>,
    pub jacobian: DMatrix<f64>,
}

impl Solution {
    /// Ratio of the extreme singular values of the Jacobian at the solution.
    /// `f64::INFINITY` for a rank-deficient Jacobian.
    pub fn condition_number(&self) -> f64 {
        condition_number(&self.jacobian)
    }

    pub fn rms(&self) -> f64 {
        if self.residuals.is_empty() {
            0.0
        } else {
            (self.residuals.norm_squared() / self.residuals.len() as f64).sqrt()
        }
    }
}

pub fn condition_number(j: &DMatrix<f64>) -> f64 {
    let sv = j.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min <= 0.0 || !min.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Runs the solver from `initial`.
pub fn solve<P: LeastSquaresProblem + ?Sized>(
    problem: &P,
    initial: DVector<f64>,
    options: &SolverOptions,
) -> Solution {
    let n = initial.len();
    let mut x = initial;
    let mut r = problem.residuals(&x);
    let mut cost = 0.5 * r.norm_squared();
    let mut j = problem.jacobian(&x);
    let mut history = vec![cost];

    let mut jtj = j.transpose() * &j;
    let mut g = j.transpose() * &r;
    let max_diag = (0..n).map(|i| jtj[(i, i)]).fold(0.0, f64::max);
    let mut lambda = 1e-3 * max_diag.max(1e-12);
    let mut nu = 2.0;

    let mut iterations = 0;
    let termination = loop {
        if cost <= options.cost_tol {
            break Termination::SmallCost;
        }
        if g.amax() <= options.gradient_tol {
            break Termination::SmallGradient;
        }
        if iterations >= options.max_iterations {
            break Termination::MaxIterations;
        }
        iterations += 1;

        // Marquardt scaling with a floor so unexcited parameters stay damped.
        let mut a = jtj.clone();
        for i in 0..n {
            a[(i, i)] += lambda * jtj[(i, i)].max(1e-12 * max_diag.max(1.0));
        }
        let step = match a.cholesky() {
            Some(ch) => ch.solve(&(-&g)),
            None => {
                lambda *= nu;
                nu *= 2.0;
                if !lambda.is_finite() || lambda > 1e300 {
                    break Termination::NoProgress;
                }
                continue;
            }
        };

        if step.norm() <= options.step_tol * (x.norm() + options.step_tol) {
            break Termination::SmallStep;
        }

        let x_new = &x + &step;
        let r_new = problem.residuals(&x_new);
        let cost_new = 0.5 * r_new.norm_squared();
        let predicted = -(step.dot(&g) + 0.5 * step.dot(&(&jtj * &step)));
        let actual = cost - cost_new;

        if cost_new.is_finite() && actual > 0.0 {
            let rho = if predicted > 0.0 { actual / predicted } else { 1.0 };
            x = x_new;
            r = r_new;
            cost = cost_new;
            j = problem.jacobian(&x);
            jtj = j.transpose() * &j;
            g = j.transpose() * &r;
            history.push(cost);
            lambda *= (1.0 - (2.0 * rho - 1.0).powi(3)).max(1.0 / 3.0);
            nu = 2.0;
        } else {
            lambda *= nu;
            nu *= 2.0;
            if !lambda.is_finite() || lambda > 1e300 {
                break Termination::NoProgress;
            }
        }
    };

    Solution {
        params: x,
        residuals: r,
        cost,
        iterations,
        termination,
        cost_history: history,
        jacobian: j,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Rosenbrock as residuals r = (10(y − x²), 1 − x).
    struct Rosenbrock;

    impl LeastSquaresProblem for Rosenbrock {
        fn residuals(&self, p: &DVector<f64>) -> DVector<f64> {
            DVector::from_vec(vec![10.0 * (p[1] - p[0] * p[0]), 1.0 - p[0]])
        }
        fn jacobian(&self, p: &DVector<f64>) -> DMatrix<f64> {
            DMatrix::from_row_slice(2, 2, &[-20.0 * p[0], 10.0, -1.0, 0.0])
        }
    }

    /// Exponential fit with a nonzero residual at the optimum.
    struct ExpFit {
        t: Vec<f64>,
        y: Vec<f64>,
    }

    impl LeastSquaresProblem for ExpFit {
        fn residuals(&self, p: &DVector<f64>) -> DVector<f64> {
            DVector::from_iterator(
                self.t.len(),
                self.t.iter().zip(&self.y).map(|(&t, &y)| p[0] * (p[1] * t).exp() - y),
            )
        }
        fn jacobian(&self, p: &DVector<f64>) -> DMatrix<f64> {
            let mut j = DMatrix::zeros(self.t.len(), 2);
            for (i, &t) in self.t.iter().enumerate() {
                let e = (p[1] * t).exp();
                j[(i, 0)] = e;
                j[(i, 1)] = p[0] * t * e;
            }
            j
        }
    }

    #[test]
    fn rosenbrock_converges() {
        let sol = solve(&Rosenbrock, DVector::from_vec(vec![-1.2, 1.0]), &SolverOptions::default());
        assert!(sol.termination.converged());
        assert!((sol.params[0] - 1.0).abs() < 1e-10);
        assert!((sol.params[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cost_history_is_non_increasing() {
        let t: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = t
            .iter()
            .enumerate()
            .map(|(i, &t)| 2.0 * (-1.3 * t).exp() + if i % 2 == 0 { 0.01 } else { -0.01 })
            .collect();
        let sol = solve(&ExpFit { t, y }, DVector::from_vec(vec![1.0, 0.0]), &SolverOptions::default());
        assert!(sol.termination.converged());
        for w in sol.cost_history.windows(2) {
            assert!(w[1] <= w[0]);
        }
        assert!((sol.params[0] - 2.0).abs() < 0.05);
        assert!((sol.params[1] + 1.3).abs() < 0.05);
    }

    #[test]
    fn condition_of_rank_deficient_jacobian_is_infinite() {
        let j = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        assert!(condition_number(&j) > 1e15);
    }
}
