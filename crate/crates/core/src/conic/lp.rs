//! Linear programs over nonnegative variables.

use nalgebra::{DMatrix, DVector};

use super::cone::Cone;
use super::ipm::{self, ConeProgram, IpmSettings, IpmStatus};
use super::{SolveStatus, Solved};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Ge,
    Le,
}

/// `sum_j a_j x_j (>= | <=) rhs`.
#[derive(Debug, Clone)]
pub struct LinearConstraint {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// minimize `c'x` over `x >= 0` subject to the listed constraints.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub c: Vec<f64>,
    pub constraints: Vec<LinearConstraint>,
}

impl LpProblem {
    pub fn new(c: Vec<f64>) -> Self {
        Self {
            c,
            constraints: Vec::new(),
        }
    }

    pub fn push(&mut self, coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        self.constraints.push(LinearConstraint { coeffs, sense, rhs });
    }

    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let bounds = x.iter().map(|v| -v);
        let rows = self.constraints.iter().map(|con| {
            let lhs: f64 = con.coeffs.iter().map(|(j, a)| a * x[*j]).sum();
            let v = match con.sense {
                Sense::Ge => con.rhs - lhs,
                Sense::Le => lhs - con.rhs,
            };
            v / con.rhs.abs().max(1.0)
        });
        bounds.chain(rows).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn to_cone_program(&self) -> ConeProgram {
        let n = self.c.len();
        let m = n + self.constraints.len();
        let mut g = DMatrix::zeros(m, n);
        let mut h = DVector::zeros(m);
        for j in 0..n {
            g[(j, j)] = -1.0;
        }
        for (i, con) in self.constraints.iter().enumerate() {
            let sign = match con.sense {
                Sense::Ge => 1.0,
                Sense::Le => -1.0,
            };
            // s = sign * (a'x - rhs) >= 0
            for (j, a) in &con.coeffs {
                g[(n + i, *j)] -= sign * a;
            }
            h[n + i] = -sign * con.rhs;
        }
        ConeProgram::new(DVector::from_vec(self.c.clone()), g, h, vec![Cone::NonNeg(m)])
    }
}

pub fn solve_lp(p: &LpProblem, settings: &IpmSettings) -> Solved<Vec<f64>> {
    let n = p.c.len();
    let fail = |status, iterations| Solved {
        status,
        objective: f64::NAN,
        primal: vec![0.0; n],
        iterations,
    };
    if p.constraints.iter().flat_map(|c| &c.coeffs).any(|(j, _)| *j >= n) {
        return fail(SolveStatus::NumericalFailure, 0);
    }
    let sol = ipm::solve(&p.to_cone_program(), settings);
    match sol.status {
        IpmStatus::Optimal => {
            let x: Vec<f64> = sol.x.iter().map(|v| v.max(0.0)).collect();
            Solved {
                status: SolveStatus::Optimal,
                objective: p.c.iter().zip(&x).map(|(c, v)| c * v).sum(),
                primal: x,
                iterations: sol.iterations,
            }
        }
        IpmStatus::PrimalInfeasible => fail(SolveStatus::Infeasible, sol.iterations),
        IpmStatus::DualInfeasible => fail(SolveStatus::Unbounded, sol.iterations),
        IpmStatus::NumericalFailure => fail(SolveStatus::NumericalFailure, sol.iterations),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lower_bound_is_attained() {
        let mut p = LpProblem::new(vec![1.0]);
        p.push(vec![(0, 1.0)], Sense::Ge, 2.0);
        let sol = solve_lp(&p, &IpmSettings::default());
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective - 2.0).abs() < 1e-7);
    }

    #[test]
    fn negative_upper_bound_is_infeasible() {
        let mut p = LpProblem::new(vec![0.0]);
        p.push(vec![(0, 1.0)], Sense::Le, -1.0);
        assert_eq!(solve_lp(&p, &IpmSettings::default()).status, SolveStatus::Infeasible);
    }

    #[test]
    fn unbounded_is_distinct() {
        let mut p = LpProblem::new(vec![-1.0]);
        p.push(vec![(0, 1.0)], Sense::Ge, 1.0);
        assert_eq!(solve_lp(&p, &IpmSettings::default()).status, SolveStatus::Unbounded);
    }
}
