//! Complex Hermitian SDPs in the form
//!
//! ```text
//!   minimize    sum_m <C_m, W_m>
//!   subject to  sum_m <A_im, W_m> >= b_i,   W_m PSD,
//! ```
//!
//! solved through the real embedding of each `W_m`. The cone program handed
//! to the interior-point method is the dual linear matrix inequality in the
//! multipliers `y >= 0`, so the matrices `W_m` come back as its dual slack.

use nalgebra::{DMatrix, DVector};

use super::cone::Cone;
use super::ipm::{self, ConeProgram, IpmSettings, IpmStatus};
use super::{ConicError, SolveStatus, Solved};
use crate::linalg::{embed, trace_inner, unembed, CMatrix};

/// `sum over terms of <A, W_m> >= rhs`.
#[derive(Debug, Clone)]
pub struct TraceConstraint {
    pub terms: Vec<(usize, CMatrix)>,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct SdpProblem {
    /// Order of each Hermitian variable.
    pub dims: Vec<usize>,
    /// `C_m`, one per variable.
    pub objective: Vec<CMatrix>,
    pub constraints: Vec<TraceConstraint>,
}

fn is_hermitian(m: &CMatrix) -> bool {
    let scale = m.iter().map(|x| x.norm()).fold(0.0, f64::max).max(1e-300);
    (m - m.adjoint()).iter().all(|x| x.norm() <= 1e-10 * scale)
}

impl SdpProblem {
    pub fn new(objective: Vec<CMatrix>) -> Self {
        Self {
            dims: objective.iter().map(|c| c.nrows()).collect(),
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn push(&mut self, terms: Vec<(usize, CMatrix)>, rhs: f64) {
        self.constraints.push(TraceConstraint { terms, rhs });
    }

    pub fn validate(&self) -> Result<(), ConicError> {
        let bad = |s: String| Err(ConicError::Malformed(s));
        if self.objective.len() != self.dims.len() {
            return bad("one objective matrix per variable".into());
        }
        for (m, c) in self.objective.iter().enumerate() {
            if c.nrows() != self.dims[m] || c.ncols() != self.dims[m] || !is_hermitian(c) {
                return bad(format!("objective matrix {m} is not Hermitian of order {}", self.dims[m]));
            }
        }
        for (i, con) in self.constraints.iter().enumerate() {
            for (m, a) in &con.terms {
                if *m >= self.dims.len()
                    || a.nrows() != self.dims[*m]
                    || a.ncols() != self.dims[*m]
                    || !is_hermitian(a)
                {
                    return bad(format!("constraint {i} has a malformed term for variable {m}"));
                }
            }
            if !con.rhs.is_finite() {
                return bad(format!("constraint {i} has a non-finite bound"));
            }
        }
        Ok(())
    }

    /// Objective at `w`.
    pub fn evaluate(&self, w: &[CMatrix]) -> f64 {
        self.objective.iter().zip(w).map(|(c, x)| trace_inner(c, x)).sum()
    }

    /// Largest violation `b_i - sum <A, W>` over constraints, relative to
    /// `max(1, |b_i|)`; nonpositive when `w` is feasible.
    pub fn max_violation(&self, w: &[CMatrix]) -> f64 {
        self.constraints
            .iter()
            .map(|con| {
                let lhs: f64 = con.terms.iter().map(|(m, a)| trace_inner(a, &w[*m])).sum();
                (con.rhs - lhs) / con.rhs.abs().max(1.0)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// The dual LMI as a cone program: variables `y`, one per constraint.
    pub fn to_cone_program(&self) -> ConeProgram {
        let p = self.constraints.len();
        let blocks: Vec<usize> = self.dims.iter().map(|d| 2 * d).collect();
        let rows = p + blocks.iter().map(|b| b * b).sum::<usize>();
        let mut g = DMatrix::zeros(rows, p);
        let mut h = DVector::zeros(rows);
        for i in 0..p {
            g[(i, i)] = -1.0;
        }
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut off = p;
        for (m, b) in blocks.iter().enumerate() {
            offsets.push(off);
            let c = embed(&self.objective[m]);
            for (k, v) in c.iter().enumerate() {
                h[off + k] = 0.5 * v;
            }
            off += b * b;
        }
        for (i, con) in self.constraints.iter().enumerate() {
            for (m, a) in &con.terms {
                let e = embed(a);
                for (k, v) in e.iter().enumerate() {
                    g[(offsets[*m] + k, i)] += 0.5 * v;
                }
            }
        }
        let c = DVector::from_iterator(p, self.constraints.iter().map(|con| -con.rhs));
        let mut cones = vec![Cone::NonNeg(p)];
        cones.extend(blocks.iter().map(|&b| Cone::Psd(b)));
        ConeProgram::new(c, g, h, cones)
    }
}

pub fn solve_sdp(p: &SdpProblem, settings: &IpmSettings) -> Solved<Vec<CMatrix>> {
    let zeros = || p.dims.iter().map(|&d| CMatrix::zeros(d, d)).collect::<Vec<_>>();
    let fail = |status, iterations| Solved {
        status,
        objective: f64::NAN,
        primal: zeros(),
        iterations,
    };
    if p.validate().is_err() {
        return fail(SolveStatus::NumericalFailure, 0);
    }
    if p.constraints.is_empty() {
        // W = 0 is optimal iff every C_m is PSD; otherwise unbounded below.
        let psd = p.objective.iter().all(|c| {
            c.nrows() == 0 || c.clone().symmetric_eigenvalues().min() >= -1e-12
        });
        return if psd {
            Solved {
                status: SolveStatus::Optimal,
                objective: 0.0,
                primal: zeros(),
                iterations: 0,
            }
        } else {
            fail(SolveStatus::Unbounded, 0)
        };
    }
    let prog = p.to_cone_program();
    let sol = ipm::solve(&prog, settings);
    match sol.status {
        IpmStatus::Optimal => {
            let n_cons = p.constraints.len();
            let mut off = n_cons;
            let mut w = Vec::with_capacity(p.dims.len());
            for &d in &p.dims {
                let b = 2 * d;
                let x = DMatrix::from_column_slice(b, b, &sol.z.as_slice()[off..off + b * b]);
                let x = (&x + x.transpose()) * 0.5;
                w.push(unembed(&x));
                off += b * b;
            }
            Solved {
                status: SolveStatus::Optimal,
                objective: p.evaluate(&w),
                primal: w,
                iterations: sol.iterations,
            }
        }
        // An improving ray in y certifies that no W satisfies the constraints.
        IpmStatus::DualInfeasible => fail(SolveStatus::Infeasible, sol.iterations),
        IpmStatus::PrimalInfeasible => fail(SolveStatus::Unbounded, sol.iterations),
        IpmStatus::NumericalFailure => fail(SolveStatus::NumericalFailure, sol.iterations),
    }
}
