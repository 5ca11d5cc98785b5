//! Convex solvers used by the beamforming algorithms.
//!
//! [`ipm`] is a general interior-point method for linear cone programs over
//! products of nonnegative orthants, second-order cones and PSD cones.
//! [`sdp`], [`qcqp`] and [`lp`] translate the three problem shapes the
//! algorithms need into that form and map the answers back.

pub mod cone;
pub mod dump;
pub mod ipm;
pub mod lp;
pub mod qcqp;
pub mod sdp;

use serde::{Deserialize, Serialize};

pub use ipm::{ConeProgram, IpmSettings, IpmStatus};
pub use lp::{solve_lp, LinearConstraint, LpProblem, Sense};
pub use qcqp::{solve_qcqp, AffineForm, ComplexForm, QcqpConstraint, QcqpPoint, QcqpProblem};
pub use sdp::{solve_sdp, SdpProblem, TraceConstraint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
}

/// Result of a convex solve. `primal` is only meaningful when `status` is
/// [`SolveStatus::Optimal`].
#[derive(Debug, Clone)]
pub struct Solved<T> {
    pub status: SolveStatus,
    pub objective: f64,
    pub primal: T,
    pub iterations: usize,
}

impl<T> Solved<T> {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConicError {
    #[error("quadratic form is not positive semidefinite (min eigenvalue {0:e})")]
    NotConvex(f64),
    #[error("malformed problem: {0}")]
    Malformed(String),
}

impl IpmSettings {
    /// Settings with feasibility and gap tolerances set to `tol`.
    pub fn with_tolerance(tol: f64) -> Self {
        Self {
            feastol: tol,
            abstol: tol * 0.1,
            reltol: tol,
            ..Self::default()
        }
    }
}
