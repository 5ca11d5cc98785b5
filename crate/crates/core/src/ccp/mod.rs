//! Sparse multicast beamforming by the convex-concave procedure.
//!
//! Two algorithms minimize `backhaul + eta * power` over clusterings and
//! beamformers: [`sdr_ccp`] works on the lifted matrices `W_m = w_m w_m^H`
//! and solves an SDP per iteration; [`g_ccp`] keeps the beamformers and
//! solves a second-order-cone QCQP per iteration. Both replace the block
//! indicator `1{||w_mn||^2 > 0}` with a smooth concave surrogate whose
//! smoothness `theta` is annealed toward zero.

mod cluster;
pub(crate) mod gccp;
pub(crate) mod model;
pub(crate) mod sdr;

use serde::{Deserialize, Serialize};

use crate::conic::IpmSettings;
use crate::scenario::{BeamformerSet, ClusterMatrix, CostBreakdown, Eta, PeakPower};
use crate::smooth::{AnnealSchedule, SmoothKind};

pub use cluster::{extract_clusters, SelectionMatrices};
pub use gccp::g_ccp;
pub use model::LiftedSet;
pub use sdr::{extract_rank1, polish, randomize_and_scale, sdr_ccp, solve_p_ini};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSettings {
    pub eta: Eta,
    pub smooth_kind: SmoothKind,
    pub anneal: AnnealSchedule,
    /// Inner loop stops once the surrogate changes by less than this,
    /// relative.
    pub ccp_rel_tol: f64,
    pub ccp_max_iters: usize,
    pub n_randomizations: usize,
    /// Blocks below this fraction of the largest block power are dropped.
    pub cluster_threshold: f64,
    /// Largest ratio of second to first eigenvalue accepted as rank one.
    pub rank_tol: f64,
    /// Overrides the scenario's peak limits when set.
    pub peak_power: Option<PeakPower>,
    /// Runs a single pass at this smoothness instead of annealing.
    pub fixed_theta: Option<f64>,
    pub conic: IpmSettings,
    /// Record one [`TraceRow`] per inner iteration.
    pub trace: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            eta: Eta::Weight(1.0),
            smooth_kind: SmoothKind::Arctan,
            anneal: AnnealSchedule::default(),
            ccp_rel_tol: 1e-4,
            ccp_max_iters: 30,
            n_randomizations: 300,
            cluster_threshold: 1e-4,
            rank_tol: 1e-6,
            peak_power: None,
            fixed_theta: None,
            conic: IpmSettings::default(),
            trace: false,
        }
    }
}

impl SolverSettings {
    pub fn with_eta(mut self, eta: Eta) -> Self {
        self.eta = eta;
        self
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        let bad = |s: &str| Err(SolveError::Settings(s.to_string()));
        if let Eta::Weight(w) = self.eta {
            if !(w >= 0.0) || !w.is_finite() {
                return bad("eta must be finite and nonnegative");
            }
        }
        if !self.anneal.is_valid() {
            return bad("anneal needs beta in (0, 1) and epsilon > 0");
        }
        if !(self.ccp_rel_tol > 0.0 && self.cluster_threshold > 0.0 && self.rank_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.ccp_max_iters == 0 || self.n_randomizations == 0 {
            return bad("iteration and randomization counts must be at least 1");
        }
        if let Some(t) = self.fixed_theta {
            if !(t > 0.0) {
                return bad("fixed_theta must be positive");
            }
        }
        Ok(())
    }
}

/// One inner CCP iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    /// Zero-based index of the smoothness pass.
    pub pass: usize,
    pub theta: f64,
    /// Zero is the starting point of the pass.
    pub iteration: usize,
    pub surrogate: f64,
    pub true_cost: f64,
    pub min_sinr_margin: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub outer_passes: usize,
    /// Inner iterations per smoothness pass.
    pub inner_iterations: Vec<usize>,
    /// Whether each pass met the relative tolerance.
    pub inner_converged: Vec<bool>,
    pub rank_one: bool,
    pub randomized: bool,
    pub conic_iterations: usize,
    /// seconds
    pub wall_time: f64,
    pub trace: Vec<TraceRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub beamformers: BeamformerSet,
    pub clustering: ClusterMatrix,
    pub costs: CostBreakdown,
    /// Smallest `SINR_k / gamma_m` over served users.
    pub min_sinr_margin: f64,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("full-cooperation power minimization is infeasible")]
    PiniInfeasible,
    #[error("no feasible beamformer could be recovered from the relaxation")]
    InitializationInfeasible,
    #[error("the clustering cannot meet the SINR targets")]
    ClusteringInfeasible,
    #[error("every candidate clustering is infeasible")]
    AllClusteringsInfeasible,
    #[error("per-user SINR targets cannot be met")]
    UnicastInfeasible,
    #[error("{0} clusterings exceed the enumeration limit")]
    TooManyClusterings(u128),
    #[error("conic solver failed: {0}")]
    Numerical(String),
    #[error("invalid settings: {0}")]
    Settings(String),
}

impl SolveError {
    /// Whether the instance (rather than the solver) is at fault.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            SolveError::PiniInfeasible
                | SolveError::InitializationInfeasible
                | SolveError::ClusteringInfeasible
                | SolveError::AllClusteringsInfeasible
                | SolveError::UnicastInfeasible
        )
    }
}
