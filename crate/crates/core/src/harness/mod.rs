//! Seeded Monte-Carlo experiments over the solvers and baselines, with
//! flat CSV or JSON-lines output.

mod config;
mod rows;
mod run;

pub use config::{Algorithm, ExperimentConfig, OutputFormat};
pub use rows::{emit_results, read_results, sig10, HasHeader, ResultRow, SummaryRow};
pub use run::{
    compare_caching, run_sweep, run_trial, solve_one, status_of, summarize, trial_seed, validate, OracleGap,
    SweepResult, Validation,
};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid experiment: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Scenario(#[from] crate::scenario::ScenarioError),
}
