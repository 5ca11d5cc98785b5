use std::collections::BTreeMap;

use rayon::prelude::*;

use super::rows::sig10;
use super::{Algorithm, ExperimentConfig, HarnessError, ResultRow, SummaryRow};
use crate::baselines::{exhaustive_table, greedy_clustering, unicast_sparse_bf, ExhaustiveTable};
use crate::ccp::{g_ccp, polish, sdr_ccp, solve_p_ini, SolveError, SolveOutcome};
use crate::linalg::watts_to_dbm;
use crate::rng::derive_seed;
use crate::scenario::{CachingStrategy, ClusterMatrix, Eta, Scenario};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<ResultRow>,
    pub summary: Vec<SummaryRow>,
}

pub fn trial_seed(base_seed: u64, trial: usize) -> u64 {
    derive_seed(base_seed, trial as u64)
}

pub fn status_of(e: &SolveError) -> &'static str {
    match e {
        SolveError::PiniInfeasible => "pini_infeasible",
        SolveError::InitializationInfeasible => "initialization_infeasible",
        SolveError::ClusteringInfeasible => "clustering_infeasible",
        SolveError::AllClusteringsInfeasible => "all_clusterings_infeasible",
        SolveError::UnicastInfeasible => "unicast_infeasible",
        SolveError::TooManyClusterings(_) => "too_many_clusterings",
        SolveError::Numerical(_) => "numerical_failure",
        SolveError::Settings(_) => "invalid_settings",
    }
}

/// Runs one algorithm at one weight. `table` is the shared exhaustive table
/// of the trial, when one was built.
pub fn solve_one(
    sc: &Scenario,
    cfg: &ExperimentConfig,
    algorithm: Algorithm,
    eta: Eta,
    seed: u64,
    table: Option<&Result<ExhaustiveTable, SolveError>>,
) -> Result<SolveOutcome, SolveError> {
    let settings = cfg.solver.clone().with_eta(eta);
    match algorithm {
        Algorithm::SdrCcp => sdr_ccp(sc, &settings, seed),
        Algorithm::GCcp => g_ccp(sc, &settings, seed),
        Algorithm::Greedy => greedy_clustering(sc, eta, &settings, seed),
        Algorithm::Unicast => unicast_sparse_bf(sc, eta, &settings, seed),
        Algorithm::FullCoop => polish(&ClusterMatrix::full(sc.n_groups(), sc.n_bs()), sc, &settings, seed),
        Algorithm::Exhaustive => {
            let owned;
            let table = match table {
                Some(t) => t,
                None => {
                    owned = exhaustive_table(sc, &settings, seed, true);
                    &owned
                }
            };
            match table {
                Ok(t) => t.best(sc, eta).map(|o| o.outcome),
                Err(e) => Err(e.clone()),
            }
        }
    }
}

fn row_from(
    cfg: &ExperimentConfig,
    trial: usize,
    seed: u64,
    algorithm: Algorithm,
    eta: Eta,
    n_groups: usize,
    hash: &str,
    result: &Result<SolveOutcome, SolveError>,
) -> ResultRow {
    let mut row = ResultRow {
        trial,
        seed,
        caching: cfg.scenario.caching,
        algorithm,
        variant: algorithm.variant().to_string(),
        eta,
        feasible: false,
        status: String::new(),
        backhaul_bps: None,
        power_w: None,
        power_dbm: None,
        total_cost: None,
        min_sinr_margin: None,
        n_groups,
        clustering: None,
        outer_passes: 0,
        inner_iterations: 0,
        conic_iterations: 0,
        wall_time_s: None,
        channel_hash: hash.to_string(),
    };
    match result {
        Ok(o) => {
            let d = &o.diagnostics;
            row.feasible = true;
            row.status = "ok".into();
            row.backhaul_bps = Some(sig10(o.costs.backhaul));
            row.power_w = Some(sig10(o.costs.power));
            row.power_dbm = Some(sig10(watts_to_dbm(o.costs.power)));
            row.total_cost = Some(sig10(o.costs.total));
            row.min_sinr_margin = Some(sig10(o.min_sinr_margin));
            row.clustering = Some(o.clustering.to_bit_string());
            row.outer_passes = d.outer_passes;
            row.inner_iterations = d.inner_iterations.iter().sum();
            row.conic_iterations = d.conic_iterations;
            if cfg.record_wall_time {
                row.wall_time_s = Some(sig10(d.wall_time));
            }
        }
        Err(e) => row.status = status_of(e).into(),
    }
    row
}

/// Builds the trial's network once and runs every `(algorithm, eta)` pair
/// on it. Failures are recorded per row.
pub fn run_trial(cfg: &ExperimentConfig, trial: usize) -> Vec<ResultRow> {
    let seed = trial_seed(cfg.base_seed, trial);
    let combos = || {
        cfg.algorithms
            .iter()
            .flat_map(|&a| cfg.etas.iter().map(move |&e| (a, e)))
    };
    let sc = match Scenario::generate(&cfg.scenario, seed) {
        Ok(sc) => sc,
        Err(_) => {
            let err = Err(SolveError::Settings("scenario generation failed".into()));
            return combos()
                .map(|(a, e)| row_from(cfg, trial, seed, a, e, 0, "", &err))
                .collect();
        }
    };
    let hash = sc.channel_hash();
    let m = sc.n_groups();

    // Every method starts from full cooperation, so its infeasibility ends
    // the trial.
    if let Err(e) = solve_p_ini(&sc, &cfg.solver) {
        let e = match e {
            SolveError::ClusteringInfeasible | SolveError::InitializationInfeasible => SolveError::PiniInfeasible,
            e => e,
        };
        let err = Err(e);
        return combos()
            .map(|(a, eta)| row_from(cfg, trial, seed, a, eta, m, &hash, &err))
            .collect();
    }

    let table = cfg
        .algorithms
        .contains(&Algorithm::Exhaustive)
        .then(|| exhaustive_table(&sc, &cfg.solver, seed, true));
    combos()
        .map(|(a, eta)| {
            let result = solve_one(&sc, cfg, a, eta, seed, table.as_ref());
            row_from(cfg, trial, seed, a, eta, m, &hash, &result)
        })
        .collect()
}

fn row_key(cfg: &ExperimentConfig, r: &ResultRow) -> (usize, usize, usize) {
    let a = cfg.algorithms.iter().position(|&x| x == r.algorithm).unwrap_or(usize::MAX);
    let e = cfg.etas.iter().position(|&x| x == r.eta).unwrap_or(usize::MAX);
    (r.trial, a, e)
}

/// Runs all trials on `cfg.jobs` threads. Rows come back sorted by
/// `(trial, algorithm, eta)` in configuration order.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepResult, HarnessError> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let mut rows: Vec<ResultRow> = pool.install(|| {
        (0..cfg.n_trials)
            .into_par_iter()
            .flat_map_iter(|t| run_trial(cfg, t))
            .collect()
    });
    rows.sort_by_key(|r| row_key(cfg, r));
    let summary = summarize(&rows, &cfg.algorithms, &cfg.etas);
    Ok(SweepResult { rows, summary })
}

/// Means over feasible rows per `(caching, algorithm, eta)`, in the order
/// the cells first appear after ordering by caching strategy.
pub fn summarize(rows: &[ResultRow], algorithms: &[Algorithm], etas: &[Eta]) -> Vec<SummaryRow> {
    let idx = |r: &ResultRow| {
        (
            caching_index(r.caching),
            algorithms.iter().position(|&a| a == r.algorithm).unwrap_or(usize::MAX),
            etas.iter().position(|&e| e == r.eta).unwrap_or(usize::MAX),
        )
    };
    let mut cells: BTreeMap<(usize, usize, usize), Vec<&ResultRow>> = BTreeMap::new();
    for r in rows {
        cells.entry(idx(r)).or_default().push(r);
    }
    cells
        .into_values()
        .map(|group| {
            let first = group[0];
            let feasible: Vec<&ResultRow> = group.iter().copied().filter(|r| r.feasible).collect();
            let mean = |f: fn(&ResultRow) -> Option<f64>| {
                let v: Vec<f64> = feasible.iter().filter_map(|r| f(r)).collect();
                (!v.is_empty()).then(|| sig10(v.iter().sum::<f64>() / v.len() as f64))
            };
            let mean_power_w = mean(|r| r.power_w);
            SummaryRow {
                caching: first.caching,
                algorithm: first.algorithm,
                eta: first.eta,
                n_trials: group.len(),
                n_feasible: feasible.len(),
                mean_backhaul_bps: mean(|r| r.backhaul_bps),
                mean_power_w,
                mean_power_dbm: mean_power_w.map(|p| sig10(watts_to_dbm(p))),
                mean_total_cost: mean(|r| r.total_cost),
            }
        })
        .collect()
}

fn caching_index(c: CachingStrategy) -> usize {
    match c {
        CachingStrategy::PopC => 0,
        CachingStrategy::RanC => 1,
        CachingStrategy::ProC => 2,
    }
}

/// The same sweep under each caching strategy. Trials share seeds, so each
/// strategy sees the same channels and requests.
pub fn compare_caching(cfg: &ExperimentConfig) -> Result<SweepResult, HarnessError> {
    let mut rows = Vec::new();
    for strategy in [CachingStrategy::PopC, CachingStrategy::RanC, CachingStrategy::ProC] {
        let mut c = cfg.clone();
        c.scenario.caching = strategy;
        rows.extend(run_sweep(&c)?.rows);
    }
    let summary = summarize(&rows, &cfg.algorithms, &cfg.etas);
    Ok(SweepResult { rows, summary })
}

/// Gap of one algorithm to the exhaustive oracle at one weight, over
/// trials where both are feasible.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OracleGap {
    pub algorithm: Algorithm,
    pub eta: Eta,
    pub n_paired: usize,
    pub mean_total_cost: Option<f64>,
    pub mean_oracle_cost: Option<f64>,
    /// `mean_total_cost / mean_oracle_cost - 1`
    pub relative_gap: Option<f64>,
}

impl super::rows::HasHeader for OracleGap {
    const HEADER: &'static [&'static str] = &[
        "algorithm",
        "eta",
        "n_paired",
        "mean_total_cost",
        "mean_oracle_cost",
        "relative_gap",
    ];
}

#[derive(Debug, Clone, PartialEq)]
pub struct Validation {
    pub sweep: SweepResult,
    pub gaps: Vec<OracleGap>,
}

/// Runs the configured algorithms next to the exhaustive oracle and
/// reports their cost gaps.
pub fn validate(cfg: &ExperimentConfig) -> Result<Validation, HarnessError> {
    let mut c = cfg.clone();
    if !c.algorithms.contains(&Algorithm::Exhaustive) {
        c.algorithms.insert(0, Algorithm::Exhaustive);
    }
    let sweep = run_sweep(&c)?;
    let oracle: BTreeMap<(usize, usize), f64> = sweep
        .rows
        .iter()
        .filter(|r| r.algorithm == Algorithm::Exhaustive)
        .filter_map(|r| {
            let e = c.etas.iter().position(|&x| x == r.eta)?;
            Some(((r.trial, e), r.total_cost?))
        })
        .collect();
    let mut gaps = Vec::new();
    for &a in c.algorithms.iter().filter(|&&a| a != Algorithm::Exhaustive) {
        for (ei, &eta) in c.etas.iter().enumerate() {
            let pairs: Vec<(f64, f64)> = sweep
                .rows
                .iter()
                .filter(|r| r.algorithm == a && r.eta == eta)
                .filter_map(|r| Some((r.total_cost?, *oracle.get(&(r.trial, ei))?)))
                .collect();
            let n = pairs.len();
            let (mc, mo) = if n == 0 {
                (None, None)
            } else {
                let s: (f64, f64) = pairs.iter().fold((0.0, 0.0), |s, p| (s.0 + p.0, s.1 + p.1));
                (Some(sig10(s.0 / n as f64)), Some(sig10(s.1 / n as f64)))
            };
            gaps.push(OracleGap {
                algorithm: a,
                eta,
                n_paired: n,
                mean_total_cost: mc,
                mean_oracle_cost: mo,
                relative_gap: mc.zip(mo).filter(|&(_, o)| o > 0.0).map(|(c, o)| sig10(c / o - 1.0)),
            });
        }
    }
    Ok(Validation { sweep, gaps })
}
