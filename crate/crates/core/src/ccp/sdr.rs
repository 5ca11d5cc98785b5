use std::time::Instant;

use super::gccp::finalize;
use super::model::{extract_rank1_model, LiftedSet, Model, Recovered, SdrFailure};
use super::{Diagnostics, SolveError, SolveOutcome, SolverSettings, TraceRow};
use crate::rng::derive_seed;
use crate::scenario::{network_cost, BeamformerSet, ClusterMatrix, Eta, Scenario};
use crate::smooth::{theta_init, theta_next};

/// Full-cooperation power minimization over the lifted matrices.
pub fn solve_p_ini(sc: &Scenario, settings: &SolverSettings) -> Result<LiftedSet, SolveError> {
    let model = Model::multicast(sc, settings);
    p_ini(&model, settings).map(|(w, _)| w)
}

pub(crate) fn p_ini(model: &Model, settings: &SolverSettings) -> Result<(LiftedSet, usize), SolveError> {
    model
        .solve_sdr(&model.full_support(), &model.power_weights(), settings)
        .map_err(|e| match e {
            SdrFailure::Infeasible => SolveError::PiniInfeasible,
            SdrFailure::Numerical(s) => SolveError::Numerical(s),
        })
}

/// `sqrt(lambda_1) u_1` per group when every `W_m` is rank one within
/// `rank_tol`.
pub fn extract_rank1(w: &LiftedSet, rank_tol: f64) -> Option<BeamformerSet> {
    extract_rank1_model(w, rank_tol)
}

/// Gaussian randomization followed by the per-group power scaling LP.
pub fn randomize_and_scale(
    w: &LiftedSet,
    sc: &Scenario,
    settings: &SolverSettings,
    seed: u64,
) -> Result<BeamformerSet, SolveError> {
    let model = Model::multicast(sc, settings);
    model
        .randomize(w, &model.full_support(), settings, seed)
        .ok_or(SolveError::InitializationInfeasible)
}

/// Power minimization with every block outside `s` forced to zero.
pub fn polish(
    s: &ClusterMatrix,
    sc: &Scenario,
    settings: &SolverSettings,
    seed: u64,
) -> Result<SolveOutcome, SolveError> {
    settings.validate()?;
    let start = Instant::now();
    let model = Model::multicast(sc, settings);
    let (rec, iters) = polish_model(&model, s, settings, seed)?;
    let costs = network_cost(&rec.w, s, sc, settings.eta);
    Ok(SolveOutcome {
        min_sinr_margin: model.margin(&rec.w),
        beamformers: rec.w,
        clustering: s.clone(),
        costs,
        diagnostics: Diagnostics {
            rank_one: rec.rank_one,
            randomized: rec.randomized,
            conic_iterations: iters,
            wall_time: start.elapsed().as_secs_f64(),
            ..Default::default()
        },
    })
}

pub(crate) fn polish_model(
    model: &Model,
    s: &ClusterMatrix,
    settings: &SolverSettings,
    seed: u64,
) -> Result<(Recovered, usize), SolveError> {
    let (w, iters) = model
        .solve_sdr(s, &model.power_weights(), settings)
        .map_err(|e| match e {
            SdrFailure::Infeasible => SolveError::ClusteringInfeasible,
            SdrFailure::Numerical(m) => SolveError::Numerical(m),
        })?;
    let rec = model
        .recover(&w, s, settings, seed)
        .ok_or(SolveError::ClusteringInfeasible)?;
    Ok((rec, iters))
}

/// Relative change used by both inner loops.
pub(crate) fn rel_change(old: f64, new: f64) -> f64 {
    (old - new).abs() / old.abs().max(new.abs()).max(1e-300)
}

/// Convex-concave procedure on the semidefinite relaxation.
pub fn sdr_ccp(sc: &Scenario, settings: &SolverSettings, seed: u64) -> Result<SolveOutcome, SolveError> {
    settings.validate()?;
    let start = Instant::now();
    let model = Model::multicast(sc, settings);
    let full = model.full_support();
    let (mut w, iters) = p_ini(&model, settings)?;
    let mut diag = Diagnostics {
        conic_iterations: iters,
        ..Default::default()
    };
    let eta = settings.eta;
    let kind = settings.smooth_kind;
    let mut theta = match settings.fixed_theta {
        Some(t) => t,
        None => theta_init(&w.block_powers().concat()).map_err(|e| SolveError::Settings(e.to_string()))?,
    };
    let true_cost = |w: &LiftedSet| {
        let powers = w.block_powers();
        let max = powers.iter().flatten().copied().fold(0.0, f64::max);
        let mut s = sc.cached_pairs();
        for (m, row) in powers.iter().enumerate() {
            for (n, p) in row.iter().enumerate() {
                if *p > settings.cluster_threshold * max {
                    s.set(m, n, true);
                }
            }
        }
        crate::scenario::CostBreakdown::new(
            crate::scenario::backhaul_cost(&s, &sc.cache, &sc.groups),
            w.trace(),
            eta,
            sc.radio.cost_scale,
        )
        .total
    };
    'outer: loop {
        let pass = diag.outer_passes;
        diag.outer_passes += 1;
        let mut obj = model.surrogate(&w.block_powers(), kind, theta, eta);
        let record = |it: usize, obj: f64, w: &LiftedSet, trace: &mut Vec<TraceRow>| {
            if settings.trace {
                trace.push(TraceRow {
                    pass,
                    theta,
                    iteration: it,
                    surrogate: obj,
                    true_cost: true_cost(w),
                    min_sinr_margin: model.lifted_margin(w),
                });
            }
        };
        record(0, obj, &w, &mut diag.trace);
        let mut converged = false;
        let mut done = 0;
        for it in 1..=settings.ccp_max_iters {
            let weights = model.ccp_weights(&w.block_powers(), kind, theta, eta);
            match model.solve_sdr(&full, &weights, settings) {
                Ok((next, iters)) => {
                    diag.conic_iterations += iters;
                    let new_obj = model.surrogate(&next.block_powers(), kind, theta, eta);
                    // Same safeguard as the beamformer-domain loop.
                    if new_obj > obj {
                        converged = rel_change(obj, new_obj) < settings.ccp_rel_tol;
                        break;
                    }
                    w = next;
                    done = it;
                    record(it, new_obj, &w, &mut diag.trace);
                    let change = rel_change(obj, new_obj);
                    obj = new_obj;
                    if change < settings.ccp_rel_tol {
                        converged = true;
                        break;
                    }
                }
                Err(_) => {
                    diag.inner_iterations.push(done);
                    diag.inner_converged.push(false);
                    break 'outer;
                }
            }
        }
        diag.inner_iterations.push(done);
        diag.inner_converged.push(converged);
        if eta == Eta::PowerOnly || settings.fixed_theta.is_some() {
            break;
        }
        match theta_next(theta, &settings.anneal) {
            Some(t) => theta = t,
            None => break,
        }
    }
    let rec = match model.recover(&w, &full, settings, seed) {
        Some(r) => r,
        None => {
            // Fall back to the clustering the relaxation points at.
            let powers = w.block_powers();
            let max = powers.iter().flatten().copied().fold(0.0, f64::max);
            let mut s = sc.cached_pairs();
            for (m, row) in powers.iter().enumerate() {
                for (n, p) in row.iter().enumerate() {
                    if *p > settings.cluster_threshold * max {
                        s.set(m, n, true);
                    }
                }
            }
            polish_model(&model, &s, settings, derive_seed(seed, 1))
                .map(|(r, _)| r)
                .map_err(|_| SolveError::InitializationInfeasible)?
        }
    };
    diag.rank_one = rec.rank_one;
    diag.randomized = rec.randomized;
    let (w, s) = finalize(&model, rec.w, settings, seed, false, &mut diag)?;
    diag.wall_time = start.elapsed().as_secs_f64();
    Ok(SolveOutcome {
        costs: network_cost(&w, &s, sc, eta),
        min_sinr_margin: model.margin(&w),
        beamformers: w,
        clustering: s,
        diagnostics: diag,
    })
}
