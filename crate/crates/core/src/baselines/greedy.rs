use std::time::Instant;

use super::clustering_seed;
use crate::ccp::model::{Model, Recovered};
use crate::ccp::sdr::polish_model;
use crate::ccp::{Diagnostics, SolveError, SolveOutcome, SolverSettings};
use crate::scenario::{network_cost, ClusterMatrix, CostBreakdown, Eta, Scenario};

/// Starts from full cooperation and repeatedly drops the single uncached
/// `(group, BS)` pair whose removal lowers the network cost the most.
pub fn greedy_clustering(
    sc: &Scenario,
    eta: Eta,
    settings: &SolverSettings,
    seed: u64,
) -> Result<SolveOutcome, SolveError> {
    settings.validate()?;
    let start = Instant::now();
    let model = Model::multicast(sc, settings);
    let evaluate = |s: &ClusterMatrix| -> Result<(Recovered, CostBreakdown), SolveError> {
        let (rec, _) = polish_model(&model, s, settings, clustering_seed(seed, s))?;
        let cost = network_cost(&rec.w, s, sc, eta);
        Ok((rec, cost))
    };
    let mut s = model.full_support();
    let (mut rec, mut cost) = evaluate(&s).map_err(|e| match e {
        SolveError::ClusteringInfeasible => SolveError::PiniInfeasible,
        e => e,
    })?;
    let mut rounds = 0;
    loop {
        let mut best: Option<(ClusterMatrix, Recovered, CostBreakdown)> = None;
        for m in 0..sc.n_groups() {
            for n in 0..sc.n_bs() {
                if !s.get(m, n) || sc.cached(m, n) {
                    continue;
                }
                let mut trial = s.clone();
                trial.set(m, n, false);
                if let Ok((r, c)) = evaluate(&trial) {
                    let target = best.as_ref().map_or(cost.total, |(_, _, b)| b.total);
                    if c.total < target {
                        best = Some((trial, r, c));
                    }
                }
            }
        }
        match best {
            Some((next, r, c)) => {
                s = next;
                rec = r;
                cost = c;
                rounds += 1;
            }
            None => break,
        }
    }
    Ok(SolveOutcome {
        min_sinr_margin: model.margin(&rec.w),
        beamformers: rec.w,
        clustering: s,
        costs: cost,
        diagnostics: Diagnostics {
            outer_passes: rounds,
            rank_one: rec.rank_one,
            randomized: rec.randomized,
            wall_time: start.elapsed().as_secs_f64(),
            ..Default::default()
        },
    })
}
