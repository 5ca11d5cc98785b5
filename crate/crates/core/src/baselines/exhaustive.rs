use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::clustering_seed;
use crate::ccp::model::Model;
use crate::ccp::{Diagnostics, SolveError, SolveOutcome, SolverSettings};
use crate::scenario::{backhaul_cost, BeamformerSet, ClusterMatrix, CostBreakdown, Eta, Scenario};

/// Largest number of clusterings the search will enumerate.
pub const MAX_CLUSTERINGS: u128 = 1 << 20;

/// Polished result for one clustering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringRecord {
    pub clustering: ClusterMatrix,
    pub feasible: bool,
    /// bits/s
    pub backhaul: f64,
    /// watts; `NaN` when infeasible
    pub power: f64,
    pub min_sinr_margin: f64,
    pub rank_one: bool,
    #[serde(skip)]
    pub beamformers: Option<BeamformerSet>,
}

/// Every enumerated clustering with its polished power. The table does not
/// depend on `eta`, so one table answers a whole sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExhaustiveTable {
    pub records: Vec<ClusteringRecord>,
    /// Clusterings skipped because a cached pair was inactive.
    pub pruned: u128,
    pub wall_time: f64,
}

#[derive(Debug, Clone)]
pub struct OracleOutcome {
    pub best: ClusterMatrix,
    pub outcome: SolveOutcome,
    pub evaluated: usize,
    pub pruned: u128,
}

impl ExhaustiveTable {
    /// Minimum-cost feasible clustering at `eta`, ties to the
    /// lexicographically smallest clustering.
    pub fn best(&self, sc: &Scenario, eta: Eta) -> Result<OracleOutcome, SolveError> {
        let cost = |r: &ClusteringRecord| CostBreakdown::new(r.backhaul, r.power, eta, sc.radio.cost_scale);
        let best = self
            .records
            .iter()
            .filter(|r| r.feasible)
            .min_by(|a, b| {
                cost(a)
                    .total
                    .total_cmp(&cost(b).total)
                    .then_with(|| a.clustering.to_bit_string().cmp(&b.clustering.to_bit_string()))
            })
            .ok_or(SolveError::AllClusteringsInfeasible)?;
        Ok(OracleOutcome {
            best: best.clustering.clone(),
            outcome: SolveOutcome {
                beamformers: best.beamformers.clone().expect("feasible records keep beamformers"),
                clustering: best.clustering.clone(),
                costs: cost(best),
                min_sinr_margin: best.min_sinr_margin,
                diagnostics: Diagnostics {
                    rank_one: best.rank_one,
                    randomized: !best.rank_one,
                    wall_time: self.wall_time,
                    ..Default::default()
                },
            },
            evaluated: self.records.len(),
            pruned: self.pruned,
        })
    }

    /// One line per clustering: `clustering,feasible,backhaul,power`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("clustering,feasible,backhaul_bps,power_w\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{:.10e},{:.10e}\n",
                r.clustering.to_bit_string(),
                r.feasible,
                r.backhaul,
                r.power
            ));
        }
        out
    }
}

/// Polishes every clustering. With `pruning`, pairs whose content is
/// cached at the BS stay active, which never raises the optimal cost.
pub fn exhaustive_table(
    sc: &Scenario,
    settings: &SolverSettings,
    seed: u64,
    pruning: bool,
) -> Result<ExhaustiveTable, SolveError> {
    settings.validate()?;
    let start = Instant::now();
    let (m, n) = (sc.n_groups(), sc.n_bs());
    let forced = if pruning { sc.cached_pairs() } else { ClusterMatrix::empty(m, n) };
    let free: Vec<(usize, usize)> = (0..m)
        .flat_map(|g| (0..n).map(move |b| (g, b)))
        .filter(|&(g, b)| !forced.get(g, b))
        .collect();
    let count: u128 = 1u128.checked_shl(free.len() as u32).unwrap_or(u128::MAX);
    if count > MAX_CLUSTERINGS {
        return Err(SolveError::TooManyClusterings(count));
    }
    let total: u128 = 1u128 << (m * n).min(127);
    let model = Model::multicast(sc, settings);
    let records: Vec<ClusteringRecord> = (0..count as u64)
        .into_par_iter()
        .map(|mask| {
            let mut s = forced.clone();
            for (bit, &(g, b)) in free.iter().enumerate() {
                s.set(g, b, mask >> bit & 1 == 1);
            }
            let backhaul = backhaul_cost(&s, &sc.cache, &sc.groups);
            match crate::ccp::sdr::polish_model(&model, &s, settings, clustering_seed(seed, &s)) {
                Ok((rec, _)) => ClusteringRecord {
                    power: crate::scenario::power_cost(&rec.w),
                    min_sinr_margin: model.margin(&rec.w),
                    rank_one: rec.rank_one,
                    beamformers: Some(rec.w),
                    clustering: s,
                    feasible: true,
                    backhaul,
                },
                Err(_) => ClusteringRecord {
                    clustering: s,
                    feasible: false,
                    backhaul,
                    power: f64::NAN,
                    min_sinr_margin: f64::NAN,
                    rank_one: false,
                    beamformers: None,
                },
            }
        })
        .collect();
    Ok(ExhaustiveTable {
        records,
        pruned: total - count,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Minimum network cost over all clusterings, each polished by power
/// minimization with rank-one extraction or randomization.
pub fn exhaustive_search(
    sc: &Scenario,
    eta: Eta,
    settings: &SolverSettings,
    seed: u64,
) -> Result<OracleOutcome, SolveError> {
    exhaustive_table(sc, settings, seed, true)?.best(sc, eta)
}
