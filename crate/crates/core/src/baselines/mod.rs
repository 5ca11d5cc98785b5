//! Reference methods: exhaustive clustering search, cache-aware greedy
//! clustering, and reweighted-l1 sparse unicast beamforming.

mod exhaustive;
mod greedy;
mod unicast;

pub use exhaustive::{
    exhaustive_search, exhaustive_table, ClusteringRecord, ExhaustiveTable, OracleOutcome,
    MAX_CLUSTERINGS,
};
pub use greedy::greedy_clustering;
pub use unicast::{unicast_backhaul, unicast_sparse_bf};

use crate::rng::derive_seed;
use crate::scenario::ClusterMatrix;

/// Seed for polishing clustering `s`, so every method that visits the same
/// clustering gets the same randomization stream.
pub(crate) fn clustering_seed(seed: u64, s: &ClusterMatrix) -> u64 {
    let mut acc = derive_seed(seed, 0xC1_u64);
    for (i, bit) in s.s.iter().flatten().enumerate() {
        if *bit {
            acc = derive_seed(acc, i as u64 + 1);
        } else {
            acc = derive_seed(acc, !(i as u64));
        }
    }
    acc
}
