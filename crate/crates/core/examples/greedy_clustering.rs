//! The cache-aware greedy baseline next to G-CCP.

use cachecast::baselines::greedy_clustering;
use cachecast::ccp::{g_ccp, SolverSettings};
use cachecast::scenario::{Eta, Scenario, ScenarioSpec};

fn main() {
    let sc = Scenario::generate(&ScenarioSpec::small_network(), 2).expect("valid spec");
    for eta in [Eta::Weight(1e-6), Eta::Weight(1.0)] {
        let settings = SolverSettings::default().with_eta(eta);
        let gr = greedy_clustering(&sc, eta, &settings, 2).expect("feasible network");
        let g = g_ccp(&sc, &settings, 2).expect("feasible network");
        println!(
            "eta {eta:<8} greedy {} ({:.4})  g_ccp {} ({:.4})",
            gr.clustering.to_bit_string(),
            gr.costs.total,
            g.clustering.to_bit_string(),
            g.costs.total
        );
    }
}
