//! Serving every user with its own beam against one beam per content.

use cachecast::baselines::unicast_sparse_bf;
use cachecast::ccp::{g_ccp, SolverSettings};
use cachecast::scenario::{Eta, Scenario, ScenarioSpec};

fn main() {
    let mut spec = ScenarioSpec::small_network();
    spec.radio.n_users = 8;
    let eta = Eta::Weight(1.0);
    let settings = SolverSettings::default().with_eta(eta);
    for seed in 0..3 {
        let sc = Scenario::generate(&spec, seed).expect("valid spec");
        let multi = g_ccp(&sc, &settings, seed).map(|o| format!("{:.3}", o.costs.total));
        let uni = unicast_sparse_bf(&sc, eta, &settings, seed).map(|o| format!("{:.3}", o.costs.total));
        println!(
            "seed {seed}: {} groups, multicast {}, unicast {}",
            sc.n_groups(),
            multi.unwrap_or_else(|e| e.to_string()),
            uni.unwrap_or_else(|e| e.to_string())
        );
    }
}
