//! Both CCP variants on the same networks, with iteration counts.

use cachecast::ccp::{g_ccp, sdr_ccp, SolverSettings};
use cachecast::scenario::{Eta, Scenario, ScenarioSpec};

fn main() {
    let settings = SolverSettings::default().with_eta(Eta::Weight(0.1));
    for seed in 0..4 {
        let sc = Scenario::generate(&ScenarioSpec::small_network(), seed).expect("valid spec");
        let (g, s) = (g_ccp(&sc, &settings, seed), sdr_ccp(&sc, &settings, seed));
        if let (Ok(g), Ok(s)) = (g, s) {
            println!(
                "seed {seed}: g_ccp {:.4} ({} inner iters)  sdr_ccp {:.4} ({} inner iters, rank one {})",
                g.costs.total,
                g.diagnostics.inner_iterations.iter().sum::<usize>(),
                s.costs.total,
                s.diagnostics.inner_iterations.iter().sum::<usize>(),
                s.diagnostics.rank_one
            );
        }
    }
}
