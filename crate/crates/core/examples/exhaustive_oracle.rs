//! Enumerates every clustering once, then reads off the optimum at each
//! weight.

use cachecast::baselines::exhaustive_table;
use cachecast::ccp::SolverSettings;
use cachecast::scenario::{Eta, Scenario, ScenarioSpec};

fn main() {
    let sc = Scenario::generate(&ScenarioSpec::small_network(), 5).expect("valid spec");
    let table = exhaustive_table(&sc, &SolverSettings::default(), 5, true).expect("small enough to enumerate");
    println!("{} clusterings polished, {} pruned", table.records.len(), table.pruned);
    for eta in [Eta::Weight(1e-6), Eta::Weight(1.0), Eta::PowerOnly] {
        let best = table.best(&sc, eta).expect("full cooperation is feasible");
        println!("eta {eta:<10} best {} cost {:.4}", best.best.to_bit_string(), best.outcome.costs.total);
    }
}
