//! Backhaul against power for G-CCP as the power weight grows.

use cachecast::ccp::{g_ccp, SolverSettings};
use cachecast::linalg::watts_to_dbm;
use cachecast::scenario::{Eta, Scenario, ScenarioSpec};

fn main() {
    let sc = Scenario::generate(&ScenarioSpec::small_network(), 3).expect("valid spec");
    for eta in [1e-6, 1e-3, 0.1, 1.0, 10.0].map(Eta::Weight).into_iter().chain([Eta::PowerOnly]) {
        let settings = SolverSettings::default().with_eta(eta);
        match g_ccp(&sc, &settings, 3) {
            Ok(o) => println!(
                "eta {eta:<10} backhaul {:>6.2} Mbit/s  power {:>6.2} dBm  clustering {}",
                o.costs.backhaul / 1e6,
                watts_to_dbm(o.costs.power),
                o.clustering.to_bit_string()
            ),
            Err(e) => println!("eta {eta:<10} {e}"),
        }
    }
}
