//! Tighter per-BS power limits force more BSs to cooperate, which costs
//! backhaul.

use cachecast::ccp::{g_ccp, SolverSettings};
use cachecast::scenario::{Eta, PeakPower, Scenario, ScenarioSpec};

fn main() {
    let sc = Scenario::generate(&ScenarioSpec::small_network(), 1).expect("valid spec");
    let base = SolverSettings::default().with_eta(Eta::Weight(1e-6));
    let free = g_ccp(&sc, &base, 1).expect("feasible network");
    let top = free.beamformers.block_powers().into_iter().flatten().fold(0.0, f64::max);
    println!("no limit: backhaul {:.2} Mbit/s, largest block {:.3} W", free.costs.backhaul / 1e6, top);
    for frac in [0.8, 0.5, 0.3] {
        let settings = SolverSettings {
            peak_power: Some(PeakPower {
                per_antenna: None,
                per_bs: Some(frac * top),
            }),
            ..base.clone()
        };
        match g_ccp(&sc, &settings, 1) {
            Ok(o) => println!("per-BS limit {:.3} W: backhaul {:.2} Mbit/s", frac * top, o.costs.backhaul / 1e6),
            Err(e) => println!("per-BS limit {:.3} W: {e}", frac * top),
        }
    }
}
