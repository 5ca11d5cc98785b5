//! PopC, RanC and ProC on the same channels and requests.

use cachecast::harness::{compare_caching, Algorithm, ExperimentConfig};
use cachecast::scenario::{Eta, PopularitySpec};

fn main() {
    let mut cfg = ExperimentConfig::default();
    cfg.scenario.radio.n_users = 3;
    cfg.scenario.radio.n_contents = 100;
    cfg.scenario.popularity = PopularitySpec::Zipf {
        alpha: 1.0,
        trending_mass: Some(0.5),
    };
    cfg.scenario.cache_size = 10;
    cfg.algorithms = vec![Algorithm::GCcp];
    cfg.etas = vec![Eta::Weight(1e-6), Eta::Weight(1.0), Eta::PowerOnly];
    cfg.n_trials = 4;
    cfg.jobs = 4;
    let res = compare_caching(&cfg).expect("valid config");
    for s in res.summary {
        println!(
            "{:?} eta {:<10} backhaul {:>7.2} Mbit/s power {:.4} W ({} of {} feasible)",
            s.caching,
            s.eta,
            s.mean_backhaul_bps.unwrap_or(f64::NAN) / 1e6,
            s.mean_power_w.unwrap_or(f64::NAN),
            s.n_feasible,
            s.n_trials
        );
    }
}
