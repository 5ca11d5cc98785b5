//! Draws the seven-cell network and prints what a trial sees.

use cachecast::linalg::watts_to_dbm;
use cachecast::scenario::{Scenario, ScenarioSpec};

fn main() {
    let spec = ScenarioSpec::default();
    let sc = Scenario::generate(&spec, 7).expect("default spec is valid");
    let topo = sc.topology.as_ref().expect("generated scenarios keep their layout");

    println!("{} BSs x {} antennas, {} users", sc.n_bs(), sc.n_ant(), topo.user_positions.len());
    println!("noise {:.1} dBm, channel hash {}", watts_to_dbm(sc.radio.noise_power()), sc.channel_hash());
    for (m, g) in sc.groups.groups.iter().enumerate() {
        let cached: Vec<usize> = (0..sc.n_bs()).filter(|&n| sc.cached(m, n)).collect();
        println!(
            "group {m}: content {:>3}, {} users, cached at BSs {:?}",
            g.content,
            g.users.len(),
            cached
        );
    }
}
