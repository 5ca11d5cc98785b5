use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{RadioConfig, ScenarioError};
use crate::rng;

const MAX_DRAWS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub bs_positions: Vec<[f64; 2]>,
    pub user_positions: Vec<[f64; 2]>,
}

impl Topology {
    /// Distance in meters between user `k` and BS `n`.
    pub fn distance(&self, k: usize, n: usize) -> f64 {
        dist(self.user_positions[k], self.bs_positions[n])
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// First `n` sites of a hexagonal lattice in spiral order: the center, then
/// ring 1 counter-clockwise from the +x axis, then ring 2, and so on.
pub fn hex_sites(n: usize, spacing: f64) -> Vec<[f64; 2]> {
    // Axial lattice directions at 0, 60, ..., 300 degrees.
    let dirs: Vec<[f64; 2]> = (0..6)
        .map(|i| {
            let a = std::f64::consts::FRAC_PI_3 * i as f64;
            [a.cos(), a.sin()]
        })
        .collect();
    let mut out = vec![[0.0, 0.0]];
    let mut ring = 1;
    while out.len() < n {
        // Start at ring * dir0, walk ring steps along each of the six edges.
        let mut p = [ring as f64 * dirs[0][0], ring as f64 * dirs[0][1]];
        for side in 0..6 {
            let d = dirs[(side + 2) % 6];
            for _ in 0..ring {
                out.push([p[0] * spacing, p[1] * spacing]);
                p = [p[0] + d[0], p[1] + d[1]];
            }
        }
        ring += 1;
    }
    out.truncate(n);
    for p in &mut out {
        // Snap float noise so the center and axis sites are exact.
        for c in p.iter_mut() {
            let r = c.round();
            if (*c - r).abs() < 1e-9 {
                *c = r;
            }
        }
    }
    out
}

/// Whether `p` lies in the hexagonal cell of a site at `c` (the Voronoi
/// cell of the lattice).
fn in_cell(p: [f64; 2], c: [f64; 2], spacing: f64) -> bool {
    let (dx, dy) = (p[0] - c[0], p[1] - c[1]);
    (0..3).all(|i| {
        let a = std::f64::consts::FRAC_PI_3 * i as f64;
        (dx * a.cos() + dy * a.sin()).abs() <= spacing / 2.0
    })
}

/// BS sites on a hexagonal grid, users uniform over the union of the cells
/// with a disc of `exclusion_radius` removed around every BS.
pub fn build_topology(cfg: &RadioConfig, seed: u64) -> Result<Topology, ScenarioError> {
    cfg.validate()?;
    let spacing = cfg.inter_bs_distance;
    let bs = hex_sites(cfg.n_bs, spacing);
    let mut rng = rng::stream(seed, rng::tags::TOPOLOGY);
    let circumradius = spacing / 3f64.sqrt();
    let mut users = Vec::with_capacity(cfg.n_users);
    let mut draws = 0;
    while users.len() < cfg.n_users {
        if draws >= MAX_DRAWS {
            return Err(ScenarioError::Config(
                "user placement did not terminate; check exclusion_radius".into(),
            ));
        }
        draws += 1;
        // Cells have equal area, so a uniform cell choice followed by a
        // uniform point in that cell is uniform over the union.
        let cell = bs[rng.random_range(0..bs.len())];
        let p = [
            cell[0] + rng.random_range(-circumradius..circumradius),
            cell[1] + rng.random_range(-circumradius..circumradius),
        ];
        if !in_cell(p, cell, spacing) {
            continue;
        }
        if bs.iter().any(|&b| dist(p, b) < cfg.exclusion_radius) {
            continue;
        }
        users.push(p);
    }
    Ok(Topology {
        bs_positions: bs,
        user_positions: users,
    })
}
