use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Popularity, ScenarioError};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CachingStrategy {
    /// Every BS caches the most popular contents.
    PopC,
    /// Every BS caches a uniformly random subset.
    RanC,
    /// Every BS samples its subset with popularity weights.
    ProC,
}

impl std::str::FromStr for CachingStrategy {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "popc" => Ok(Self::PopC),
            "ranc" => Ok(Self::RanC),
            "proc" => Ok(Self::ProC),
            _ => Err(ScenarioError::Config(format!("unknown caching strategy {s:?}"))),
        }
    }
}

/// Binary `F x N` placement, `c[f][n]` true when BS `n` holds content `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CachePlacement {
    pub c: Vec<Vec<bool>>,
    pub capacity: Vec<usize>,
}

impl CachePlacement {
    pub fn empty(f: usize, n: usize) -> Self {
        Self {
            c: vec![vec![false; n]; f],
            capacity: vec![0; n],
        }
    }

    /// Every BS caches every content in `contents`.
    pub fn uniform(f: usize, n: usize, contents: &[usize]) -> Self {
        let mut out = Self::empty(f, n);
        for &k in contents {
            out.c[k] = vec![true; n];
        }
        out.capacity = vec![contents.len(); n];
        out
    }

    pub fn cached(&self, content: usize, bs: usize) -> bool {
        self.c[content][bs]
    }

    pub fn n_contents(&self) -> usize {
        self.c.len()
    }

    pub fn n_bs(&self) -> usize {
        self.capacity.len()
    }

    pub fn column_sum(&self, bs: usize) -> usize {
        self.c.iter().filter(|row| row[bs]).count()
    }
}

pub fn place_cache(
    strategy: CachingStrategy,
    pop: &Popularity,
    y: usize,
    n: usize,
    seed: u64,
) -> Result<CachePlacement, ScenarioError> {
    let f = pop.len();
    if y >= f {
        return Err(ScenarioError::Config(format!(
            "cache size {y} must be below the number of contents {f}"
        )));
    }
    let mut rng = rng::stream(seed, rng::tags::CACHE);
    let mut out = CachePlacement::empty(f, n);
    out.capacity = vec![y; n];
    match strategy {
        CachingStrategy::PopC => {
            let mut order: Vec<usize> = (0..f).collect();
            // Stable sort keeps lower ids first among ties.
            order.sort_by(|&a, &b| pop.probs[b].total_cmp(&pop.probs[a]));
            for &content in &order[..y] {
                out.c[content] = vec![true; n];
            }
        }
        CachingStrategy::RanC => {
            for bs in 0..n {
                for content in rand::seq::index::sample(&mut rng, f, y) {
                    out.c[content][bs] = true;
                }
            }
        }
        CachingStrategy::ProC => {
            for bs in 0..n {
                let mut taken = vec![false; f];
                for _ in 0..y {
                    let content = weighted_pick(&pop.probs, &taken, &mut rng);
                    out.c[content][bs] = true;
                    taken[content] = true;
                }
            }
        }
    }
    Ok(out)
}

/// Index among those not `taken`, drawn proportionally to `weights`, or
/// uniformly once the remaining weight is zero.
fn weighted_pick(weights: &[f64], taken: &[bool], rng: &mut impl Rng) -> usize {
    let open: Vec<usize> = (0..weights.len()).filter(|&i| !taken[i]).collect();
    let total: f64 = open.iter().map(|&i| weights[i]).sum();
    if total > 0.0 {
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        for &i in &open {
            acc += weights[i];
            if target < acc && weights[i] > 0.0 {
                return i;
            }
        }
        return *open.iter().rev().find(|&&i| weights[i] > 0.0).expect("positive total");
    }
    open[rng.random_range(0..open.len())]
}
