use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Popularity {
    pub probs: Vec<f64>,
}

impl Popularity {
    pub fn uniform(f: usize) -> Self {
        Self {
            probs: vec![1.0 / f as f64; f],
        }
    }

    /// Normalizes nonnegative weights.
    pub fn from_weights(w: &[f64]) -> Result<Self, ScenarioError> {
        let total: f64 = w.iter().sum();
        if w.is_empty() || w.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) || !(total > 0.0) {
            return Err(ScenarioError::Config(
                "popularity weights must be finite, nonnegative and not all zero".into(),
            ));
        }
        Ok(Self {
            probs: w.iter().map(|x| x / total).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    fn draw(&self, rng: &mut impl Rng) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (f, p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return f;
            }
        }
        // Rounding left a sliver above the last cumulative sum.
        self.probs.iter().rposition(|p| *p > 0.0).unwrap_or(0)
    }
}

/// Zipf popularity over `f` contents, optionally with content 0 pinned at
/// `trending_mass` and the remaining mass spread over the others by rank.
pub fn zipf_popularity(
    f: usize,
    alpha: f64,
    trending_mass: Option<f64>,
) -> Result<Popularity, ScenarioError> {
    if f == 0 || !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(ScenarioError::Config("need F >= 1 and finite alpha >= 0".into()));
    }
    let zipf = |count: usize| -> Vec<f64> {
        let w: Vec<f64> = (1..=count).map(|r| (r as f64).powf(-alpha)).collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|x| x / total).collect()
    };
    match trending_mass {
        None => Ok(Popularity { probs: zipf(f) }),
        Some(t) => {
            if !(0.0..1.0).contains(&t) {
                return Err(ScenarioError::Config("trending_mass must lie in [0, 1)".into()));
            }
            if f == 1 {
                return Ok(Popularity { probs: vec![1.0] });
            }
            let mut probs = vec![t];
            probs.extend(zipf(f - 1).into_iter().map(|p| p * (1.0 - t)));
            Ok(Popularity { probs })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Group {
    pub content: usize,
    pub users: Vec<usize>,
}

/// Users grouped by requested content, ordered by content id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MulticastGroups {
    pub groups: Vec<Group>,
    /// linear SINR target per group
    pub gamma: Vec<f64>,
    /// bits/s per group
    pub rate: Vec<f64>,
}

impl MulticastGroups {
    /// Groups from explicit `(content, users)` pairs sharing one target.
    pub fn new(groups: Vec<Group>, gamma: f64, bandwidth: f64) -> Result<Self, ScenarioError> {
        let mut seen = std::collections::BTreeSet::new();
        for g in &groups {
            for &u in &g.users {
                if !seen.insert(u) {
                    return Err(ScenarioError::Config(format!("user {u} is in two groups")));
                }
            }
        }
        let contents: std::collections::BTreeSet<_> = groups.iter().map(|g| g.content).collect();
        if contents.len() != groups.len() {
            return Err(ScenarioError::Config("two groups share a content".into()));
        }
        let m = groups.len();
        Ok(Self {
            groups,
            gamma: vec![gamma; m],
            rate: vec![rate(bandwidth, gamma); m],
        })
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// `(group, user)` for every served user, grouped by group.
    pub fn memberships(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.groups
            .iter()
            .enumerate()
            .flat_map(|(m, g)| g.users.iter().map(move |&k| (m, k)))
    }
}

/// `B log2(1 + gamma)` in bits/s.
pub fn rate(bandwidth: f64, gamma: f64) -> f64 {
    bandwidth * (1.0 + gamma).log2()
}

/// Each of `k` users requests one content drawn from `pop`; equal requests
/// form one multicast group.
pub fn sample_requests(
    pop: &Popularity,
    k: usize,
    gamma_db: f64,
    bandwidth: f64,
    seed: u64,
) -> MulticastGroups {
    let mut rng = rng::stream(seed, rng::tags::REQUESTS);
    let mut by_content = std::collections::BTreeMap::<usize, Vec<usize>>::new();
    for user in 0..k {
        by_content.entry(pop.draw(&mut rng)).or_default().push(user);
    }
    let gamma = 10f64.powf(gamma_db / 10.0);
    let groups = by_content
        .into_iter()
        .map(|(content, users)| Group { content, users })
        .collect();
    MulticastGroups::new(groups, gamma, bandwidth).expect("disjoint by construction")
}
