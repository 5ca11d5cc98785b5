//! Network scenarios: topology, channels, requests, cache placement, and
//! the SINR and cost model evaluated on them.

mod cache;
mod channel;
mod config;
mod cost;
mod demand;
mod topology;

use serde::{Deserialize, Serialize};

pub use cache::{place_cache, CachePlacement, CachingStrategy};
pub use channel::{sample_channels, ChannelState};
pub use config::{CostScale, PeakPower, RadioConfig};
pub use cost::{
    backhaul_cost, min_sinr_margin, network_cost, power_cost, sinr, BeamformerSet,
    ClusterMatrix, CostBreakdown, Eta,
};
pub use demand::{rate, sample_requests, zipf_popularity, Group, MulticastGroups, Popularity};
pub use topology::{build_topology, hex_sites, Topology};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("scenario file: {0}")]
    Io(#[from] std::io::Error),
    #[error("scenario file: {0}")]
    Parse(#[from] serde_json::Error),
}

/// How content popularity is generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PopularitySpec {
    Equal,
    Zipf {
        alpha: f64,
        #[serde(default)]
        trending_mass: Option<f64>,
    },
    Explicit {
        probs: Vec<f64>,
    },
}

impl PopularitySpec {
    pub fn build(&self, f: usize) -> Result<Popularity, ScenarioError> {
        match self {
            PopularitySpec::Equal => Ok(Popularity::uniform(f)),
            PopularitySpec::Zipf {
                alpha,
                trending_mass,
            } => zipf_popularity(f, *alpha, *trending_mass),
            PopularitySpec::Explicit { probs } => {
                if probs.len() != f {
                    return Err(ScenarioError::Config(format!(
                        "{} popularity entries for {f} contents",
                        probs.len()
                    )));
                }
                Popularity::from_weights(probs)
            }
        }
    }
}

/// Everything needed to draw a scenario besides the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub radio: RadioConfig,
    pub popularity: PopularitySpec,
    pub caching: CachingStrategy,
    pub cache_size: usize,
}

impl Default for ScenarioSpec {
    /// Seven cells, one trending content over a Zipf tail with `alpha = 1`,
    /// ten most popular contents cached everywhere.
    fn default() -> Self {
        Self {
            radio: RadioConfig::default(),
            popularity: PopularitySpec::Zipf {
                alpha: 1.0,
                trending_mass: Some(0.5),
            },
            caching: CachingStrategy::PopC,
            cache_size: 10,
        }
    }
}

impl ScenarioSpec {
    /// Three cells, four contents with skewed popularity, two cached
    /// everywhere.
    pub fn small_network() -> Self {
        Self {
            radio: RadioConfig::small_network(),
            popularity: PopularitySpec::Explicit {
                probs: vec![0.48, 0.24, 0.16, 0.12],
            },
            caching: CachingStrategy::PopC,
            cache_size: 2,
        }
    }
}

/// One trial's network, immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub radio: RadioConfig,
    /// Absent for hand-built instances.
    pub topology: Option<Topology>,
    pub channels: ChannelState,
    pub popularity: Popularity,
    pub groups: MulticastGroups,
    pub cache: CachePlacement,
}

impl Scenario {
    pub fn generate(spec: &ScenarioSpec, seed: u64) -> Result<Self, ScenarioError> {
        let radio = &spec.radio;
        radio.validate()?;
        let topology = build_topology(radio, seed)?;
        let channels = sample_channels(&topology, radio, seed)?;
        let popularity = spec.popularity.build(radio.n_contents)?;
        let groups = sample_requests(
            &popularity,
            radio.n_users,
            radio.sinr_target,
            radio.bandwidth,
            seed,
        );
        let cache = place_cache(spec.caching, &popularity, spec.cache_size, radio.n_bs, seed)?;
        Self::from_parts(radio.clone(), Some(topology), channels, popularity, groups, cache)
    }

    /// Assembles a scenario from explicit parts, checking dimensions.
    pub fn from_parts(
        radio: RadioConfig,
        topology: Option<Topology>,
        channels: ChannelState,
        popularity: Popularity,
        groups: MulticastGroups,
        cache: CachePlacement,
    ) -> Result<Self, ScenarioError> {
        let sc = Self {
            radio,
            topology,
            channels,
            popularity,
            groups,
            cache,
        };
        sc.check()?;
        Ok(sc)
    }

    /// A network with explicit channels and no drawn layout. The counts in
    /// `radio` are replaced by those implied by the inputs; bandwidth, SINR
    /// target, peaks and cost scale are kept. `cached` lists
    /// `(content, bs)` pairs.
    pub fn manual(
        mut radio: RadioConfig,
        h: crate::linalg::CMatrix,
        n_ant: usize,
        noise_power: f64,
        groups: Vec<Group>,
        n_contents: usize,
        cached: &[(usize, usize)],
    ) -> Result<Self, ScenarioError> {
        if n_ant == 0 || h.ncols() % n_ant != 0 {
            return Err(ScenarioError::Config("channel width must be a multiple of n_ant".into()));
        }
        radio.n_ant = n_ant;
        radio.n_bs = h.ncols() / n_ant;
        radio.n_users = h.nrows();
        radio.n_contents = n_contents;
        let mut cache = CachePlacement::empty(n_contents, radio.n_bs);
        for &(f, n) in cached {
            if f >= n_contents || n >= radio.n_bs {
                return Err(ScenarioError::Config(format!("cached pair ({f}, {n}) out of range")));
            }
            cache.c[f][n] = true;
        }
        cache.capacity = (0..radio.n_bs).map(|n| cache.column_sum(n)).collect();
        let groups = MulticastGroups::new(groups, radio.gamma(), radio.bandwidth)?;
        let channels = ChannelState {
            noise_power: vec![noise_power; radio.n_users],
            h,
        };
        Self::from_parts(
            radio,
            None,
            channels,
            Popularity::uniform(n_contents),
            groups,
            cache,
        )
    }

    fn check(&self) -> Result<(), ScenarioError> {
        let r = &self.radio;
        r.validate()?;
        let bad = |msg: &str| Err(ScenarioError::Config(msg.to_string()));
        if self.channels.h.nrows() != r.n_users || self.channels.h.ncols() != r.n_bs * r.n_ant {
            return bad("channel matrix must be K x (N*L)");
        }
        if self.channels.noise_power.len() != r.n_users
            || self.channels.noise_power.iter().any(|p| !(*p > 0.0))
        {
            return bad("noise power must be positive for every user");
        }
        if self.channels.h.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            return bad("channel entries must be finite");
        }
        if self.popularity.len() != r.n_contents || self.cache.n_contents() != r.n_contents {
            return bad("popularity and cache must cover every content");
        }
        if self.cache.n_bs() != r.n_bs || self.cache.c.iter().any(|row| row.len() != r.n_bs) {
            return bad("cache placement must have one column per BS");
        }
        for n in 0..r.n_bs {
            if self.cache.column_sum(n) > self.cache.capacity[n] {
                return bad("cache column exceeds capacity");
            }
        }
        if self.groups.gamma.len() != self.groups.len() || self.groups.rate.len() != self.groups.len()
        {
            return bad("one SINR target and rate per group");
        }
        for g in &self.groups.groups {
            if g.content >= r.n_contents || g.users.iter().any(|&k| k >= r.n_users) {
                return bad("group refers to unknown content or user");
            }
        }
        Ok(())
    }

    pub fn n_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn n_bs(&self) -> usize {
        self.radio.n_bs
    }

    pub fn n_ant(&self) -> usize {
        self.radio.n_ant
    }

    /// Whether group `m`'s content is cached at BS `n`.
    pub fn cached(&self, m: usize, n: usize) -> bool {
        self.cache.cached(self.groups.groups[m].content, n)
    }

    /// Clustering with exactly the cached pairs active.
    pub fn cached_pairs(&self) -> ClusterMatrix {
        let mut s = ClusterMatrix::empty(self.n_groups(), self.n_bs());
        for m in 0..self.n_groups() {
            for n in 0..self.n_bs() {
                s.set(m, n, self.cached(m, n));
            }
        }
        s
    }

    /// Hex digest of the channel matrix and noise powers.
    pub fn channel_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        let h = &self.channels.h;
        hasher.update((h.nrows() as u64).to_le_bytes());
        hasher.update((h.ncols() as u64).to_le_bytes());
        for x in h.iter() {
            hasher.update(x.re.to_le_bytes());
            hasher.update(x.im.to_le_bytes());
        }
        for p in &self.channels.noise_power {
            hasher.update(p.to_le_bytes());
        }
        hex::encode(&hasher.finalize()[..8])
    }

    pub fn to_json(&self) -> Result<String, ScenarioError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self, ScenarioError> {
        let sc: Self = serde_json::from_str(s)?;
        sc.check()?;
        Ok(sc)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), ScenarioError> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ScenarioError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
