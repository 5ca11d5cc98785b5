use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CachePlacement, ChannelState, CostScale, MulticastGroups, Scenario};
use crate::linalg::{inner, norm_sqr};

/// Which `(group, BS)` pairs are served: `s[m][n]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClusterMatrix {
    pub s: Vec<Vec<bool>>,
}

impl ClusterMatrix {
    pub fn full(m: usize, n: usize) -> Self {
        Self {
            s: vec![vec![true; n]; m],
        }
    }

    pub fn empty(m: usize, n: usize) -> Self {
        Self {
            s: vec![vec![false; n]; m],
        }
    }

    pub fn n_groups(&self) -> usize {
        self.s.len()
    }

    pub fn n_bs(&self) -> usize {
        self.s.first().map_or(0, Vec::len)
    }

    pub fn get(&self, m: usize, n: usize) -> bool {
        self.s[m][n]
    }

    pub fn set(&mut self, m: usize, n: usize, v: bool) {
        self.s[m][n] = v;
    }

    pub fn count(&self) -> usize {
        self.s.iter().flatten().filter(|v| **v).count()
    }

    /// Row-major `0`/`1` string, e.g. `101|011`.
    pub fn to_bit_string(&self) -> String {
        self.s
            .iter()
            .map(|row| row.iter().map(|&v| if v { '1' } else { '0' }).collect::<String>())
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// One stacked beamformer per group (or per user in unicast mode); block
/// `(m, n)` is the `n_ant` entries of BS `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamformerSet {
    pub n_ant: usize,
    #[serde(with = "complex_vectors")]
    pub w: Vec<Vec<Complex64>>,
}

impl BeamformerSet {
    pub fn zeros(m: usize, n_bs: usize, n_ant: usize) -> Self {
        Self {
            n_ant,
            w: vec![vec![Complex64::new(0.0, 0.0); n_bs * n_ant]; m],
        }
    }

    pub fn n_beams(&self) -> usize {
        self.w.len()
    }

    pub fn n_bs(&self) -> usize {
        self.w.first().map_or(0, |v| v.len() / self.n_ant.max(1))
    }

    pub fn block(&self, m: usize, n: usize) -> &[Complex64] {
        &self.w[m][n * self.n_ant..(n + 1) * self.n_ant]
    }

    pub fn block_mut(&mut self, m: usize, n: usize) -> &mut [Complex64] {
        let l = self.n_ant;
        &mut self.w[m][n * l..(n + 1) * l]
    }

    pub fn block_power(&self, m: usize, n: usize) -> f64 {
        norm_sqr(self.block(m, n))
    }

    /// `block_power` for every `(m, n)`, row-major.
    pub fn block_powers(&self) -> Vec<Vec<f64>> {
        (0..self.n_beams())
            .map(|m| (0..self.n_bs()).map(|n| self.block_power(m, n)).collect())
            .collect()
    }

    pub fn scale(&mut self, m: usize, factor: f64) {
        for x in &mut self.w[m] {
            *x *= factor;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.w.iter().flatten().all(|x| x.re.is_finite() && x.im.is_finite())
    }
}

/// Weight on transmit power in the network cost. Serialized as a number,
/// or as the string `"power-only"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Eta {
    Weight(f64),
    /// Only power counts; backhaul is reported but carries no weight.
    PowerOnly,
}

impl Eta {
    pub fn weight(self) -> Option<f64> {
        match self {
            Eta::Weight(w) => Some(w),
            Eta::PowerOnly => None,
        }
    }
}

impl std::fmt::Display for Eta {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Eta::Weight(w) => f.pad(&w.to_string()),
            Eta::PowerOnly => f.pad("power-only"),
        }
    }
}

impl Serialize for Eta {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Eta::Weight(w) => s.serialize_f64(*w),
            Eta::PowerOnly => s.serialize_str("power-only"),
        }
    }
}

impl<'de> Deserialize<'de> for Eta {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(w) if w >= 0.0 && w.is_finite() => Ok(Eta::Weight(w)),
            Raw::Num(w) => Err(serde::de::Error::custom(format!("invalid eta {w}"))),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

impl std::str::FromStr for Eta {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        if matches!(t.as_str(), "power-only" | "power_only" | "inf" | "infinity") {
            return Ok(Eta::PowerOnly);
        }
        match t.parse::<f64>() {
            Ok(w) if w >= 0.0 && w.is_finite() => Ok(Eta::Weight(w)),
            _ => Err(format!("eta must be a nonnegative number or \"power-only\", got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    /// bits/s
    pub backhaul: f64,
    /// watts
    pub power: f64,
    /// `backhaul / backhaul_unit + eta * power / power_unit`; in power-only
    /// mode `power / power_unit`.
    pub total: f64,
    pub eta: Eta,
    pub scale: CostScale,
}

impl CostBreakdown {
    pub fn new(backhaul: f64, power: f64, eta: Eta, scale: CostScale) -> Self {
        let b = backhaul / scale.backhaul_unit;
        let p = power / scale.power_unit;
        let total = match eta {
            Eta::Weight(w) => b + w * p,
            Eta::PowerOnly => p,
        };
        Self {
            backhaul,
            power,
            total,
            eta,
            scale,
        }
    }
}

/// `SINR_k` of a user served by beam `m`.
pub fn sinr(k: usize, m: usize, w: &BeamformerSet, ch: &ChannelState) -> f64 {
    let h = ch.user(k);
    let mut signal = 0.0;
    let mut interference = 0.0;
    for (j, wj) in w.w.iter().enumerate() {
        let g = inner(&h, wj).norm_sqr();
        if j == m {
            signal = g;
        } else {
            interference += g;
        }
    }
    signal / (interference + ch.noise_power[k])
}

/// Backhaul rate in bits/s for clustering `s`.
pub fn backhaul_cost(s: &ClusterMatrix, c: &CachePlacement, groups: &MulticastGroups) -> f64 {
    let mut total = 0.0;
    for (m, g) in groups.groups.iter().enumerate() {
        for n in 0..s.n_bs() {
            if s.get(m, n) && !c.cached(g.content, n) {
                total += groups.rate[m];
            }
        }
    }
    total
}

/// Total transmit power in watts.
pub fn power_cost(w: &BeamformerSet) -> f64 {
    w.w.iter().map(|v| norm_sqr(v)).sum()
}

pub fn network_cost(
    w: &BeamformerSet,
    s: &ClusterMatrix,
    sc: &Scenario,
    eta: Eta,
) -> CostBreakdown {
    CostBreakdown::new(
        backhaul_cost(s, &sc.cache, &sc.groups),
        power_cost(w),
        eta,
        sc.radio.cost_scale,
    )
}

/// Smallest `SINR_k / gamma_m` over all served users.
pub fn min_sinr_margin(w: &BeamformerSet, sc: &Scenario) -> f64 {
    sc.groups
        .memberships()
        .map(|(m, k)| sinr(k, m, w, &sc.channels) / sc.groups.gamma[m])
        .fold(f64::INFINITY, f64::min)
}

mod complex_vectors {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Vec<Complex64>], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = v
            .iter()
            .map(|r| r.iter().map(|x| [x.re, x.im]).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Complex64>>, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        Ok(rows
            .into_iter()
            .map(|r| r.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            .collect())
    }
}
