use num_complex::Complex64;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{RadioConfig, ScenarioError, Topology};
use crate::linalg::{db_to_linear, CMatrix};
use crate::rng;

/// Network-wide channels: row `k` of `h` is `h_k`, with the `L` entries of
/// BS `n` in columns `n*L .. (n+1)*L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelState {
    #[serde(with = "complex_matrix")]
    pub h: CMatrix,
    /// watts, per user
    pub noise_power: Vec<f64>,
}

impl ChannelState {
    pub fn n_users(&self) -> usize {
        self.h.nrows()
    }

    /// `h_k` as a contiguous vector.
    pub fn user(&self, k: usize) -> Vec<Complex64> {
        self.h.row(k).iter().copied().collect()
    }
}

/// Rayleigh fading on top of pathloss, antenna gain and per-link shadowing.
pub fn sample_channels(
    topo: &Topology,
    cfg: &RadioConfig,
    seed: u64,
) -> Result<ChannelState, ScenarioError> {
    if topo.bs_positions.len() != cfg.n_bs || topo.user_positions.len() != cfg.n_users {
        return Err(ScenarioError::Config("topology does not match configuration".into()));
    }
    let mut rng = rng::stream(seed, rng::tags::CHANNELS);
    let shadow = Normal::new(0.0, cfg.shadowing_std.max(0.0)).expect("finite std");
    let fading = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("finite std");
    let l = cfg.n_ant;
    let mut h = CMatrix::zeros(cfg.n_users, cfg.n_bs * l);
    for k in 0..cfg.n_users {
        for n in 0..cfg.n_bs {
            let d_km = topo.distance(k, n) / 1000.0;
            let gain_db = -cfg.pathloss_db(d_km) + cfg.antenna_gain + shadow.sample(&mut rng);
            let amp = db_to_linear(gain_db).sqrt();
            for a in 0..l {
                let v = Complex64::new(fading.sample(&mut rng), fading.sample(&mut rng));
                h[(k, n * l + a)] = v * amp;
            }
        }
    }
    Ok(ChannelState {
        h,
        noise_power: vec![cfg.noise_power(); cfg.n_users],
    })
}

/// Serializes a complex matrix as rows of `[re, im]` pairs.
pub(crate) mod complex_matrix {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::linalg::CMatrix;

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMatrix, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(serde::de::Error::custom("ragged channel matrix"));
        }
        Ok(CMatrix::from_fn(nrows, ncols, |i, j| {
            Complex64::new(rows[i][j][0], rows[i][j][1])
        }))
    }
}
