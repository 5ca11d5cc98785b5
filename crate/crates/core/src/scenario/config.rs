use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::linalg::{db_to_linear, dbm_to_watts};

/// Units in which backhaul and power enter the weighted network cost.
///
/// `total = backhaul / backhaul_unit + eta * power / power_unit`. The default
/// weighs backhaul in Mbit/s and power in mW; [`CostScale::raw`] weighs the
/// raw bits/s and watts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostScale {
    /// bits/s per backhaul cost unit.
    pub backhaul_unit: f64,
    /// watts per power cost unit.
    pub power_unit: f64,
}

impl CostScale {
    pub const fn raw() -> Self {
        Self {
            backhaul_unit: 1.0,
            power_unit: 1.0,
        }
    }
}

impl Default for CostScale {
    fn default() -> Self {
        Self {
            backhaul_unit: 1e6,
            power_unit: 1e-3,
        }
    }
}

/// Radio and deployment parameters of one network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RadioConfig {
    pub n_bs: usize,
    pub n_ant: usize,
    pub n_users: usize,
    pub n_contents: usize,
    /// meters
    pub inter_bs_distance: f64,
    /// meters
    pub exclusion_radius: f64,
    /// Hz
    pub bandwidth: f64,
    /// dBi
    pub antenna_gain: f64,
    /// dB at 1 km
    pub pathloss_intercept: f64,
    /// dB per decade of distance
    pub pathloss_slope: f64,
    /// dB
    pub shadowing_std: f64,
    /// dBm/Hz
    pub noise_psd: f64,
    /// dB, common to every group
    pub sinr_target: f64,
    /// dBm per antenna
    pub per_antenna_peak: Option<f64>,
    /// dBm per BS
    pub per_bs_peak: Option<f64>,
    pub cost_scale: CostScale,
}

impl Default for RadioConfig {
    fn default() -> Self {
        Self {
            n_bs: 7,
            n_ant: 4,
            n_users: 30,
            n_contents: 100,
            inter_bs_distance: 500.0,
            exclusion_radius: 50.0,
            bandwidth: 10e6,
            antenna_gain: 10.0,
            pathloss_intercept: 148.1,
            pathloss_slope: 37.6,
            shadowing_std: 8.0,
            noise_psd: -172.0,
            sinr_target: 10.0,
            per_antenna_peak: None,
            per_bs_peak: None,
            cost_scale: CostScale::default(),
        }
    }
}

/// Peak power limits in watts.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PeakPower {
    pub per_antenna: Option<f64>,
    pub per_bs: Option<f64>,
}

impl PeakPower {
    pub fn is_empty(&self) -> bool {
        self.per_antenna.is_none() && self.per_bs.is_none()
    }
}

impl RadioConfig {
    /// Three-cell network with 3 antennas, 6 users and 4 contents.
    pub fn small_network() -> Self {
        Self {
            n_bs: 3,
            n_ant: 3,
            n_users: 6,
            n_contents: 4,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let counts = [
            ("n_bs", self.n_bs),
            ("n_ant", self.n_ant),
            ("n_users", self.n_users),
            ("n_contents", self.n_contents),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(ScenarioError::Config(format!("{name} must be at least 1")));
            }
        }
        if !(self.bandwidth > 0.0) {
            return Err(ScenarioError::Config("bandwidth must be positive".into()));
        }
        if !(self.inter_bs_distance > 0.0) {
            return Err(ScenarioError::Config("inter_bs_distance must be positive".into()));
        }
        if !(self.exclusion_radius >= 0.0 && self.exclusion_radius < self.inter_bs_distance / 2.0) {
            return Err(ScenarioError::Config(
                "exclusion_radius must lie in [0, inter_bs_distance / 2)".into(),
            ));
        }
        if !self.sinr_target.is_finite() {
            return Err(ScenarioError::Config("sinr_target must be finite".into()));
        }
        let scale = self.cost_scale;
        if !(scale.backhaul_unit > 0.0 && scale.power_unit > 0.0) {
            return Err(ScenarioError::Config("cost units must be positive".into()));
        }
        Ok(())
    }

    /// Noise power per user in watts.
    pub fn noise_power(&self) -> f64 {
        dbm_to_watts(self.noise_psd + 10.0 * self.bandwidth.log10())
    }

    pub fn gamma(&self) -> f64 {
        db_to_linear(self.sinr_target)
    }

    /// Pathloss in dB at `d_km` kilometers.
    pub fn pathloss_db(&self, d_km: f64) -> f64 {
        self.pathloss_intercept + self.pathloss_slope * d_km.log10()
    }

    pub fn peak_power(&self) -> PeakPower {
        PeakPower {
            per_antenna: self.per_antenna_peak.map(dbm_to_watts),
            per_bs: self.per_bs_peak.map(dbm_to_watts),
        }
    }
}
