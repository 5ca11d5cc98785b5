use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::ccp::SolverSettings;
use crate::scenario::{Eta, ScenarioSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    SdrCcp,
    GCcp,
    Greedy,
    Exhaustive,
    Unicast,
    /// Power minimization with every BS serving every group.
    FullCoop,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::SdrCcp,
        Algorithm::GCcp,
        Algorithm::Greedy,
        Algorithm::Exhaustive,
        Algorithm::Unicast,
        Algorithm::FullCoop,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::SdrCcp => "sdr_ccp",
            Algorithm::GCcp => "g_ccp",
            Algorithm::Greedy => "greedy",
            Algorithm::Exhaustive => "exhaustive",
            Algorithm::Unicast => "unicast",
            Algorithm::FullCoop => "full_coop",
        }
    }

    pub fn variant(self) -> &'static str {
        match self {
            Algorithm::Greedy => "drop_best_pair",
            _ => "",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase().replace('-', "_");
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == t)
            .ok_or_else(|| format!("unknown algorithm {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    JsonLines,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "jsonl" | "json-lines" | "json_lines" => Ok(Self::JsonLines),
            _ => Err(format!("unknown output format {s:?}")),
        }
    }
}

/// A Monte-Carlo experiment: which networks to draw, which algorithms to
/// run on each, and at which cost weights.
///
/// In TOML, any field left out (at any depth) keeps its value from
/// [`ExperimentConfig::default`], so a file can override just
/// `scenario.radio.sinr_target`. A table with a `kind` key replaces the
/// default wholesale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub scenario: ScenarioSpec,
    pub algorithms: Vec<Algorithm>,
    pub etas: Vec<Eta>,
    pub n_trials: usize,
    pub base_seed: u64,
    pub output: PathBuf,
    pub format: OutputFormat,
    /// Worker threads for trials.
    pub jobs: usize,
    pub solver: SolverSettings,
    /// Adds wall-clock columns, which makes output files run-dependent.
    pub record_wall_time: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioSpec::small_network(),
            algorithms: vec![Algorithm::GCcp],
            etas: vec![
                Eta::Weight(1e-6),
                Eta::Weight(1e-3),
                Eta::Weight(0.01),
                Eta::Weight(0.1),
                Eta::Weight(0.3),
                Eta::Weight(1.0),
                Eta::Weight(5.0),
                Eta::Weight(10.0),
                Eta::Weight(30.0),
                Eta::PowerOnly,
            ],
            n_trials: 1,
            base_seed: 0,
            output: PathBuf::from("results.csv"),
            format: OutputFormat::Csv,
            jobs: 1,
            solver: SolverSettings::default(),
            record_wall_time: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let err = |e: &dyn std::fmt::Display| HarnessError::Config(e.to_string());
        let user: toml::Table = toml::from_str(text).map_err(|e| err(&e))?;
        let mut base = toml::Table::try_from(Self::default()).map_err(|e| err(&e))?;
        merge(&mut base, user);
        let cfg: Self = base.try_into().map_err(|e| err(&e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String, HarnessError> {
        toml::to_string(self).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |s: &str| Err(HarnessError::Config(s.to_string()));
        if self.etas.is_empty() {
            return bad("eta grid is empty");
        }
        if self.n_trials == 0 {
            return bad("n_trials must be at least 1");
        }
        if self.algorithms.is_empty() {
            return bad("no algorithms selected");
        }
        if self.jobs == 0 {
            return bad("jobs must be at least 1");
        }
        self.scenario
            .radio
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        self.solver
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        Ok(())
    }
}

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) if !o.contains_key("kind") => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}
