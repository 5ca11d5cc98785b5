use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Algorithm, HarnessError, OutputFormat};
use crate::scenario::{CachingStrategy, Eta};

/// One `(trial, algorithm, eta)` result. Cost fields are empty when the
/// run did not produce a feasible design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub trial: usize,
    pub seed: u64,
    pub caching: CachingStrategy,
    pub algorithm: Algorithm,
    /// Which reading of the algorithm ran, where more than one is plausible.
    pub variant: String,
    pub eta: Eta,
    pub feasible: bool,
    /// `ok`, or the failure kind.
    pub status: String,
    pub backhaul_bps: Option<f64>,
    pub power_w: Option<f64>,
    pub power_dbm: Option<f64>,
    pub total_cost: Option<f64>,
    pub min_sinr_margin: Option<f64>,
    pub n_groups: usize,
    /// Active `(group, BS)` pairs as `101|011`, one field per group.
    pub clustering: Option<String>,
    pub outer_passes: usize,
    pub inner_iterations: usize,
    pub conic_iterations: usize,
    pub wall_time_s: Option<f64>,
    pub channel_hash: String,
}

/// Tradeoff point for one `(caching, algorithm, eta)` cell, averaged over
/// feasible rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub caching: CachingStrategy,
    pub algorithm: Algorithm,
    pub eta: Eta,
    pub n_trials: usize,
    pub n_feasible: usize,
    pub mean_backhaul_bps: Option<f64>,
    pub mean_power_w: Option<f64>,
    pub mean_power_dbm: Option<f64>,
    pub mean_total_cost: Option<f64>,
}

/// Rounds to ten significant digits so that emitted text reads back to
/// the same value.
pub fn sig10(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.9e}").parse().expect("formatted float parses")
}

pub fn emit_results<T: Serialize + HasHeader>(
    rows: &[T],
    format: OutputFormat,
    path: &Path,
) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let file = BufWriter::new(File::create(path)?);
    match format {
        OutputFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
            w.write_record(T::HEADER)?;
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        OutputFormat::JsonLines => {
            let mut file = file;
            for r in rows {
                serde_json::to_writer(&mut file, r)?;
                file.write_all(b"\n")?;
            }
            file.flush()?;
        }
    }
    Ok(())
}

pub fn read_results<T>(path: &Path, format: OutputFormat) -> Result<Vec<T>, HarnessError>
where
    T: for<'de> Deserialize<'de>,
{
    let file = BufReader::new(File::open(path)?);
    match format {
        OutputFormat::Csv => {
            let mut r = csv::Reader::from_reader(file);
            r.deserialize().map(|row| row.map_err(HarnessError::from)).collect()
        }
        OutputFormat::JsonLines => file
            .lines()
            .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
            .map(|l| Ok(serde_json::from_str(&l?)?))
            .collect(),
    }
}

/// Column names, written even when there are no rows.
pub trait HasHeader {
    const HEADER: &'static [&'static str];
}

impl HasHeader for ResultRow {
    const HEADER: &'static [&'static str] = &[
        "trial",
        "seed",
        "caching",
        "algorithm",
        "variant",
        "eta",
        "feasible",
        "status",
        "backhaul_bps",
        "power_w",
        "power_dbm",
        "total_cost",
        "min_sinr_margin",
        "n_groups",
        "clustering",
        "outer_passes",
        "inner_iterations",
        "conic_iterations",
        "wall_time_s",
        "channel_hash",
    ];
}

impl HasHeader for SummaryRow {
    const HEADER: &'static [&'static str] = &[
        "caching",
        "algorithm",
        "eta",
        "n_trials",
        "n_feasible",
        "mean_backhaul_bps",
        "mean_power_w",
        "mean_power_dbm",
        "mean_total_cost",
    ];
}
