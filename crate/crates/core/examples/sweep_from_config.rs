//! A sweep described in TOML, written as CSV with a summary.

use cachecast::harness::{emit_results, run_sweep, ExperimentConfig, OutputFormat};

const CONFIG: &str = r#"
algorithms = ["g_ccp", "greedy", "full_coop"]
etas = [1e-6, 0.1, 1.0, "power-only"]
n_trials = 4
base_seed = 11
jobs = 2
"#;

fn main() {
    let cfg = ExperimentConfig::from_toml(CONFIG).expect("valid config");
    let res = run_sweep(&cfg).expect("sweep runs");
    let dir = std::env::temp_dir().join("cachecast-sweep");
    emit_results(&res.rows, OutputFormat::Csv, &dir.join("rows.csv")).expect("writable");
    emit_results(&res.summary, OutputFormat::Csv, &dir.join("summary.csv")).expect("writable");
    println!("{} rows written to {}", res.rows.len(), dir.display());
    for s in &res.summary {
        println!(
            "{:<10} eta {:<10} mean total {:.4}",
            s.algorithm,
            s.eta,
            s.mean_total_cost.unwrap_or(f64::NAN)
        );
    }
}
