use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use cachecast::harness::{
    compare_caching, emit_results, run_sweep, solve_one, validate, Algorithm, ExperimentConfig, OutputFormat,
    SweepResult,
};
use cachecast::scenario::{CachingStrategy, Eta, Scenario, ScenarioSpec};
use cachecast::smooth::SmoothKind;

/// Cache-aware multicast beamforming experiments.
#[derive(Parser)]
#[command(name = "cachecast", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one scenario as JSON.
    Generate(Common),
    /// Solve one scenario with one algorithm at one weight.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Scenario JSON from `generate`; drawn from the config otherwise.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long, default_value = "g_ccp")]
        algorithm: Algorithm,
        #[arg(long, default_value = "1")]
        eta: Eta,
    },
    /// Run the full experiment grid.
    Sweep(Common),
    /// Compare the algorithms against the exhaustive oracle.
    Validate(Common),
    /// Repeat the sweep under each caching strategy.
    CompareCaching(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    jobs: usize,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated weights; `power-only` is accepted.
    #[arg(long, value_delimiter = ',')]
    etas: Option<Vec<Eta>>,
    #[arg(long, value_delimiter = ',')]
    algorithms: Option<Vec<Algorithm>>,
    #[arg(long)]
    format: Option<OutputFormat>,
    #[arg(long)]
    caching: Option<CachingStrategy>,
    #[arg(long)]
    cache_size: Option<usize>,
    #[arg(long)]
    smooth: Option<SmoothKind>,
    /// Use the seven-cell network instead of the three-cell one when no
    /// config is given.
    #[arg(long)]
    full_scale: bool,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p).with_context(|| format!("reading {}", p.display()))?,
            None if self.full_scale => ExperimentConfig {
                scenario: ScenarioSpec::default(),
                ..Default::default()
            },
            None => ExperimentConfig::default(),
        };
        cfg.base_seed = self.seed;
        cfg.output = self.out.clone();
        cfg.jobs = self.jobs;
        if let Some(t) = self.trials {
            cfg.n_trials = t;
        }
        if let Some(e) = &self.etas {
            cfg.etas = e.clone();
        }
        if let Some(a) = &self.algorithms {
            cfg.algorithms = a.clone();
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        if let Some(c) = self.caching {
            cfg.scenario.caching = c;
        }
        if let Some(y) = self.cache_size {
            cfg.scenario.cache_size = y;
        }
        if let Some(k) = self.smooth {
            cfg.solver.smooth_kind = k;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// `results.csv` with tag `summary` becomes `results_summary.csv`.
fn sibling(out: &Path, tag: &str) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("results");
    let name = match out.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}_{tag}.{ext}"),
        None => format!("{stem}_{tag}"),
    };
    out.with_file_name(name)
}

fn write_sweep(cfg: &ExperimentConfig, res: &SweepResult) -> Result<()> {
    emit_results(&res.rows, cfg.format, &cfg.output)?;
    emit_results(&res.summary, cfg.format, &sibling(&cfg.output, "summary"))?;
    for s in &res.summary {
        println!(
            "{:?} {:<10} eta={:<10} feasible {}/{} backhaul {} power {}",
            s.caching,
            s.algorithm,
            s.eta,
            s.n_feasible,
            s.n_trials,
            s.mean_backhaul_bps.map_or("-".into(), |b| format!("{:.4e} bit/s", b)),
            s.mean_power_dbm.map_or("-".into(), |p| format!("{p:.2} dBm")),
        );
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate(common) => {
            let cfg = common.config()?;
            let sc = Scenario::generate(&cfg.scenario, common.seed)?;
            sc.save(&common.out)?;
            println!("groups {} channel {}", sc.n_groups(), sc.channel_hash());
        }
        Command::Solve {
            common,
            scenario,
            algorithm,
            eta,
        } => {
            let cfg = common.config()?;
            let sc = match scenario {
                Some(p) => Scenario::load(&p)?,
                None => Scenario::generate(&cfg.scenario, common.seed)?,
            };
            let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build()?;
            match pool.install(|| solve_one(&sc, &cfg, algorithm, eta, common.seed, None)) {
                Ok(o) => {
                    std::fs::write(&common.out, serde_json::to_string_pretty(&o)?)?;
                    println!(
                        "clustering {} backhaul {:.4e} bit/s power {:.4} W total {:.6}",
                        o.clustering.to_bit_string(),
                        o.costs.backhaul,
                        o.costs.power,
                        o.costs.total
                    );
                }
                Err(e) if e.is_infeasible() => {
                    eprintln!("infeasible: {e}");
                    return Ok(ExitCode::from(2));
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::Sweep(common) => {
            let cfg = common.config()?;
            write_sweep(&cfg, &run_sweep(&cfg)?)?;
        }
        Command::CompareCaching(common) => {
            let cfg = common.config()?;
            write_sweep(&cfg, &compare_caching(&cfg)?)?;
        }
        Command::Validate(common) => {
            let mut cfg = common.config()?;
            if common.config.is_none() && common.algorithms.is_none() {
                cfg.algorithms = vec![Algorithm::GCcp, Algorithm::SdrCcp, Algorithm::Greedy];
            }
            if common.config.is_none() && common.etas.is_none() {
                cfg.etas = vec![
                    Eta::Weight(1e-6),
                    Eta::Weight(0.1),
                    Eta::Weight(1.0),
                    Eta::Weight(10.0),
                    Eta::PowerOnly,
                ];
            }
            let v = validate(&cfg)?;
            write_sweep(&cfg, &v.sweep)?;
            emit_results(&v.gaps, cfg.format, &sibling(&cfg.output, "oracle_gap"))?;
            for g in &v.gaps {
                println!(
                    "{:<10} eta={:<10} paired {:>3} gap {}",
                    g.algorithm,
                    g.eta,
                    g.n_paired,
                    g.relative_gap.map_or("-".into(), |x| format!("{:+.3}%", 100.0 * x))
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    // clap reports usage errors with status 2, which is reserved here for
    // infeasible instances.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
