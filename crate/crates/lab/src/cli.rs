//! Command-line front end. Flags override values from `--config`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use knnlab_core::components::{census, CensusParams};
use knnlab_core::geom::SquareWorld;
use knnlab_core::knngraph::build_graph;
use knnlab_core::sampling::{derive_trial_seed, sample_poisson_square};
use serde::Serialize;

use crate::config::{
    file_value, parse_c_grid, read_config_file, ConfigError, ExperimentConfig, Format, KSpec,
};
use crate::harness::{
    bounds_table, run_boundary_census, run_connectivity_sweep, run_construction_audit,
    run_lemma_audit,
};
use crate::output::{emit, Meta};

#[derive(Debug, Parser)]
#[command(name = "knnlab", version, about = "k-nearest-neighbour random geometric graph experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Poisson sample of the square: idx,x,y.
    Sample {
        #[command(flatten)]
        common: CommonArgs,
        /// Trial index whose seed is used.
        #[arg(long, default_value_t = 0)]
        trial: u64,
    },
    /// Undirected k-NN edges u,v of one sample.
    Graph {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 0)]
        trial: u64,
        /// Also write the component census to this path.
        #[arg(long)]
        census_out: Option<PathBuf>,
    },
    /// Connectivity frequency over a grid of c.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Small components near the boundary versus in the interior.
    Boundary {
        #[command(flatten)]
        common: CommonArgs,
        /// Emit one row per trial instead of per-k summaries.
        #[arg(long)]
        per_trial: bool,
    },
    /// Geometric audit of every non-giant component.
    AuditConstruction {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Two-set bound against exact and simulated probabilities.
    AuditLemma {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of random configurations.
        #[arg(long)]
        configs: Option<u64>,
        /// How many of them also get a Monte Carlo check.
        #[arg(long, default_value_t = 100)]
        mc_configs: u64,
        #[arg(long, default_value_t = 10_000)]
        mc_trials: u64,
    },
    /// Crossing optima and threshold constants.
    BoundsTable {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        format: Option<Format>,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Area of the square (expected point count).
    #[arg(long)]
    pub n: Option<f64>,
    #[arg(long, conflicts_with = "c")]
    pub k: Option<usize>,
    /// k = ceil(c ln n).
    #[arg(long)]
    pub c: Option<f64>,
    /// a:b:step
    #[arg(long)]
    pub c_grid: Option<String>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Boundary strip width; ln n by default.
    #[arg(long)]
    pub strip: Option<f64>,
    /// Small components have diameter below small_coeff sqrt(ln n).
    #[arg(long)]
    pub small_coeff: Option<f64>,
    /// Multiplier on the side margin used to pick the audit mode.
    #[arg(long)]
    pub side_multiple: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<Format>,
    /// Flat key=value file with the same keys as the long flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub cfg: ExperimentConfig,
    pub c_grid: Vec<f64>,
    pub file: BTreeMap<String, String>,
}

/// Layers flags over the config file over defaults.
pub fn resolve(args: &CommonArgs) -> Result<Resolved, ConfigError> {
    let file = match &args.config {
        Some(p) => read_config_file(p)?,
        None => BTreeMap::new(),
    };
    let mut cfg = ExperimentConfig::default();
    let pick = |flag: Option<f64>, key: &str| -> Result<Option<f64>, ConfigError> {
        Ok(flag.or(file_value(&file, key)?))
    };
    if let Some(n) = pick(args.n, "n")? {
        cfg.area_n = n;
    }
    cfg.k = match (args.k, args.c) {
        (Some(k), _) => KSpec::K(k),
        (_, Some(c)) => KSpec::C(c),
        _ => match (file_value::<usize>(&file, "k")?, file_value::<f64>(&file, "c")?) {
            (Some(_), Some(_)) => return Err(ConfigError::KOrC),
            (Some(k), None) => KSpec::K(k),
            (None, Some(c)) => KSpec::C(c),
            (None, None) => cfg.k,
        },
    };
    if let Some(t) = args.trials.or(file_value(&file, "trials")?) {
        cfg.trials = t;
    }
    if let Some(s) = args.seed.or(file_value(&file, "seed")?) {
        cfg.master_seed = s;
    }
    if let Some(t) = args.threads.or(file_value(&file, "threads")?) {
        cfg.threads = t;
    }
    cfg.boundary_strip = pick(args.strip, "strip")?.or(cfg.boundary_strip);
    if let Some(v) = pick(args.small_coeff, "small-coeff")? {
        cfg.small_coeff = v;
    }
    if let Some(v) = pick(args.side_multiple, "side-multiple")? {
        cfg.side_multiple = v;
    }
    cfg.out = args
        .out
        .clone()
        .or_else(|| file.get("out").map(PathBuf::from));
    if let Some(f) = args.format.or(file_value(&file, "format")?) {
        cfg.format = f;
    }
    let grid_text = args.c_grid.clone().or_else(|| file.get("c-grid").cloned());
    let c_grid = match grid_text {
        Some(g) => parse_c_grid(&g)?,
        None => Vec::new(),
    };
    if let Some(s) = cfg.boundary_strip {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(ConfigError::BadValue { key: "strip".into(), value: s.to_string() });
        }
    }
    cfg.validate()?;
    Ok(Resolved { cfg, c_grid, file })
}

fn meta(command: &str, r: &Resolved, extra: &str) -> Meta {
    let mut config = if r.c_grid.is_empty() {
        r.cfg.describe()
    } else {
        let grid: Vec<String> = r.c_grid.iter().map(|c| c.to_string()).collect();
        format!("c_grid={} {}", grid.join(";"), r.cfg.describe_without_k())
    };
    config.push_str(extra);
    Meta::new(command, r.cfg.master_seed, config)
}

#[derive(Serialize)]
struct SampleRow {
    idx: usize,
    x: f64,
    y: f64,
}

#[derive(Serialize)]
struct EdgeRow {
    u: usize,
    v: usize,
}

#[derive(Serialize)]
struct CensusRow {
    comp_id: usize,
    size: usize,
    diameter: f64,
    min_boundary_dist: f64,
    is_giant: bool,
    is_small: bool,
}

fn world(cfg: &ExperimentConfig) -> Result<SquareWorld, ConfigError> {
    SquareWorld::new(cfg.area_n).map_err(|_| ConfigError::BadArea(cfg.area_n))
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Sample { common, trial } => {
            let r = resolve(&common)?;
            let ps = sample_poisson_square(world(&r.cfg)?, derive_trial_seed(r.cfg.master_seed, trial));
            let rows: Vec<SampleRow> = ps
                .points
                .iter()
                .enumerate()
                .map(|(idx, p)| SampleRow { idx, x: p.x, y: p.y })
                .collect();
            let m = meta("sample", &r, &format!(" trial={trial}"));
            emit(r.cfg.out.as_deref(), &rows, &["idx", "x", "y"], r.cfg.format, Some(&m))
        }
        Command::Graph { common, trial, census_out } => {
            let r = resolve(&common)?;
            let ps = sample_poisson_square(world(&r.cfg)?, derive_trial_seed(r.cfg.master_seed, trial));
            let k = r.cfg.k();
            let g = build_graph(&ps, k).with_context(|| format!("trial {trial} with {} points", ps.len()))?;
            let rows: Vec<EdgeRow> = g.edges().map(|(u, v)| EdgeRow { u, v }).collect();
            let m = meta("graph", &r, &format!(" trial={trial} k={k}"));
            emit(r.cfg.out.as_deref(), &rows, &["u", "v"], r.cfg.format, Some(&m))?;
            if let Some(path) = census_out {
                let params = CensusParams {
                    boundary_strip: r.cfg.strip(),
                    small_coeff: r.cfg.small_coeff,
                };
                let cen = census(&g, &ps, params);
                let rows: Vec<CensusRow> = cen
                    .components
                    .iter()
                    .map(|c| CensusRow {
                        comp_id: c.id,
                        size: c.size(),
                        diameter: c.diameter,
                        min_boundary_dist: c.min_boundary_distance,
                        is_giant: c.is_giant,
                        is_small: c.is_small,
                    })
                    .collect();
                emit(Some(&path), &rows, &[], r.cfg.format, Some(&m))?;
            }
            Ok(())
        }
        Command::Sweep { common } => {
            let r = resolve(&common)?;
            let rows = run_connectivity_sweep(&r.cfg, &r.c_grid)?;
            emit(r.cfg.out.as_deref(), &rows, &[], r.cfg.format, Some(&meta("sweep", &r, "")))
        }
        Command::Boundary { common, per_trial } => {
            let r = resolve(&common)?;
            let out = run_boundary_census(&r.cfg, &r.c_grid)?;
            let m = meta("boundary", &r, "");
            if per_trial {
                emit(r.cfg.out.as_deref(), &out.trials, &[], r.cfg.format, Some(&m))
            } else {
                emit(r.cfg.out.as_deref(), &out.rows, &[], r.cfg.format, Some(&m))
            }
        }
        Command::AuditConstruction { common } => {
            let r = resolve(&common)?;
            let out = run_construction_audit(&r.cfg)?;
            for row in out.rows.iter().filter(|x| x.audited() && !x.passed()) {
                log::error!("trial {} comp {}: {}", row.trial, row.comp_id, row.detail);
            }
            let s = &out.summary;
            log::info!(
                "audited {} components ({} interior, {} boundary), {} passed, {} skipped near a corner, {} error trials",
                s.audited, s.interior, s.boundary, s.passed, s.skipped_ambiguous, s.error_trials
            );
            emit(
                r.cfg.out.as_deref(),
                &out.rows,
                &[
                    "trial", "comp_id", "mode", "k", "fact_a", "fact_b", "fact_c", "fact_d",
                    "fact_e", "A0_area", "B_area", "x",
                ],
                r.cfg.format,
                Some(&meta("audit-construction", &r, "")),
            )?;
            if s.passed < s.audited {
                bail!("{} of {} components failed the audit", s.audited - s.passed, s.audited);
            }
            Ok(())
        }
        Command::AuditLemma { common, configs, mc_configs, mc_trials } => {
            let r = resolve(&common)?;
            let configs = match configs {
                Some(c) => c,
                None => file_value(&r.file, "configs")?.unwrap_or(1000),
            };
            if configs == 0 {
                bail!("configs must be at least 1");
            }
            let rows = run_lemma_audit(r.cfg.master_seed, configs, mc_configs, mc_trials, r.cfg.threads);
            let m = Meta::new(
                "audit-lemma",
                r.cfg.master_seed,
                format!("configs={configs} mc_configs={mc_configs} mc_trials={mc_trials}"),
            );
            emit(r.cfg.out.as_deref(), &rows, &[], r.cfg.format, Some(&m))?;
            let bad = rows.iter().filter(|x| !x.ok).count();
            if bad > 0 {
                bail!("{bad} of {configs} configurations violated the bound or the Monte Carlo tolerance");
            }
            Ok(())
        }
        Command::BoundsTable { out, format } => {
            let rows = bounds_table();
            emit(out.as_deref(), &rows, &[], format.unwrap_or_default(), None)
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args<I, T>(args: I) -> anyhow::Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run(Cli::try_parse_from(args)?)
}

/// Convenience for tests: resolves a config file alone.
pub fn resolve_file(path: &Path) -> Result<Resolved, ConfigError> {
    resolve(&CommonArgs { config: Some(path.to_path_buf()), ..Default::default() })
}
