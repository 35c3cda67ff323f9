//! Monte Carlo experiments. Every trial is a pure function of
//! `(master_seed, trial_index)` and results are collected in trial order, so
//! output never depends on the thread count.

use knnlab_core::bounds::{
    lemma_kk_bound, lemma_kk_exact, optimal_alpha, threshold_table, BoundQuery, Family,
};
use knnlab_core::components::{census, length_scale, CensusParams, ComponentCensus};
use knnlab_core::constructions::{select_mode, Auditor, Mode};
use knnlab_core::geom::{Point, SquareWorld};
use knnlab_core::knngraph::build_graph;
use knnlab_core::sampling::{derive_trial_seed, poisson_count, sample_poisson_square, stream_rng, unit_f64, PointSet};
use knnlab_core::Error as CoreError;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{k_from_c, ConfigError, ExperimentConfig};
use crate::stats::{mean, wilson_interval, Z95};

/// Runs `f(trial_index)` for every trial on a pool of `threads` workers and
/// returns the results in index order.
pub fn run_trials<T, F>(threads: usize, trials: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| (0..trials).into_par_iter().map(&f).collect())
}

fn warn_large_k(k: usize, area_n: f64) {
    if k as f64 >= area_n / 2.0 {
        log::warn!("k = {k} is at least half the expected point count {area_n}");
    }
}

fn census_params(cfg: &ExperimentConfig) -> CensusParams {
    CensusParams {
        boundary_strip: cfg.strip(),
        small_coeff: cfg.small_coeff,
    }
}

/// Sample, graph and census for one trial; `Err` when `k` is not below the
/// sampled point count.
fn trial_census(
    world: SquareWorld,
    k: usize,
    seed: u64,
    params: CensusParams,
) -> Result<(PointSet, knnlab_core::knngraph::NeighborGraph, ComponentCensus), CoreError> {
    let ps = sample_poisson_square(world, seed);
    let g = build_graph(&ps, k)?;
    let c = census(&g, &ps, params);
    Ok((ps, g, c))
}

/// `(c, k)` pairs to run: the grid when given, otherwise the configured
/// setting.
fn k_grid(cfg: &ExperimentConfig, c_grid: &[f64]) -> Vec<(f64, usize)> {
    if c_grid.is_empty() {
        vec![(cfg.c(), cfg.k())]
    } else {
        c_grid.iter().map(|&c| (c, k_from_c(c, cfg.area_n))).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub area_n: f64,
    pub c: f64,
    pub k: usize,
    pub trials: u64,
    pub connected_count: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub mean_giant_fraction: f64,
    /// Largest non-giant diameter over all trials, over `sqrt(ln n)`.
    pub max_small_diameter_normalized: f64,
    pub boundary_small_trials: u64,
    pub interior_small_trials: u64,
    /// Trials where `k` was not below the sampled point count; excluded from
    /// the other columns.
    pub error_trials: u64,
}

#[derive(Debug, Clone, PartialEq)]
struct SweepTrial {
    connected: bool,
    giant_fraction: f64,
    max_nongiant_diameter: f64,
    boundary_small: bool,
    interior_small: bool,
}

/// One row per `c`; trial `t` uses the same sample for every `c`, so the
/// graphs are nested and `p_hat` moves monotonically in `c` up to ceiling
/// effects of the rounding `k = ceil(c ln n)`.
pub fn run_connectivity_sweep(
    cfg: &ExperimentConfig,
    c_grid: &[f64],
) -> Result<Vec<SweepRow>, ConfigError> {
    cfg.validate()?;
    let world = SquareWorld::new(cfg.area_n).map_err(|_| ConfigError::BadArea(cfg.area_n))?;
    let params = census_params(cfg);
    let scale = length_scale(cfg.area_n);
    let grid = k_grid(cfg, c_grid);
    let mut rows = Vec::with_capacity(grid.len());
    for (c, k) in grid {
        warn_large_k(k, cfg.area_n);
        let outcomes = run_trials(cfg.threads, cfg.trials, |t| {
            let seed = derive_trial_seed(cfg.master_seed, t);
            trial_census(world, k, seed, params).ok().map(|(_, _, cen)| SweepTrial {
                connected: cen.is_connected(),
                giant_fraction: cen.giant_fraction,
                max_nongiant_diameter: cen
                    .components
                    .iter()
                    .filter(|x| !x.is_giant)
                    .map(|x| x.diameter)
                    .fold(0.0, f64::max),
                boundary_small: cen.small().any(|x| x.in_boundary_strip),
                interior_small: cen.small().any(|x| !x.in_boundary_strip),
            })
        });
        let ok: Vec<&SweepTrial> = outcomes.iter().flatten().collect();
        let valid = ok.len() as u64;
        let connected = ok.iter().filter(|t| t.connected).count() as u64;
        let (ci_lo, ci_hi) = wilson_interval(connected, valid, Z95);
        rows.push(SweepRow {
            area_n: cfg.area_n,
            c,
            k,
            trials: cfg.trials,
            connected_count: connected,
            p_hat: if valid == 0 { 0.0 } else { connected as f64 / valid as f64 },
            ci_lo,
            ci_hi,
            mean_giant_fraction: mean(ok.iter().map(|t| t.giant_fraction)),
            max_small_diameter_normalized: ok
                .iter()
                .map(|t| t.max_nongiant_diameter / scale)
                .fold(0.0, f64::max),
            boundary_small_trials: ok.iter().filter(|t| t.boundary_small).count() as u64,
            interior_small_trials: ok.iter().filter(|t| t.interior_small).count() as u64,
            error_trials: cfg.trials - valid,
        });
    }
    Ok(rows)
}

/// Per-trial counts behind a [`BoundaryRow`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryTrial {
    pub trial: u64,
    pub k: usize,
    /// `None` when the trial could not build a graph.
    pub small_boundary: Option<usize>,
    pub small_interior: Option<usize>,
    pub nongiant_boundary: Option<usize>,
    pub nongiant_interior: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryRow {
    pub area_n: f64,
    pub c: f64,
    pub k: usize,
    pub strip: f64,
    pub trials: u64,
    pub error_trials: u64,
    /// Small components meeting the strip, summed over trials.
    pub small_boundary_total: u64,
    /// Small components entirely outside the strip, summed over trials.
    pub small_interior_total: u64,
    pub trials_with_boundary_small: u64,
    pub trials_with_interior_small: u64,
    pub boundary_frequency: f64,
    pub interior_frequency: f64,
    pub nongiant_boundary_total: u64,
    pub nongiant_interior_total: u64,
}

pub struct BoundaryCensus {
    pub rows: Vec<BoundaryRow>,
    pub trials: Vec<BoundaryTrial>,
}

/// Small components near the boundary versus in the interior, one summary row
/// per `k`.
pub fn run_boundary_census(
    cfg: &ExperimentConfig,
    c_grid: &[f64],
) -> Result<BoundaryCensus, ConfigError> {
    cfg.validate()?;
    let world = SquareWorld::new(cfg.area_n).map_err(|_| ConfigError::BadArea(cfg.area_n))?;
    let params = census_params(cfg);
    let grid = k_grid(cfg, c_grid);
    let mut out = BoundaryCensus { rows: Vec::new(), trials: Vec::new() };
    for (c, k) in grid {
        warn_large_k(k, cfg.area_n);
        let per_trial = run_trials(cfg.threads, cfg.trials, |t| {
            let seed = derive_trial_seed(cfg.master_seed, t);
            match trial_census(world, k, seed, params) {
                Ok((_, _, cen)) => {
                    let nongiant = || cen.components.iter().filter(|x| !x.is_giant);
                    BoundaryTrial {
                        trial: t,
                        k,
                        small_boundary: Some(cen.small().filter(|x| x.in_boundary_strip).count()),
                        small_interior: Some(cen.small().filter(|x| !x.in_boundary_strip).count()),
                        nongiant_boundary: Some(nongiant().filter(|x| x.in_boundary_strip).count()),
                        nongiant_interior: Some(nongiant().filter(|x| !x.in_boundary_strip).count()),
                    }
                }
                Err(_) => BoundaryTrial {
                    trial: t,
                    k,
                    small_boundary: None,
                    small_interior: None,
                    nongiant_boundary: None,
                    nongiant_interior: None,
                },
            }
        });
        let ok: Vec<&BoundaryTrial> = per_trial.iter().filter(|t| t.small_boundary.is_some()).collect();
        let valid = ok.len() as u64;
        let sum = |f: fn(&BoundaryTrial) -> Option<usize>| ok.iter().map(|t| f(t).unwrap_or(0) as u64).sum::<u64>();
        let with = |f: fn(&BoundaryTrial) -> Option<usize>| ok.iter().filter(|t| f(t).unwrap_or(0) > 0).count() as u64;
        let freq = |n: u64| if valid == 0 { 0.0 } else { n as f64 / valid as f64 };
        let tb = with(|t| t.small_boundary);
        let ti = with(|t| t.small_interior);
        out.rows.push(BoundaryRow {
            area_n: cfg.area_n,
            c,
            k,
            strip: cfg.strip(),
            trials: cfg.trials,
            error_trials: cfg.trials - valid,
            small_boundary_total: sum(|t| t.small_boundary),
            small_interior_total: sum(|t| t.small_interior),
            trials_with_boundary_small: tb,
            trials_with_interior_small: ti,
            boundary_frequency: freq(tb),
            interior_frequency: freq(ti),
            nongiant_boundary_total: sum(|t| t.nongiant_boundary),
            nongiant_interior_total: sum(|t| t.nongiant_interior),
        });
        out.trials.extend(per_trial);
    }
    Ok(out)
}

/// One audited (or skipped) non-giant component. Fact columns are empty
/// for skipped components.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditRow {
    pub trial: u64,
    pub comp_id: usize,
    pub mode: String,
    pub k: usize,
    pub fact_a: Option<bool>,
    pub fact_b: Option<bool>,
    pub fact_c: Option<bool>,
    pub fact_d: Option<bool>,
    pub fact_e: Option<bool>,
    #[serde(rename = "A0_area")]
    pub a0_area: Option<f64>,
    #[serde(rename = "B_area")]
    pub b_area: Option<f64>,
    pub x: Option<f64>,
    /// Failure details, empty when every fact passed.
    #[serde(skip)]
    pub detail: String,
}

impl AuditRow {
    pub fn audited(&self) -> bool {
        self.fact_a.is_some()
    }

    pub fn passed(&self) -> bool {
        [self.fact_a, self.fact_b, self.fact_c, self.fact_d, self.fact_e]
            .iter()
            .all(|f| *f == Some(true))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditSummary {
    pub trials: u64,
    pub error_trials: u64,
    pub audited: u64,
    pub passed: u64,
    pub skipped_ambiguous: u64,
    pub interior: u64,
    pub boundary: u64,
    pub pass_rate: f64,
}

pub struct AuditOutput {
    pub rows: Vec<AuditRow>,
    pub summary: AuditSummary,
}

/// Side margin for picking the audit mode: `2 small_coeff sqrt(ln n)` times
/// the configured multiple.
pub fn side_margin(cfg: &ExperimentConfig) -> f64 {
    2.0 * cfg.small_coeff * length_scale(cfg.area_n) * cfg.side_multiple
}

/// Audits every non-giant component of every trial.
pub fn run_construction_audit(cfg: &ExperimentConfig) -> Result<AuditOutput, ConfigError> {
    cfg.validate()?;
    let world = SquareWorld::new(cfg.area_n).map_err(|_| ConfigError::BadArea(cfg.area_n))?;
    let params = census_params(cfg);
    let k = cfg.k();
    warn_large_k(k, cfg.area_n);
    let margin = side_margin(cfg);
    let per_trial: Vec<Option<Vec<AuditRow>>> = run_trials(cfg.threads, cfg.trials, |t| {
        let seed = derive_trial_seed(cfg.master_seed, t);
        let (ps, g, cen) = trial_census(world, k, seed, params).ok()?;
        if cen.is_connected() {
            return Some(Vec::new());
        }
        let auditor = Auditor::new(&ps, &g);
        let rows = cen
            .components
            .iter()
            .filter(|comp| !comp.is_giant)
            .map(|comp| {
                let coords: Vec<Point> = comp.vertices.iter().map(|&v| ps[v]).collect();
                let skipped = |mode: &str, detail: String| AuditRow {
                    trial: t,
                    comp_id: comp.id,
                    mode: mode.to_string(),
                    k,
                    fact_a: None,
                    fact_b: None,
                    fact_c: None,
                    fact_d: None,
                    fact_e: None,
                    a0_area: None,
                    b_area: None,
                    x: None,
                    detail,
                };
                let mode = match select_mode(&world, &coords, margin) {
                    Ok(m) => m,
                    Err(_) => return skipped("ambiguous", String::new()),
                };
                match auditor.audit_component(comp, mode) {
                    Ok(r) => AuditRow {
                        trial: t,
                        comp_id: comp.id,
                        mode: mode.as_str().to_string(),
                        k,
                        fact_a: Some(r.facts[0].passed),
                        fact_b: Some(r.facts[1].passed),
                        fact_c: Some(r.facts[2].passed),
                        fact_d: Some(r.facts[3].passed),
                        fact_e: Some(r.facts[4].passed),
                        a0_area: Some(r.construction.a0_area),
                        b_area: Some(r.construction.b_area),
                        x: Some(r.x()),
                        detail: r
                            .facts
                            .iter()
                            .filter(|f| !f.passed)
                            .map(|f| format!("({}) {}", f.fact.label(), f.detail))
                            .collect::<Vec<_>>()
                            .join("; "),
                    },
                    Err(e) => skipped("error", e.to_string()),
                }
            })
            .collect();
        Some(rows)
    });
    let error_trials = per_trial.iter().filter(|r| r.is_none()).count() as u64;
    let rows: Vec<AuditRow> = per_trial.into_iter().flatten().flatten().collect();
    let audited = rows.iter().filter(|r| r.audited()).count() as u64;
    let passed = rows.iter().filter(|r| r.passed()).count() as u64;
    let summary = AuditSummary {
        trials: cfg.trials,
        error_trials,
        audited,
        passed,
        skipped_ambiguous: rows.iter().filter(|r| r.mode == "ambiguous").count() as u64,
        interior: rows.iter().filter(|r| r.mode == Mode::Interior.as_str()).count() as u64,
        boundary: rows.iter().filter(|r| r.mode.starts_with("boundary")).count() as u64,
        pass_rate: if audited == 0 { 1.0 } else { passed as f64 / audited as f64 },
    };
    Ok(AuditOutput { rows, summary })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaRow {
    pub config: u64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub k: u32,
    pub exact: f64,
    pub bound: f64,
    /// Monte Carlo frequency; empty when no trials were run.
    pub mc_freq: Option<f64>,
    /// Standard error of the frequency under the exact probability.
    pub mc_se: Option<f64>,
    pub mc_trials: u64,
    pub ok: bool,
}

/// Random `(a, b, c, k)` with `k` in `1..=20`, `c` uniform on
/// `(0.2, 1.2 k)` and `a, b` uniform on `(0, c)`.
pub fn sample_lemma_config(seed: u64) -> (f64, f64, f64, u32) {
    let mut rng = stream_rng(seed);
    let k = 1 + (unit_f64(&mut rng) * 20.0) as u32;
    let c = 0.2 + unit_f64(&mut rng) * (1.2 * k as f64 - 0.2);
    let a = unit_f64(&mut rng) * c;
    let b = unit_f64(&mut rng) * c;
    (a, b, c, k.min(20))
}

/// Fraction of `trials` Poisson samples of three vertical strips of areas
/// `a, b, c` tiling a square where the first two hold at least `k` points
/// each and the third none.
pub fn lemma_monte_carlo(a: f64, b: f64, c: f64, k: u32, trials: u64, seed: u64) -> f64 {
    let total = a + b + c;
    let side = total.sqrt();
    let world = SquareWorld::new(total).expect("positive area");
    let (xa, xb) = (a / side, (a + b) / side);
    let mut hits = 0u64;
    for t in 0..trials {
        let mut rng = stream_rng(derive_trial_seed(seed, t));
        let m = poisson_count(world.area(), &mut rng);
        let (mut na, mut nb, mut nc) = (0u32, 0u32, 0u32);
        for _ in 0..m {
            let x = side * unit_f64(&mut rng);
            let _y = unit_f64(&mut rng);
            if x < xa {
                na += 1;
            } else if x < xb {
                nb += 1;
            } else {
                nc += 1;
            }
        }
        if na >= k && nb >= k && nc == 0 {
            hits += 1;
        }
    }
    hits as f64 / trials as f64
}

/// Checks the two-set bound on `configs` random configurations, with a
/// `mc_trials`-sample Monte Carlo check for the first `mc_configs`.
///
/// A row is ok when exact <= bound and, where simulated, the frequency is at
/// most bound + 3 SE and within 4 SE of the exact value, both after a
/// `1/(2N)` continuity correction.
pub fn run_lemma_audit(
    master_seed: u64,
    configs: u64,
    mc_configs: u64,
    mc_trials: u64,
    threads: usize,
) -> Vec<LemmaRow> {
    run_trials(threads, configs, |i| {
        let seed = derive_trial_seed(master_seed, i);
        let (a, b, c, k) = sample_lemma_config(seed);
        lemma_row(i, a, b, c, k, if i < mc_configs { mc_trials } else { 0 }, seed)
    })
}

pub fn lemma_row(config: u64, a: f64, b: f64, c: f64, k: u32, mc_trials: u64, seed: u64) -> LemmaRow {
    let exact = lemma_kk_exact(a, b, c, k);
    let bound = lemma_kk_bound(BoundQuery { a, b, c, k }).unwrap_or(f64::NAN);
    let mut ok = exact <= bound;
    let (mut mc_freq, mut mc_se) = (None, None);
    if mc_trials > 0 {
        let f = lemma_monte_carlo(a, b, c, k, mc_trials, derive_trial_seed(seed, u64::MAX));
        let se = (exact * (1.0 - exact) / mc_trials as f64).sqrt();
        // frequencies live on a 1/N lattice: continuity correction
        let half_step = 0.5 / mc_trials as f64;
        ok &= f - half_step <= bound + 3.0 * se && (f - exact).abs() - half_step <= 4.0 * se;
        mc_freq = Some(f);
        mc_se = Some(se);
    }
    LemmaRow {
        config,
        a,
        b,
        c,
        k,
        exact,
        bound,
        mc_freq,
        mc_se,
        mc_trials,
        ok,
    }
}

/// One line of the `bounds-table` output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsRow {
    pub quantity: String,
    pub value: Option<f64>,
    pub reported: Option<f64>,
    pub note: String,
}

/// Both crossing optima followed by the threshold table.
pub fn bounds_table() -> Vec<BoundsRow> {
    let mut rows = Vec::new();
    for fam in [Family::Interior, Family::Boundary] {
        let r = optimal_alpha(fam);
        let name = fam.as_str();
        rows.push(BoundsRow {
            quantity: format!("{name}_x_star"),
            value: Some(r.x_star),
            reported: None,
            note: format!("analytic crossing {}", fam.analytic_crossing()),
        });
        rows.push(BoundsRow {
            quantity: format!("{name}_alpha"),
            value: Some(r.alpha),
            reported: Some(match fam {
                Family::Interior => 11.3,
                Family::Boundary => 6.3,
            }),
            note: "reported value is a lower bound".into(),
        });
    }
    rows.extend(threshold_table().into_iter().map(|t| BoundsRow {
        quantity: t.name.to_string(),
        value: t.derived,
        reported: Some(t.reported),
        note: t.note.to_string(),
    }));
    rows
}
