//! Acceptance gate: one pass/fail line per criterion, non-zero exit on any
//! failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use knnlab::config::{ExperimentConfig, Format, KSpec};
use knnlab::harness::{lemma_row, run_connectivity_sweep, run_construction_audit, run_lemma_audit};
use knnlab::output::write_rows;
use knnlab_core::bounds::{
    boundary_curves, disc_blocking_argmax, disc_blocking_probability, lemma_kk_bound,
    optimal_alpha, BoundQuery, Family,
};
use knnlab_core::components::{census, CensusParams};
use knnlab_core::constructions::{Auditor, Fact, Mode};
use knnlab_core::geom::{euclidean_diameter, lune_area, monte_carlo_area, Point, Region, SquareWorld};
use knnlab_core::knngraph::{brute_force_graph, build_graph};
use knnlab_core::sampling::{derive_trial_seed, sample_poisson_square, stream_rng, unit_f64, PointSet};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn interior_crossing() -> Check {
    let r = optimal_alpha(Family::Interior);
    let want = 7f64.sqrt() - 1.0;
    ensure((r.x_star - want).abs() <= 1e-6, || format!("x_star {} vs {want}", r.x_star))?;
    ensure(r.alpha > 11.32 && r.alpha < 11.34 && r.alpha > 11.3, || format!("alpha {}", r.alpha))?;
    Ok(format!("x_star={:.9} alpha={:.6}", r.x_star, r.alpha))
}

fn boundary_crossing() -> Check {
    let r = optimal_alpha(Family::Boundary);
    let want = 2f64.sqrt() * (5f64.sqrt() - 1.0);
    ensure((r.x_star - want).abs() <= 1e-6, || format!("x_star {} vs {want}", r.x_star))?;
    ensure(r.alpha > 6.31 && r.alpha < 6.33 && r.alpha > 6.3, || format!("alpha {}", r.alpha))?;
    Ok(format!("x_star={:.9} alpha={:.6}", r.x_star, r.alpha))
}

fn thresholds() -> Check {
    let ci = 1.0 / optimal_alpha(Family::Interior).alpha.ln();
    let cb = 1.0 / (2.0 * optimal_alpha(Family::Boundary).alpha.ln());
    ensure(ci <= 0.4125, || format!("interior threshold {ci}"))?;
    ensure(cb <= 0.272, || format!("boundary threshold {cb}"))?;
    Ok(format!("1/ln(alpha_i)={ci:.6} 1/(2 ln(alpha_b))={cb:.6}"))
}

fn lemma_dominance() -> Check {
    let unit = lemma_row(0, 1.0, 1.0, 1.0, 1, 0, 0);
    ensure((unit.exact - 0.146_995).abs() < 1e-6 && (unit.bound - 4.0 / 9.0).abs() < 1e-12, || {
        format!("unit row {} {}", unit.exact, unit.bound)
    })?;
    ensure(lemma_kk_bound(BoundQuery { a: 2.0, b: 1.0, c: 1.0, k: 1 }).is_err(), || {
        "a > c accepted".into()
    })?;
    let rows = run_lemma_audit(2024, 1000, 100, 10_000, threads());
    let violations = rows.iter().filter(|r| !(r.exact <= r.bound)).count();
    ensure(violations == 0, || format!("{violations} exact > bound"))?;
    let simulated: Vec<_> = rows.iter().filter(|r| r.mc_freq.is_some()).collect();
    ensure(simulated.len() == 100, || format!("{} simulated", simulated.len()))?;
    let bad: Vec<_> = simulated.iter().filter(|r| !r.ok).collect();
    ensure(bad.is_empty(), || format!("Monte Carlo out of tolerance: {:?}", bad[0]))?;
    Ok("1000 configs, 0 violations; 100 x 1e4 Monte Carlo within tolerance".into())
}

fn lune_monte_carlo() -> Check {
    let mut rng = stream_rng(55);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let q = Point::new(100.0 * unit_f64(&mut rng) - 50.0, 100.0 * unit_f64(&mut rng) - 50.0);
        let r0 = 0.1 + 10.0 * unit_f64(&mut rng);
        let p = q + Point::from_angle(2.0 * std::f64::consts::PI * unit_f64(&mut rng)) * r0;
        let exact = lune_area(r0);
        let mc = monte_carlo_area(&Region::lune(q, p, r0), 1_000_000, None, 900 + i)
            .map_err(|e| e.to_string())?;
        let rel = (mc.area - exact).abs() / exact;
        worst = worst.max(rel);
        ensure(rel <= 0.005, || format!("instance {i}: mc {} exact {exact}", mc.area))?;
    }
    Ok(format!("20 instances, worst relative error {worst:.2e}"))
}

fn knn_oracle() -> Check {
    let mut compared = 0;
    for k in [1usize, 3, 8, 16] {
        for s in 0..25u64 {
            let area = 50.0 + 70.0 * s as f64;
            let world = SquareWorld::new(area).unwrap();
            let ps = sample_poisson_square(world, derive_trial_seed(31 + k as u64, s));
            ensure(ps.len() <= 2000, || format!("m = {}", ps.len()))?;
            if ps.len() <= k {
                continue;
            }
            let fast = build_graph(&ps, k).map_err(|e| e.to_string())?;
            let slow = brute_force_graph(&ps, k).map_err(|e| e.to_string())?;
            ensure(fast == slow, || format!("k={k} seed={s} m={}", ps.len()))?;
            compared += 1;
        }
        // exact ties on a lattice
        let pts: Vec<Point> = (0..400).map(|i| Point::new((i % 20) as f64, (i / 20) as f64)).collect();
        let ps = PointSet::from_points(SquareWorld::new(400.0).unwrap(), pts);
        let eq = build_graph(&ps, k).unwrap() == brute_force_graph(&ps, k).unwrap();
        ensure(eq, || format!("lattice k={k}"))?;
    }
    Ok(format!("{compared} random samples and 4 lattices identical"))
}

fn diameter_oracle() -> Check {
    let mut rng = stream_rng(77);
    for i in 0..1000usize {
        let m = 1 + i % 64;
        let side = 0.01 + 100.0 * unit_f64(&mut rng);
        let pts: Vec<Point> = (0..m)
            .map(|_| Point::new(side * unit_f64(&mut rng), side * unit_f64(&mut rng)))
            .collect();
        let mut best = 0.0f64;
        for a in 0..m {
            for b in a + 1..m {
                best = best.max(pts[a].dist(pts[b]));
            }
        }
        let d = euclidean_diameter(&pts);
        ensure(d == best, || format!("set {i}: {d} vs {best}"))?;
    }
    Ok("1000 sets identical".into())
}

fn construction_audit() -> Check {
    let area = 1e5;
    let cfg = ExperimentConfig {
        area_n: area,
        k: KSpec::C(0.30),
        trials: 100,
        master_seed: 8,
        threads: threads(),
        ..Default::default()
    };
    let out = run_construction_audit(&cfg).map_err(|e| e.to_string())?;
    let s = &out.summary;
    ensure(s.error_trials == 0, || format!("{} error trials", s.error_trials))?;
    ensure(s.audited > 0 && s.boundary > 0, || format!("{s:?}"))?;
    if let Some(r) = out.rows.iter().find(|r| r.audited() && !r.passed()) {
        return Err(format!("trial {} comp {}: {}", r.trial, r.comp_id, r.detail));
    }

    // planted counterexample inside A_1 of a real interior component
    let world = SquareWorld::new(1e4).unwrap();
    let mut planted = false;
    for t in 0..50 {
        let ps = sample_poisson_square(world, derive_trial_seed(5, t));
        let g = build_graph(&ps, 3).unwrap();
        let cen = census(&g, &ps, CensusParams::defaults(world.area()));
        let Some(comp) = cen.components.iter().find(|c| !c.is_giant && c.min_boundary_distance > 20.0) else {
            continue;
        };
        let base = Auditor::new(&ps, &g).audit_component(comp, Mode::Interior).map_err(|e| e.to_string())?;
        let c = &base.construction;
        let plant = c.extremal_coords[0] + c.tangent_lines[0].normal * (c.knn_disc_radii[0] / 2.0);
        let r = Auditor::new(&ps, &g)
            .with_extra_points(vec![plant])
            .audit_component(comp, Mode::Interior)
            .map_err(|e| e.to_string())?;
        let fa = r.fact(Fact::EmptyRegions);
        ensure(!fa.passed && fa.witness == Some(plant), || format!("planted point not reported: {}", fa.detail))?;
        planted = true;
        break;
    }
    ensure(planted, || "no interior component for the planted fixture".into())?;
    Ok(format!(
        "k={} {} components ({} interior, {} boundary) all pass, {} skipped near corners; planted point caught",
        cfg.k(),
        s.audited,
        s.interior,
        s.boundary,
        s.skipped_ambiguous
    ))
}

fn disc_blocking() -> Check {
    let mut worst = 0.0f64;
    for k in [0u32, 4, 8, 20, 40] {
        let want = (k + 1) as f64 / 9.0;
        let rel = ((disc_blocking_argmax(k) - want) / want).abs();
        worst = worst.max(rel);
        ensure(rel <= 1e-6, || format!("k={k}: relative error {rel}"))?;
    }
    let k = 40u32;
    let n = (k + 1) as f64;
    // Stirling: the maximum is about 9^-(k+1) / sqrt(2 pi (k+1))
    let ratio = disc_blocking_probability(n / 9.0, k) * (2.0 * std::f64::consts::PI * n).sqrt() * 9f64.powf(n);
    ensure((ratio - 1.0).abs() <= 0.02, || format!("Stirling ratio {ratio}"))?;
    Ok(format!("worst argmax error {worst:.1e}, Stirling ratio {ratio:.5}"))
}

fn sweep_csv(threads: usize, grid: &[f64]) -> Result<(Vec<knnlab::harness::SweepRow>, Vec<u8>), String> {
    let cfg = ExperimentConfig {
        area_n: 1e4,
        k: KSpec::C(0.5),
        trials: 200,
        master_seed: 10,
        threads,
        ..Default::default()
    };
    let rows = run_connectivity_sweep(&cfg, grid).map_err(|e| e.to_string())?;
    let mut buf = Vec::new();
    write_rows(&mut buf, &rows, Format::Csv, None).map_err(|e| e.to_string())?;
    Ok((rows, buf))
}

fn connectivity_sweep() -> Check {
    let grid: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let (rows, one) = sweep_csv(1, &grid)?;
    let (_, eight) = sweep_csv(8, &grid)?;
    ensure(one == eight, || "threads 1 and 8 differ".into())?;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            ensure(rows[j].ci_hi >= rows[i].ci_lo, || {
                format!("p_hat drops from c={} to c={}", rows[i].c, rows[j].c)
            })?;
        }
        if rows[i].c >= 0.5 {
            ensure(rows[i].mean_giant_fraction >= 0.99, || {
                format!("giant fraction {} at c={}", rows[i].mean_giant_fraction, rows[i].c)
            })?;
        }
    }
    let p: Vec<String> = rows.iter().map(|r| format!("{:.3}", r.p_hat)).collect();
    Ok(format!("p_hat over c=0.1..0.9: [{}]", p.join(", ")))
}

fn g3_tail() -> Check {
    let mut checked = 0;
    for i in 0..=8800 {
        let x = 12.0 + i as f64 * 0.01;
        for k in 1..=60u32 {
            let g3 = boundary_curves(x, k).g3;
            let cap = 80f64.powi(-(k as i32));
            ensure(g3 < cap, || format!("x={x} k={k}: {g3} >= {cap}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} grid points"))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Check); 11] = [
        ("1 interior crossing constant", Duration::from_secs(1), interior_crossing),
        ("2 boundary crossing constant", Duration::from_secs(1), boundary_crossing),
        ("3 threshold consistency", Duration::from_secs(1), thresholds),
        ("4 two-set bound dominance", Duration::from_secs(60), lemma_dominance),
        ("5 lune area", Duration::from_secs(30), lune_monte_carlo),
        ("6 k-NN oracle equivalence", Duration::from_secs(60), knn_oracle),
        ("7 diameter oracle", Duration::from_secs(10), diameter_oracle),
        ("8 construction audit", Duration::from_secs(600), construction_audit),
        ("9 disc-blocking optimum", Duration::from_secs(1), disc_blocking),
        ("10 connectivity sweep", Duration::from_secs(900), connectivity_sweep),
        ("11 g3 tail bound", Duration::from_secs(1), g3_tail),
    ];
    let mut failed = 0;
    for (name, budget, f) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let took = start.elapsed();
        let result = match result {
            Ok(msg) if took > budget => Err(format!("{msg}; over the {budget:?} budget")),
            r => r,
        };
        match result {
            Ok(msg) => println!("[PASS] {name} ({:.2}s): {msg}", took.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("[FAIL] {name} ({:.2}s): {msg}", took.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
