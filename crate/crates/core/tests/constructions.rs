use std::f64::consts::PI;

use knnlab_core::components::{census, length_scale, CensusParams};
use knnlab_core::constructions::{
    bisector_regions, boundary_hull, hexagon_hull, select_mode, Auditor, Fact, Mode,
};
use knnlab_core::geom::{Point, Region, Side, SquareWorld};
use knnlab_core::knngraph::build_graph;
use knnlab_core::sampling::{derive_trial_seed, sample_poisson_square, stream_rng, unit_f64};
use knnlab_core::Error;
use proptest::prelude::*;

fn reflect(p: Point, axis_x: f64) -> Point {
    Point::new(2.0 * axis_x - p.x, p.y)
}

/// Points strictly inside `region` are those satisfying its membership test
/// after a tiny inward step; sampling boundaries have measure zero.
fn in_region(r: &Region, p: Point) -> bool {
    r.contains(p)
}

#[test]
fn bisector_regions_partition_outside_of_random_hulls() {
    let mut rng = stream_rng(21);
    for trial in 0..20 {
        let m = 1 + trial * 3;
        let pts: Vec<Point> = (0..m)
            .map(|_| Point::new(4.0 * unit_f64(&mut rng) + 3.0, 4.0 * unit_f64(&mut rng) + 3.0))
            .collect();
        let world = SquareWorld::new(100.0).unwrap();
        for mut c in [hexagon_hull(&pts).unwrap(), boundary_hull(&pts, &world, Side::Bottom).unwrap()] {
            bisector_regions(&mut c);
            for _ in 0..10_000 {
                let p = Point::new(30.0 * unit_f64(&mut rng) - 10.0, 30.0 * unit_f64(&mut rng) - 10.0);
                let hits = c.bisector_regions.iter().filter(|r| in_region(r, p)).count();
                // boundaries are shared, interiors are not: only count robust hits
                let robust = c
                    .bisector_regions
                    .iter()
                    .filter(|r| {
                        in_region(r, p)
                            && [(1e-7, 0.0), (-1e-7, 0.0), (0.0, 1e-7), (0.0, -1e-7)]
                                .iter()
                                .all(|&(dx, dy)| in_region(r, p + Point::new(dx, dy)))
                    })
                    .count();
                assert!(robust <= 1, "{hits}");
                if c.hull.contains_tol(p, -1e-9) {
                    assert_eq!(robust, 0);
                }
            }
        }
    }
}

#[test]
fn boundary_hull_is_reflection_symmetric() {
    let world = SquareWorld::new(400.0).unwrap();
    let axis = 10.0;
    let mut rng = stream_rng(8);
    let mut pts = Vec::new();
    for _ in 0..15 {
        let p = Point::new(axis + 3.0 * unit_f64(&mut rng), 0.5 + 4.0 * unit_f64(&mut rng));
        pts.push(p);
        pts.push(reflect(p, axis));
    }
    let mut c = boundary_hull(&pts, &world, Side::Bottom).unwrap();
    bisector_regions(&mut c);
    for v in c.hull.vertices() {
        assert!(c.hull.contains_tol(reflect(*v, axis), 1e-9));
    }
    // H_1 (normal at 0°) mirrors H_4 (normal at 180°), H_2 mirrors H_3
    for _ in 0..20_000 {
        let p = Point::new(40.0 * unit_f64(&mut rng) - 10.0, 20.0 * unit_f64(&mut rng));
        let q = reflect(p, axis);
        for (i, j) in [(0, 3), (1, 2)] {
            let a = c.bisector_regions[i].contains(p);
            let b = c.bisector_regions[j].contains(q);
            if a != b {
                // only allowed within rounding of a boundary
                let near = [(1e-9, 0.0), (-1e-9, 0.0), (0.0, 1e-9), (0.0, -1e-9)]
                    .iter()
                    .any(|&(dx, dy)| c.bisector_regions[j].contains(q + Point::new(dx, dy)) == a);
                assert!(near);
            }
        }
    }
}

#[test]
fn boundary_hull_of_points_near_side() {
    let world = SquareWorld::new(2500.0).unwrap();
    let mut rng = stream_rng(31);
    let pts: Vec<Point> = (0..50)
        .map(|_| Point::new(20.0 + 5.0 * unit_f64(&mut rng), 0.2 + 3.0 * unit_f64(&mut rng)))
        .collect();
    let c = boundary_hull(&pts, &world, Side::Bottom).unwrap();
    assert_eq!(c.tangent_lines.len(), 4);
    for p in &pts {
        assert!(c.hull.contains_tol(*p, 1e-9));
    }
    for (l, &i) in c.tangent_lines.iter().zip(&c.extremal_points) {
        assert!(l.signed_distance(pts[i]).abs() < 1e-9);
        assert!(pts.iter().all(|p| l.signed_distance(*p) <= 1e-12));
    }
    // H reaches down to the side
    assert!(c.hull.vertices().iter().any(|v| v.y.abs() < 1e-9));
}

#[test]
fn two_near_sides_are_ambiguous() {
    let world = SquareWorld::new(1e4).unwrap();
    let pts = [Point::new(1.0, 50.0), Point::new(99.0, 50.0)];
    assert_eq!(select_mode(&world, &pts, 5.0), Err(Error::AmbiguousSide));
}

/// Audits every non-giant component of a batch of simulated samples.
fn audit_batch(area: f64, c: f64, trials: u64, seed: u64) -> (usize, usize) {
    let world = SquareWorld::new(area).unwrap();
    let k = (c * area.ln()).ceil() as usize;
    let margin = 2.0 * length_scale(area) * 1.0;
    let (mut audited, mut boundary) = (0, 0);
    for t in 0..trials {
        let ps = sample_poisson_square(world, derive_trial_seed(seed, t));
        let g = build_graph(&ps, k).unwrap();
        let cen = census(&g, &ps, CensusParams::defaults(area));
        let auditor = Auditor::new(&ps, &g);
        for comp in cen.components.iter().filter(|c| !c.is_giant) {
            let coords: Vec<Point> = comp.vertices.iter().map(|&v| ps[v]).collect();
            let mode = match select_mode(&world, &coords, margin) {
                Ok(m) => m,
                Err(Error::AmbiguousSide) => continue,
                Err(e) => panic!("{e}"),
            };
            let r = auditor.audit_component(comp, mode).unwrap();
            for f in &r.facts {
                assert!(f.passed, "trial {t} comp {}: {:?} {}", comp.id, f.fact, f.detail);
            }
            let cons = &r.construction;
            let discs_inside = cons
                .extremal_coords
                .iter()
                .zip(&cons.knn_disc_radii)
                .all(|(p, r)| world.boundary_distance(*p) > *r);
            match mode {
                Mode::Interior => {
                    if discs_inside {
                        for a in &cons.region_areas {
                            assert!(*a >= cons.a0_area * (1.0 - 1e-9) - 1e-12);
                        }
                    }
                    let sum: f64 = cons.region_areas.iter().sum();
                    assert!(sum >= 6.0 * cons.a0_area * (1.0 - 1e-9) - 1e-12);
                }
                Mode::Boundary(_) => {
                    boundary += 1;
                    let sum: f64 = cons.region_areas.iter().sum();
                    assert!(sum >= 4.0 * cons.a0_area * (1.0 - 1e-9) - 1e-12);
                }
            }
            let w = cons.witness.as_ref().unwrap();
            let lune = (PI / 3.0 + 3f64.sqrt() / 2.0) * w.r0 * w.r0;
            if mode == Mode::Interior {
                assert!((cons.b_area - lune).abs() <= 1e-9 * lune);
            }
            audited += 1;
        }
    }
    (audited, boundary)
}

#[test]
fn simulated_components_pass_audit() {
    let (audited, boundary) = audit_batch(1e4, 0.3, 100, 2024);
    assert!(audited > 0);
    assert!(boundary > 0);
}

#[test]
fn planted_point_is_reported() {
    let world = SquareWorld::new(1e4).unwrap();
    let k = 3;
    for t in 0..50 {
        let ps = sample_poisson_square(world, derive_trial_seed(5, t));
        let g = build_graph(&ps, k).unwrap();
        let cen = census(&g, &ps, CensusParams::defaults(world.area()));
        let Some(comp) = cen.components.iter().find(|c| !c.is_giant && c.min_boundary_distance > 20.0) else {
            continue;
        };
        let base = Auditor::new(&ps, &g).audit_component(comp, Mode::Interior).unwrap();
        let c = &base.construction;
        let plant = c.extremal_coords[0] + c.tangent_lines[0].normal * (c.knn_disc_radii[0] / 2.0);
        let r = Auditor::new(&ps, &g)
            .with_extra_points(vec![plant])
            .audit_component(comp, Mode::Interior)
            .unwrap();
        assert!(!r.fact(Fact::EmptyRegions).passed);
        assert_eq!(r.fact(Fact::EmptyRegions).witness, Some(plant));
        return;
    }
    panic!("no interior component found");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn hexagon_contains_and_touches(
        coords in prop::collection::vec((0.0f64..20.0, 0.0f64..20.0), 1..60),
    ) {
        let pts: Vec<Point> = coords.iter().map(|&(x, y)| Point::new(x, y)).collect();
        let mut c = hexagon_hull(&pts).unwrap();
        bisector_regions(&mut c);
        for p in &pts {
            prop_assert!(c.hull.contains_tol(*p, 1e-9));
        }
        for (i, (l, &id)) in c.tangent_lines.iter().zip(&c.extremal_points).enumerate() {
            let s = l.signed_distance(pts[id]);
            prop_assert!(s.abs() < 1e-9);
            // lowest id among the points on the line
            let first = pts.iter().position(|p| l.normal.dot(*p) == l.offset).unwrap();
            prop_assert_eq!(first, id);
            // outward nudge from the side midpoint lands in H_i only
            let hv = c.hull.vertices();
            let (a, b) = (hv[(i + 5) % 6], hv[i]);
            let mid = (a + b) * 0.5 + l.normal * 1e-6;
            for (j, r) in c.bisector_regions.iter().enumerate() {
                if j != i {
                    prop_assert!(!r.contains(mid + l.normal * 1e-6) || (a - b).norm() < 1e-6);
                }
            }
            prop_assert!(c.bisector_regions[i].contains(mid));
        }
    }
}
