//! Circumscribed hulls of a component, their bisector regions, k-NN discs
//! and the witness lune, plus an audit of the point-count facts these
//! regions must satisfy around a non-giant component.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::bounds::DEFAULT_SHRINK;
use crate::components::{nearest_outside_witness_in, Component};
use crate::geom::{disc_polygon_intersection_area, region_area, Aabb, ConvexPolygon, HalfPlane, Point, Region, Side, SquareWorld};
use crate::knngraph::NeighborGraph;
#[allow(unused_imports)]
use crate::math::MathExt;
use crate::sampling::PointSet;
use crate::spatial::SpatialGrid;
use crate::{Error, GEOM_TOL};

/// Monte Carlo budget for the (rare) witness lune that pokes out of the world.
const CLIPPED_LUNE_BUDGET: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Interior,
    /// Hull based on the given side of the square.
    Boundary(Side),
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Interior => "interior",
            Mode::Boundary(Side::Bottom) => "boundary-bottom",
            Mode::Boundary(Side::Right) => "boundary-right",
            Mode::Boundary(Side::Top) => "boundary-top",
            Mode::Boundary(Side::Left) => "boundary-left",
        }
    }

    /// Outward normal angles of the tangent lines, counter-clockwise.
    pub fn tangent_normal_angles(self) -> Vec<f64> {
        let deg = PI / 180.0;
        match self {
            Mode::Interior => [30.0, 90.0, 150.0, 210.0, 270.0, 330.0]
                .iter()
                .map(|a| a * deg)
                .collect(),
            Mode::Boundary(side) => {
                let base = side.outward_angle();
                [90.0, 150.0, 210.0, 270.0]
                    .iter()
                    .map(|a| base + a * deg)
                    .collect()
            }
        }
    }
}

/// Witness pair and the lune it spans.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessGeometry {
    pub p: Point,
    pub q: Point,
    pub r0: f64,
    /// `shrink * r0`, the radius fed into the bound curves.
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HullConstruction {
    pub mode: Mode,
    /// Supporting half-planes `{n_i . x <= h_i}`, counter-clockwise by normal.
    pub tangent_lines: Vec<HalfPlane>,
    /// In boundary mode, the half-plane bounded by the side `E`.
    pub base: Option<HalfPlane>,
    pub hull: ConvexPolygon,
    /// Hull of zero area (collinear or single-point input).
    pub degenerate: bool,
    /// `H_i`, one per tangent line; filled by [`bisector_regions`].
    pub bisector_regions: Vec<Region>,
    /// Index into the input of the point touching each tangent line.
    pub extremal_points: Vec<usize>,
    pub extremal_coords: Vec<Point>,
    /// `D_i` radii; filled by [`HullConstruction::attach_knn_discs`].
    pub knn_disc_radii: Vec<f64>,
    /// `A_i = D_i ∩ H_i`.
    pub regions: Vec<Region>,
    pub region_areas: Vec<f64>,
    /// Index `i` minimising `|D_i ∩ H|`.
    pub a0_index: Option<usize>,
    pub a0: Option<Region>,
    pub a0_area: f64,
    pub witness: Option<WitnessGeometry>,
    /// `D(Q, r0) \ D(P, r0)`, clipped to the world in boundary mode.
    pub b: Option<Region>,
    pub b_area: f64,
}

fn supporting_lines(points: &[Point], angles: &[f64]) -> (Vec<HalfPlane>, Vec<usize>) {
    let mut lines = Vec::with_capacity(angles.len());
    let mut ids = Vec::with_capacity(angles.len());
    for &a in angles {
        let n = Point::from_angle(a);
        let mut best = (f64::NEG_INFINITY, 0usize);
        for (i, p) in points.iter().enumerate() {
            let s = n.dot(*p);
            if s > best.0 {
                best = (s, i);
            }
        }
        lines.push(HalfPlane { normal: n, offset: best.0 });
        ids.push(best.1);
    }
    (lines, ids)
}

/// Polygon whose vertices are the meets of consecutive lines. Consecutive
/// normals are less than 180° apart and every line supports the set, so no
/// side has negative length; zero-length sides just repeat a vertex.
fn cyclic_polygon(lines: &[HalfPlane]) -> ConvexPolygon {
    let n = lines.len();
    let vertices = (0..n)
        .map(|i| {
            lines[i]
                .line_intersection(&lines[(i + 1) % n])
                .expect("consecutive tangent lines are not parallel")
        })
        .collect();
    ConvexPolygon::from_ccw(vertices)
}

fn build(points: &[Point], mode: Mode, base: Option<HalfPlane>, scale: f64) -> HullConstruction {
    let angles = mode.tangent_normal_angles();
    let (tangent_lines, extremal_points) = supporting_lines(points, &angles);
    let mut planes = tangent_lines.clone();
    planes.extend(base);
    let hull = cyclic_polygon(&planes);
    let degenerate = hull.area() <= GEOM_TOL * scale.max(1.0);
    HullConstruction {
        mode,
        extremal_coords: extremal_points.iter().map(|&i| points[i]).collect(),
        tangent_lines,
        base,
        hull,
        degenerate,
        bisector_regions: Vec::new(),
        extremal_points,
        knn_disc_radii: Vec::new(),
        regions: Vec::new(),
        region_areas: Vec::new(),
        a0_index: None,
        a0: None,
        a0_area: 0.0,
        witness: None,
        b: None,
        b_area: 0.0,
    }
}

/// Hexagon cut out by the two supporting lines in each of the directions
/// 0° and ±60° (outward normals at 30° + 60° j).
pub fn hexagon_hull(points: &[Point]) -> Result<HullConstruction, Error> {
    let bbox = Aabb::of_points(points).ok_or(Error::EmptyInput)?;
    Ok(build(points, Mode::Interior, None, bbox.width().max(bbox.height())))
}

/// The four supporting lines at 90° and ±30° to `side` that do not face it,
/// closed off by the line of `side` itself.
pub fn boundary_hull(
    points: &[Point],
    world: &SquareWorld,
    side: Side,
) -> Result<HullConstruction, Error> {
    let bbox = Aabb::of_points(points).ok_or(Error::EmptyInput)?;
    let base = world.inner_half_plane(side);
    let depth = points.iter().map(|&p| base.signed_distance(p).abs()).fold(0.0, f64::max);
    Ok(build(points, Mode::Boundary(side), Some(base), bbox.width().max(depth)))
}

/// Fills `H_i`: the part beyond tangent line `i` cut off by the exterior
/// angle bisectors at both ends of side `i` (and kept on the world's side of
/// `E` in boundary mode).
///
/// The bisector between consecutive lines `(n_i, h_i)`, `(n_j, h_j)` is
/// `(n_i - n_j) . x = h_i - h_j`, which stays meaningful when a side has
/// shrunk to a point.
pub fn bisector_regions(c: &mut HullConstruction) {
    let mut cycle: Vec<HalfPlane> = c.tangent_lines.clone();
    if let Some(b) = c.base {
        cycle.push(b);
    }
    let len = cycle.len();
    let mut out = Vec::with_capacity(c.tangent_lines.len());
    for i in 0..c.tangent_lines.len() {
        let li = cycle[i];
        let mut parts = vec![Region::HalfPlane(li.flipped())];
        for j in [(i + len - 1) % len, (i + 1) % len] {
            let lj = cycle[j];
            let d = lj.normal - li.normal;
            if d.norm() > 1e-12 {
                parts.push(Region::HalfPlane(HalfPlane::new(d, lj.offset - li.offset)));
            }
        }
        if let Some(b) = c.base {
            parts.push(Region::HalfPlane(b));
        }
        out.push(Region::Intersection(parts));
    }
    c.bisector_regions = out;
}

/// Whether `p` lies in `H_i` with every constraint satisfied by more than
/// `tol`.
fn strictly_inside(region: &Region, p: Point, tol: f64) -> bool {
    match region {
        Region::Intersection(parts) => parts.iter().all(|r| match r {
            Region::HalfPlane(h) => h.signed_distance(p) < -tol,
            other => other.contains(p),
        }),
        Region::HalfPlane(h) => h.signed_distance(p) < -tol,
        other => other.contains(p),
    }
}

impl HullConstruction {
    /// Adds `D_i` (radius `radii[i]` about `P_i`), `A_i` and `A_0`.
    pub fn attach_knn_discs(&mut self, radii: Vec<f64>) {
        if self.bisector_regions.is_empty() {
            bisector_regions(self);
        }
        self.regions.clear();
        self.region_areas.clear();
        let mut best: Option<(f64, usize)> = None;
        for (i, (&center, &r)) in self.extremal_coords.iter().zip(&radii).enumerate() {
            let a = Region::Intersection(vec![Region::disc(center, r), self.bisector_regions[i].clone()]);
            let area = a.exact_area().unwrap_or(0.0);
            self.regions.push(a);
            self.region_areas.push(area);
            let inside = disc_polygon_intersection_area(center, r, &self.hull);
            // equal areas within tolerance go to the smaller index
            let better = match best {
                None => true,
                Some((b, _)) => inside < b - GEOM_TOL * b.max(1.0),
            };
            if better {
                best = Some((inside, i));
            }
        }
        self.knn_disc_radii = radii;
        if let Some((area, i)) = best {
            self.a0_index = Some(i);
            self.a0_area = area;
            self.a0 = Some(Region::Intersection(vec![
                Region::disc(self.extremal_coords[i], self.knn_disc_radii[i]),
                Region::ConvexPolygon(self.hull.clone()),
            ]));
        }
    }

    /// Adds the witness pair and `B`.
    pub fn attach_witness(&mut self, p: Point, q: Point, r0: f64, shrink: f64, world: &SquareWorld) {
        let lune = Region::lune(q, p, r0);
        let inside = Aabb::around(q, r0);
        let clipped = matches!(self.mode, Mode::Boundary(_)) && !world.bounds().contains_box(&inside);
        let (b, b_area) = if clipped {
            let region = Region::Intersection(vec![lune, Region::ConvexPolygon(world.as_polygon())]);
            let seed = p.x.to_bits() ^ q.y.to_bits().rotate_left(17);
            let area = region_area(&region, CLIPPED_LUNE_BUDGET, Some(inside), seed)
                .map(|e| e.area)
                .unwrap_or(f64::NAN);
            (region, area)
        } else {
            let area = lune.exact_area().unwrap_or(f64::NAN);
            (lune, area)
        };
        self.witness = Some(WitnessGeometry { p, q, r0, r: shrink * r0 });
        self.b = Some(b);
        self.b_area = b_area;
    }

    /// `x = r / sqrt(|A_0| / pi)`.
    pub fn x(&self) -> f64 {
        match &self.witness {
            Some(w) if self.a0_area > 0.0 => w.r / (self.a0_area / PI).sqrt(),
            _ => f64::NAN,
        }
    }
}

/// Side nearest to the point set by minimum point distance; exact ties go
/// bottom, right, top, left.
pub fn nearest_side(world: &SquareWorld, points: &[Point]) -> Side {
    let mut best = (f64::INFINITY, Side::Bottom);
    for side in Side::ALL {
        let d = points
            .iter()
            .map(|&p| world.distance_to_side(p, side))
            .fold(f64::INFINITY, f64::min);
        if d < best.0 {
            best = (d, side);
        }
    }
    best.1
}

/// Interior if no point is within `margin` of a side, boundary mode on the
/// single side within `margin`, [`Error::AmbiguousSide`] for two or more.
pub fn select_mode(world: &SquareWorld, points: &[Point], margin: f64) -> Result<Mode, Error> {
    let near: Vec<Side> = Side::ALL
        .iter()
        .copied()
        .filter(|&s| points.iter().any(|&p| world.distance_to_side(p, s) < margin))
        .collect();
    match near.as_slice() {
        [] => Ok(Mode::Interior),
        [s] => Ok(Mode::Boundary(*s)),
        _ => Err(Error::AmbiguousSide),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fact {
    /// No point strictly inside any `A_i`.
    EmptyRegions,
    /// `A_0` holds at least `k + 1` points, all in the component.
    FullA0,
    /// `B` holds at least `k` points.
    FullB,
    /// `A_0 ∩ B` holds no point.
    DisjointA0B,
    /// No outside point is closer than `r0` to the component.
    EmptyNeighbourhood,
}

impl Fact {
    pub const ALL: [Fact; 5] = [
        Fact::EmptyRegions,
        Fact::FullA0,
        Fact::FullB,
        Fact::DisjointA0B,
        Fact::EmptyNeighbourhood,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Fact::EmptyRegions => "a",
            Fact::FullA0 => "b",
            Fact::FullB => "c",
            Fact::DisjointA0B => "d",
            Fact::EmptyNeighbourhood => "e",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactCheck {
    pub fact: Fact,
    pub passed: bool,
    /// Offending point, if any.
    pub witness: Option<Point>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub mode: Mode,
    pub k: usize,
    pub construction: HullConstruction,
    /// Points found in `A_0` and in `B`.
    pub a0_count: usize,
    pub b_count: usize,
    pub facts: [FactCheck; 5],
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.facts.iter().all(|f| f.passed)
    }

    pub fn fact(&self, f: Fact) -> &FactCheck {
        &self.facts[f as usize]
    }

    pub fn x(&self) -> f64 {
        self.construction.x()
    }
}

/// Audits components of one sample against the sample's points and,
/// optionally, extra planted points that do not belong to the graph.
pub struct Auditor<'a> {
    points: &'a PointSet,
    graph: &'a NeighborGraph,
    grid: SpatialGrid<'a>,
    extra: Vec<Point>,
    shrink: f64,
    tol: f64,
}

impl<'a> Auditor<'a> {
    pub fn new(points: &'a PointSet, graph: &'a NeighborGraph) -> Self {
        Self {
            points,
            graph,
            grid: SpatialGrid::new(&points.points, 2.0),
            extra: Vec::new(),
            shrink: DEFAULT_SHRINK,
            tol: GEOM_TOL,
        }
    }

    /// Points treated as part of the process but outside every component.
    pub fn with_extra_points(mut self, extra: Vec<Point>) -> Self {
        self.extra = extra;
        self
    }

    pub fn with_shrink(mut self, shrink: f64) -> Self {
        self.shrink = shrink;
        self
    }

    /// Full construction and fact checks for the component `vertices`.
    pub fn audit(&self, vertices: &[usize], mode: Mode) -> Result<AuditReport, Error> {
        let m = self.graph.vertex_count();
        if vertices.is_empty() {
            return Err(Error::EmptyComponent);
        }
        let mut member = vec![false; m];
        for &v in vertices {
            *member.get_mut(v).ok_or(Error::VertexOutOfRange(v))? = true;
        }
        let world = self.points.world;
        let pts = &self.points.points;
        let coords: Vec<Point> = vertices.iter().map(|&v| pts[v]).collect();
        let mut c = match mode {
            Mode::Interior => hexagon_hull(&coords)?,
            Mode::Boundary(side) => boundary_hull(&coords, &world, side)?,
        };
        for id in c.extremal_points.iter_mut() {
            *id = vertices[*id];
        }
        bisector_regions(&mut c);
        let radii = c
            .extremal_points
            .iter()
            .map(|&v| crate::knngraph::kth_neighbor_radius(self.graph, self.points, v))
            .collect::<Result<Vec<_>, _>>()?;
        c.attach_knn_discs(radii);
        let w = nearest_outside_witness_in(&self.grid, m, vertices)?;
        c.attach_witness(pts[w.p], pts[w.q], w.r0, self.shrink, &world);

        let k = self.graph.k();
        let tol = self.tol;
        let r0 = w.r0;
        let (pp, qp) = (pts[w.p], pts[w.q]);
        let i0 = c.a0_index.expect("at least one tangent line");
        let (c0, rad0) = (c.extremal_coords[i0], c.knn_disc_radii[i0]);

        // (a)
        let mut fact_a = pass(Fact::EmptyRegions);
        'regions: for (i, region) in c.bisector_regions.iter().enumerate() {
            let (ci, ri) = (c.extremal_coords[i], c.knn_disc_radii[i]);
            let reach = ri - tol;
            if reach <= 0.0 {
                continue;
            }
            let mut hit = None;
            self.grid.for_each_within(ci, reach, |j, d2| {
                if hit.is_none() && d2 < reach * reach && strictly_inside(region, pts[j], tol) {
                    hit = Some(j);
                }
            });
            if let Some(j) = hit {
                fact_a = fail(Fact::EmptyRegions, pts[j], format!("vertex {j} inside A_{}", i + 1));
                break 'regions;
            }
            for &e in &self.extra {
                if ci.dist(e) < reach && strictly_inside(region, e, tol) {
                    fact_a = fail(Fact::EmptyRegions, e, format!("planted point inside A_{}", i + 1));
                    break 'regions;
                }
            }
        }

        // (b)
        let mut a0_count = 0;
        let mut stray = None;
        self.grid.for_each_within(c0, rad0 + tol, |j, _| {
            if c.hull.contains_tol(pts[j], tol) {
                a0_count += 1;
                if !member[j] && stray.is_none() {
                    stray = Some(j);
                }
            }
        });
        let fact_b = match stray {
            Some(j) => fail(Fact::FullA0, pts[j], format!("vertex {j} in A_0 outside the component")),
            None if a0_count < k + 1 => fail(
                Fact::FullA0,
                c0,
                format!("A_0 holds {a0_count} points, need {}", k + 1),
            ),
            None => pass(Fact::FullA0),
        };

        // (c)
        let mut b_count = 0;
        self.grid.for_each_within(qp, r0 + tol, |j, _| {
            if j != w.q && pp.dist(pts[j]) > r0 - tol {
                b_count += 1;
            }
        });
        let fact_c = if b_count >= k {
            pass(Fact::FullB)
        } else {
            fail(Fact::FullB, qp, format!("B holds {b_count} points, need {k}"))
        };

        // (d)
        let in_a0_b = |p: Point| {
            c0.dist(p) <= rad0 + tol
                && c.hull.contains_tol(p, tol)
                && qp.dist(p) < r0 - tol
                && pp.dist(p) > r0 + tol
        };
        let mut fact_d = pass(Fact::DisjointA0B);
        let mut hit = None;
        self.grid.for_each_within(qp, r0, |j, _| {
            if hit.is_none() && in_a0_b(pts[j]) {
                hit = Some(j);
            }
        });
        if let Some(j) = hit {
            fact_d = fail(Fact::DisjointA0B, pts[j], format!("vertex {j} in A_0 ∩ B"));
        } else if let Some(&e) = self.extra.iter().find(|&&e| in_a0_b(e)) {
            fact_d = fail(Fact::DisjointA0B, e, String::from("planted point in A_0 ∩ B"));
        }

        // (e)
        let reach = r0 - tol;
        let mut fact_e = pass(Fact::EmptyNeighbourhood);
        'outer: for &v in vertices {
            let mut hit = None;
            if reach > 0.0 {
                self.grid.for_each_within(pts[v], reach, |j, d2| {
                    if hit.is_none() && !member[j] && d2 < reach * reach {
                        hit = Some(j);
                    }
                });
            }
            if let Some(j) = hit {
                fact_e = fail(
                    Fact::EmptyNeighbourhood,
                    pts[j],
                    format!("vertex {j} within r0 of vertex {v}"),
                );
                break 'outer;
            }
            for &e in &self.extra {
                if pts[v].dist(e) < reach {
                    fact_e = fail(
                        Fact::EmptyNeighbourhood,
                        e,
                        format!("planted point within r0 of vertex {v}"),
                    );
                    break 'outer;
                }
            }
        }

        Ok(AuditReport {
            mode,
            k,
            construction: c,
            a0_count,
            b_count,
            facts: [fact_a, fact_b, fact_c, fact_d, fact_e],
        })
    }

    /// Audits a census component, rejecting the giant.
    pub fn audit_component(&self, component: &Component, mode: Mode) -> Result<AuditReport, Error> {
        if component.is_giant {
            return Err(Error::GiantComponent);
        }
        self.audit(&component.vertices, mode)
    }
}

fn pass(fact: Fact) -> FactCheck {
    FactCheck {
        fact,
        passed: true,
        witness: None,
        detail: String::new(),
    }
}

fn fail(fact: Fact, at: Point, detail: String) -> FactCheck {
    FactCheck {
        fact,
        passed: false,
        witness: Some(at),
        detail,
    }
}

/// One-shot audit of a non-giant component.
pub fn audit_component(
    points: &PointSet,
    graph: &NeighborGraph,
    component: &Component,
    mode: Mode,
) -> Result<AuditReport, Error> {
    Auditor::new(points, graph).audit_component(component, mode)
}

/// One-shot audit against the sample plus extra planted points.
pub fn audit_component_against(
    points: &PointSet,
    graph: &NeighborGraph,
    vertices: &[usize],
    mode: Mode,
    extra: Vec<Point>,
) -> Result<AuditReport, Error> {
    Auditor::new(points, graph)
        .with_extra_points(extra)
        .audit(vertices, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::{census, CensusParams};
    use crate::knngraph::build_graph;
    use crate::sampling::{stream_rng, unit_f64};

    fn regular_hexagon(center: Point, apothem: f64) -> Vec<Point> {
        // flat sides with outward normals at 30° + 60° j
        let r = apothem * 2.0 / 3f64.sqrt();
        (0..6)
            .map(|j| center + Point::from_angle(j as f64 * PI / 3.0) * r)
            .collect()
    }

    #[test]
    fn single_point_hexagon_is_degenerate() {
        let p = Point::new(2.0, 3.0);
        let c = hexagon_hull(&[p]).unwrap();
        assert_eq!(c.tangent_lines.len(), 6);
        assert!(c.degenerate);
        assert!(c.hull.area().abs() < 1e-12);
        for l in &c.tangent_lines {
            assert!(l.signed_distance(p).abs() < 1e-12);
        }
        assert!(hexagon_hull(&[]).is_err());
    }

    #[test]
    fn regular_hexagon_is_its_own_hull() {
        let pts = regular_hexagon(Point::new(5.0, 5.0), 2.0);
        let c = hexagon_hull(&pts).unwrap();
        assert!((c.hull.area() - 6.0 * 4.0 / 3f64.sqrt()).abs() < 1e-9);
        for l in &c.tangent_lines {
            let touching = pts.iter().filter(|p| l.signed_distance(**p).abs() < 1e-9).count();
            assert_eq!(touching, 2);
        }
        for p in &pts {
            assert!(c.hull.contains_tol(*p, 1e-9));
        }
    }

    #[test]
    fn bisector_regions_are_disjoint_and_hold_normals() {
        let pts = regular_hexagon(Point::new(0.0, 0.0), 1.0);
        let mut c = hexagon_hull(&pts).unwrap();
        bisector_regions(&mut c);
        let mut rng = stream_rng(4);
        for _ in 0..100_000 {
            let p = Point::new(20.0 * unit_f64(&mut rng) - 10.0, 20.0 * unit_f64(&mut rng) - 10.0);
            let hits = c.bisector_regions.iter().filter(|r| strictly_inside(r, p, 0.0)).count();
            assert!(hits <= 1);
        }
        for (i, l) in c.tangent_lines.iter().enumerate() {
            let mid = l.normal * l.offset + l.normal * 1e-6;
            for (j, r) in c.bisector_regions.iter().enumerate() {
                assert_eq!(r.contains(mid), i == j);
            }
        }
    }

    #[test]
    fn boundary_single_point_pinches_onto_side() {
        let world = SquareWorld::new(100.0).unwrap();
        let p = Point::new(4.0, 1.5);
        let c = boundary_hull(&[p], &world, Side::Bottom).unwrap();
        assert_eq!(c.tangent_lines.len(), 4);
        assert!(c.degenerate);
        assert!(c.hull.contains_tol(p, 1e-9));
        assert!(c.hull.contains_tol(Point::new(4.0, 0.0), 1e-9));
    }

    #[test]
    fn side_selection() {
        let world = SquareWorld::new(100.0).unwrap();
        assert_eq!(nearest_side(&world, &[Point::new(5.0, 1.0)]), Side::Bottom);
        assert_eq!(nearest_side(&world, &[Point::new(9.0, 5.0)]), Side::Right);
        // corner point: equal distances, bottom wins
        assert_eq!(nearest_side(&world, &[Point::new(1.0, 1.0)]), Side::Bottom);
        let mid = [Point::new(5.0, 5.0)];
        assert_eq!(select_mode(&world, &mid, 2.0), Ok(Mode::Interior));
        assert_eq!(select_mode(&world, &[Point::new(5.0, 9.5)], 2.0), Ok(Mode::Boundary(Side::Top)));
        assert_eq!(select_mode(&world, &[Point::new(1.0, 1.0)], 2.0), Err(Error::AmbiguousSide));
    }

    /// `k + 1` points in a tight cluster far from a grid of other points.
    fn cluster_instance(k: usize) -> (PointSet, Vec<usize>) {
        let world = SquareWorld::new(400.0).unwrap();
        let mut pts = Vec::new();
        for i in 0..10 {
            for j in 0..10 {
                let (x, y) = (i as f64 * 2.0 + 0.5, j as f64 * 2.0 + 0.5);
                if (x - 10.5).abs() < 7.0 && (y - 10.5).abs() < 7.0 {
                    continue;
                }
                pts.push(Point::new(x + 0.01 * j as f64, y + 0.013 * i as f64));
            }
        }
        let start = pts.len();
        let center = Point::new(10.3, 10.4);
        for j in 0..=k {
            pts.push(center + Point::from_angle(0.7 + j as f64 * 2.0 * PI / (k + 1) as f64) * (0.3 + 0.02 * j as f64));
        }
        (PointSet::from_points(world, pts), (start..start + k + 1).collect())
    }

    #[test]
    fn cluster_instance_passes_every_fact() {
        let k = 3;
        let (ps, cluster) = cluster_instance(k);
        let g = build_graph(&ps, k).unwrap();
        let cen = census(&g, &ps, CensusParams::defaults(ps.world.area()));
        let comp = cen
            .components
            .iter()
            .find(|c| c.vertices == cluster)
            .expect("cluster is its own component");
        let report = audit_component(&ps, &g, comp, Mode::Interior).unwrap();
        for f in &report.facts {
            assert!(f.passed, "{:?}: {}", f.fact, f.detail);
        }
        assert!(report.a0_count >= k + 1);
        let c = &report.construction;
        let lune = (PI / 3.0 + 3f64.sqrt() / 2.0) * c.witness.as_ref().unwrap().r0.powi(2);
        assert!((c.b_area - lune).abs() < 1e-9 * lune);
        for a in &c.region_areas {
            assert!(*a >= c.a0_area * (1.0 - 1e-9));
        }

        let giant = cen.giant();
        assert_eq!(audit_component(&ps, &g, giant, Mode::Interior), Err(Error::GiantComponent));
    }

    #[test]
    fn planted_point_breaks_empty_regions() {
        let k = 3;
        let (ps, cluster) = cluster_instance(k);
        let g = build_graph(&ps, k).unwrap();
        let base = Auditor::new(&ps, &g).audit(&cluster, Mode::Interior).unwrap();
        let c = &base.construction;
        let l = c.tangent_lines[2];
        let plant = c.extremal_coords[2] + l.normal * (c.knn_disc_radii[2] / 2.0);
        let r = audit_component_against(&ps, &g, &cluster, Mode::Interior, vec![plant]).unwrap();
        let a = r.fact(Fact::EmptyRegions);
        assert!(!a.passed);
        assert_eq!(a.witness, Some(plant));
    }
}
