use alloc::vec::Vec;

use super::{Aabb, HalfPlane, Point};
#[allow(unused_imports)]
use crate::math::MathExt;
use crate::{Error, GEOM_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HullKind {
    /// All inputs coincide.
    Point,
    /// All inputs are collinear; `vertices` holds the two endpoints.
    Segment,
    Polygon,
}

/// Convex polygon with vertices in counter-clockwise order.
///
/// Degenerate polygons (a point or a segment) are allowed and flagged by
/// [`HullKind`]; they have zero area.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
    kind: HullKind,
}

impl ConvexPolygon {
    /// Wraps vertices already in counter-clockwise convex position.
    pub fn from_ccw(vertices: Vec<Point>) -> Self {
        let kind = match vertices.len() {
            0 | 1 => HullKind::Point,
            2 => HullKind::Segment,
            _ => {
                if signed_area(&vertices) > 0.0 {
                    HullKind::Polygon
                } else {
                    HullKind::Segment
                }
            }
        };
        Self { vertices, kind }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn kind(&self) -> HullKind {
        self.kind
    }

    pub fn is_degenerate(&self) -> bool {
        self.kind != HullKind::Polygon
    }

    pub fn area(&self) -> f64 {
        if self.is_degenerate() {
            0.0
        } else {
            signed_area(&self.vertices)
        }
    }

    pub fn bounding_box(&self) -> Option<Aabb> {
        Aabb::of_points(&self.vertices)
    }

    /// Edges as `(start, end)` pairs in counter-clockwise order.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Closed membership with absolute tolerance `tol`.
    pub fn contains_tol(&self, p: Point, tol: f64) -> bool {
        match self.kind {
            HullKind::Point | HullKind::Segment => self.distance_to(p) <= tol,
            // edges no longer than `tol` have no reliable direction
            HullKind::Polygon => self.edges().all(|(a, b)| {
                let e = b - a;
                let len = e.norm();
                len <= tol || e.cross(p - a) >= -tol * len
            }),
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.contains_tol(p, 0.0)
    }

    /// Euclidean distance from `p` to the polygon (0 inside).
    pub fn distance_to(&self, p: Point) -> f64 {
        match self.vertices.len() {
            0 => f64::INFINITY,
            1 => p.dist(self.vertices[0]),
            _ => {
                if self.kind == HullKind::Polygon && self.contains(p) {
                    return 0.0;
                }
                self.edges()
                    .map(|(a, b)| segment_distance(p, a, b))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Clips against a closed half-plane (Sutherland-Hodgman).
    pub fn clip(&self, h: &HalfPlane) -> ConvexPolygon {
        let n = self.vertices.len();
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let da = h.signed_distance(a);
            let db = h.signed_distance(b);
            if da <= 0.0 {
                out.push(a);
            }
            if (da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0) {
                let t = da / (da - db);
                out.push(a + (b - a) * t);
            }
        }
        ConvexPolygon::from_ccw(out)
    }

    /// Intersection with another convex polygon.
    pub fn clip_polygon(&self, other: &ConvexPolygon) -> ConvexPolygon {
        let mut cur = self.clone();
        for h in other.half_planes() {
            if cur.vertices.is_empty() {
                break;
            }
            cur = cur.clip(&h);
        }
        cur
    }

    /// Supporting half-planes of a non-degenerate polygon.
    pub fn half_planes(&self) -> Vec<HalfPlane> {
        self.edges()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| HalfPlane::through(a, -(b - a).perp()))
            .collect()
    }
}

fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    let twice: f64 = (0..n).map(|i| v[i].cross(v[(i + 1) % n])).sum();
    0.5 * twice
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.norm2();
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

#[inline]
fn turn(o: Point, a: Point, b: Point) -> f64 {
    (a - o).cross(b - o)
}

/// Minimal convex polygon containing `points` (Andrew's monotone chain).
///
/// Collinear boundary points are dropped, so every returned vertex is an
/// input point and a strict extreme point.
pub fn convex_hull(points: &[Point]) -> Result<ConvexPolygon, Error> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() == 1 {
        return Ok(ConvexPolygon {
            vertices: pts,
            kind: HullKind::Point,
        });
    }

    let mut hull: Vec<Point> = Vec::with_capacity(pts.len() + 1);
    for &p in &pts {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();

    if hull.len() <= 2 {
        let first = pts[0];
        let last = pts[pts.len() - 1];
        return Ok(ConvexPolygon {
            vertices: alloc::vec![first, last],
            kind: HullKind::Segment,
        });
    }
    Ok(ConvexPolygon {
        vertices: hull,
        kind: HullKind::Polygon,
    })
}

/// Largest pairwise distance, via the hull and rotating calipers.
///
/// Returns 0 for an empty or single-point set.
pub fn euclidean_diameter(points: &[Point]) -> f64 {
    let Ok(hull) = convex_hull(points) else {
        return 0.0;
    };
    let h = hull.vertices();
    let n = h.len();
    match n {
        1 => return 0.0,
        2 => return h[0].dist(h[1]),
        _ => {}
    }
    let mut best = 0.0f64;
    let mut j = 1usize;
    for i in 0..n {
        let ni = (i + 1) % n;
        loop {
            let nj = (j + 1) % n;
            if turn(h[i], h[ni], h[nj]) > turn(h[i], h[ni], h[j]) {
                j = nj;
            } else {
                break;
            }
        }
        let nj = (j + 1) % n;
        for &a in &[h[i], h[ni]] {
            best = best.max(a.dist2(h[j])).max(a.dist2(h[nj]));
        }
    }
    best.sqrt()
}

/// Smallest closed disc containing all `points`, as `(center, radius)`.
pub fn min_enclosing_disc(points: &[Point]) -> Result<(Point, f64), Error> {
    let first = *points.first().ok_or(Error::EmptyInput)?;
    let inside = |c: Point, r: f64, p: Point| p.dist(c) <= r + GEOM_TOL * (1.0 + r);
    let (mut c, mut r) = (first, 0.0);
    for i in 1..points.len() {
        if inside(c, r, points[i]) {
            continue;
        }
        c = points[i];
        r = 0.0;
        for j in 0..i {
            if inside(c, r, points[j]) {
                continue;
            }
            c = (points[i] + points[j]) * 0.5;
            r = points[i].dist(c);
            for l in 0..j {
                if inside(c, r, points[l]) {
                    continue;
                }
                (c, r) = circle_through(points[i], points[j], points[l]);
            }
        }
    }
    Ok((c, r))
}

fn circle_through(a: Point, b: Point, c: Point) -> (Point, f64) {
    let ab = b - a;
    let ac = c - a;
    let d = 2.0 * ab.cross(ac);
    if d.abs() < 1e-300 {
        // collinear: the disc on the farthest pair
        let pairs = [(a, b), (a, c), (b, c)];
        let (p, q) = pairs
            .iter()
            .copied()
            .max_by(|x, y| x.0.dist2(x.1).total_cmp(&y.0.dist2(y.1)))
            .unwrap();
        let m = (p + q) * 0.5;
        return (m, p.dist(m));
    }
    let ux = (ac.y * ab.norm2() - ab.y * ac.norm2()) / d;
    let uy = (ab.x * ac.norm2() - ac.x * ab.norm2()) / d;
    let center = a + Point::new(ux, uy);
    (center, center.dist(a))
}
