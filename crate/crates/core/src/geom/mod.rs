//! Planar geometry: points, the square world, half-planes, hulls, regions
//! and their areas.

mod area;
mod hull;
mod region;

use core::ops::{Add, Mul, Neg, Sub};

#[allow(unused_imports)]

use crate::math::MathExt;
use crate::Error;

pub use area::{
    blowup_excess_lower_bound, disc_polygon_intersection_area, lens_area, lune_area,
    monte_carlo_area, region_area, AreaEstimate, BlowupMode, MIN_QUADRATURE_BUDGET,
};
pub use hull::{convex_hull, euclidean_diameter, min_enclosing_disc, ConvexPolygon, HullKind};
pub use region::Region;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector at `angle` radians from the positive x-axis.
    #[inline]
    pub fn from_angle(angle: f64) -> Self {
        Self::new(angle.cos(), angle.sin())
    }

    #[inline]
    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 2-D cross product.
    #[inline]
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Squared distance. Hot paths compare these instead of true lengths.
    #[inline]
    pub fn dist2(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn dist(self, other: Point) -> f64 {
        self.dist2(other).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Counter-clockwise rotation by 90 degrees.
    #[inline]
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Point {
        let n = self.norm();
        Point::new(self.x / n, self.y / n)
    }
}

impl Add for Point {
    type Output = Point;
    #[inline]
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Point {
    type Output = Point;
    #[inline]
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    #[inline]
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// One side of the square world.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Bottom,
    Right,
    Top,
    Left,
}

impl Side {
    /// Fixed tie-break order used whenever a "nearest side" is ambiguous.
    pub const ALL: [Side; 4] = [Side::Bottom, Side::Right, Side::Top, Side::Left];

    /// Angle of the normal pointing out of the square, in radians.
    pub fn outward_angle(self) -> f64 {
        use core::f64::consts::{FRAC_PI_2, PI};
        match self {
            Side::Bottom => 3.0 * FRAC_PI_2,
            Side::Right => 0.0,
            Side::Top => FRAC_PI_2,
            Side::Left => PI,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Bottom => "bottom",
            Side::Right => "right",
            Side::Top => "top",
            Side::Left => "left",
        }
    }
}

/// The square `[0, side]^2` of area `area_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareWorld {
    area_n: f64,
    side: f64,
}

impl SquareWorld {
    pub fn new(area_n: f64) -> Result<Self, Error> {
        if !(area_n.is_finite() && area_n > 0.0) {
            return Err(Error::InvalidWorld(area_n));
        }
        Ok(Self {
            area_n,
            side: area_n.sqrt(),
        })
    }

    #[inline]
    pub fn area(&self) -> f64 {
        self.area_n
    }

    #[inline]
    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn bounds(&self) -> Aabb {
        Aabb::new(Point::new(0.0, 0.0), Point::new(self.side, self.side))
    }

    pub fn contains(&self, p: Point) -> bool {
        self.bounds().contains(p)
    }

    pub fn distance_to_side(&self, p: Point, side: Side) -> f64 {
        match side {
            Side::Bottom => p.y,
            Side::Right => self.side - p.x,
            Side::Top => self.side - p.y,
            Side::Left => p.x,
        }
    }

    /// Distance from `p` to the nearest side of the square.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        Side::ALL
            .iter()
            .map(|&s| self.distance_to_side(p, s))
            .fold(f64::INFINITY, f64::min)
    }

    /// The half-plane bounded by `side` that contains the square.
    pub fn inner_half_plane(&self, side: Side) -> HalfPlane {
        let offset = match side {
            Side::Bottom | Side::Left => 0.0,
            Side::Right | Side::Top => self.side,
        };
        HalfPlane::from_angle(side.outward_angle(), offset)
    }

    pub fn as_polygon(&self) -> ConvexPolygon {
        self.bounds().to_polygon()
    }
}

/// Axis-aligned box `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Point,
    pub max: Point,
}

impl Aabb {
    pub const fn new(min: Point, max: Point) -> Self {
        Self { min, max }
    }

    pub fn around(center: Point, half: f64) -> Self {
        Self::new(
            Point::new(center.x - half, center.y - half),
            Point::new(center.x + half, center.y + half),
        )
    }

    pub fn of_points(points: &[Point]) -> Option<Self> {
        let first = *points.first()?;
        let mut b = Aabb::new(first, first);
        for p in &points[1..] {
            b.min.x = b.min.x.min(p.x);
            b.min.y = b.min.y.min(p.y);
            b.max.x = b.max.x.max(p.x);
            b.max.y = b.max.y.max(p.y);
        }
        Some(b)
    }

    pub fn width(&self) -> f64 {
        (self.max.x - self.min.x).max(0.0)
    }

    pub fn height(&self) -> f64 {
        (self.max.y - self.min.y).max(0.0)
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn is_empty(&self) -> bool {
        !(self.max.x > self.min.x && self.max.y > self.min.y)
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn contains_box(&self, other: &Aabb) -> bool {
        self.contains(other.min) && self.contains(other.max)
    }

    pub fn intersect(&self, other: &Aabb) -> Aabb {
        Aabb::new(
            Point::new(self.min.x.max(other.min.x), self.min.y.max(other.min.y)),
            Point::new(self.max.x.min(other.max.x), self.max.y.min(other.max.y)),
        )
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        Aabb::new(
            Point::new(self.min.x.min(other.min.x), self.min.y.min(other.min.y)),
            Point::new(self.max.x.max(other.max.x), self.max.y.max(other.max.y)),
        )
    }

    pub fn expand(&self, r: f64) -> Aabb {
        Aabb::new(
            Point::new(self.min.x - r, self.min.y - r),
            Point::new(self.max.x + r, self.max.y + r),
        )
    }

    pub fn to_polygon(&self) -> ConvexPolygon {
        ConvexPolygon::from_ccw(alloc::vec![
            self.min,
            Point::new(self.max.x, self.min.y),
            self.max,
            Point::new(self.min.x, self.max.y),
        ])
    }
}

/// Closed half-plane `{p : normal · p <= offset}` with a unit `normal`
/// pointing away from the kept side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlane {
    pub normal: Point,
    pub offset: f64,
}

impl HalfPlane {
    /// `normal` is normalised here.
    pub fn new(normal: Point, offset: f64) -> Self {
        let n = normal.norm();
        Self {
            normal: normal * (1.0 / n),
            offset: offset / n,
        }
    }

    pub fn from_angle(angle: f64, offset: f64) -> Self {
        Self {
            normal: Point::from_angle(angle),
            offset,
        }
    }

    /// Half-plane whose boundary passes through `point`, keeping the side
    /// opposite to `outward`.
    pub fn through(point: Point, outward: Point) -> Self {
        let n = outward.normalized();
        Self {
            normal: n,
            offset: n.dot(point),
        }
    }

    /// Positive outside, negative inside.
    #[inline]
    pub fn signed_distance(&self, p: Point) -> f64 {
        self.normal.dot(p) - self.offset
    }

    #[inline]
    pub fn contains(&self, p: Point) -> bool {
        self.signed_distance(p) <= 0.0
    }

    /// The complementary closed half-plane (sharing the boundary line).
    pub fn flipped(&self) -> HalfPlane {
        HalfPlane {
            normal: -self.normal,
            offset: -self.offset,
        }
    }

    /// Intersection point of the two boundary lines, if not parallel.
    pub fn line_intersection(&self, other: &HalfPlane) -> Option<Point> {
        let det = self.normal.cross(other.normal);
        if det.abs() < 1e-15 {
            return None;
        }
        let x = (self.offset * other.normal.y - other.offset * self.normal.y) / det;
        let y = (self.normal.x * other.offset - other.normal.x * self.offset) / det;
        Some(Point::new(x, y))
    }
}
