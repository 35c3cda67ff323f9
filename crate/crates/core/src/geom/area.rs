use core::f64::consts::PI;

use super::{Aabb, ConvexPolygon, HalfPlane, Point, Region};
#[allow(unused_imports)]
use crate::math::MathExt;
use crate::sampling::{stream_rng, unit_f64};
use crate::Error;

/// Smallest sample count accepted for the Monte Carlo area path.
pub const MIN_QUADRATURE_BUDGET: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaEstimate {
    pub area: f64,
    /// Zero for closed-form results.
    pub std_error: f64,
}

impl AreaEstimate {
    pub const fn exact(area: f64) -> Self {
        Self {
            area,
            std_error: 0.0,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.std_error == 0.0
    }
}

/// Measure of `region`, restricted to `within` when given.
///
/// Closed forms are used for discs, convex polygons, a disc cut by any
/// number of half-planes and polygons (circular segments included), two-disc
/// intersections and differences (lunes included). Everything else, and any
/// closed-form region that pokes outside `within`, falls back to an unbiased
/// Monte Carlo hit count over the bounding box with `budget` samples.
pub fn region_area(
    region: &Region,
    budget: usize,
    within: Option<Aabb>,
    seed: u64,
) -> Result<AreaEstimate, Error> {
    region.validate()?;
    let bbox = region.bounding_box();
    if bbox.is_none() && within.is_none() {
        return Err(Error::UnboundedRegion);
    }
    let fits = match (bbox, within) {
        (_, None) => true,
        (Some(b), Some(w)) => b.is_empty() || w.contains_box(&b),
        (None, Some(_)) => false,
    };
    if fits {
        if let Some(a) = exact_area(region) {
            return Ok(AreaEstimate::exact(a));
        }
    }
    monte_carlo_area(region, budget, within, seed)
}

/// Monte Carlo area regardless of whether a closed form exists.
pub fn monte_carlo_area(
    region: &Region,
    budget: usize,
    within: Option<Aabb>,
    seed: u64,
) -> Result<AreaEstimate, Error> {
    region.validate()?;
    if budget < MIN_QUADRATURE_BUDGET {
        return Err(Error::InvalidArgument(
            "quadrature budget must be at least 10^4",
        ));
    }
    let bbox = match (region.bounding_box(), within) {
        (Some(b), Some(w)) => b.intersect(&w),
        (Some(b), None) => b,
        (None, Some(w)) => w,
        (None, None) => return Err(Error::UnboundedRegion),
    };
    if bbox.is_empty() {
        return Ok(AreaEstimate::exact(0.0));
    }
    let mut rng = stream_rng(seed);
    let (w, h) = (bbox.width(), bbox.height());
    let mut hits = 0usize;
    for _ in 0..budget {
        let p = Point::new(
            bbox.min.x + w * unit_f64(&mut rng),
            bbox.min.y + h * unit_f64(&mut rng),
        );
        if region.contains(p) {
            hits += 1;
        }
    }
    let n = budget as f64;
    let frac = hits as f64 / n;
    let box_area = bbox.area();
    Ok(AreaEstimate {
        area: box_area * frac,
        std_error: box_area * (frac * (1.0 - frac) / n).sqrt(),
    })
}

/// Closed-form area, or `None` when the region needs quadrature.
pub(crate) fn exact_area(region: &Region) -> Option<f64> {
    match region {
        Region::Disc { radius, .. } => Some(PI * radius * radius),
        Region::ConvexPolygon(poly) => Some(poly.area()),
        Region::Intersection(_) => exact_intersection(region),
        Region::Difference(a, b) => match (a.as_ref(), b.as_ref()) {
            (
                Region::Disc {
                    center: ca,
                    radius: ra,
                },
                Region::Disc {
                    center: cb,
                    radius: rb,
                },
            ) => {
                let d = ca.dist(*cb);
                Some((PI * ra * ra - lens_area(*ra, *rb, d)).max(0.0))
            }
            (a, b) => {
                let ab = a.bounding_box()?;
                match b.bounding_box() {
                    Some(bb) if ab.intersect(&bb).is_empty() => exact_area(a),
                    _ => None,
                }
            }
        },
        Region::HalfPlane(_) | Region::Union(_) | Region::Blowup { .. } => None,
    }
}

fn exact_intersection(region: &Region) -> Option<f64> {
    let ops = region.intersection_operands();
    let mut discs = alloc::vec::Vec::new();
    let mut planes = alloc::vec::Vec::new();
    let mut polys = alloc::vec::Vec::new();
    for op in ops {
        match op {
            Region::Disc { center, radius } => discs.push((*center, *radius)),
            Region::HalfPlane(h) => planes.push(*h),
            Region::ConvexPolygon(p) => polys.push(p),
            _ => return None,
        }
    }
    let clip_all = |mut poly: ConvexPolygon| {
        for h in &planes {
            poly = poly.clip(h);
        }
        for p in &polys {
            poly = poly.clip_polygon(p);
        }
        poly
    };
    match discs.len() {
        0 => {
            let (first, rest) = polys.split_first()?;
            let mut poly = (*first).clone();
            for h in &planes {
                poly = poly.clip(h);
            }
            for p in rest {
                poly = poly.clip_polygon(p);
            }
            Some(poly.area())
        }
        1 => {
            let (c, r) = discs[0];
            if planes.is_empty() && polys.is_empty() {
                return Some(PI * r * r);
            }
            let poly = clip_all(Aabb::around(c, r).to_polygon());
            Some(disc_polygon_intersection_area(c, r, &poly))
        }
        2 if planes.is_empty() && polys.is_empty() => {
            let ((c1, r1), (c2, r2)) = (discs[0], discs[1]);
            Some(lens_area(r1, r2, c1.dist(c2)))
        }
        _ => None,
    }
}

/// Area of the intersection of two discs with radii `r1`, `r2` whose centres
/// are `d` apart.
pub fn lens_area(r1: f64, r2: f64, d: f64) -> f64 {
    if r1 <= 0.0 || r2 <= 0.0 || d >= r1 + r2 {
        return 0.0;
    }
    if d <= (r1 - r2).abs() {
        let r = r1.min(r2);
        return PI * r * r;
    }
    let a1 = ((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).clamp(-1.0, 1.0).acos();
    let a2 = ((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)).clamp(-1.0, 1.0).acos();
    let k = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
    r1 * r1 * a1 + r2 * r2 * a2 - 0.5 * k.max(0.0).sqrt()
}

/// `|D(q, r0) \ D(p, r0)|` when `d(p, q) = r0`: `(pi/3 + sqrt(3)/2) r0^2`.
pub fn lune_area(r0: f64) -> f64 {
    (PI / 3.0 + 3f64.sqrt() / 2.0) * r0 * r0
}

/// Exact area of `D(center, radius) ∩ poly` by summing signed
/// circle-triangle intersections over the polygon's edges.
pub fn disc_polygon_intersection_area(center: Point, radius: f64, poly: &ConvexPolygon) -> f64 {
    if radius <= 0.0 || poly.is_degenerate() {
        return 0.0;
    }
    let total: f64 = poly
        .edges()
        .map(|(a, b)| circle_triangle_signed(a - center, b - center, radius))
        .sum();
    total.abs()
}

/// `|D(0, r) ∩ triangle(0, a, b)|`, signed by the orientation of `(a, b)`.
fn circle_triangle_signed(a: Point, b: Point, r: f64) -> f64 {
    let r2 = r * r;
    let sector = |u: Point, v: Point| 0.5 * r2 * u.cross(v).atan2(u.dot(v));
    let (ina, inb) = (a.norm2() <= r2, b.norm2() <= r2);
    if ina && inb {
        return 0.5 * a.cross(b);
    }
    let d = b - a;
    let qa = d.norm2();
    if qa == 0.0 {
        return 0.0;
    }
    let qb = a.dot(d);
    let qc = a.norm2() - r2;
    let disc = qb * qb - qa * qc;
    if disc <= 0.0 {
        return sector(a, b);
    }
    let s = disc.sqrt();
    let t1 = (-qb - s) / qa;
    let t2 = (-qb + s) / qa;
    if t2 <= 0.0 || t1 >= 1.0 {
        return sector(a, b);
    }
    let p1 = a + d * t1.max(0.0);
    let p2 = a + d * t2.min(1.0);
    let head = if t1 > 0.0 { sector(a, p1) } else { 0.0 };
    let tail = if t2 < 1.0 { sector(p2, b) } else { 0.0 };
    head + 0.5 * p1.cross(p2) + tail
}

/// Which isoperimetric inequality the excess bound uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlowupMode {
    /// Sets of given area anywhere in the plane; the disc is extremal.
    Plane,
    /// Sets anchored on a boundary line; the half-disc is extremal.
    HalfPlane,
}

/// Lower bound on `|A^(r) \ A|` over sets `A` of area `base_area`.
///
/// With `x = r / sqrt(base_area / pi)` this is `((x + 1)^2 - 1) |A|` in the
/// plane and `((1 + x / sqrt 2)^2 - 1) |A|` in a half-plane.
pub fn blowup_excess_lower_bound(base_area: f64, r: f64, mode: BlowupMode) -> f64 {
    debug_assert!(base_area > 0.0 && r >= 0.0);
    let x = r / (base_area / PI).sqrt();
    let grow = match mode {
        BlowupMode::Plane => x + 1.0,
        BlowupMode::HalfPlane => 1.0 + x / 2f64.sqrt(),
    };
    (grow * grow - 1.0) * base_area
}

impl Region {
    /// Closed-form area when one exists.
    pub fn exact_area(&self) -> Option<f64> {
        exact_area(self)
    }
}

impl HalfPlane {
    pub fn to_region(self) -> Region {
        Region::HalfPlane(self)
    }
}
