use alloc::boxed::Box;
use alloc::vec::Vec;

use super::{Aabb, ConvexPolygon, HalfPlane, Point};
use crate::Error;

/// A planar region built from discs, half-planes and convex polygons.
///
/// Discs, half-planes and polygons are closed. A blow-up is the open
/// `r`-neighbourhood `{x : d(x, base) < r}`.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Disc { center: Point, radius: f64 },
    HalfPlane(HalfPlane),
    ConvexPolygon(ConvexPolygon),
    Intersection(Vec<Region>),
    Difference(Box<Region>, Box<Region>),
    Union(Vec<Region>),
    Blowup { base: Box<Region>, r: f64 },
}

impl Region {
    pub fn disc(center: Point, radius: f64) -> Region {
        debug_assert!(radius >= 0.0);
        Region::Disc { center, radius }
    }

    pub fn difference(a: Region, b: Region) -> Region {
        Region::Difference(Box::new(a), Box::new(b))
    }

    pub fn blowup(base: Region, r: f64) -> Region {
        debug_assert!(r >= 0.0);
        Region::Blowup {
            base: Box::new(base),
            r,
        }
    }

    /// `D(q, r) \ D(p, r)`: the crescent cut from a disc about `q` by an equal
    /// disc about `p`.
    pub fn lune(q: Point, p: Point, r: f64) -> Region {
        Region::difference(Region::disc(q, r), Region::disc(p, r))
    }

    pub fn contains(&self, p: Point) -> bool {
        match self {
            Region::Disc { center, radius } => p.dist2(*center) <= radius * radius,
            Region::HalfPlane(h) => h.contains(p),
            Region::ConvexPolygon(poly) => poly.contains(p),
            Region::Intersection(list) => list.iter().all(|r| r.contains(p)),
            Region::Difference(a, b) => a.contains(p) && !b.contains(p),
            Region::Union(list) => list.iter().any(|r| r.contains(p)),
            Region::Blowup { base, r } => match base.distance_to(p) {
                Ok(d) => d < *r,
                Err(_) => false,
            },
        }
    }

    /// Euclidean distance from `p` to the region (0 inside).
    ///
    /// Only defined for regions whose distance function is cheap and exact:
    /// discs, half-planes, polygons, unions and nested blow-ups of those.
    pub fn distance_to(&self, p: Point) -> Result<f64, Error> {
        match self {
            Region::Disc { center, radius } => Ok((p.dist(*center) - radius).max(0.0)),
            Region::HalfPlane(h) => Ok(h.signed_distance(p).max(0.0)),
            Region::ConvexPolygon(poly) => Ok(poly.distance_to(p)),
            Region::Union(list) => list
                .iter()
                .map(|r| r.distance_to(p))
                .try_fold(f64::INFINITY, |acc, d| d.map(|d| acc.min(d))),
            Region::Blowup { base, r } => Ok((base.distance_to(p)? - r).max(0.0)),
            Region::Intersection(_) | Region::Difference(..) => Err(Error::UnsupportedBlowup),
        }
    }

    /// Whether membership and distance queries are supported everywhere in
    /// the tree.
    pub(crate) fn validate(&self) -> Result<(), Error> {
        match self {
            Region::Disc { .. } | Region::HalfPlane(_) | Region::ConvexPolygon(_) => Ok(()),
            Region::Intersection(list) | Region::Union(list) => {
                list.iter().try_for_each(Region::validate)
            }
            Region::Difference(a, b) => {
                a.validate()?;
                b.validate()
            }
            Region::Blowup { base, .. } => {
                base.validate()?;
                base.distance_to(Point::new(0.0, 0.0)).map(|_| ())
            }
        }
    }

    /// A box containing the region, or `None` if it is unbounded.
    ///
    /// An empty intersection may yield an empty box.
    pub fn bounding_box(&self) -> Option<Aabb> {
        match self {
            Region::Disc { center, radius } => Some(Aabb::around(*center, *radius)),
            Region::HalfPlane(_) => None,
            Region::ConvexPolygon(poly) => poly.bounding_box(),
            Region::Intersection(list) => list
                .iter()
                .filter_map(Region::bounding_box)
                .reduce(|a, b| a.intersect(&b)),
            Region::Difference(a, _) => a.bounding_box(),
            Region::Union(list) => {
                let mut acc: Option<Aabb> = None;
                for r in list {
                    let b = r.bounding_box()?;
                    acc = Some(match acc {
                        Some(a) => a.union(&b),
                        None => b,
                    });
                }
                acc
            }
            Region::Blowup { base, r } => base.bounding_box().map(|b| b.expand(*r)),
        }
    }

    /// Flattens nested intersections into a single list of operands.
    pub(crate) fn intersection_operands(&self) -> Vec<&Region> {
        let mut out = Vec::new();
        fn walk<'a>(r: &'a Region, out: &mut Vec<&'a Region>) {
            match r {
                Region::Intersection(list) => list.iter().for_each(|x| walk(x, out)),
                other => out.push(other),
            }
        }
        walk(self, &mut out);
        out
    }
}
