//! Uniform-grid spatial index over a fixed point slice.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::geom::{Aabb, Point};
#[allow(unused_imports)]
use crate::math::MathExt;

/// Points bucketed into square cells, stored CSR-style.
#[derive(Debug, Clone)]
pub struct SpatialGrid<'a> {
    points: &'a [Point],
    origin: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    starts: Vec<u32>,
    items: Vec<u32>,
}

#[inline]
fn key_cmp(a: &(f64, u32), b: &(f64, u32)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

impl<'a> SpatialGrid<'a> {
    /// Grid whose cells hold about `per_cell` points on average.
    pub fn new(points: &'a [Point], per_cell: f64) -> Self {
        let bbox = Aabb::of_points(points)
            .unwrap_or(Aabb::new(Point::new(0.0, 0.0), Point::new(1.0, 1.0)));
        let m = points.len().max(1) as f64;
        let (w, h) = (bbox.width(), bbox.height());
        let extent = w.max(h);
        let area = if w > 0.0 && h > 0.0 {
            w * h
        } else if extent > 0.0 {
            extent * extent
        } else {
            1.0
        };
        let mut cell = (per_cell.max(1e-3) * area / m).sqrt();
        if !(cell > 0.0 && cell.is_finite()) {
            cell = 1.0;
        }
        // keep the cell count linear in m even for very clustered inputs
        let limit = 4.0 * m + 16.0;
        loop {
            let cells = ((w / cell).floor() + 1.0) * ((h / cell).floor() + 1.0);
            if cells <= limit {
                break;
            }
            cell *= (cells / limit).sqrt() * 1.01;
        }
        let nx = (w / cell).floor() as usize + 1;
        let ny = (h / cell).floor() as usize + 1;

        let mut grid = Self {
            points,
            origin: bbox.min,
            cell,
            nx,
            ny,
            starts: vec![0; nx * ny + 1],
            items: vec![0; points.len()],
        };
        let cell_ids: Vec<usize> = points.iter().map(|&p| grid.cell_index(p)).collect();
        for &c in &cell_ids {
            grid.starts[c + 1] += 1;
        }
        for i in 0..nx * ny {
            grid.starts[i + 1] += grid.starts[i];
        }
        let mut fill = grid.starts.clone();
        for (i, &c) in cell_ids.iter().enumerate() {
            grid.items[fill[c] as usize] = i as u32;
            fill[c] += 1;
        }
        grid
    }

    pub fn points(&self) -> &'a [Point] {
        self.points
    }

    pub fn cell_side(&self) -> f64 {
        self.cell
    }

    #[inline]
    fn cell_coords(&self, p: Point) -> (usize, usize) {
        let fx = ((p.x - self.origin.x) / self.cell).floor();
        let fy = ((p.y - self.origin.y) / self.cell).floor();
        let ix = if fx <= 0.0 { 0 } else { (fx as usize).min(self.nx - 1) };
        let iy = if fy <= 0.0 { 0 } else { (fy as usize).min(self.ny - 1) };
        (ix, iy)
    }

    #[inline]
    fn cell_index(&self, p: Point) -> usize {
        let (ix, iy) = self.cell_coords(p);
        iy * self.nx + ix
    }

    #[inline]
    fn cell_items(&self, ix: usize, iy: usize) -> &[u32] {
        let c = iy * self.nx + ix;
        &self.items[self.starts[c] as usize..self.starts[c + 1] as usize]
    }

    /// Visits every cell at Chebyshev distance exactly `ring` from `(cx, cy)`.
    fn for_ring(&self, cx: usize, cy: usize, ring: usize, mut f: impl FnMut(&[u32])) {
        let (cx, cy, r) = (cx as isize, cy as isize, ring as isize);
        let (nx, ny) = (self.nx as isize, self.ny as isize);
        let y0 = (cy - r).max(0);
        let y1 = (cy + r).min(ny - 1);
        for iy in y0..=y1 {
            let full_row = iy == cy - r || iy == cy + r;
            if full_row {
                let x0 = (cx - r).max(0);
                let x1 = (cx + r).min(nx - 1);
                for ix in x0..=x1 {
                    f(self.cell_items(ix as usize, iy as usize));
                }
            } else {
                for ix in [cx - r, cx + r] {
                    if ix >= 0 && ix < nx {
                        f(self.cell_items(ix as usize, iy as usize));
                    }
                    if r == 0 {
                        break;
                    }
                }
            }
        }
    }

    /// Lower bound on the distance from `q` to any point outside the block
    /// of rings `0..=ring`; `None` once the block covers the whole grid.
    fn unexplored_gap(&self, q: Point, cx: usize, cy: usize, ring: usize) -> Option<f64> {
        let mut gap = f64::INFINITY;
        let margin = self.cell * 1e-9;
        if cx > ring {
            let edge = self.origin.x + (cx - ring) as f64 * self.cell;
            gap = gap.min(q.x - edge);
        }
        if cx + ring + 1 < self.nx {
            let edge = self.origin.x + (cx + ring + 1) as f64 * self.cell;
            gap = gap.min(edge - q.x);
        }
        if cy > ring {
            let edge = self.origin.y + (cy - ring) as f64 * self.cell;
            gap = gap.min(q.y - edge);
        }
        if cy + ring + 1 < self.ny {
            let edge = self.origin.y + (cy + ring + 1) as f64 * self.cell;
            gap = gap.min(edge - q.y);
        }
        if gap == f64::INFINITY {
            None
        } else {
            Some((gap - margin).max(0.0))
        }
    }

    /// The `k` points nearest to point `query` (itself excluded), ordered by
    /// `(squared distance, id)`. Fewer than `k` only if the set is smaller.
    pub fn knn(&self, query: usize, k: usize, out: &mut Vec<(f64, u32)>) {
        out.clear();
        if k == 0 {
            return;
        }
        let q = self.points[query];
        let (cx, cy) = self.cell_coords(q);
        let mut ring = 0usize;
        loop {
            self.for_ring(cx, cy, ring, |cell| {
                for &j in cell {
                    if j as usize == query {
                        continue;
                    }
                    let cand = (q.dist2(self.points[j as usize]), j);
                    if out.len() == k && key_cmp(&cand, &out[k - 1]) != Ordering::Less {
                        continue;
                    }
                    let pos = out
                        .binary_search_by(|e| key_cmp(e, &cand))
                        .unwrap_or_else(|p| p);
                    if out.len() == k {
                        out.pop();
                    }
                    out.insert(pos, cand);
                }
            });
            match self.unexplored_gap(q, cx, cy, ring) {
                None => break,
                Some(gap) => {
                    if out.len() == k && out[k - 1].0 < gap * gap {
                        break;
                    }
                }
            }
            ring += 1;
        }
    }

    /// Nearest point (by `(squared distance, id)`) satisfying `accept`.
    pub fn nearest_where(&self, q: Point, mut accept: impl FnMut(usize) -> bool) -> Option<(usize, f64)> {
        let (cx, cy) = self.cell_coords(q);
        let mut best: Option<(f64, u32)> = None;
        let mut ring = 0usize;
        loop {
            self.for_ring(cx, cy, ring, |cell| {
                for &j in cell {
                    let cand = (q.dist2(self.points[j as usize]), j);
                    if let Some(b) = best {
                        if key_cmp(&cand, &b) != Ordering::Less {
                            continue;
                        }
                    }
                    if accept(j as usize) {
                        best = Some(cand);
                    }
                }
            });
            match self.unexplored_gap(q, cx, cy, ring) {
                None => break,
                Some(gap) => {
                    if let Some(b) = best {
                        if b.0 < gap * gap {
                            break;
                        }
                    }
                }
            }
            ring += 1;
        }
        best.map(|(d2, j)| (j as usize, d2))
    }

    /// Calls `f(id, squared distance)` for every point with `d(q, p) <= r`.
    pub fn for_each_within(&self, q: Point, r: f64, mut f: impl FnMut(usize, f64)) {
        let r2 = r * r;
        let lo = self.cell_coords(Point::new(q.x - r, q.y - r));
        let hi = self.cell_coords(Point::new(q.x + r, q.y + r));
        for iy in lo.1..=hi.1 {
            for ix in lo.0..=hi.0 {
                for &j in self.cell_items(ix, iy) {
                    let d2 = q.dist2(self.points[j as usize]);
                    if d2 <= r2 {
                        f(j as usize, d2);
                    }
                }
            }
        }
    }

    /// Ids of points inside `bbox`, in no particular order.
    pub fn for_each_in_box(&self, bbox: &Aabb, mut f: impl FnMut(usize)) {
        let lo = self.cell_coords(bbox.min);
        let hi = self.cell_coords(bbox.max);
        for iy in lo.1..=hi.1 {
            for ix in lo.0..=hi.0 {
                for &j in self.cell_items(ix, iy) {
                    if bbox.contains(self.points[j as usize]) {
                        f(j as usize);
                    }
                }
            }
        }
    }
}
