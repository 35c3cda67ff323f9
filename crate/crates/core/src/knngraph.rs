//! The k-nearest-neighbour graph `G_{n,k}` of a point set.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::sampling::PointSet;
use crate::spatial::SpatialGrid;
use crate::Error;

/// Directed k-NN relation and its symmetrised undirected adjacency.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborGraph {
    k: usize,
    /// Row-major `m x k`: row `u` lists `u`'s neighbours nearest first,
    /// ties broken by id.
    out: Vec<u32>,
    adjacency: Vec<Vec<u32>>,
    edge_count: usize,
}

impl NeighborGraph {
    fn from_out_lists(m: usize, k: usize, out: Vec<u32>) -> Self {
        let mut adjacency: Vec<Vec<u32>> = (0..m).map(|_| Vec::with_capacity(2 * k)).collect();
        for u in 0..m {
            for &v in &out[u * k..(u + 1) * k] {
                adjacency[u].push(v);
                adjacency[v as usize].push(u as u32);
            }
        }
        let mut degree_sum = 0;
        for adj in &mut adjacency {
            adj.sort_unstable();
            adj.dedup();
            degree_sum += adj.len();
        }
        Self {
            k,
            out,
            adjacency,
            edge_count: degree_sum / 2,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// `u`'s k nearest neighbours, nearest first.
    pub fn out_neighbors(&self, u: usize) -> &[u32] {
        &self.out[u * self.k..(u + 1) * self.k]
    }

    /// Sorted undirected neighbours of `u`.
    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.adjacency[u]
    }

    /// Undirected edges `(u, v)` with `u < v`, lexicographically sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, adj)| {
            adj.iter()
                .map(move |&v| (u, v as usize))
                .filter(|&(u, v)| u < v)
        })
    }
}

fn check_k(m: usize, k: usize) -> Result<(), Error> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    if m <= k {
        return Err(Error::KTooLarge { k, m });
    }
    Ok(())
}

/// Builds `G_{n,k}` with a uniform grid index.
///
/// Cells are sized so each holds about the `(k+1)/pi` points a k-NN disc
/// covers at the sample's density; the ring search stops once the k-th
/// candidate is strictly closer than anything unexplored.
pub fn build_graph(points: &PointSet, k: usize) -> Result<NeighborGraph, Error> {
    let m = points.len();
    check_k(m, k)?;
    let grid = SpatialGrid::new(&points.points, (k + 1) as f64 / PI);
    let mut out = Vec::with_capacity(m * k);
    let mut buf = Vec::with_capacity(k + 1);
    for u in 0..m {
        grid.knn(u, k, &mut buf);
        out.extend(buf.iter().map(|&(_, v)| v));
    }
    Ok(NeighborGraph::from_out_lists(m, k, out))
}

/// All-pairs reference construction; must agree with [`build_graph`]
/// bit for bit.
pub fn brute_force_graph(points: &PointSet, k: usize) -> Result<NeighborGraph, Error> {
    let m = points.len();
    check_k(m, k)?;
    let pts = &points.points;
    let mut out = Vec::with_capacity(m * k);
    let mut row: Vec<(f64, u32)> = Vec::with_capacity(m);
    for u in 0..m {
        row.clear();
        row.extend(
            (0..m)
                .filter(|&v| v != u)
                .map(|v| (pts[u].dist2(pts[v]), v as u32)),
        );
        row.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        out.extend(row[..k].iter().map(|&(_, v)| v));
    }
    Ok(NeighborGraph::from_out_lists(m, k, out))
}

/// Distance from `vertex` to its k-th nearest neighbour: the radius of its
/// k-NN disc.
pub fn kth_neighbor_radius(
    graph: &NeighborGraph,
    points: &PointSet,
    vertex: usize,
) -> Result<f64, Error> {
    if vertex >= graph.vertex_count() || vertex >= points.len() {
        return Err(Error::VertexOutOfRange(vertex));
    }
    let last = *graph.out_neighbors(vertex).last().expect("k >= 1") as usize;
    Ok(points[vertex].dist(points[last]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Point, SquareWorld};
    use alloc::vec;

    fn triangle() -> PointSet {
        PointSet::from_points(
            SquareWorld::new(25.0).unwrap(),
            vec![Point::new(0.0, 0.0), Point::new(3.0, 0.0), Point::new(0.0, 4.0)],
        )
    }

    #[test]
    fn three_point_example() {
        let ps = triangle();
        for g in [build_graph(&ps, 1).unwrap(), brute_force_graph(&ps, 1).unwrap()] {
            assert_eq!(g.out_neighbors(0), &[1]);
            assert_eq!(g.out_neighbors(1), &[0]);
            assert_eq!(g.out_neighbors(2), &[0]);
            let edges: Vec<_> = g.edges().collect();
            assert_eq!(edges, vec![(0, 1), (0, 2)]);
            assert_eq!(g.edge_count(), 2);
            assert_eq!(kth_neighbor_radius(&g, &ps, 0).unwrap(), 3.0);
        }
        let g2 = build_graph(&ps, 2).unwrap();
        assert_eq!(kth_neighbor_radius(&g2, &ps, 0).unwrap(), 4.0);
    }

    #[test]
    fn k_equal_m_minus_one_is_complete() {
        let ps = triangle();
        let g = build_graph(&ps, 2).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g, brute_force_graph(&ps, 2).unwrap());
    }

    #[test]
    fn rejects_bad_k() {
        let ps = triangle();
        assert_eq!(build_graph(&ps, 3), Err(Error::KTooLarge { k: 3, m: 3 }));
        assert_eq!(brute_force_graph(&ps, 0), Err(Error::ZeroK));
    }

    #[test]
    fn radius_out_of_range() {
        let ps = triangle();
        let g = build_graph(&ps, 1).unwrap();
        assert_eq!(kth_neighbor_radius(&g, &ps, 3), Err(Error::VertexOutOfRange(3)));
    }
}
