//! Connected components, the giant/small census, witness pairs between a
//! component and the rest, and sink sets of the directed k-NN relation.

use alloc::vec;
use alloc::vec::Vec;

use crate::geom::{euclidean_diameter, min_enclosing_disc, Point};
use crate::knngraph::NeighborGraph;
#[allow(unused_imports)]
use crate::math::MathExt;
use crate::sampling::PointSet;
use crate::spatial::SpatialGrid;
use crate::Error;

/// Disjoint-set forest with union by size and path halving.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let p = self.parent[x] as usize;
            self.parent[x] = self.parent[p];
            x = p;
        }
        x
    }

    /// Returns true if the sets were distinct.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            core::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra as u32;
        self.size[ra] += self.size[rb];
        true
    }
}

/// Components of the undirected graph, each sorted ascending, listed by
/// smallest member id.
pub fn connected_components(graph: &NeighborGraph) -> Vec<Vec<usize>> {
    let m = graph.vertex_count();
    let mut uf = UnionFind::new(m);
    for (u, v) in graph.edges() {
        uf.union(u, v);
    }
    let mut slot = vec![usize::MAX; m];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for u in 0..m {
        let r = uf.find(u);
        if slot[r] == usize::MAX {
            slot[r] = comps.len();
            comps.push(Vec::new());
        }
        comps[slot[r]].push(u);
    }
    comps
}

/// Parameters of the giant/small classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CensusParams {
    /// Width of the strip along the square's sides.
    pub boundary_strip: f64,
    /// A non-giant component is small when its diameter is below
    /// `small_coeff * sqrt(ln n)`.
    pub small_coeff: f64,
}

impl CensusParams {
    /// Strip `ln n`, coefficient 1.
    pub fn defaults(area_n: f64) -> Self {
        Self {
            boundary_strip: area_n.ln().max(0.0),
            small_coeff: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub id: usize,
    pub vertices: Vec<usize>,
    pub diameter: f64,
    pub min_boundary_distance: f64,
    pub is_giant: bool,
    pub is_small: bool,
    /// Some member lies strictly within the boundary strip.
    pub in_boundary_strip: bool,
}

impl Component {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentCensus {
    pub area_n: f64,
    pub params: CensusParams,
    pub components: Vec<Component>,
    pub giant: usize,
    pub giant_fraction: f64,
    pub small_count: usize,
}

impl ComponentCensus {
    pub fn is_connected(&self) -> bool {
        self.components.len() == 1
    }

    pub fn giant(&self) -> &Component {
        &self.components[self.giant]
    }

    pub fn small(&self) -> impl Iterator<Item = &Component> {
        self.components.iter().filter(|c| c.is_small)
    }

    /// `small_coeff * sqrt(ln n)`.
    pub fn small_threshold(&self) -> f64 {
        self.params.small_coeff * length_scale(self.area_n)
    }
}

/// `sqrt(ln n)`, the natural length scale of small components.
pub fn length_scale(area_n: f64) -> f64 {
    area_n.ln().max(0.0).sqrt()
}

/// Classifies every component.
///
/// The giant is the largest component (ties to the smallest member id).
/// Only non-giant components can be small.
pub fn census(graph: &NeighborGraph, points: &PointSet, params: CensusParams) -> ComponentCensus {
    let world = points.world;
    let threshold = params.small_coeff * length_scale(world.area());
    let groups = connected_components(graph);
    let giant = groups
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut member_pts = Vec::new();
    let components: Vec<Component> = groups
        .into_iter()
        .enumerate()
        .map(|(id, vertices)| {
            member_pts.clear();
            member_pts.extend(vertices.iter().map(|&v| points[v]));
            let diameter = euclidean_diameter(&member_pts);
            let min_boundary_distance = member_pts
                .iter()
                .map(|&p| world.boundary_distance(p))
                .fold(f64::INFINITY, f64::min);
            let is_giant = id == giant;
            Component {
                id,
                vertices,
                diameter,
                min_boundary_distance,
                is_giant,
                is_small: !is_giant && diameter < threshold,
                in_boundary_strip: min_boundary_distance < params.boundary_strip,
            }
        })
        .collect();
    let m = graph.vertex_count();
    let giant_fraction = if m == 0 {
        0.0
    } else {
        components[giant].size() as f64 / m as f64
    };
    let small_count = components.iter().filter(|c| c.is_small).count();
    ComponentCensus {
        area_n: world.area(),
        params,
        components,
        giant,
        giant_fraction,
        small_count,
    }
}

/// Closest pair between a component and the rest of the graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    /// Member of the component.
    pub p: usize,
    /// Vertex outside it.
    pub q: usize,
    pub r0: f64,
}

/// `(P, Q)` minimising `d(p, q)` over `p` in `component`, `q` outside it,
/// ties by `(P id, Q id)`.
pub fn nearest_outside_witness(
    graph: &NeighborGraph,
    points: &PointSet,
    component: &[usize],
) -> Result<Witness, Error> {
    let grid = SpatialGrid::new(&points.points, 2.0);
    nearest_outside_witness_in(&grid, graph.vertex_count(), component)
}

/// As [`nearest_outside_witness`] with a prebuilt index over the vertices.
pub fn nearest_outside_witness_in(
    grid: &SpatialGrid<'_>,
    vertex_count: usize,
    component: &[usize],
) -> Result<Witness, Error> {
    if component.is_empty() {
        return Err(Error::EmptyComponent);
    }
    let mut inside = vec![false; vertex_count];
    for &v in component {
        if v >= vertex_count {
            return Err(Error::VertexOutOfRange(v));
        }
        inside[v] = true;
    }
    if component.len() >= vertex_count {
        return Err(Error::NoOutsideVertex);
    }
    let pts = grid.points();
    let mut best: Option<(f64, usize, usize)> = None;
    for &p in component {
        let Some((q, d2)) = grid.nearest_where(pts[p], |j| j < vertex_count && !inside[j]) else {
            continue;
        };
        let cand = (d2, p, q);
        let better = match best {
            None => true,
            Some(b) => cand.0.total_cmp(&b.0).then((cand.1, cand.2).cmp(&(b.1, b.2))).is_lt(),
        };
        if better {
            best = Some(cand);
        }
    }
    let (d2, p, q) = best.ok_or(Error::NoOutsideVertex)?;
    Ok(Witness { p, q, r0: d2.sqrt() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallPairDistance {
    pub comp_a: usize,
    pub comp_b: usize,
    pub distance: f64,
}

/// Minimum point-to-point distance for every unordered pair of small
/// components.
pub fn small_pair_distance_census(
    census: &ComponentCensus,
    points: &PointSet,
) -> Vec<SmallPairDistance> {
    let small: Vec<&Component> = census.small().collect();
    let mut out = Vec::new();
    for (i, a) in small.iter().enumerate() {
        for b in &small[i + 1..] {
            let mut best = f64::INFINITY;
            for &u in &a.vertices {
                for &v in &b.vertices {
                    best = best.min(points[u].dist2(points[v]));
                }
            }
            out.push(SmallPairDistance {
                comp_a: a.id,
                comp_b: b.id,
                distance: best.sqrt(),
            });
        }
    }
    out
}

/// A proper vertex set with no out-edges in the directed k-NN relation.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedSet {
    pub vertices: Vec<usize>,
    pub disc_center: Point,
    pub disc_radius: f64,
}

/// Default size cap for reported closed sets: `4k`.
pub fn default_closed_set_cap(k: usize) -> usize {
    4 * k
}

/// Sink strongly connected components of the directed k-NN relation that are
/// proper subsets of at most `cap` vertices, each with its smallest
/// enclosing disc. Sorted by smallest member id.
pub fn no_outdegree_subgraph_scan(
    graph: &NeighborGraph,
    points: &PointSet,
    cap: usize,
) -> Vec<ClosedSet> {
    let m = graph.vertex_count();
    let scc = strongly_connected(graph);
    let count = scc.iter().copied().max().map_or(0, |c| c + 1);
    let mut is_sink = vec![true; count];
    let mut sizes = vec![0usize; count];
    for u in 0..m {
        sizes[scc[u]] += 1;
        for &v in graph.out_neighbors(u) {
            if scc[v as usize] != scc[u] {
                is_sink[scc[u]] = false;
            }
        }
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
    for u in 0..m {
        let c = scc[u];
        if is_sink[c] && sizes[c] < m && sizes[c] <= cap {
            members[c].push(u);
        }
    }
    let mut out: Vec<ClosedSet> = members
        .into_iter()
        .filter(|v| !v.is_empty())
        .map(|vertices| {
            let pts: Vec<Point> = vertices.iter().map(|&v| points[v]).collect();
            let (disc_center, disc_radius) = min_enclosing_disc(&pts).expect("nonempty");
            ClosedSet {
                vertices,
                disc_center,
                disc_radius,
            }
        })
        .collect();
    out.sort_by_key(|s| s.vertices[0]);
    out
}

/// Iterative Tarjan; returns the SCC index of every vertex.
fn strongly_connected(graph: &NeighborGraph) -> Vec<usize> {
    const UNSEEN: u32 = u32::MAX;
    let m = graph.vertex_count();
    let mut index = vec![UNSEEN; m];
    let mut low = vec![0u32; m];
    let mut on_stack = vec![false; m];
    let mut comp = vec![usize::MAX; m];
    let mut stack: Vec<u32> = Vec::new();
    let mut call: Vec<(u32, u32)> = Vec::new();
    let mut next_index = 0u32;
    let mut next_comp = 0usize;

    for root in 0..m {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root as u32, 0));
        while let Some(top) = call.len().checked_sub(1) {
            let (u, edge) = call[top];
            let u = u as usize;
            if edge == 0 && index[u] == UNSEEN {
                index[u] = next_index;
                low[u] = next_index;
                next_index += 1;
                stack.push(u as u32);
                on_stack[u] = true;
            }
            let outs = graph.out_neighbors(u);
            if (edge as usize) < outs.len() {
                call[top].1 += 1;
                let v = outs[edge as usize] as usize;
                if index[v] == UNSEEN {
                    call.push((v as u32, 0));
                } else if on_stack[v] {
                    low[u] = low[u].min(index[v]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                let parent = parent as usize;
                low[parent] = low[parent].min(low[u]);
            }
            if low[u] == index[u] {
                loop {
                    let w = stack.pop().expect("tarjan stack") as usize;
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if w == u {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::SquareWorld;
    use crate::knngraph::build_graph;

    fn pts(world_area: f64, coords: &[(f64, f64)]) -> PointSet {
        PointSet::from_points(
            SquareWorld::new(world_area).unwrap(),
            coords.iter().map(|&(x, y)| Point::new(x, y)).collect(),
        )
    }

    #[test]
    fn union_find_basics() {
        let mut uf = UnionFind::new(4);
        assert!(uf.union(0, 1));
        assert!(!uf.union(1, 0));
        assert!(uf.union(2, 3));
        assert_ne!(uf.find(0), uf.find(3));
    }

    #[test]
    fn triangle_is_one_component() {
        let ps = pts(25.0, &[(0.0, 0.0), (3.0, 0.0), (0.0, 4.0)]);
        let g = build_graph(&ps, 1).unwrap();
        assert_eq!(connected_components(&g), vec![vec![0, 1, 2]]);
        let c = census(&g, &ps, CensusParams::defaults(1e4));
        assert_eq!(c.giant_fraction, 1.0);
        assert_eq!(c.small_count, 0);
        assert!(c.is_connected());
    }

    #[test]
    fn two_far_clusters() {
        let ps = pts(
            1e14,
            &[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1e6, 0.0), (1e6 + 1.0, 0.0), (1e6, 1.0)],
        );
        let g = build_graph(&ps, 1).unwrap();
        assert_eq!(connected_components(&g), vec![vec![0, 1, 2], vec![3, 4, 5]]);
    }

    #[test]
    fn giant_and_small_blob() {
        let mut coords = Vec::new();
        for i in 0..10 {
            for j in 0..10 {
                coords.push((40.0 + i as f64 * 0.5, 40.0 + j as f64 * 0.5));
            }
        }
        for t in 0..5 {
            coords.push((80.0 + 0.02 * t as f64, 80.0));
        }
        let ps = pts(1e4, &coords);
        let g = build_graph(&ps, 3).unwrap();
        let c = census(&g, &ps, CensusParams { boundary_strip: 9.2, small_coeff: 1.0 });
        assert_eq!(c.components.len(), 2);
        assert_eq!(c.giant().size(), 100);
        let blob = &c.components[1];
        assert!((blob.diameter - 0.08).abs() < 1e-12);
        assert!(blob.is_small);
        assert!(!blob.in_boundary_strip);
        assert_eq!(c.small_count, 1);
        assert!((c.giant_fraction - 100.0 / 105.0).abs() < 1e-15);
    }

    #[test]
    fn witness_between_clusters() {
        let ps = pts(1e4, &[(0.0, 0.0), (1.0, 0.0), (5.0, 0.0), (6.0, 0.0)]);
        let g = build_graph(&ps, 1).unwrap();
        let w = nearest_outside_witness(&g, &ps, &[0, 1]).unwrap();
        assert_eq!((w.p, w.q, w.r0), (1, 2, 4.0));
        let w = nearest_outside_witness(&g, &ps, &[3]).unwrap();
        assert_eq!((w.p, w.q, w.r0), (3, 2, 1.0));
        assert_eq!(
            nearest_outside_witness(&g, &ps, &[0, 1, 2, 3]),
            Err(Error::NoOutsideVertex)
        );
    }

    #[test]
    fn small_pairs() {
        let mut coords = Vec::new();
        for i in 0..8 {
            for j in 0..8 {
                coords.push((50.0 + i as f64, 50.0 + j as f64));
            }
        }
        coords.extend([(20.0, 20.0), (20.1, 20.0), (20.0, 20.1)]);
        coords.extend([(27.0, 20.0), (27.1, 20.0), (27.1, 20.1)]);
        let ps = pts(1e4, &coords);
        let g = build_graph(&ps, 2).unwrap();
        let c = census(&g, &ps, CensusParams::defaults(1e4));
        assert_eq!(c.small_count, 2);
        let pairs = small_pair_distance_census(&c, &ps);
        assert_eq!(pairs.len(), 1);
        assert!((pairs[0].distance - 6.9).abs() < 1e-12);
    }

    #[test]
    fn closed_cluster_is_reported() {
        // k + 1 = 4 clustered points, the rest much further apart from it
        let mut coords = vec![(50.0, 50.0), (50.1, 50.0), (50.0, 50.1), (50.1, 50.1)];
        for i in 0..6 {
            for j in 0..6 {
                coords.push((10.0 + i as f64, 10.0 + j as f64));
            }
        }
        let ps = pts(1e4, &coords);
        let g = build_graph(&ps, 3).unwrap();
        let sets = no_outdegree_subgraph_scan(&g, &ps, default_closed_set_cap(3));
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].vertices, vec![0, 1, 2, 3]);
        assert!((sets[0].disc_radius - 0.05 * 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn complete_graph_has_no_closed_set() {
        let ps = pts(100.0, &[(1.0, 1.0), (2.0, 1.0), (1.5, 3.0), (4.0, 4.0)]);
        let g = build_graph(&ps, 3).unwrap();
        assert!(no_outdegree_subgraph_scan(&g, &ps, 100).is_empty());
    }
}
