//! All-pairs vertex distances, continuous shortest-path trees and the two
//! constant-time predicates used to classify edge pairs.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::Serialize;

use crate::graph::{EdgeId, Endpoint, VertexId, WeightedGraph};
use crate::sum::{merge_ordered, NeumaierSum};
use crate::Tolerance;

/// Symmetric `n × n` matrix of shortest-path distances between vertices.
///
/// Carries the tolerance that downstream predicates use for distance ties.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
    tol: Tolerance,
}

impl DistanceMatrix {
    /// Wraps a row-major matrix computed elsewhere.
    pub fn from_raw(n: usize, data: Vec<f64>, tol: Tolerance) -> Self {
        assert_eq!(data.len(), n * n, "distance matrix must be n×n");
        Self { n, data, tol }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, u: VertexId, v: VertexId) -> f64 {
        self.data[u * self.n + v]
    }

    pub fn row(&self, u: VertexId) -> &[f64] {
        &self.data[u * self.n..(u + 1) * self.n]
    }

    pub fn tolerance(&self) -> &Tolerance {
        &self.tol
    }

    pub fn with_tolerance(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    /// `d(v, e) = min(d(v, a), d(v, b))`.
    pub fn vertex_edge(&self, g: &WeightedGraph, v: VertexId, e: EdgeId) -> f64 {
        let edge = g.edge(e);
        self.get(v, edge.u).min(self.get(v, edge.v))
    }

    /// `d(e, f)`: the smallest distance between an endpoint of `e` and one of `f`.
    pub fn edge_edge(&self, g: &WeightedGraph, e: EdgeId, f: EdgeId) -> f64 {
        let a = g.edge(e);
        self.vertex_edge(g, a.u, f).min(self.vertex_edge(g, a.v, f))
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    vertex: VertexId,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra from `source` with a binary heap.
pub fn single_source(g: &WeightedGraph, source: VertexId) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.vertex_count()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry {
        dist: 0.0,
        vertex: source,
    });
    while let Some(Entry { dist: d, vertex }) = heap.pop() {
        if d > dist[vertex] {
            continue;
        }
        for &(w, e) in g.neighbors(vertex) {
            let nd = d + g.edge(e).length;
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(Entry { dist: nd, vertex: w });
            }
        }
    }
    dist
}

pub fn all_pairs_distances(g: &WeightedGraph) -> DistanceMatrix {
    all_pairs_distances_with(g, Tolerance::default())
}

/// Repeated Dijkstra, one source per task. The two triangle halves are then
/// reconciled by taking the smaller value so the matrix is exactly symmetric.
pub fn all_pairs_distances_with(g: &WeightedGraph, tol: Tolerance) -> DistanceMatrix {
    let n = g.vertex_count();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| single_source(g, s))
        .collect();
    let mut data = Vec::with_capacity(n * n);
    for row in &rows {
        data.extend_from_slice(row);
    }
    for u in 0..n {
        for v in u + 1..n {
            let d = data[u * n + v].min(data[v * n + u]);
            data[u * n + v] = d;
            data[v * n + u] = d;
        }
    }
    DistanceMatrix { n, data, tol }
}

/// Sum of distances over unordered vertex pairs without storing the matrix:
/// one Dijkstra per source, memory O(n + m). Per-source sums are merged in
/// source order, so the result does not depend on the thread count.
pub fn streaming_wiener(g: &WeightedGraph) -> f64 {
    let n = g.vertex_count();
    let rows: Vec<NeumaierSum> = (0..n)
        .into_par_iter()
        .map(|s| single_source(g, s)[s + 1..].iter().copied().collect())
        .collect();
    merge_ordered(&rows)
}

/// A shortest-path tree rooted at `root` plus, for every non-tree edge, the
/// point reached at equal distance through both of its endpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuousSpt {
    root: VertexId,
    parent: Vec<Option<(VertexId, EdgeId)>>,
    tree_edge: Vec<bool>,
    break_points: Vec<Option<f64>>,
}

impl ContinuousSpt {
    pub fn root(&self) -> VertexId {
        self.root
    }

    /// Parent vertex and the tree edge leading to it; `None` at the root.
    pub fn parent(&self, v: VertexId) -> Option<(VertexId, EdgeId)> {
        self.parent[v]
    }

    pub fn is_tree_edge(&self, e: EdgeId) -> bool {
        self.tree_edge[e]
    }

    /// λ of the break point on a non-tree edge, measured from its first endpoint.
    pub fn break_point(&self, e: EdgeId) -> Option<f64> {
        self.break_points[e]
    }

    pub fn tree_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.tree_edge
            .iter()
            .enumerate()
            .filter_map(|(e, &t)| t.then_some(e))
    }
}

/// Break point of edge `e = ab` as seen from `v`:
/// `λ = (|ab| + d(v, b) - d(v, a)) / (2|ab|)`, clamped to `[0, 1]`.
pub fn break_point(g: &WeightedGraph, dm: &DistanceMatrix, v: VertexId, e: EdgeId) -> f64 {
    let edge = g.edge(e);
    let lambda = (edge.length + dm.get(v, edge.v) - dm.get(v, edge.u)) / (2.0 * edge.length);
    lambda.clamp(0.0, 1.0)
}

/// Builds the continuous shortest-path tree of `root` from the distance matrix.
///
/// Each vertex picks, among the neighbours that precede it on a shortest path,
/// the one with the lowest index (lowest edge index for parallel edges).
pub fn continuous_spt(g: &WeightedGraph, dm: &DistanceMatrix, root: VertexId) -> ContinuousSpt {
    let tol = dm.tolerance();
    let n = g.vertex_count();
    let mut parent = vec![None; n];
    let mut tree_edge = vec![false; g.edge_count()];
    for v in (0..n).filter(|&v| v != root) {
        let dv = dm.get(root, v);
        let best = g
            .neighbors(v)
            .iter()
            .filter(|&&(w, e)| {
                let dw = dm.get(root, w);
                dw < dv && tol.eq(dw + g.edge(e).length, dv)
            })
            .min_by_key(|&&(w, e)| (w, e))
            .copied();
        let (w, e) = best.expect("every non-root vertex has a shortest-path predecessor");
        parent[v] = Some((w, e));
        tree_edge[e] = true;
    }
    let break_points = (0..g.edge_count())
        .map(|e| (!tree_edge[e]).then(|| break_point(g, dm, root, e)))
        .collect();
    ContinuousSpt {
        root,
        parent,
        tree_edge,
        break_points,
    }
}

/// Whether `e = ab` can be a tree edge of a shortest-path tree rooted at `v`:
/// true iff `|d(v, b) - d(v, a)| = |ab|` (within tolerance). Boundary ties
/// count as tree edges.
pub fn edge_in_tree(g: &WeightedGraph, dm: &DistanceMatrix, v: VertexId, e: EdgeId) -> bool {
    let edge = g.edge(e);
    let da = dm.get(v, edge.u);
    let db = dm.get(v, edge.v);
    !dm.tolerance().lt((db - da).abs(), edge.length)
}

/// Same component property: every shortest path from the far endpoint of `e`
/// to `x` and to `y` runs through `through`, i.e.
/// `d(far, x) = |e| + d(through, x)` and likewise for `y`.
///
/// Shared endpoints are allowed; for `x == through` the condition reduces to
/// the metric-edge identity.
pub fn same_component_property(
    g: &WeightedGraph,
    dm: &DistanceMatrix,
    x: VertexId,
    y: VertexId,
    e: EdgeId,
    through: Endpoint,
) -> bool {
    let edge = g.edge(e);
    let near = through.of(edge);
    let far = through.opposite().of(edge);
    let tol = dm.tolerance();
    let holds = |w: VertexId| tol.eq(dm.get(far, w), edge.length + dm.get(near, w));
    holds(x) && holds(y)
}
