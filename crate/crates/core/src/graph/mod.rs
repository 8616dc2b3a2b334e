//! Weighted undirected graphs whose edges are treated as line segments.
//!
//! Vertices are dense integers `0..n`; the original labels from the input
//! document are kept alongside for reporting. Parallel edges are allowed,
//! self-loops are not, and every edge length must be strictly positive.

mod generate;
mod io;

pub use generate::{generate, GeneratorSpec, GraphKind, WeightSpec};
pub use io::{
    parse_graph, parse_graph_checked, parse_graph_with, to_edge_list, to_json, MetricPolicy, ParsedGraph, ShortcutEdge,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::paths::DistanceMatrix;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    /// First endpoint; the edge parameter runs from here (0) to `v` (1).
    pub u: VertexId,
    pub v: VertexId,
    pub length: f64,
}

impl Edge {
    pub fn new(u: VertexId, v: VertexId, length: f64) -> Self {
        Self { u, v, length }
    }

    pub fn other(&self, w: VertexId) -> VertexId {
        if w == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn shares_endpoint(&self, other: &Edge) -> bool {
        self.u == other.u || self.u == other.v || self.v == other.u || self.v == other.v
    }
}

/// Names one endpoint of an edge relative to its canonical orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    First,
    Second,
}

impl Endpoint {
    pub fn of(self, edge: &Edge) -> VertexId {
        match self {
            Endpoint::First => edge.u,
            Endpoint::Second => edge.v,
        }
    }

    pub fn opposite(self) -> Endpoint {
        match self {
            Endpoint::First => Endpoint::Second,
            Endpoint::Second => Endpoint::First,
        }
    }
}

/// An edge together with a direction of travel.
///
/// A point on the edge is `λ·second + (1-λ)·first`. With `reversed == false`
/// the first endpoint is the one listed first in the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeRef {
    pub index: EdgeId,
    pub reversed: bool,
}

impl EdgeRef {
    pub fn new(index: EdgeId) -> Self {
        Self {
            index,
            reversed: false,
        }
    }

    pub fn reverse(self) -> Self {
        Self {
            index: self.index,
            reversed: !self.reversed,
        }
    }

    pub fn endpoints(&self, g: &WeightedGraph) -> (VertexId, VertexId) {
        let e = g.edge(self.index);
        if self.reversed {
            (e.v, e.u)
        } else {
            (e.u, e.v)
        }
    }

    /// Distance along the edge from the first endpoint to parameter `lambda`.
    pub fn offset(&self, g: &WeightedGraph, lambda: f64) -> f64 {
        lambda * g.edge(self.index).length
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    labels: Vec<String>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(VertexId, EdgeId)>>,
}

impl WeightedGraph {
    /// Builds a graph and checks the structural invariants (connected, no
    /// self-loops, positive finite lengths). The metric-edge assumption needs
    /// a distance matrix and is checked by [`WeightedGraph::metric_violations`].
    pub fn new(labels: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Validation("graph has no vertices".into()));
        }
        let mut adjacency = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            if e.u >= n || e.v >= n {
                return Err(Error::Validation(format!(
                    "edge {i} references a vertex outside 0..{n}"
                )));
            }
            if e.u == e.v {
                return Err(Error::Validation(format!(
                    "edge {i} is a self-loop at vertex {}",
                    labels[e.u]
                )));
            }
            if !(e.length.is_finite() && e.length > 0.0) {
                return Err(Error::Validation(format!(
                    "edge {i} ({} - {}) has non-positive or non-finite length {}",
                    labels[e.u], labels[e.v], e.length
                )));
            }
            adjacency[e.u].push((e.v, i));
            adjacency[e.v].push((e.u, i));
        }
        let g = Self {
            labels,
            edges,
            adjacency,
        };
        if !g.is_connected() {
            return Err(Error::Validation("graph is disconnected".into()));
        }
        Ok(g)
    }

    /// Like [`WeightedGraph::new`] with labels `"0"`, `"1"`, ...
    pub fn from_edges(n: usize, edges: Vec<Edge>) -> Result<Self> {
        Self::new((0..n).map(|i| i.to_string()).collect(), edges)
    }

    /// Convenience constructor from `(u, v, length)` triples.
    pub fn from_triples(n: usize, triples: &[(usize, usize, f64)]) -> Result<Self> {
        Self::from_edges(
            n,
            triples.iter().map(|&(u, v, w)| Edge::new(u, v, w)).collect(),
        )
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v]
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    /// Sum of all edge lengths, `|E|`.
    pub fn total_length(&self) -> f64 {
        crate::sum::compensated_sum(self.edges.iter().map(|e| e.length))
    }

    pub fn max_edge_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).fold(0.0, f64::max)
    }

    pub fn min_edge_length(&self) -> f64 {
        self.edges
            .iter()
            .map(|e| e.length)
            .fold(f64::INFINITY, f64::min)
    }

    /// The common edge length if all lengths agree to within `tol`.
    pub fn uniform_length(&self, tol: &crate::Tolerance) -> Option<f64> {
        let first = self.edges.first()?.length;
        self.edges
            .iter()
            .all(|e| tol.eq(e.length, first))
            .then_some(first)
    }

    /// Connected with `m = n - 1`.
    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.vertex_count()
    }

    pub fn has_parallel_edges(&self) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(self.edges.len());
        self.edges
            .iter()
            .any(|e| !seen.insert((e.u.min(e.v), e.u.max(e.v))))
    }

    /// Edges whose length exceeds the shortest alternative between their
    /// endpoints, i.e. violations of `d(u, v) = |uv|`.
    pub fn metric_violations(&self, dm: &DistanceMatrix) -> Vec<ShortcutEdge> {
        let tol = dm.tolerance();
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(i, e)| {
                let d = dm.get(e.u, e.v);
                tol.lt(d, e.length).then_some(ShortcutEdge {
                    edge: i,
                    length: e.length,
                    distance: d,
                })
            })
            .collect()
    }

    /// Every edge length multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be positive, got {factor}"
            )));
        }
        let mut g = self.clone();
        for e in &mut g.edges {
            e.length *= factor;
        }
        Ok(g)
    }

    fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(w, _) in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }
}

/// Sum of all edge lengths of `g`.
pub fn total_length(g: &WeightedGraph) -> f64 {
    g.total_length()
}
