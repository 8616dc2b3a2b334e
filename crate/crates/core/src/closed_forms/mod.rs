//! Linear-time means for trees, cacti, cycles and uniform complete graphs.

mod blocks;
mod tree;

pub use blocks::{block_decomposition, cactus_mean, Block, BlockDecomposition, BlockKind};
pub use tree::tree_mean;

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::aggregate::{continuous_mean_with, Backend, BackendTag, MeanDistanceResult, MeanOptions};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::paths::DistanceMatrix;
use crate::Tolerance;

/// Length, mean and mean distance from its attachment vertex of a connected
/// piece of a graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubtreeSummary {
    pub length: f64,
    pub mean: f64,
    pub root_mean: f64,
}

impl SubtreeSummary {
    /// A single edge seen from one of its endpoints.
    pub fn edge(length: f64) -> Self {
        Self {
            length,
            mean: length / 3.0,
            root_mean: length / 2.0,
        }
    }
}

/// Glues two pieces that share only their attachment vertex. Every path
/// between them runs through that vertex, so the cross term is the sum of
/// the two root means.
pub fn merge_at_cut_vertex(a: SubtreeSummary, b: SubtreeSummary) -> SubtreeSummary {
    let length = a.length + b.length;
    let (wa, wb) = (a.length / length, b.length / length);
    SubtreeSummary {
        length,
        mean: wa * wa * a.mean + wb * wb * b.mean + 2.0 * wa * wb * (a.root_mean + b.root_mean),
        root_mean: wa * a.root_mean + wb * b.root_mean,
    }
}

/// Folds `b` into an optional accumulator.
pub(crate) fn absorb(acc: &mut Option<SubtreeSummary>, b: SubtreeSummary) {
    *acc = Some(match acc.take() {
        Some(a) => merge_at_cut_vertex(a, b),
        None => b,
    });
}

/// `α(9n² − 22n + 12) / (6(n² − n))`.
pub fn complete_uniform_mean(n: usize, length: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "complete graph needs at least 2 vertices, got {n}"
        )));
    }
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "edge length must be positive, got {length}"
        )));
    }
    let n = n as f64;
    Ok(length * (9.0 * n * n - 22.0 * n + 12.0) / (6.0 * (n * n - n)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphClass {
    Path,
    Cycle,
    Tree,
    CompleteUniform,
    Cactus,
    General,
}

impl GraphClass {
    pub fn name(self) -> &'static str {
        match self {
            GraphClass::Path => "path",
            GraphClass::Cycle => "cycle",
            GraphClass::Tree => "tree",
            GraphClass::CompleteUniform => "complete_uniform",
            GraphClass::Cactus => "cactus",
            GraphClass::General => "general",
        }
    }
}

impl fmt::Display for GraphClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GraphClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            GraphClass::Path,
            GraphClass::Cycle,
            GraphClass::Tree,
            GraphClass::CompleteUniform,
            GraphClass::Cactus,
            GraphClass::General,
        ]
        .into_iter()
        .find(|c| c.name() == s)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown graph class `{s}`")))
    }
}

impl Serialize for GraphClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// The most specific class `g` belongs to, in the order path, cycle, tree,
/// uniform complete graph, cactus, general. O(n + m).
pub fn detect_class(g: &WeightedGraph, tol: &Tolerance) -> GraphClass {
    let (n, m) = (g.vertex_count(), g.edge_count());
    let max_degree = (0..n).map(|v| g.degree(v)).max().unwrap_or(0);
    if g.is_tree() {
        return if max_degree <= 2 {
            GraphClass::Path
        } else {
            GraphClass::Tree
        };
    }
    if m == n && (0..n).all(|v| g.degree(v) == 2) {
        return GraphClass::Cycle;
    }
    if n >= 2
        && m == n * (n - 1) / 2
        && !g.has_parallel_edges()
        && g.uniform_length(tol).is_some()
    {
        return GraphClass::CompleteUniform;
    }
    if block_decomposition(g).is_cactus() {
        return GraphClass::Cactus;
    }
    GraphClass::General
}

/// Evaluates the closed form for `class`. The caller is responsible for
/// `class` being correct; mismatches surface as the engine's own error.
pub fn closed_form_mean(g: &WeightedGraph, class: GraphClass) -> Result<f64> {
    if g.edge_count() == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    match class {
        GraphClass::Path => Ok(g.total_length() / 3.0),
        GraphClass::Cycle => Ok(g.total_length() / 4.0),
        GraphClass::Tree => tree_mean(g),
        GraphClass::Cactus => cactus_mean(g),
        GraphClass::CompleteUniform => {
            let tol = Tolerance::default();
            let length = g.uniform_length(&tol).ok_or(Error::NotUniform {
                min: g.min_edge_length(),
                max: g.max_edge_length(),
            })?;
            complete_uniform_mean(g.vertex_count(), length)
        }
        GraphClass::General => Err(Error::InvalidParameter(
            "general graphs have no closed form".into(),
        )),
    }
}

/// Picks the fastest engine: a closed form when one applies, otherwise the
/// shortest-path-tree backend.
pub fn auto_mean(
    g: &WeightedGraph,
    dm: &DistanceMatrix,
    opts: &MeanOptions,
) -> Result<(GraphClass, MeanDistanceResult)> {
    let class = detect_class(g, dm.tolerance());
    if class == GraphClass::General {
        return Ok((class, continuous_mean_with(g, dm, Backend::Spt, opts)?));
    }
    let value = closed_form_mean(g, class)?;
    Ok((
        class,
        MeanDistanceResult {
            value,
            backend: BackendTag::ClosedForm(class),
            n: g.vertex_count(),
            m: g.edge_count(),
            total_length: g.total_length(),
            contributions: None,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind, WeightSpec};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn merge_two_unit_edges_is_a_path() {
        let m = merge_at_cut_vertex(SubtreeSummary::edge(1.0), SubtreeSummary::edge(1.0));
        assert_eq!(m.length, 2.0);
        assert!(close(m.mean, 2.0 / 3.0));
        assert!(close(m.root_mean, 0.5));
    }

    #[test]
    fn merge_with_vanishing_piece() {
        let a = SubtreeSummary {
            length: 3.0,
            mean: 1.1,
            root_mean: 1.7,
        };
        let m = merge_at_cut_vertex(a, SubtreeSummary::edge(1e-12));
        assert!((m.mean - a.mean).abs() < 1e-11);
        assert!((m.root_mean - a.root_mean).abs() < 1e-11);
    }

    #[test]
    fn complete_uniform_examples() {
        assert!(close(complete_uniform_mean(3, 1.0).unwrap(), 0.75));
        assert!(close(complete_uniform_mean(4, 1.0).unwrap(), 17.0 / 18.0));
        assert!(close(complete_uniform_mean(2, 2.5).unwrap(), 2.5 / 3.0));
        assert!(complete_uniform_mean(1, 1.0).is_err());
        assert!(complete_uniform_mean(4, 0.0).is_err());
    }

    #[test]
    fn detect_examples() {
        let tol = Tolerance::default();
        let path = WeightedGraph::from_triples(4, &[(0, 1, 2.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(detect_class(&path, &tol), GraphClass::Path);
        let k5 = generate(GraphKind::Complete, 5, &WeightSpec::Uniform(1.0), 0).unwrap();
        assert_eq!(detect_class(&k5, &tol), GraphClass::CompleteUniform);
        let pendant = WeightedGraph::from_triples(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(detect_class(&pendant, &tol), GraphClass::Cactus);
        let star = generate(GraphKind::Star, 5, &WeightSpec::Uniform(1.0), 0).unwrap();
        assert_eq!(detect_class(&star, &tol), GraphClass::Tree);
        let c5 = generate(GraphKind::Cycle, 5, &WeightSpec::Uniform(1.0), 0).unwrap();
        assert_eq!(detect_class(&c5, &tol), GraphClass::Cycle);
        let k4_weighted = generate(GraphKind::Complete, 4, &WeightSpec::Explicit(vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.5]), 0).unwrap();
        assert_eq!(detect_class(&k4_weighted, &tol), GraphClass::General);
    }

    #[test]
    fn class_names_round_trip() {
        for s in ["path", "cycle", "tree", "complete_uniform", "cactus", "general"] {
            assert_eq!(s.parse::<GraphClass>().unwrap().name(), s);
        }
    }
}
