//! Whole-graph means: continuous, discrete, Wiener index and vertex-to-graph.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::closed_forms::GraphClass;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, VertexId, WeightedGraph};
use crate::paths::{all_pairs_distances, DistanceMatrix};
use crate::roof::roof_pair_mean;
use crate::spt::{pair_mean, vertex_edge_mean};
use crate::sum::{merge_ordered, NeumaierSum};

/// Generic edge-pair backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Backend {
    #[default]
    Spt,
    Roof,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Spt => "spt",
            Backend::Roof => "roof",
        }
    }

    pub fn pair_mean(self, g: &WeightedGraph, dm: &DistanceMatrix, e: EdgeId, f: EdgeId) -> f64 {
        match self {
            Backend::Spt => pair_mean(g, dm, e, f),
            Backend::Roof => roof_pair_mean(g, dm, e, f),
        }
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spt" => Ok(Backend::Spt),
            "roof" => Ok(Backend::Roof),
            other => Err(Error::InvalidParameter(format!("unknown backend `{other}`"))),
        }
    }
}

/// Which engine produced a [`MeanDistanceResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendTag {
    Spt,
    Roof,
    ClosedForm(GraphClass),
    Oracle,
}

impl From<Backend> for BackendTag {
    fn from(b: Backend) -> Self {
        match b {
            Backend::Spt => BackendTag::Spt,
            Backend::Roof => BackendTag::Roof,
        }
    }
}

impl fmt::Display for BackendTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BackendTag::Spt => f.write_str("spt"),
            BackendTag::Roof => f.write_str("roof"),
            BackendTag::ClosedForm(class) => write!(f, "closed-form:{class}"),
            BackendTag::Oracle => f.write_str("oracle"),
        }
    }
}

impl Serialize for BackendTag {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// One unordered edge pair's share of the pair sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairContribution {
    pub first: EdgeId,
    pub second: EdgeId,
    pub mean: f64,
    /// `|e|·|f|`, counted twice in the sum when `first != second`.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanDistanceResult {
    pub value: f64,
    pub backend: BackendTag,
    pub n: usize,
    pub m: usize,
    pub total_length: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contributions: Option<Vec<PairContribution>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MeanOptions {
    /// Worker threads for the pair loop; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Keep the per-pair table (quadratic memory).
    pub contributions: bool,
}

/// Runs `op` on a dedicated pool of `threads` workers, or inline.
pub fn with_threads<T: Send>(threads: Option<usize>, op: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(op()),
        Some(0) => Err(Error::InvalidParameter("thread count must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(op))
            .map_err(|e| Error::InvalidParameter(format!("cannot start thread pool: {e}"))),
    }
}

/// `Σ_e Σ_f μ(e, f)·|e|·|f|` over ordered pairs, including `e = f`.
///
/// Rows are summed in parallel and merged in row order, so the result is
/// the same for every thread count.
pub fn pair_sum(g: &WeightedGraph, dm: &DistanceMatrix, backend: Backend) -> f64 {
    pair_rows(g, dm, backend, false).0
}

fn pair_rows(
    g: &WeightedGraph,
    dm: &DistanceMatrix,
    backend: Backend,
    keep: bool,
) -> (f64, Option<Vec<PairContribution>>) {
    let m = g.edge_count();
    let rows: Vec<(NeumaierSum, Vec<PairContribution>)> = (0..m)
        .into_par_iter()
        .map(|e| {
            let le = g.edge(e).length;
            let mut row = NeumaierSum::new();
            let mut table = Vec::new();
            row.add(le * le * le / 3.0);
            if keep {
                table.push(PairContribution {
                    first: e,
                    second: e,
                    mean: le / 3.0,
                    weight: le * le,
                });
            }
            for f in e + 1..m {
                let lf = g.edge(f).length;
                let mean = backend.pair_mean(g, dm, e, f);
                row.add(2.0 * mean * le * lf);
                if keep {
                    table.push(PairContribution {
                        first: e,
                        second: f,
                        mean,
                        weight: le * lf,
                    });
                }
            }
            (row, table)
        })
        .collect();
    let total = merge_ordered(rows.iter().map(|(s, _)| s));
    let table = keep.then(|| rows.into_iter().flat_map(|(_, t)| t).collect());
    (total, table)
}

/// Continuous mean distance with a fresh distance matrix and default options.
pub fn continuous_mean(g: &WeightedGraph, backend: Backend) -> Result<MeanDistanceResult> {
    let dm = all_pairs_distances(g);
    continuous_mean_with(g, &dm, backend, &MeanOptions::default())
}

pub fn continuous_mean_with(
    g: &WeightedGraph,
    dm: &DistanceMatrix,
    backend: Backend,
    opts: &MeanOptions,
) -> Result<MeanDistanceResult> {
    if g.edge_count() == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    let total_length = g.total_length();
    let (sum, contributions) =
        with_threads(opts.threads, || pair_rows(g, dm, backend, opts.contributions))?;
    Ok(MeanDistanceResult {
        value: sum / (total_length * total_length),
        backend: backend.into(),
        n: g.vertex_count(),
        m: g.edge_count(),
        total_length,
        contributions,
    })
}

/// Sum of distances over unordered vertex pairs.
pub fn wiener_from(dm: &DistanceMatrix) -> f64 {
    let n = dm.vertex_count();
    let mut acc = NeumaierSum::new();
    for u in 0..n {
        for &d in &dm.row(u)[u + 1..] {
            acc.add(d);
        }
    }
    acc.value()
}

pub fn wiener_index(g: &WeightedGraph) -> f64 {
    wiener_from(&all_pairs_distances(g))
}

/// `2W / n²`: the mean over ordered vertex pairs, self-pairs included.
pub fn discrete_from(dm: &DistanceMatrix) -> f64 {
    let n = dm.vertex_count() as f64;
    2.0 * wiener_from(dm) / (n * n)
}

pub fn discrete_mean(g: &WeightedGraph) -> f64 {
    discrete_from(&all_pairs_distances(g))
}

/// Mean distance from `v` to a random point of the given edges (all edges
/// when `subset` is `None`), weighted by length.
pub fn vertex_graph_mean(
    g: &WeightedGraph,
    dm: &DistanceMatrix,
    v: VertexId,
    subset: Option<&[EdgeId]>,
) -> Result<f64> {
    let all: Vec<EdgeId>;
    let edges = match subset {
        Some(s) => s,
        None => {
            all = (0..g.edge_count()).collect();
            &all
        }
    };
    if edges.is_empty() {
        return Err(Error::EmptyEdgeSet);
    }
    let mut num = NeumaierSum::new();
    let mut den = NeumaierSum::new();
    for &e in edges {
        let len = g.edge(e).length;
        num.add(vertex_edge_mean(g, dm, v, e) * len);
        den.add(len);
    }
    Ok(num.value() / den.value())
}

/// Every edge length multiplied by `factor`.
pub fn scale_graph(g: &WeightedGraph, factor: f64) -> Result<WeightedGraph> {
    g.scaled(factor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind, WeightSpec};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
    }

    fn unit(kind: GraphKind, n: usize) -> WeightedGraph {
        generate(kind, n, &WeightSpec::Uniform(1.0), 0).unwrap()
    }

    #[test]
    fn continuous_examples() {
        for backend in [Backend::Spt, Backend::Roof] {
            let k4 = continuous_mean(&unit(GraphKind::Complete, 4), backend).unwrap();
            assert!(close(k4.value, 17.0 / 18.0), "{backend:?} {}", k4.value);
            let k3 = continuous_mean(&unit(GraphKind::Complete, 3), backend).unwrap();
            assert!(close(k3.value, 0.75));
            let path = WeightedGraph::from_triples(4, &[(0, 1, 2.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
            assert!(close(continuous_mean(&path, backend).unwrap().value, 4.0 / 3.0));
            let cycle = generate(GraphKind::Cycle, 5, &WeightSpec::Explicit(vec![1.0, 2.0, 0.5, 1.5, 1.0]), 0).unwrap();
            assert!(close(continuous_mean(&cycle, backend).unwrap().value, 6.0 / 4.0));
        }
    }

    #[test]
    fn empty_edge_set() {
        let g = WeightedGraph::from_edges(1, vec![]).unwrap();
        assert_eq!(continuous_mean(&g, Backend::Spt).unwrap_err(), Error::EmptyEdgeSet);
        assert_eq!(discrete_mean(&g), 0.0);
    }

    #[test]
    fn discrete_and_wiener_examples() {
        for n in 2..8 {
            assert!(close(discrete_mean(&unit(GraphKind::Complete, n)), (n as f64 - 1.0) / n as f64));
            let nf = n as f64;
            assert!(close(discrete_mean(&unit(GraphKind::Path, n)), (nf * nf - 1.0) / (3.0 * nf)));
        }
        assert_eq!(wiener_index(&unit(GraphKind::Path, 3)), 4.0);
        assert_eq!(wiener_index(&unit(GraphKind::Complete, 4)), 6.0);
        let path = WeightedGraph::from_triples(4, &[(0, 1, 2.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(wiener_index(&path), 13.0);
        assert_eq!(discrete_mean(&path), 26.0 / 16.0);
    }

    #[test]
    fn vertex_graph_examples() {
        let star = unit(GraphKind::Star, 6);
        let dm = all_pairs_distances(&star);
        assert_eq!(vertex_graph_mean(&star, &dm, 0, None).unwrap(), 0.5);

        let single = WeightedGraph::from_triples(2, &[(0, 1, 3.0)]).unwrap();
        let dm = all_pairs_distances(&single);
        assert_eq!(vertex_graph_mean(&single, &dm, 1, None).unwrap(), 1.5);

        let k3 = unit(GraphKind::Complete, 3);
        let dm = all_pairs_distances(&k3);
        assert!(close(vertex_graph_mean(&k3, &dm, 0, None).unwrap(), 0.75));
        assert_eq!(vertex_graph_mean(&k3, &dm, 0, Some(&[])).unwrap_err(), Error::EmptyEdgeSet);
    }

    #[test]
    fn scaling_examples() {
        let k3 = unit(GraphKind::Complete, 3);
        let doubled = scale_graph(&k3, 2.0).unwrap();
        assert!(close(continuous_mean(&doubled, Backend::Spt).unwrap().value, 1.5));
        assert_eq!(scale_graph(&k3, 1.0).unwrap(), k3);
        let single = WeightedGraph::from_triples(2, &[(0, 1, 1.0)]).unwrap();
        let tripled = scale_graph(&single, 3.0).unwrap();
        assert!(close(continuous_mean(&tripled, Backend::Roof).unwrap().value, 1.0));
        assert!(scale_graph(&k3, -1.0).is_err());
    }

    #[test]
    fn thread_count_does_not_change_bits() {
        let g = generate(GraphKind::RandomConnected, 40, &WeightSpec::Random { lo: 0.1, hi: 3.0 }, 3).unwrap();
        let dm = all_pairs_distances(&g);
        let values: Vec<u64> = [1, 2, 8]
            .iter()
            .map(|&t| {
                let opts = MeanOptions { threads: Some(t), contributions: false };
                continuous_mean_with(&g, &dm, Backend::Spt, &opts).unwrap().value.to_bits()
            })
            .collect();
        assert!(values.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn contribution_table_reassembles_value() {
        let g = unit(GraphKind::Complete, 4);
        let dm = all_pairs_distances(&g);
        let opts = MeanOptions { threads: None, contributions: true };
        let r = continuous_mean_with(&g, &dm, Backend::Spt, &opts).unwrap();
        let table = r.contributions.as_ref().unwrap();
        assert_eq!(table.len(), 6 * 7 / 2);
        let sum: f64 = table
            .iter()
            .map(|c| c.mean * c.weight * if c.first == c.second { 1.0 } else { 2.0 })
            .sum();
        assert!(close(sum / 36.0, r.value));
    }

    #[test]
    fn backend_tag_display() {
        assert_eq!(BackendTag::Spt.to_string(), "spt");
        assert_eq!(BackendTag::ClosedForm(GraphClass::Tree).to_string(), "closed-form:tree");
        assert_eq!("roof".parse::<Backend>().unwrap(), Backend::Roof);
        assert!("foo".parse::<Backend>().is_err());
    }
}
