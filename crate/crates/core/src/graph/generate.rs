//! Seeded instance factory for the graph classes the library targets.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Edge, WeightedGraph};
use crate::error::{Error, Result};
use crate::paths::all_pairs_distances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphKind {
    Path,
    Cycle,
    Star,
    Complete,
    RandomTree,
    RandomCactus,
    RandomConnected,
}

impl GraphKind {
    pub const ALL: [GraphKind; 7] = [
        GraphKind::Path,
        GraphKind::Cycle,
        GraphKind::Star,
        GraphKind::Complete,
        GraphKind::RandomTree,
        GraphKind::RandomCactus,
        GraphKind::RandomConnected,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GraphKind::Path => "path",
            GraphKind::Cycle => "cycle",
            GraphKind::Star => "star",
            GraphKind::Complete => "complete",
            GraphKind::RandomTree => "random_tree",
            GraphKind::RandomCactus => "random_cactus",
            GraphKind::RandomConnected => "random_connected",
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl serde::Serialize for GraphKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GraphKind::ALL
            .into_iter()
            .find(|k| k.name() == s || k.name().replace('_', "-") == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown graph kind `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    Uniform(f64),
    Random { lo: f64, hi: f64 },
    Explicit(Vec<f64>),
}

impl WeightSpec {
    fn check(&self) -> Result<()> {
        let bad = |what: String| Err(Error::InvalidParameter(what));
        match self {
            WeightSpec::Uniform(a) if !(a.is_finite() && *a > 0.0) => {
                bad(format!("uniform length must be positive, got {a}"))
            }
            WeightSpec::Random { lo, hi } if !(lo.is_finite() && *lo > 0.0 && hi >= lo) => {
                bad(format!("random length range [{lo}, {hi}] is invalid"))
            }
            WeightSpec::Explicit(ws) if ws.iter().any(|w| !(w.is_finite() && *w > 0.0)) => {
                bad("explicit lengths must all be positive".into())
            }
            _ => Ok(()),
        }
    }
}

/// Full generator configuration. [`generate`] covers the common case.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub kind: GraphKind,
    pub n: usize,
    pub weights: WeightSpec,
    pub seed: u64,
    /// Target edge count for `RandomConnected` (default `n - 1 + n / 2`).
    pub edges: Option<usize>,
    /// Probability that an extra `RandomConnected` edge duplicates an existing one.
    pub parallel_prob: f64,
}

impl GeneratorSpec {
    pub fn new(kind: GraphKind, n: usize, weights: WeightSpec) -> Self {
        Self {
            kind,
            n,
            weights,
            seed: 0,
            edges: None,
            parallel_prob: 0.0,
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn edges(mut self, m: usize) -> Self {
        self.edges = Some(m);
        self
    }

    pub fn parallel_prob(mut self, p: f64) -> Self {
        self.parallel_prob = p;
        self
    }

    pub fn build(&self) -> Result<WeightedGraph> {
        self.weights.check()?;
        let min_n = if self.kind == GraphKind::Cycle { 3 } else { 2 };
        if self.n < min_n {
            return Err(Error::InvalidParameter(format!(
                "{} needs at least {min_n} vertices, got {}",
                self.kind, self.n
            )));
        }
        if !(0.0..=1.0).contains(&self.parallel_prob) {
            return Err(Error::InvalidParameter(format!(
                "parallel edge probability {} is outside [0, 1]",
                self.parallel_prob
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let pairs = self.topology(&mut rng)?;
        let lengths = self.lengths(pairs.len(), &mut rng)?;
        let edges: Vec<Edge> = pairs
            .iter()
            .zip(&lengths)
            .map(|(&(u, v), &w)| Edge::new(u, v, w))
            .collect();
        let g = WeightedGraph::from_edges(self.n, edges)?;
        self.enforce_metric(g, &mut rng)
    }

    fn topology(&self, rng: &mut ChaCha8Rng) -> Result<Vec<(usize, usize)>> {
        let n = self.n;
        Ok(match self.kind {
            GraphKind::Path => (0..n - 1).map(|i| (i, i + 1)).collect(),
            GraphKind::Cycle => (0..n).map(|i| (i, (i + 1) % n)).collect(),
            GraphKind::Star => (1..n).map(|i| (0, i)).collect(),
            GraphKind::Complete => (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .collect(),
            GraphKind::RandomTree => random_tree(n, rng),
            GraphKind::RandomCactus => random_cactus(n, rng),
            GraphKind::RandomConnected => {
                let m = self
                    .edges
                    .unwrap_or((n - 1 + n / 2).min(n * (n - 1) / 2));
                random_connected(n, m, self.parallel_prob, rng)?
            }
        })
    }

    fn lengths(&self, m: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
        Ok(match &self.weights {
            WeightSpec::Uniform(a) => vec![*a; m],
            WeightSpec::Random { lo, hi } => (0..m).map(|_| sample(rng, *lo, *hi)).collect(),
            WeightSpec::Explicit(ws) => {
                if ws.len() != m {
                    return Err(Error::InvalidParameter(format!(
                        "{} on {} vertices has {m} edges but {} lengths were given",
                        self.kind,
                        self.n,
                        ws.len()
                    )));
                }
                ws.clone()
            }
        })
    }

    /// Random lengths may produce edges that are longer than a detour between
    /// their endpoints. Complete graphs are resampled a few times; after that,
    /// and for every other kind, each edge is clamped to the distance between
    /// its endpoints, which leaves all distances unchanged.
    fn enforce_metric(&self, mut g: WeightedGraph, rng: &mut ChaCha8Rng) -> Result<WeightedGraph> {
        const RESAMPLE_ATTEMPTS: usize = 64;
        let (lo, hi) = match self.weights {
            WeightSpec::Uniform(_) => return Ok(g),
            WeightSpec::Explicit(_) => {
                let dm = all_pairs_distances(&g);
                if let Some(v) = g.metric_violations(&dm).first() {
                    let e = g.edge(v.edge);
                    return Err(Error::MetricEdgeViolation {
                        edge: v.edge,
                        first: g.label(e.u).to_string(),
                        second: g.label(e.v).to_string(),
                        length: v.length,
                        distance: v.distance,
                    });
                }
                return Ok(g);
            }
            WeightSpec::Random { lo, hi } => (lo, hi),
        };
        if matches!(self.kind, GraphKind::Path | GraphKind::Star | GraphKind::RandomTree) {
            return Ok(g);
        }
        let attempts = if self.kind == GraphKind::Complete {
            RESAMPLE_ATTEMPTS
        } else {
            0
        };
        for _ in 0..attempts {
            let dm = all_pairs_distances(&g);
            if g.metric_violations(&dm).is_empty() {
                return Ok(g);
            }
            let edges = g
                .edges()
                .iter()
                .map(|e| Edge::new(e.u, e.v, sample(rng, lo, hi)))
                .collect();
            g = WeightedGraph::from_edges(self.n, edges)?;
        }
        let dm = all_pairs_distances(&g);
        let edges = g
            .edges()
            .iter()
            .map(|e| Edge::new(e.u, e.v, dm.get(e.u, e.v).min(e.length)))
            .collect();
        WeightedGraph::from_edges(self.n, edges)
    }
}

/// Seeded graph of the requested class.
pub fn generate(kind: GraphKind, n: usize, weights: &WeightSpec, seed: u64) -> Result<WeightedGraph> {
    GeneratorSpec::new(kind, n, weights.clone()).seed(seed).build()
}

fn sample(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.gen_range(lo..=hi)
    } else {
        lo
    }
}

/// Random recursive tree: vertex `i` hangs off a uniformly chosen earlier vertex.
fn random_tree(n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    (1..n)
        .map(|i| (order[rng.gen_range(0..i)], order[i]))
        .collect()
}

/// Grows a cactus by hanging pendant edges and fresh cycles off existing vertices.
fn random_cactus(n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    let mut count = 1;
    while count < n {
        let anchor = rng.gen_range(0..count);
        let remaining = n - count;
        if remaining >= 2 && rng.gen_bool(0.5) {
            let k = rng.gen_range(2..=remaining.min(5));
            let mut prev = anchor;
            for i in 0..k {
                edges.push((prev, count + i));
                prev = count + i;
            }
            edges.push((prev, anchor));
            count += k;
        } else {
            edges.push((anchor, count));
            count += 1;
        }
    }
    edges
}

fn random_connected(
    n: usize,
    m: usize,
    parallel_prob: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(usize, usize)>> {
    if m < n - 1 {
        return Err(Error::InvalidParameter(format!(
            "a connected graph on {n} vertices needs at least {} edges, got {m}",
            n - 1
        )));
    }
    let simple_max = n * (n - 1) / 2;
    if parallel_prob == 0.0 && m > simple_max {
        return Err(Error::InvalidParameter(format!(
            "a simple graph on {n} vertices has at most {simple_max} edges, got {m}"
        )));
    }
    let mut edges = random_tree(n, rng);
    let mut present: HashSet<(usize, usize)> =
        edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
    while edges.len() < m {
        if parallel_prob > 0.0 && (present.len() == simple_max || rng.gen_bool(parallel_prob)) {
            let &(u, v) = edges.choose(rng).expect("tree has edges");
            edges.push((v, u));
            continue;
        }
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v || !present.insert((u.min(v), u.max(v))) {
            continue;
        }
        edges.push((u, v));
    }
    Ok(edges)
}
