//! Edge-pair and line-graph bounds, tree subdivisions and the Wiener-index
//! sandwich for repeated midpoint subdivision.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::aggregate::discrete_from;
use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeId, VertexId, WeightedGraph};
use crate::paths::{all_pairs_distances, streaming_wiener, DistanceMatrix};
use crate::sum::NeumaierSum;
use crate::Tolerance;

/// Largest subdivided graph [`canonical_subdivision`] will build.
pub const DEFAULT_VERTEX_CAP: u128 = 1 << 20;
/// Largest subdivided graph whose Wiener index is computed directly.
pub const DEFAULT_MATERIALIZE_CAP: u128 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairBounds {
    pub distance: f64,
    pub lower: f64,
    pub upper: f64,
}

/// `d(e,f) + (|e|+|f|)/4 ≤ μ(e,f) ≤ d(e,f) + (|e|+|f|)/2` for distinct edges.
pub fn pair_bounds(g: &WeightedGraph, dm: &DistanceMatrix, e: EdgeId, f: EdgeId) -> Result<PairBounds> {
    if e == f {
        return Err(Error::InvalidParameter(
            "pair bounds need two distinct edges".into(),
        ));
    }
    let distance = dm.edge_edge(g, e, f);
    let spread = g.edge(e).length + g.edge(f).length;
    Ok(PairBounds {
        distance,
        lower: distance + spread / 4.0,
        upper: distance + spread / 2.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineGraphBounds {
    pub length: f64,
    /// Wiener index of the line graph with every edge of length `length`.
    pub line_wiener: f64,
    pub line_discrete_mean: f64,
    pub lower: f64,
    pub upper: f64,
}

/// The line graph with unit lengths: one vertex per edge, adjacent when the
/// edges share an endpoint.
pub fn line_graph(g: &WeightedGraph) -> Result<WeightedGraph> {
    let m = g.edge_count();
    if m == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    let mut pairs = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for v in 0..g.vertex_count() {
        let incident = g.neighbors(v);
        for (i, &(_, e)) in incident.iter().enumerate() {
            for &(_, f) in &incident[i + 1..] {
                let key = (e.min(f), e.max(f));
                if e != f && seen.insert(key) {
                    pairs.push(Edge::new(key.0, key.1, 1.0));
                }
            }
        }
    }
    WeightedGraph::from_edges(m, pairs)
}

/// Sandwich of the continuous mean of a uniform graph by the discrete mean
/// of its line graph.
pub fn line_graph_bounds(g: &WeightedGraph) -> Result<LineGraphBounds> {
    let tol = Tolerance::default();
    let length = g.uniform_length(&tol).ok_or(Error::NotUniform {
        min: g.min_edge_length(),
        max: g.max_edge_length(),
    })?;
    let line = line_graph(g)?.scaled(length)?;
    let dm = all_pairs_distances(&line);
    let line_discrete_mean = discrete_from(&dm);
    let m = g.edge_count() as f64;
    let upper = line_discrete_mean + length / (3.0 * m);
    Ok(LineGraphBounds {
        length,
        line_wiener: crate::aggregate::wiener_from(&dm),
        line_discrete_mean,
        lower: upper - (m - 1.0) * length / (2.0 * m),
        upper,
    })
}

/// Where the extra vertices go on each edge of a tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// Equally spaced.
    Even,
    /// Independent uniform positions, sorted.
    Random { seed: u64 },
}

/// Inserts `k` vertices into every edge of a tree.
pub fn subdivide_tree_arbitrary(t: &WeightedGraph, k: usize, placement: Placement) -> Result<WeightedGraph> {
    if !t.is_tree() {
        return Err(Error::NotATree);
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let n = t.vertex_count();
    let mut rng = match placement {
        Placement::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        Placement::Even => None,
    };
    let mut edges = Vec::with_capacity(t.edge_count() * (k + 1));
    let mut next = n;
    for e in t.edges() {
        let cuts = match rng.as_mut() {
            None => (1..=k).map(|i| i as f64 / (k + 1) as f64).collect(),
            Some(rng) => random_cuts(rng, k),
        };
        let mut prev = (e.u, 0.0);
        for c in cuts {
            edges.push(Edge::new(prev.0, next, (c - prev.1) * e.length));
            prev = (next, c);
            next += 1;
        }
        edges.push(Edge::new(prev.0, e.v, (1.0 - prev.1) * e.length));
    }
    WeightedGraph::from_edges(next, edges)
}

/// `k` sorted fractions in `(0, 1)` at least `1e-9` apart and from the ends.
fn random_cuts(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    const SPACING: f64 = 1e-9;
    loop {
        let mut cuts: Vec<f64> = (0..k).map(|_| rng.gen::<f64>()).collect();
        cuts.sort_by(f64::total_cmp);
        let ok = cuts.first().is_some_and(|&c| c >= SPACING)
            && cuts.last().is_some_and(|&c| c <= 1.0 - SPACING)
            && cuts.windows(2).all(|w| w[1] - w[0] >= SPACING);
        if ok {
            return cuts;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TreeBoundReport {
    pub n: usize,
    pub k: usize,
    pub discrete_mean: f64,
    pub subdivided_discrete_mean: f64,
    pub bound: f64,
    /// `bound - subdivided_discrete_mean`; positive when the bound holds.
    pub margin: f64,
    pub holds: bool,
}

/// Evaluates `μ_d(T^(k)) < n/(n − 2k/(k+1)) · μ_d(T)`.
pub fn tree_subdivision_bound_check(t: &WeightedGraph, k: usize, placement: Placement) -> Result<TreeBoundReport> {
    let sub = subdivide_tree_arbitrary(t, k, placement)?;
    let n = t.vertex_count();
    let discrete_mean = discrete_from(&all_pairs_distances(t));
    let subdivided_discrete_mean = discrete_from(&all_pairs_distances(&sub));
    let nf = n as f64;
    let kf = k as f64;
    let bound = nf / (nf - 2.0 * kf / (kf + 1.0)) * discrete_mean;
    let margin = bound - subdivided_discrete_mean;
    Ok(TreeBoundReport {
        n,
        k,
        discrete_mean,
        subdivided_discrete_mean,
        bound,
        margin,
        holds: margin > 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    /// An original vertex.
    Black,
    /// The midpoint of an original edge.
    Blue,
    /// Any later subdivision vertex.
    Red,
}

/// Vertex count of the `k`-th midpoint subdivision: `n + m(2^k − 1)`.
pub fn subdivision_vertex_count(n: usize, m: usize, k: u32) -> Option<u128> {
    let pieces = 1u128.checked_shl(k)?;
    (m as u128)
        .checked_mul(pieces - 1)?
        .checked_add(n as u128)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubdividedGraph {
    pub k: u32,
    pub graph: WeightedGraph,
    pub roles: Vec<Role>,
    /// Vertex sequence of each original edge from its first to its second
    /// endpoint, `2^k + 1` vertices long.
    pub edge_paths: Vec<Vec<VertexId>>,
}

impl SubdividedGraph {
    pub fn vertices_with(&self, role: Role) -> impl Iterator<Item = VertexId> + '_ {
        self.roles
            .iter()
            .enumerate()
            .filter_map(move |(v, &r)| (r == role).then_some(v))
    }
}

/// Midpoint subdivision followed by splitting each half into `2^(k-1)`
/// equal pieces. Black vertices keep their ids, the midpoint of edge `i` is
/// `n + i`, red vertices follow.
pub fn canonical_subdivision(g: &WeightedGraph, k: u32) -> Result<SubdividedGraph> {
    canonical_subdivision_capped(g, k, DEFAULT_VERTEX_CAP)
}

pub fn canonical_subdivision_capped(g: &WeightedGraph, k: u32, cap: u128) -> Result<SubdividedGraph> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let (n, m) = (g.vertex_count(), g.edge_count());
    let requested = subdivision_vertex_count(n, m, k).unwrap_or(u128::MAX);
    if requested > cap {
        return Err(Error::CapExceeded {
            what: "subdivided graph vertices",
            requested,
            cap,
        });
    }
    let total = requested as usize;
    let pieces = 1usize << k;
    let half = pieces / 2;
    let mut roles = vec![Role::Black; n];
    roles.resize(n + m, Role::Blue);
    roles.resize(total, Role::Red);
    let mut next_red = n + m;
    let mut edges = Vec::with_capacity(m * pieces);
    let mut edge_paths = Vec::with_capacity(m);
    for (i, e) in g.edges().iter().enumerate() {
        let step = e.length / pieces as f64;
        let mut path = Vec::with_capacity(pieces + 1);
        path.push(e.u);
        for j in 1..pieces {
            if j == half {
                path.push(n + i);
            } else {
                path.push(next_red);
                next_red += 1;
            }
        }
        path.push(e.v);
        for w in path.windows(2) {
            edges.push(Edge::new(w[0], w[1], step));
        }
        edge_paths.push(path);
    }
    let labels = (0..total)
        .map(|v| match roles[v] {
            Role::Black => g.label(v).to_string(),
            Role::Blue => format!("b{}", v - n),
            Role::Red => format!("r{}", v - n - m),
        })
        .collect();
    Ok(SubdividedGraph {
        k,
        graph: WeightedGraph::new(labels, edges)?,
        roles,
        edge_paths,
    })
}

/// Sums of distances within and between the black and blue vertex sets of
/// the first subdivision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MidpointSums {
    /// Wiener index of the first subdivision (black and blue vertices).
    pub first: f64,
    /// Over unordered pairs of blue vertices.
    pub blue: f64,
    /// Over (blue, black) pairs.
    pub blue_black: f64,
}

pub fn midpoint_sums(g: &WeightedGraph) -> Result<MidpointSums> {
    let first = canonical_subdivision(g, 1)?;
    let dm = all_pairs_distances(&first.graph);
    let (n, m) = (g.vertex_count(), g.edge_count());
    let mut all = NeumaierSum::new();
    let mut blue = NeumaierSum::new();
    let mut blue_black = NeumaierSum::new();
    for u in 0..n + m {
        for v in u + 1..n + m {
            let d = dm.get(u, v);
            all.add(d);
            match (u >= n, v >= n) {
                (true, true) => blue.add(d),
                (false, true) => blue_black.add(d),
                _ => {}
            }
        }
    }
    Ok(MidpointSums {
        first: all.value(),
        blue: blue.value(),
        blue_black: blue_black.value(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichBounds {
    pub k: u32,
    pub vertex_count: f64,
    pub omega: f64,
    pub lower: f64,
    pub upper: f64,
    /// Longest edge.
    pub rho: f64,
    pub sums: MidpointSums,
    pub mu_d_actual: Option<f64>,
}

/// Upper and lower bounds on `μ_d(G^k)` from the first subdivision alone.
///
/// With `materialize`, `G^k` is also built (within [`DEFAULT_MATERIALIZE_CAP`]
/// vertices) and its discrete mean recorded.
pub fn omega_sandwich(g: &WeightedGraph, k: u32, materialize: bool) -> Result<SandwichBounds> {
    omega_sandwich_capped(g, k, materialize.then_some(DEFAULT_MATERIALIZE_CAP))
}

pub fn omega_sandwich_capped(g: &WeightedGraph, k: u32, materialize_cap: Option<u128>) -> Result<SandwichBounds> {
    let (n, m) = (g.vertex_count(), g.edge_count());
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "the sandwich needs at least 2 edges, got {m}"
        )));
    }
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "the sandwich needs k ≥ 2, got {k}"
        )));
    }
    let sums = midpoint_sums(g)?;
    let p = 2f64.powi(k as i32);
    let (nf, mf) = (n as f64, m as f64);
    let total_length = g.total_length();
    let omega = sums.first
        + (p - 2.0) * (p * sums.blue + sums.blue_black)
        + total_length * (p * p / 6.0 - p / 2.0 + 1.0 / 3.0);
    let rho = g.max_edge_length();
    let pairs = mf * (mf - 1.0) / 2.0;
    let deficit = rho * (3.0 * pairs + mf * (nf - 2.0)) * (p / 4.0 - 0.5);
    let count = nf + mf * (p - 1.0);
    let mu_d_actual = match materialize_cap {
        None => None,
        Some(cap) => {
            let sub = canonical_subdivision_capped(g, k, cap)?;
            Some(2.0 * streaming_wiener(&sub.graph) / (count * count))
        }
    };
    Ok(SandwichBounds {
        k,
        vertex_count: count,
        omega,
        lower: 2.0 * (omega - deficit) / (count * count),
        upper: 2.0 * omega / (count * count),
        rho,
        sums,
        mu_d_actual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubdivisionLimits {
    /// Discrete mean over blue vertices, self-pairs included.
    pub blue_discrete_mean: f64,
    /// `μ_d(ℬ) + |E|/(3m²)`, an upper bound on the limit of `μ_d(G^k)`.
    pub upper_limit: f64,
    /// The limit itself, for trees.
    pub tree_exact: Option<f64>,
}

pub fn subdivision_limits(g: &WeightedGraph) -> Result<SubdivisionLimits> {
    let m = g.edge_count();
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "subdivision limits need at least 2 edges, got {m}"
        )));
    }
    let sums = midpoint_sums(g)?;
    let mf = m as f64;
    let blue_discrete_mean = 2.0 * sums.blue / (mf * mf);
    let upper_limit = blue_discrete_mean + g.total_length() / (3.0 * mf * mf);
    let tree_exact = g.is_tree().then(|| {
        let nf = g.vertex_count() as f64 - 1.0;
        blue_discrete_mean + g.total_length() / (3.0 * nf * nf)
    });
    Ok(SubdivisionLimits {
        blue_discrete_mean,
        upper_limit,
        tree_exact,
    })
}

/// The Wiener index of a subdivision split by vertex roles:
/// first-subdivision pairs, red-red, red-black and red-blue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoleWiener {
    pub first: f64,
    pub red: f64,
    pub red_black: f64,
    pub red_blue: f64,
}

impl RoleWiener {
    pub fn total(&self) -> f64 {
        self.first + self.red + self.red_black + self.red_blue
    }
}

/// Brute-force role decomposition from a full distance matrix.
pub fn role_wiener(sub: &SubdividedGraph) -> RoleWiener {
    let dm = all_pairs_distances(&sub.graph);
    let mut parts = [NeumaierSum::new(); 4];
    let n = sub.roles.len();
    for u in 0..n {
        for v in u + 1..n {
            let slot = match (sub.roles[u], sub.roles[v]) {
                (Role::Red, Role::Red) => 1,
                (Role::Red, Role::Black) | (Role::Black, Role::Red) => 2,
                (Role::Red, Role::Blue) | (Role::Blue, Role::Red) => 3,
                _ => 0,
            };
            parts[slot].add(dm.get(u, v));
        }
    }
    RoleWiener {
        first: parts[0].value(),
        red: parts[1].value(),
        red_black: parts[2].value(),
        red_blue: parts[3].value(),
    }
}
