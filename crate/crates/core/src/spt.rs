//! Edge-pair means from shortest-path-tree case analysis.
//!
//! Two distinct edges `ab` and `uv` fall into one of three configurations:
//! linear (one edge is only ever reached through one endpoint of the other),
//! rectangular (two equal connecting paths of the same length on both sides)
//! or the general cycle configuration. The cycle configuration splits `uv` at
//! the two break points seen from `a` and `b` and `ab` at the matching mirror
//! points; every resulting block is either a vertex-to-edge mean shifted by a
//! constant or a rectangular block.

use serde::Serialize;

use crate::graph::{EdgeId, EdgeRef, Endpoint, VertexId, WeightedGraph};
use crate::paths::{edge_in_tree, same_component_property, DistanceMatrix};

/// Mean distance from vertex `v` to a uniformly random point on edge `e`.
pub fn vertex_edge_mean(g: &WeightedGraph, dm: &DistanceMatrix, v: VertexId, e: EdgeId) -> f64 {
    let edge = g.edge(e);
    let len = edge.length;
    let da = dm.get(v, edge.u);
    let db = dm.get(v, edge.v);
    if edge_in_tree(g, dm, v, e) {
        return da.min(db) + len / 2.0;
    }
    // Out-of-tree: the edge splits at the break point into two pieces reached
    // from opposite ends.
    let lambda = ((len + db - da) / (2.0 * len)).clamp(0.0, 1.0);
    (da + lambda * len / 2.0) * lambda + (db + (1.0 - lambda) * len / 2.0) * (1.0 - lambda)
}

/// Break and mirror points of a pair in the cycle configuration.
///
/// `target` is split at `break_a ≤ break_b` (the points equidistant from
/// `source`'s first and second endpoint through both ends of `target`);
/// `source` is split at `mirror_a ≤ mirror_b`. All four are edge parameters
/// in `[0, 1]` along the stored orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CycleBreaks {
    pub source: EdgeRef,
    pub target: EdgeRef,
    pub break_a: f64,
    pub break_b: f64,
    pub mirror_a: f64,
    pub mirror_b: f64,
}

impl CycleBreaks {
    /// Relative lengths of the three segments of `target` and of `source`.
    pub fn segment_weights(&self) -> ([f64; 3], [f64; 3]) {
        (
            [self.break_a, self.break_b - self.break_a, 1.0 - self.break_b],
            [self.mirror_a, self.mirror_b - self.mirror_a, 1.0 - self.mirror_b],
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum EdgePairCase {
    SameEdge,
    /// Every point of the other edge is reached from `split` through its
    /// `through` endpoint, so the mean is `|split|/2 + μ(through, other)`.
    Linear { split: EdgeId, through: Endpoint },
    Cycle(CycleBreaks),
    /// Both connecting paths have length `theta` and both edges length `lambda`.
    Rectangular { theta: f64, lambda: f64 },
}

/// Corner distances of an oriented pair `ab` (source) and `uv` (target).
#[derive(Debug, Clone, Copy)]
struct Corners {
    source: EdgeRef,
    target: EdgeRef,
    u: VertexId,
    v: VertexId,
    len_ab: f64,
    len_uv: f64,
    d_au: f64,
    d_av: f64,
    d_bu: f64,
    d_bv: f64,
}

impl Corners {
    fn new(g: &WeightedGraph, dm: &DistanceMatrix, source: EdgeRef, target: EdgeRef) -> Self {
        let (a, b) = source.endpoints(g);
        let (u, v) = target.endpoints(g);
        Self {
            source,
            target,
            u,
            v,
            len_ab: g.edge(source.index).length,
            len_uv: g.edge(target.index).length,
            d_au: dm.get(a, u),
            d_av: dm.get(a, v),
            d_bu: dm.get(b, u),
            d_bv: dm.get(b, v),
        }
    }

    /// Positions along `uv` (from `u`) where `a` and `b` switch from reaching
    /// through `u` to reaching through `v`.
    fn breaks(&self) -> (f64, f64) {
        let s = |du: f64, dv: f64| ((self.len_uv + dv - du) / 2.0).clamp(0.0, self.len_uv);
        (s(self.d_au, self.d_av), s(self.d_bu, self.d_bv))
    }

    /// Orients `ab` so that `a`'s break point comes first along `uv`.
    fn oriented(g: &WeightedGraph, dm: &DistanceMatrix, e: EdgeId, f: EdgeId) -> Self {
        let c = Self::new(g, dm, EdgeRef::new(e), EdgeRef::new(f));
        let (sa, sb) = c.breaks();
        if sa > sb {
            Self::new(g, dm, EdgeRef::new(e).reverse(), EdgeRef::new(f))
        } else {
            c
        }
    }
}

/// Middle-band geometry: `uv` between the break points and `ab` between the
/// mirror points, in physical lengths.
struct Band {
    lo: f64,
    hi: f64,
    x1: f64,
    x2: f64,
    theta: f64,
}

impl Band {
    fn of(c: &Corners) -> Self {
        let (lo, hi) = c.breaks();
        let mirror = |du: f64, dv: f64| ((c.len_ab + dv - du) / 2.0).clamp(0.0, c.len_ab);
        let x1 = mirror(c.d_au, c.d_bu);
        let x2 = mirror(c.d_av, c.d_bv).max(x1);
        let via_a = x1 + c.d_av + c.len_uv - hi;
        let via_b = c.len_ab - x2 + c.d_bu + lo;
        debug_assert!(
            (via_a - via_b).abs() <= 1e-6 * (1.0 + via_a.abs()),
            "connecting paths differ: {via_a} vs {via_b}"
        );
        Self {
            lo,
            hi,
            x1,
            x2,
            theta: 0.5 * (via_a + via_b),
        }
    }
}

fn cycle_breaks(c: &Corners, band: &Band) -> CycleBreaks {
    CycleBreaks {
        source: c.source,
        target: c.target,
        break_a: band.lo / c.len_uv,
        break_b: band.hi / c.len_uv,
        mirror_a: band.x1 / c.len_ab,
        mirror_b: band.x2 / c.len_ab,
    }
}

/// The first `(split, through)` in canonical order for which the other edge
/// lies entirely behind `through`.
fn linear_orientation(
    g: &WeightedGraph,
    dm: &DistanceMatrix,
    e: EdgeId,
    f: EdgeId,
) -> Option<(EdgeId, Endpoint)> {
    let passing: Vec<(EdgeId, Endpoint, EdgeId)> = [(e, f), (f, e)]
        .into_iter()
        .flat_map(|(split, other)| {
            [Endpoint::First, Endpoint::Second].map(|through| (split, through, other))
        })
        .filter(|&(split, through, other)| {
            let o = g.edge(other);
            same_component_property(g, dm, o.u, o.v, split, through)
        })
        .collect();
    if cfg!(debug_assertions) && passing.len() > 1 {
        let values: Vec<f64> = passing
            .iter()
            .map(|&(s, t, o)| linear_mean(g, dm, s, t, o))
            .collect();
        debug_assert!(
            values
                .iter()
                .all(|v| (v - values[0]).abs() <= 1e-9 * (1.0 + values[0].abs())),
            "linear orientations disagree: {values:?}"
        );
    }
    passing.first().map(|&(s, t, _)| (s, t))
}

fn linear_mean(
    g: &WeightedGraph,
    dm: &DistanceMatrix,
    split: EdgeId,
    through: Endpoint,
    other: EdgeId,
) -> f64 {
    let edge = g.edge(split);
    edge.length / 2.0 + vertex_edge_mean(g, dm, through.of(edge), other)
}

fn canonical(e: EdgeId, f: EdgeId) -> (EdgeId, EdgeId) {
    (e.min(f), e.max(f))
}

fn is_rectangular(c: &Corners, band: &Band) -> bool {
    let tol = |len: f64, x: f64| x.abs() <= 1e-9 * len;
    tol(c.len_uv, band.lo)
        && tol(c.len_uv, c.len_uv - band.hi)
        && tol(c.len_ab, band.x1)
        && tol(c.len_ab, c.len_ab - band.x2)
}

/// Classifies a pair of edges. `e == f` gives [`EdgePairCase::SameEdge`].
pub fn classify_pair(g: &WeightedGraph, dm: &DistanceMatrix, e: EdgeId, f: EdgeId) -> EdgePairCase {
    if e == f {
        return EdgePairCase::SameEdge;
    }
    let (e, f) = canonical(e, f);
    if let Some((split, through)) = linear_orientation(g, dm, e, f) {
        return EdgePairCase::Linear { split, through };
    }
    let c = Corners::oriented(g, dm, e, f);
    let band = Band::of(&c);
    if is_rectangular(&c, &band) {
        EdgePairCase::Rectangular {
            theta: band.theta,
            lambda: 0.5 * (c.len_ab + c.len_uv),
        }
    } else {
        EdgePairCase::Cycle(cycle_breaks(&c, &band))
    }
}

/// Exact mean distance between uniformly random points on `e` and `f`.
pub fn pair_mean(g: &WeightedGraph, dm: &DistanceMatrix, e: EdgeId, f: EdgeId) -> f64 {
    if e == f {
        return g.edge(e).length / 3.0;
    }
    let (e, f) = canonical(e, f);
    if let Some((split, through)) = linear_orientation(g, dm, e, f) {
        let other = if split == e { f } else { e };
        return linear_mean(g, dm, split, through, other);
    }
    cycle_mean(g, dm, e, f)
}

/// The cycle decomposition applied unconditionally. It is exact for linear
/// pairs too; [`pair_mean`] only prefers the shorter formula when it applies.
pub fn cycle_mean(g: &WeightedGraph, dm: &DistanceMatrix, e: EdgeId, f: EdgeId) -> f64 {
    let c = Corners::oriented(g, dm, e, f);
    let band = Band::of(&c);
    let (a_len, b_len) = (c.len_ab, c.len_uv);
    let Band {
        lo,
        hi,
        x1,
        x2,
        theta,
    } = band;

    let near_u = lo / 2.0 + vertex_edge_mean(g, dm, c.u, c.source.index);
    let near_v = (b_len - hi) / 2.0 + vertex_edge_mean(g, dm, c.v, c.source.index);
    let width = hi - lo;
    let middle = if width <= 1e-9 * b_len {
        0.0
    } else {
        let mid_y = 0.5 * (lo + hi);
        let left = x1 / 2.0 + c.d_av + b_len - mid_y;
        let right = (a_len - x2) / 2.0 + c.d_bu + mid_y;
        let square = theta + 2.0 * width / 3.0;
        (x1 * left + (x2 - x1) * square + (a_len - x2) * right) / a_len
    };
    (lo * near_u + width.max(0.0) * middle + (b_len - hi) * near_v) / b_len
}
