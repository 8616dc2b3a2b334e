//! Brute-force reference values by midpoint-rule quadrature.
//!
//! Only the four-route identity is used: the distance between a point on `e`
//! and a point on `f` is the shortest of the four ways of leaving `e` through
//! one endpoint and entering `f` through one endpoint. Nothing here depends on
//! the case analysis or the roof construction.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, WeightedGraph};
use crate::paths::DistanceMatrix;
use crate::sum::{merge_ordered, NeumaierSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Samples per axis.
    pub resolution: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { resolution: 512 }
    }
}

impl OracleConfig {
    pub fn new(resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::InvalidParameter(format!(
                "oracle resolution must be at least 2, got {resolution}"
            )));
        }
        Ok(Self { resolution })
    }
}

/// Midpoint-rule average of `d(p, q)` over an `N × N` grid of parameters.
pub fn oracle_pair_mean(
    g: &WeightedGraph,
    dm: &DistanceMatrix,
    e: EdgeId,
    f: EdgeId,
    cfg: &OracleConfig,
) -> f64 {
    let n = cfg.resolution;
    let (ee, ff) = (g.edge(e), g.edge(f));
    let (le, lf) = (ee.length, ff.length);
    let same = e == f;
    let (d_uu, d_uv, d_vu, d_vv) = (
        dm.get(ee.u, ff.u),
        dm.get(ee.u, ff.v),
        dm.get(ee.v, ff.u),
        dm.get(ee.v, ff.v),
    );
    let step = 1.0 / n as f64;
    let rows: Vec<NeumaierSum> = (0..n)
        .into_par_iter()
        .map(|i| {
            let s = (i as f64 + 0.5) * step;
            let (to_u, to_v) = (le * s, le * (1.0 - s));
            let mut row = NeumaierSum::new();
            for j in 0..n {
                let t = (j as f64 + 0.5) * step;
                let d = if same {
                    le * (s - t).abs()
                } else {
                    let (from_u, from_v) = (lf * t, lf * (1.0 - t));
                    (to_u + d_uu + from_u)
                        .min(to_u + d_uv + from_v)
                        .min(to_v + d_vu + from_u)
                        .min(to_v + d_vv + from_v)
                };
                row.add(d);
            }
            row
        })
        .collect();
    merge_ordered(&rows) * step * step
}

/// Length-weighted aggregation of oracle pair means over all edge pairs.
pub fn oracle_graph_mean(g: &WeightedGraph, dm: &DistanceMatrix, cfg: &OracleConfig) -> Result<f64> {
    let m = g.edge_count();
    if m == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    let mut total = NeumaierSum::new();
    for e in 0..m {
        let le = g.edge(e).length;
        for f in e..m {
            let lf = g.edge(f).length;
            let weight = if e == f { 1.0 } else { 2.0 };
            total.add(weight * le * lf * oracle_pair_mean(g, dm, e, f, cfg));
        }
    }
    let length = g.total_length();
    Ok(total.value() / (length * length))
}
