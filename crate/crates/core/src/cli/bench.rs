use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use super::{BackendChoice, BenchArgs, RunConfig};
use crate::aggregate::{pair_sum, Backend};
use crate::closed_forms::tree_mean;
use crate::error::{Error, Result};
use crate::graph::{GeneratorSpec, GraphKind, WeightSpec, WeightedGraph};
use crate::paths::all_pairs_distances_with;

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub kind: GraphKind,
    pub n: usize,
    pub m: usize,
    pub apsp_ms: f64,
    pub pair_loop_ms: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRatio {
    pub kind: GraphKind,
    pub from_m: usize,
    pub to_m: usize,
    /// Growth of the pair-loop time.
    pub time_ratio: f64,
    /// Growth of `m²`, the expected pair-loop scaling.
    pub pair_ratio: f64,
}

/// An instance of `kind` with about `m` edges and random lengths in `[1, 2]`.
pub fn instance(kind: GraphKind, m: usize, seed: u64) -> Result<WeightedGraph> {
    let weights = WeightSpec::Random { lo: 1.0, hi: 2.0 };
    let spec = match kind {
        GraphKind::Path | GraphKind::Star | GraphKind::RandomTree => GeneratorSpec::new(kind, m + 1, weights),
        GraphKind::Cycle | GraphKind::RandomCactus => GeneratorSpec::new(kind, m.max(3), weights),
        GraphKind::Complete => {
            let n = (1.0 + (1.0 + 8.0 * m as f64).sqrt()) / 2.0;
            GeneratorSpec::new(kind, (n.round() as usize).max(2), weights)
        }
        GraphKind::RandomConnected => {
            GeneratorSpec::new(kind, (2 * m).div_ceil(3).max(3), weights).edges(m.max(3))
        }
    };
    spec.seed(seed).build()
}

fn fastest<T>(repeat: usize, mut op: impl FnMut() -> T) -> (f64, T) {
    let mut best = f64::INFINITY;
    let mut last = None;
    for _ in 0..repeat.max(1) {
        let start = Instant::now();
        let out = op();
        best = best.min(start.elapsed().as_secs_f64() * 1e3);
        last = Some(out);
    }
    (best, last.expect("at least one run"))
}

pub fn run(args: &BenchArgs, cfg: &RunConfig) -> Result<Value> {
    if args.sizes.is_empty() || args.sizes.contains(&0) {
        return Err(Error::InvalidParameter("--sizes must be positive".into()));
    }
    let backend = match args.backend.unwrap_or(cfg.backend) {
        BackendChoice::Roof => Backend::Roof,
        _ => Backend::Spt,
    };
    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    for &kind in &args.kinds {
        let start = rows.len();
        for &size in &args.sizes {
            let g = instance(kind, size, cfg.seed)?;
            let (apsp_ms, dm) = fastest(args.repeat, || all_pairs_distances_with(&g, cfg.tolerance));
            let (pair_loop_ms, sum) = fastest(args.repeat, || pair_sum(&g, &dm, backend));
            let length = g.total_length();
            rows.push(BenchRow {
                kind,
                n: g.vertex_count(),
                m: g.edge_count(),
                apsp_ms,
                pair_loop_ms,
                value: sum / (length * length),
            });
        }
        for w in rows[start..].windows(2) {
            let (a, b) = (&w[0], &w[1]);
            ratios.push(BenchRatio {
                kind,
                from_m: a.m,
                to_m: b.m,
                time_ratio: b.pair_loop_ms / a.pair_loop_ms,
                pair_ratio: (b.m as f64 / a.m as f64).powi(2),
            });
        }
    }
    let tree = match args.tree_n {
        None => None,
        Some(n) => {
            let t = GeneratorSpec::new(GraphKind::RandomTree, n, WeightSpec::Random { lo: 1.0, hi: 2.0 })
                .seed(cfg.seed)
                .build()?;
            let (ms, value) = fastest(args.repeat, || tree_mean(&t));
            Some(json!({"n": n, "closed_form_ms": ms, "value": value?}))
        }
    };
    Ok(json!({
        "backend": backend.name(),
        "rows": rows,
        "ratios": ratios,
        "tree": tree,
    }))
}
