use std::collections::HashMap;

use serde::Serialize;

use super::{absorb, merge_at_cut_vertex, SubtreeSummary};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, VertexId, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    Bridge,
    Cycle,
    /// Two-connected but not a simple cycle.
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Block {
    pub kind: BlockKind,
    /// For cycles, `edges[i]` joins `vertices[i]` to the next vertex.
    pub edges: Vec<EdgeId>,
    /// For cycles, in cyclic order starting at `attachment`.
    pub vertices: Vec<VertexId>,
    /// The vertex joining this block to its parent in the block-cut tree
    /// rooted at vertex 0.
    pub attachment: VertexId,
    pub length: f64,
}

/// Biconnected blocks in post-order: every block comes after all blocks that
/// hang below it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockDecomposition {
    pub blocks: Vec<Block>,
    pub cut_vertices: Vec<VertexId>,
}

impl BlockDecomposition {
    pub fn is_cactus(&self) -> bool {
        self.blocks.iter().all(|b| b.kind != BlockKind::Other)
    }

    /// Blocks containing each cut vertex, the block-cut tree adjacency.
    pub fn blocks_at_cut_vertices(&self) -> HashMap<VertexId, Vec<usize>> {
        let mut out: HashMap<VertexId, Vec<usize>> =
            self.cut_vertices.iter().map(|&v| (v, Vec::new())).collect();
        for (i, b) in self.blocks.iter().enumerate() {
            for v in &b.vertices {
                if let Some(list) = out.get_mut(v) {
                    list.push(i);
                }
            }
        }
        out
    }
}

/// Tarjan's biconnected components, iterative so deep graphs do not
/// overflow the stack. Parallel edges are distinguished by edge index.
pub fn block_decomposition(g: &WeightedGraph) -> BlockDecomposition {
    const UNSEEN: usize = usize::MAX;
    let n = g.vertex_count();
    let mut disc = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut timer = 0;
    let mut edge_stack: Vec<EdgeId> = Vec::new();
    let mut blocks = Vec::new();
    // (vertex, edge to parent, next neighbour index)
    let mut frames: Vec<(VertexId, Option<EdgeId>, usize)> = vec![(0, None, 0)];
    disc[0] = 0;
    low[0] = 0;
    timer += 1;

    while let Some(&mut (v, parent_edge, ref mut next)) = frames.last_mut() {
        if let Some(&(w, e)) = g.neighbors(v).get(*next) {
            *next += 1;
            if Some(e) == parent_edge {
                continue;
            }
            if disc[w] == UNSEEN {
                disc[w] = timer;
                low[w] = timer;
                timer += 1;
                edge_stack.push(e);
                frames.push((w, Some(e), 0));
            } else if disc[w] < disc[v] {
                edge_stack.push(e);
                low[v] = low[v].min(disc[w]);
            }
            continue;
        }
        frames.pop();
        let Some(&(p, _, _)) = frames.last() else { break };
        low[p] = low[p].min(low[v]);
        if low[v] >= disc[p] {
            let tree_edge = parent_edge.expect("non-root frame has a parent edge");
            let mut edges = Vec::new();
            while let Some(e) = edge_stack.pop() {
                edges.push(e);
                if e == tree_edge {
                    break;
                }
            }
            blocks.push(make_block(g, edges, p));
        }
    }

    let mut attached = vec![0usize; n];
    for b in &blocks {
        attached[b.attachment] += 1;
    }
    let cut_vertices = (0..n)
        .filter(|&v| if v == 0 { attached[v] >= 2 } else { attached[v] >= 1 })
        .collect();
    BlockDecomposition {
        blocks,
        cut_vertices,
    }
}

fn make_block(g: &WeightedGraph, mut edges: Vec<EdgeId>, attachment: VertexId) -> Block {
    edges.sort_unstable();
    let length = edges.iter().map(|&e| g.edge(e).length).sum();
    let mut local: HashMap<VertexId, Vec<(VertexId, EdgeId)>> = HashMap::new();
    for &e in &edges {
        let edge = g.edge(e);
        local.entry(edge.u).or_default().push((edge.v, e));
        local.entry(edge.v).or_default().push((edge.u, e));
    }
    let kind = if edges.len() == 1 {
        BlockKind::Bridge
    } else if edges.len() == local.len() && local.values().all(|a| a.len() == 2) {
        BlockKind::Cycle
    } else {
        BlockKind::Other
    };
    let vertices = match kind {
        BlockKind::Cycle => {
            let mut order = vec![attachment];
            let mut cyclic = Vec::with_capacity(edges.len());
            let (mut at, mut via) = (attachment, None);
            loop {
                let &(w, e) = local[&at]
                    .iter()
                    .find(|&&(_, e)| Some(e) != via)
                    .expect("cycle vertices have two block edges");
                cyclic.push(e);
                if w == attachment {
                    break;
                }
                order.push(w);
                at = w;
                via = Some(e);
            }
            edges = cyclic;
            order
        }
        _ => {
            let mut vs: Vec<VertexId> = local.keys().copied().collect();
            vs.sort_unstable();
            if let Some(i) = vs.iter().position(|&v| v == attachment) {
                vs.swap(0, i);
            }
            vs
        }
    };
    Block {
        kind,
        edges,
        vertices,
        attachment,
        length,
    }
}

/// A cycle of length `cycle` with pieces hanging at its vertices, seen from
/// `vertices[0]`. `positions` are arc offsets from `vertices[0]`.
fn cycle_with_hangings(cycle: f64, positions: &[f64], hanging: &[Option<SubtreeSummary>]) -> SubtreeSummary {
    let k = positions.len();
    let h: Vec<f64> = hanging.iter().map(|s| s.map_or(0.0, |s| s.length)).collect();
    let spread: f64 = h.iter().sum();
    let length = cycle + spread;

    // Weighted geodesic sums D_i = Σ_j h_j d(w_i, w_j) over a doubled arc.
    let pos2: Vec<f64> = (0..2 * k)
        .map(|j| positions[j % k] + if j >= k { cycle } else { 0.0 })
        .collect();
    let mut pre_h = vec![0.0; 2 * k + 1];
    let mut pre_hp = vec![0.0; 2 * k + 1];
    for j in 0..2 * k {
        pre_h[j + 1] = pre_h[j] + h[j % k];
        pre_hp[j + 1] = pre_hp[j] + h[j % k] * pos2[j];
    }
    let half = cycle / 2.0;
    let mut t = 0;
    let mut cross = 0.0;
    for i in 0..k {
        t = t.max(i);
        while t + 1 < i + k && pos2[t + 1] - positions[i] <= half {
            t += 1;
        }
        if h[i] == 0.0 {
            continue;
        }
        let p = positions[i];
        let forward = (pre_hp[t + 1] - pre_hp[i + 1]) - p * (pre_h[t + 1] - pre_h[i + 1]);
        let backward = (cycle + p) * (pre_h[i + k] - pre_h[t + 1]) - (pre_hp[i + k] - pre_hp[t + 1]);
        cross += h[i] * (forward + backward);
    }

    let mut total = cycle * cycle * cycle / 4.0 + cross;
    let mut from_root = cycle * cycle / 4.0;
    for (i, s) in hanging.iter().enumerate() {
        let Some(s) = s else { continue };
        total += s.length * s.length * s.mean
            + 2.0 * cycle * s.length * (cycle / 4.0 + s.root_mean)
            + 2.0 * s.length * s.root_mean * (spread - s.length);
        from_root += s.length * (positions[i].min(cycle - positions[i]) + s.root_mean);
    }
    SubtreeSummary {
        length,
        mean: total / (length * length),
        root_mean: from_root / length,
    }
}

/// Continuous mean of a cactus (every edge on at most one cycle) in O(n + m).
///
/// Blocks are folded leaf-first: each block absorbs the pieces already
/// gathered at its non-attachment vertices and is then glued to whatever
/// else hangs at its attachment vertex.
pub fn cactus_mean(g: &WeightedGraph) -> Result<f64> {
    if g.edge_count() == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    let decomposition = block_decomposition(g);
    if let Some(b) = decomposition.blocks.iter().find(|b| b.kind == BlockKind::Other) {
        return Err(Error::NotACactus(format!(
            "block with {} vertices and {} edges is neither an edge nor a cycle",
            b.vertices.len(),
            b.edges.len()
        )));
    }
    let mut hang: Vec<Option<SubtreeSummary>> = vec![None; g.vertex_count()];
    for block in &decomposition.blocks {
        let root = block.attachment;
        let piece = match block.kind {
            BlockKind::Bridge => {
                let edge = g.edge(block.edges[0]);
                let far = edge.other(root);
                let bridge = SubtreeSummary::edge(edge.length);
                match hang[far].take() {
                    None => bridge,
                    Some(sub) => {
                        let w = edge.length;
                        let length = w + sub.length;
                        SubtreeSummary {
                            length,
                            mean: merge_at_cut_vertex(bridge, sub).mean,
                            root_mean: (w * w / 2.0 + sub.length * (w + sub.root_mean)) / length,
                        }
                    }
                }
            }
            BlockKind::Cycle => {
                let vs = &block.vertices;
                let mut positions = Vec::with_capacity(vs.len());
                let mut hanging = Vec::with_capacity(vs.len());
                let mut arc = 0.0;
                for (i, (&v, &e)) in vs.iter().zip(&block.edges).enumerate() {
                    positions.push(arc);
                    hanging.push(if i == 0 { None } else { hang[v].take() });
                    arc += g.edge(e).length;
                }
                cycle_with_hangings(block.length, &positions, &hanging)
            }
            BlockKind::Other => unreachable!("rejected above"),
        };
        absorb(&mut hang[root], piece);
    }
    Ok(hang[0].expect("root collects every block").mean)
}
