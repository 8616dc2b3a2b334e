use std::collections::VecDeque;

use super::{absorb, merge_at_cut_vertex, SubtreeSummary};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Continuous mean of a tree in O(n).
///
/// Vertices are visited in reverse breadth-first order from vertex 0. Each
/// finished subtree is extended across the edge to its parent and glued to
/// the parent's other children at the parent.
pub fn tree_mean(g: &WeightedGraph) -> Result<f64> {
    if !g.is_tree() {
        return Err(Error::NotATree);
    }
    if g.edge_count() == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    let n = g.vertex_count();
    let mut order = Vec::with_capacity(n);
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &(w, e) in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some((v, e));
                queue.push_back(w);
            }
        }
    }

    let mut below: Vec<Option<SubtreeSummary>> = vec![None; n];
    for &v in order.iter().rev() {
        let Some((p, e)) = parent[v] else { continue };
        let edge = SubtreeSummary::edge(g.edge(e).length);
        let extended = match below[v].take() {
            None => edge,
            Some(sub) => {
                let w = edge.length;
                let length = w + sub.length;
                SubtreeSummary {
                    length,
                    mean: merge_at_cut_vertex(edge, sub).mean,
                    root_mean: (w * w / 2.0 + sub.length * (w + sub.root_mean)) / length,
                }
            }
        };
        absorb(&mut below[p], extended);
    }
    Ok(below[0].expect("a tree with edges has a non-empty root summary").mean)
}
