//! Edge-list and JSON graph documents.
//!
//! Edge-list: one `<u> <v> <w>` triple per line, whitespace separated, `#`
//! starts a comment. JSON: `{"edges": [[u, v, w], ...]}` where `u` and `v`
//! may be strings or numbers.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use super::{Edge, WeightedGraph};
use crate::error::{Error, Result};
use crate::paths::all_pairs_distances_with;
use crate::Tolerance;

/// What to do when an edge is longer than some other path between its endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MetricPolicy {
    #[default]
    Error,
    Warn,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShortcutEdge {
    pub edge: usize,
    pub length: f64,
    pub distance: f64,
}

#[derive(Debug, Clone)]
pub struct ParsedGraph {
    pub graph: WeightedGraph,
    /// Non-empty only under [`MetricPolicy::Warn`].
    pub shortcut_edges: Vec<ShortcutEdge>,
}

/// Parses an edge-list or JSON document and rejects metric-edge violations.
pub fn parse_graph(text: &str) -> Result<WeightedGraph> {
    parse_graph_with(text, MetricPolicy::Error).map(|p| p.graph)
}

pub fn parse_graph_with(text: &str, policy: MetricPolicy) -> Result<ParsedGraph> {
    parse_graph_checked(text, policy, Tolerance::default())
}

/// Like [`parse_graph_with`], with an explicit tolerance for the metric check.
pub fn parse_graph_checked(text: &str, policy: MetricPolicy, tol: Tolerance) -> Result<ParsedGraph> {
    let raw = if text.trim_start().starts_with('{') {
        parse_json(text)?
    } else {
        parse_edge_list(text)?
    };
    let graph = raw.build()?;
    let dm = all_pairs_distances_with(&graph, tol);
    let violations = graph.metric_violations(&dm);
    match (policy, violations.first()) {
        (MetricPolicy::Error, Some(v)) => {
            let e = graph.edge(v.edge);
            Err(Error::MetricEdgeViolation {
                edge: v.edge,
                first: graph.label(e.u).to_string(),
                second: graph.label(e.v).to_string(),
                length: v.length,
                distance: v.distance,
            })
        }
        _ => Ok(ParsedGraph {
            graph,
            shortcut_edges: violations,
        }),
    }
}

#[derive(Default)]
struct RawGraph {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<Edge>,
}

impl RawGraph {
    fn vertex(&mut self, label: &str) -> usize {
        if let Some(&i) = self.index.get(label) {
            return i;
        }
        let i = self.labels.len();
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), i);
        i
    }

    fn push(&mut self, u: &str, v: &str, w: f64) {
        let u = self.vertex(u);
        let v = self.vertex(v);
        self.edges.push(Edge::new(u, v, w));
    }

    fn build(self) -> Result<WeightedGraph> {
        if self.edges.is_empty() {
            return Err(Error::Validation("document contains no edges".into()));
        }
        WeightedGraph::new(self.labels, self.edges)
    }
}

fn parse_edge_list(text: &str) -> Result<RawGraph> {
    let mut raw = RawGraph::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            line: lineno + 1,
            message,
        };
        if tokens.len() != 3 {
            return Err(parse_err(format!(
                "expected `<u> <v> <w>`, found {} token(s)",
                tokens.len()
            )));
        }
        let w: f64 = tokens[2]
            .parse()
            .map_err(|_| parse_err(format!("`{}` is not a number", tokens[2])))?;
        raw.push(tokens[0], tokens[1], w);
    }
    Ok(raw)
}

fn parse_json(text: &str) -> Result<RawGraph> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    let json_err = |message: String| Error::Parse { line: 0, message };
    let edges = doc
        .get("edges")
        .and_then(Value::as_array)
        .ok_or_else(|| json_err("expected an object with an `edges` array".into()))?;
    let mut raw = RawGraph::default();
    for (i, item) in edges.iter().enumerate() {
        let triple = item
            .as_array()
            .filter(|a| a.len() == 3)
            .ok_or_else(|| json_err(format!("edges[{i}] is not a [u, v, w] triple")))?;
        let label = |v: &Value| -> Result<String> {
            match v {
                Value::String(s) => Ok(s.clone()),
                Value::Number(n) => Ok(n.to_string()),
                _ => Err(json_err(format!("edges[{i}] has a non-scalar vertex id"))),
            }
        };
        let w = triple[2]
            .as_f64()
            .ok_or_else(|| json_err(format!("edges[{i}] weight is not a number")))?;
        raw.push(&label(&triple[0])?, &label(&triple[1])?, w);
    }
    Ok(raw)
}

/// Serializes to the edge-list format using the original labels.
pub fn to_edge_list(g: &WeightedGraph) -> String {
    let mut out = String::new();
    for e in g.edges() {
        let _ = writeln!(out, "{} {} {}", g.label(e.u), g.label(e.v), e.length);
    }
    out
}

pub fn to_json(g: &WeightedGraph) -> String {
    let edges: Vec<Value> = g
        .edges()
        .iter()
        .map(|e| serde_json::json!([g.label(e.u), g.label(e.v), e.length]))
        .collect();
    serde_json::json!({ "edges": edges }).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::all_pairs_distances;

    #[test]
    fn two_edge_path() {
        let g = parse_graph("a b 1\nb c 1").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.total_length(), 2.0);
        assert_eq!(g.labels(), ["a", "b", "c"]);
    }

    #[test]
    fn degenerate_triangle_is_metric() {
        let g = parse_graph("a b 1\nb c 1\na c 2").unwrap();
        let dm = all_pairs_distances(&g);
        assert_eq!(dm.get(0, 2), 2.0);
    }

    #[test]
    fn shortcut_edge_rejected_and_named() {
        let err = parse_graph("a b 1\nb c 1\na c 3").unwrap_err();
        match err {
            Error::MetricEdgeViolation {
                edge,
                first,
                second,
                length,
                distance,
            } => {
                assert_eq!((edge, first.as_str(), second.as_str()), (2, "a", "c"));
                assert_eq!((length, distance), (3.0, 2.0));
            }
            other => panic!("unexpected {other:?}"),
        }
        let msg = parse_graph("a b 1\nb c 1\na c 3").unwrap_err().to_string();
        assert!(msg.contains("a - c"), "{msg}");
    }

    #[test]
    fn shortcut_edge_warn_policy() {
        let parsed = parse_graph_with("a b 1\nb c 1\na c 3", MetricPolicy::Warn).unwrap();
        assert_eq!(parsed.shortcut_edges.len(), 1);
        assert_eq!(parsed.shortcut_edges[0].edge, 2);
    }

    #[test]
    fn comments_and_blank_lines() {
        let g = parse_graph("# header\n\nx y 2.5 # trailing\n  y z 1\n").unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edge(0).length, 2.5);
    }

    #[test]
    fn malformed_lines() {
        assert_eq!(
            parse_graph("a b 1\na b").unwrap_err(),
            Error::Parse {
                line: 2,
                message: "expected `<u> <v> <w>`, found 2 token(s)".into()
            }
        );
        assert!(matches!(parse_graph("a b x"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_graph("a a 1"), Err(Error::Validation(_))));
        assert!(matches!(parse_graph("a b 0"), Err(Error::Validation(_))));
        assert!(matches!(parse_graph("a b 1\nc d 1"), Err(Error::Validation(_))));
        assert!(matches!(parse_graph("# nothing"), Err(Error::Validation(_))));
    }

    #[test]
    fn json_documents() {
        let g = parse_graph(r#"{"edges": [["a", "b", 1], [2, "a", 0.5]]}"#).unwrap();
        assert_eq!(g.labels(), ["a", "b", "2"]);
        assert_eq!(g.edge(1).length, 0.5);
        assert!(matches!(parse_graph(r#"{"nodes": []}"#), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_graph(r#"{"edges": [["a", "b"]]}"#),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn json_and_edge_list_agree() {
        let g = parse_graph("a b 1\nb c 2").unwrap();
        let back = parse_graph(&to_json(&g)).unwrap();
        assert_eq!(g, back);
    }
}
