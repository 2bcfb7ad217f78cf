//! Weighted oriented graphs.
//!
//! A graph is a node set, a list of oriented edges, and a weight function on
//! ordered edge pairs. The weight `w(e, f)` is the cost of traversing `f`
//! immediately after `e`; it is only meaningful when `dst(e) = src(f)`, and
//! the validator reports every nonzero weight that breaks that rule.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Oriented edge with a dense integer id and opaque node names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedEdge {
    pub id: usize,
    pub src: String,
    pub dst: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph<W> {
    nodes: Vec<String>,
    edges: Vec<OrientedEdge>,
    weights: BTreeMap<(usize, usize), W>,
    src_ix: Vec<usize>,
    dst_ix: Vec<usize>,
}

impl<W: Scalar> WeightedGraph<W> {
    /// Builds a graph, checking structure only: node names must be unique,
    /// edge endpoints must name known nodes, and weight keys must be valid
    /// edge ids without duplicates. Semantic problems (negative weights,
    /// incompatible pairs) are left for [`WeightedGraph::validate`].
    pub fn new(
        nodes: Vec<String>,
        endpoints: Vec<(String, String)>,
        weights: Vec<(usize, usize, W)>,
    ) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, name) in nodes.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate node name {name:?}")));
            }
        }
        let mut edges = Vec::with_capacity(endpoints.len());
        let mut src_ix = Vec::with_capacity(endpoints.len());
        let mut dst_ix = Vec::with_capacity(endpoints.len());
        for (id, (src, dst)) in endpoints.into_iter().enumerate() {
            let s = *index
                .get(&src)
                .ok_or_else(|| Error::InvalidGraph(format!("edge {id} references unknown node {src:?}")))?;
            let d = *index
                .get(&dst)
                .ok_or_else(|| Error::InvalidGraph(format!("edge {id} references unknown node {dst:?}")))?;
            src_ix.push(s);
            dst_ix.push(d);
            edges.push(OrientedEdge { id, src, dst });
        }
        let mut map = BTreeMap::new();
        for (from, to, w) in weights {
            if from >= edges.len() || to >= edges.len() {
                return Err(Error::InvalidGraph(format!(
                    "weight entry ({from}, {to}) references a missing edge"
                )));
            }
            if map.insert((from, to), w).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate weight entry ({from}, {to})")));
            }
        }
        Ok(WeightedGraph { nodes, edges, weights: map, src_ix, dst_ix })
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[OrientedEdge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Source node index of edge `e`.
    pub fn src(&self, e: usize) -> usize {
        self.src_ix[e]
    }

    /// Target node index of edge `e`.
    pub fn dst(&self, e: usize) -> usize {
        self.dst_ix[e]
    }

    /// Stored weight of the ordered pair `(e, f)`, zero when absent.
    pub fn weight(&self, e: usize, f: usize) -> W {
        self.weights.get(&(e, f)).cloned().unwrap_or_else(W::zero)
    }

    /// Stored weight entries in key order, including explicit zeros.
    pub fn weight_entries(&self) -> impl Iterator<Item = (usize, usize, &W)> {
        self.weights.iter().map(|(&(e, f), w)| (e, f, w))
    }

    /// Nonzero transitions in key order.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize, &W)> {
        self.weight_entries().filter(|(_, _, w)| !w.is_zero())
    }

    /// Converts every weight into another scalar type through `f64`.
    /// Exact when the weights are dyadic, which covers every graph that
    /// round-trips through the JSON format.
    pub fn convert<V: Scalar>(&self) -> WeightedGraph<V> {
        let weights = self
            .weights
            .iter()
            .map(|(&k, w)| (k, V::from_f64(w.to_f64().expect("finite weight")).expect("finite weight")))
            .collect();
        WeightedGraph {
            nodes: self.nodes.clone(),
            edges: self.edges.clone(),
            weights,
            src_ix: self.src_ix.clone(),
            dst_ix: self.dst_ix.clone(),
        }
    }

    /// Compatibility and sign checks with summary statistics.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (e, f, w) in self.weight_entries() {
            let wf = w.to_f64().unwrap_or(f64::NAN);
            if !wf.is_finite() {
                violations.push(Violation {
                    kind: ViolationKind::NonfiniteWeight,
                    from: e,
                    to: f,
                    message: format!("w({e}, {f}) is not finite"),
                });
                continue;
            }
            if *w < W::zero() {
                violations.push(Violation {
                    kind: ViolationKind::NegativeWeight,
                    from: e,
                    to: f,
                    message: format!("w({e}, {f}) = {w} is negative"),
                });
            }
            if !w.is_zero() && self.dst(e) != self.src(f) {
                violations.push(Violation {
                    kind: ViolationKind::IncompatiblePair,
                    from: e,
                    to: f,
                    message: format!(
                        "w({e}, {f}) = {w} but dst({e}) = {:?} differs from src({f}) = {:?}",
                        self.nodes[self.dst(e)],
                        self.nodes[self.src(f)]
                    ),
                });
            }
        }
        let nnz = self.transitions().count();
        let max_valency = (0..self.nodes.len())
            .map(|v| {
                self.edges
                    .iter()
                    .filter(|e| self.src_ix[e.id] == v || self.dst_ix[e.id] == v)
                    .count()
            })
            .max()
            .unwrap_or(0);
        let total_weight = self
            .weights
            .values()
            .map(|w| w.to_f64().unwrap_or(f64::NAN))
            .sum();
        ValidationReport {
            ok: violations.is_empty(),
            violations,
            stats: GraphStats {
                num_nodes: self.nodes.len(),
                num_edges: self.edges.len(),
                nonzero_weights: nnz,
                max_valency,
                total_weight,
            },
        }
    }

    /// Serializes to the document format, weights in ascending key order.
    pub fn to_json(&self) -> String {
        let doc = GraphDoc {
            nodes: self.nodes.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDoc { id: e.id, src: e.src.clone(), dst: e.dst.clone() })
                .collect(),
            weights: self
                .weights
                .iter()
                .map(|(&(from, to), w)| WeightDoc {
                    from,
                    to,
                    w: w.to_f64().expect("finite weight"),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("graph document serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    IncompatiblePair,
    NegativeWeight,
    NonfiniteWeight,
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub from: usize,
    pub to: usize,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphStats {
    pub num_nodes: usize,
    pub num_edges: usize,
    pub nonzero_weights: usize,
    pub max_valency: usize,
    pub total_weight: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
    pub stats: GraphStats,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    nodes: Vec<String>,
    edges: Vec<EdgeDoc>,
    weights: Vec<WeightDoc>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    id: usize,
    src: String,
    dst: String,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct WeightDoc {
    from: usize,
    to: usize,
    w: f64,
}

/// Parses the JSON document format. Edge ids must be listed in order and
/// equal their position, weight references must resolve, and weights must be
/// finite and nonnegative; duplicates of either kind are rejected.
pub fn parse_graph(text: &str) -> Result<WeightedGraph<f64>> {
    let doc: GraphDoc = serde_json::from_str(text)?;
    for (pos, e) in doc.edges.iter().enumerate() {
        if e.id != pos {
            return Err(Error::Schema(format!(
                "edge at position {pos} has id {}, ids must be 0..{} in document order",
                e.id,
                doc.edges.len()
            )));
        }
    }
    let mut seen = HashSet::new();
    for wd in &doc.weights {
        if !seen.insert((wd.from, wd.to)) {
            return Err(Error::Schema(format!("duplicate weight entry ({}, {})", wd.from, wd.to)));
        }
        if wd.from >= doc.edges.len() || wd.to >= doc.edges.len() {
            return Err(Error::Schema(format!(
                "weight entry ({}, {}) references a missing edge",
                wd.from, wd.to
            )));
        }
        if !wd.w.is_finite() {
            return Err(Error::Schema(format!("weight w({}, {}) is not finite", wd.from, wd.to)));
        }
        if wd.w < 0.0 {
            return Err(Error::Schema(format!(
                "weight w({}, {}) = {} is negative",
                wd.from, wd.to, wd.w
            )));
        }
    }
    WeightedGraph::new(
        doc.nodes,
        doc.edges.into_iter().map(|e| (e.src, e.dst)).collect(),
        doc.weights.into_iter().map(|w| (w.from, w.to, w.w)).collect(),
    )
    .map_err(|e| Error::Schema(e.to_string()))
}

/// Reference graphs used across the test suite and documentation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Fixture {
    /// Single node with one loop of self-transition weight `c`.
    Loop { c: f64 },
    /// Two nodes joined by opposite edges, transition weights `p` and `q`.
    TwoCycle { p: f64, q: f64 },
    /// Two oriented triangles sharing one edge; every transition weight 1.
    SharedTriangles,
    /// A loop feeding the shared-triangle graph through a half-weight
    /// bridge transition; its support splits into two components.
    LoopedTriangles,
}

pub fn fixture<W: Scalar>(which: Fixture) -> WeightedGraph<W> {
    let s = |t: &str| t.to_string();
    let graph = match which {
        Fixture::Loop { c } => WeightedGraph::new(
            vec![s("v")],
            vec![(s("v"), s("v"))],
            vec![(0, 0, c)],
        ),
        Fixture::TwoCycle { p, q } => WeightedGraph::new(
            vec![s("a"), s("b")],
            vec![(s("a"), s("b")), (s("b"), s("a"))],
            vec![(0, 1, p), (1, 0, q)],
        ),
        Fixture::SharedTriangles => WeightedGraph::new(
            vec![s("A"), s("B"), s("C"), s("D")],
            vec![
                (s("A"), s("B")),
                (s("B"), s("C")),
                (s("B"), s("D")),
                (s("C"), s("A")),
                (s("D"), s("A")),
            ],
            [(0, 1), (0, 2), (1, 3), (2, 4), (3, 0), (4, 0)]
                .iter()
                .map(|&(e, f)| (e, f, 1.0))
                .collect(),
        ),
        Fixture::LoopedTriangles => WeightedGraph::new(
            vec![s("A"), s("B"), s("C"), s("D")],
            vec![
                (s("A"), s("A")),
                (s("A"), s("B")),
                (s("B"), s("C")),
                (s("B"), s("D")),
                (s("C"), s("A")),
                (s("D"), s("A")),
            ],
            vec![
                (0, 0, 1.0),
                (0, 1, 0.5),
                (1, 2, 1.0),
                (1, 3, 1.0),
                (2, 4, 1.0),
                (3, 5, 1.0),
                (4, 1, 1.0),
                (5, 1, 1.0),
            ],
        ),
    };
    graph.expect("fixture graphs are structurally valid").convert()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_loop_document() {
        let text = r#"{
            "nodes": ["v"],
            "edges": [{"id": 0, "src": "v", "dst": "v"}],
            "weights": [{"from": 0, "to": 0, "w": 0.5}]
        }"#;
        let g = parse_graph(text).unwrap();
        assert_eq!(g.num_edges(), 1);
        assert_eq!(g.weight(0, 0), 0.5);
        let report = g.validate();
        assert!(report.ok);
        assert_eq!(report.stats.num_nodes, 1);
        assert_eq!(report.stats.nonzero_weights, 1);
        assert_eq!(report.stats.max_valency, 1);
        assert!((report.stats.total_weight - 0.5).abs() < 1e-15);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{
            "nodes": ["v"],
            "edges": [{"id": 0, "src": "v", "dst": "v"}],
            "weights": [],
            "comment": "nope"
        }"#;
        assert!(matches!(parse_graph(text), Err(Error::Json(_))));
    }

    #[test]
    fn parse_error_carries_position() {
        let err = parse_graph("{\"nodes\": [,]}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line") && msg.contains("column"), "got {msg}");
    }

    #[test]
    fn duplicate_edge_id_is_schema_error() {
        let text = r#"{
            "nodes": ["a", "b"],
            "edges": [
                {"id": 0, "src": "a", "dst": "b"},
                {"id": 0, "src": "b", "dst": "a"}
            ],
            "weights": []
        }"#;
        assert!(matches!(parse_graph(text), Err(Error::Schema(_))));
    }

    #[test]
    fn negative_weight_is_schema_error() {
        let text = r#"{
            "nodes": ["v"],
            "edges": [{"id": 0, "src": "v", "dst": "v"}],
            "weights": [{"from": 0, "to": 0, "w": -1.0}]
        }"#;
        assert!(matches!(parse_graph(text), Err(Error::Schema(_))));
    }

    #[test]
    fn incompatible_pair_parses_but_fails_validation() {
        // dst(0) = b, src(0) = a, so w(0, 0) > 0 on a non-loop edge is flagged
        let text = r#"{
            "nodes": ["a", "b"],
            "edges": [{"id": 0, "src": "a", "dst": "b"}],
            "weights": [{"from": 0, "to": 0, "w": 1.0}]
        }"#;
        let g = parse_graph(text).unwrap();
        let report = g.validate();
        assert!(!report.ok);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].kind, ViolationKind::IncompatiblePair);
    }

    #[test]
    fn two_cycle_document_round_trips() {
        let g: WeightedGraph<f64> = fixture(Fixture::TwoCycle { p: 2.0, q: 3.0 });
        let text = g.to_json();
        let back = parse_graph(&text).unwrap();
        assert_eq!(back, g);
        let report = back.validate();
        assert!(report.ok);
        assert!((report.stats.total_weight - 5.0).abs() < 1e-15);
    }

    #[test]
    fn shared_triangles_statistics() {
        let g: WeightedGraph<f64> = fixture(Fixture::SharedTriangles);
        let report = g.validate();
        assert!(report.ok);
        assert_eq!(report.stats.num_edges, 5);
        assert_eq!(report.stats.nonzero_weights, 6);
        assert!((report.stats.total_weight - 6.0).abs() < 1e-15);
        // node A touches f, i, j
        assert_eq!(report.stats.max_valency, 3);
    }

    #[test]
    fn looped_triangles_has_compatible_bridge() {
        let g: WeightedGraph<f64> = fixture(Fixture::LoopedTriangles);
        assert!(g.validate().ok);
        assert_eq!(g.weight(0, 1), 0.5);
        assert_eq!(g.dst(0), g.src(1));
    }

    #[test]
    fn rational_conversion_is_exact_on_quarters() {
        use num::BigRational;
        let g: WeightedGraph<f64> = fixture(Fixture::Loop { c: 0.75 });
        let q: WeightedGraph<BigRational> = g.convert();
        assert_eq!(q.weight(0, 0), BigRational::new(3.into(), 4.into()));
    }
}
