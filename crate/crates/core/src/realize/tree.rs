use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::CertificateError;
use crate::gain_graph::{GainEdge, GainGraph, Piece, Vertex};
use crate::simple_graph::SimpleGraph;

/// Edge of a certificate graph, identified by endpoints and label only:
/// non-loops oriented from the smaller vertex, loops carrying `|label|`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CertEdge {
    pub lo: Vertex,
    pub hi: Vertex,
    pub label: i128,
}

impl CertEdge {
    pub fn new(tail: Vertex, head: Vertex, label: i128) -> Self {
        if tail == head {
            CertEdge { lo: tail, hi: head, label: label.abs() }
        } else if tail < head {
            CertEdge { lo: tail, hi: head, label }
        } else {
            CertEdge { lo: head, hi: tail, label: -label }
        }
    }

    pub fn is_loop(&self) -> bool {
        self.lo == self.hi
    }
}

impl From<&GainEdge> for CertEdge {
    fn from(e: &GainEdge) -> Self {
        CertEdge::new(e.tail, e.head, e.label as i128)
    }
}

/// A Z-labelled graph on global vertex ids, as a set of edges. Two
/// certificate graphs share an edge exactly when they share its endpoints
/// and label.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertGraph {
    pub vertices: BTreeSet<Vertex>,
    pub edges: BTreeSet<CertEdge>,
}

impl CertGraph {
    pub fn from_piece(p: &Piece) -> Self {
        CertGraph { vertices: p.vertices().clone(), edges: p.edges().iter().map(CertEdge::from).collect() }
    }

    pub fn from_graph(g: &GainGraph) -> Self {
        CertGraph { vertices: g.vertices().collect(), edges: g.edges().iter().map(CertEdge::from).collect() }
    }

    pub fn switched(&self, frame: &BTreeMap<Vertex, i128>) -> CertGraph {
        let phi = |v: Vertex| frame.get(&v).copied().unwrap_or(0);
        CertGraph {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| if e.is_loop() { *e } else { CertEdge::new(e.lo, e.hi, e.label + phi(e.lo) - phi(e.hi)) })
                .collect(),
        }
    }

    pub fn union(&self, other: &CertGraph) -> CertGraph {
        CertGraph {
            vertices: self.vertices.union(&other.vertices).copied().collect(),
            edges: self.edges.union(&other.edges).copied().collect(),
        }
    }

    pub fn intersection(&self, other: &CertGraph) -> CertGraph {
        CertGraph {
            vertices: self.vertices.intersection(&other.vertices).copied().collect(),
            edges: self.edges.intersection(&other.edges).copied().collect(),
        }
    }

    pub fn is_all_zero(&self) -> bool {
        self.edges.iter().all(|e| e.label == 0)
    }

    fn non_loops(&self) -> impl Iterator<Item = &CertEdge> {
        self.edges.iter().filter(|e| !e.is_loop())
    }

    /// Simple labelling: no zero loops (parallel duplicates cannot be
    /// represented).
    pub fn is_simple(&self) -> bool {
        self.edges.iter().all(|e| !(e.is_loop() && e.label == 0))
            && self.edges.iter().all(|e| self.vertices.contains(&e.lo) && self.vertices.contains(&e.hi))
    }

    /// `(K_3, 0)` up to switching: a triangle with zero gain.
    pub fn is_balanced_triangle(&self) -> bool {
        if self.vertices.len() != 3 || self.edges.len() != 3 || self.edges.iter().any(CertEdge::is_loop) {
            return false;
        }
        let v: Vec<Vertex> = self.vertices.iter().copied().collect();
        let find = |a, b| self.edges.iter().find(|e| e.lo == a && e.hi == b).map(|e| e.label);
        match (find(v[0], v[1]), find(v[1], v[2]), find(v[0], v[2])) {
            (Some(ab), Some(bc), Some(ac)) => ab + bc - ac == 0,
            _ => false,
        }
    }

    pub fn without_loops(&self) -> CertGraph {
        CertGraph { vertices: self.vertices.clone(), edges: self.non_loops().copied().collect() }
    }

    pub fn loops_at(&self, v: Vertex) -> CertGraph {
        CertGraph {
            vertices: BTreeSet::from([v]),
            edges: self.edges.iter().filter(|e| e.is_loop() && e.lo == v).copied().collect(),
        }
    }

    /// Subgraph induced on `keep` (intersected with the vertex set).
    pub fn induced(&self, keep: impl IntoIterator<Item = Vertex>) -> CertGraph {
        let vertices: BTreeSet<Vertex> = keep.into_iter().filter(|v| self.vertices.contains(v)).collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| vertices.contains(&e.lo) && vertices.contains(&e.hi))
            .copied()
            .collect();
        CertGraph { vertices, edges }
    }

    pub fn with_edge(mut self, e: CertEdge) -> CertGraph {
        self.vertices.extend([e.lo, e.hi]);
        self.edges.insert(e);
        self
    }

    /// Non-loop edges joining `a` and `b`.
    pub fn between(&self, a: Vertex, b: Vertex) -> impl Iterator<Item = &CertEdge> {
        let (lo, hi) = (a.min(b), a.max(b));
        self.edges.iter().filter(move |e| a != b && e.lo == lo && e.hi == hi)
    }

    pub fn multiplicity(&self, a: Vertex, b: Vertex) -> usize {
        self.between(a, b).count()
    }

    /// Underlying simple graph on `1..=n` and the local-to-global table.
    pub fn underlying(&self) -> (SimpleGraph, Vec<Vertex>) {
        let global: Vec<Vertex> = self.vertices.iter().copied().collect();
        let local: BTreeMap<Vertex, Vertex> = global.iter().enumerate().map(|(k, &v)| (v, k + 1)).collect();
        let si = SimpleGraph::from_edges(global.len(), self.non_loops().map(|e| (local[&e.lo], local[&e.hi])));
        (si, global)
    }

    /// Potential `phi` with `self.switched(phi)` all-zero, if one exists.
    pub fn balancing_potential(&self) -> Option<BTreeMap<Vertex, i128>> {
        if self.edges.iter().any(|e| e.is_loop()) {
            return None;
        }
        let mut adj: BTreeMap<Vertex, Vec<&CertEdge>> = BTreeMap::new();
        for e in &self.edges {
            adj.entry(e.lo).or_default().push(e);
            adj.entry(e.hi).or_default().push(e);
        }
        let mut phi: BTreeMap<Vertex, i128> = BTreeMap::new();
        for &root in &self.vertices {
            if phi.contains_key(&root) {
                continue;
            }
            phi.insert(root, 0);
            let mut stack = vec![root];
            while let Some(a) = stack.pop() {
                for e in adj.get(&a).into_iter().flatten() {
                    let (b, value) = if e.lo == a { (e.hi, phi[&a] + e.label) } else { (e.lo, phi[&a] - e.label) };
                    match phi.get(&b) {
                        Some(&old) if old != value => return None,
                        Some(_) => {}
                        None => {
                            phi.insert(b, value);
                            stack.push(b);
                        }
                    }
                }
            }
        }
        Some(phi)
    }

    /// `(K_2, 0)` on exactly two vertices.
    fn is_balanced_k2(&self) -> bool {
        self.vertices.len() == 2
            && self.edges.len() == 1
            && self.non_loops().all(|e| e.label == 0)
            && self.non_loops().count() == 1
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Leaf,
    DisjointUnion,
    /// Children glued one after another, each meeting the union of the
    /// previous ones in exactly one vertex.
    OneSum,
    /// Two children, the first all-zero, meeting in a `(K_2, 0)`.
    BalancedTwoSum,
}

/// Gluing certificate. After switching by `frame`, `graph` is a subgraph of
/// the union of the children's graphs on the same vertex set; `added` lists
/// the union's edges that `graph` lacks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionTree {
    pub kind: NodeKind,
    pub graph: CertGraph,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub frame: BTreeMap<Vertex, i128>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub added: BTreeSet<CertEdge>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<DecompositionTree>,
}

impl DecompositionTree {
    pub fn leaf(graph: CertGraph) -> Self {
        DecompositionTree {
            kind: NodeKind::Leaf,
            graph,
            frame: BTreeMap::new(),
            added: BTreeSet::new(),
            children: Vec::new(),
        }
    }

    pub fn node(
        kind: NodeKind,
        graph: CertGraph,
        frame: BTreeMap<Vertex, i128>,
        children: Vec<DecompositionTree>,
    ) -> Self {
        let switched = graph.switched(&frame);
        let union = children.iter().fold(CertGraph::default(), |acc, c| acc.union(&c.graph));
        let added = union.edges.difference(&switched.edges).copied().collect();
        DecompositionTree { kind, graph, frame, added, children }
    }

    pub fn leaf_count(&self) -> usize {
        if self.children.is_empty() {
            1
        } else {
            self.children.iter().map(Self::leaf_count).sum()
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(Self::depth).max().unwrap_or(0)
    }

    /// Checks every gluing rule and the leaf family for dimension `d`.
    pub fn verify(&self, d: u8) -> Result<(), CertificateError> {
        if !self.graph.is_simple() {
            return Err(CertificateError::Malformed("node graph is not a simple Z-labelled graph".into()));
        }
        let h = self.graph.switched(&self.frame);
        if self.kind == NodeKind::Leaf {
            if !self.children.is_empty() {
                return Err(CertificateError::Malformed("leaf with children".into()));
            }
            return if leaf_in_family(&h, d) {
                Ok(())
            } else {
                Err(CertificateError::LeafNotInFamily { vertices: h.vertices.iter().copied().collect() })
            };
        }
        if self.children.is_empty() {
            return Err(CertificateError::Malformed("inner node without children".into()));
        }
        for c in &self.children {
            c.verify(d)?;
        }
        let union = self.children.iter().fold(CertGraph::default(), |acc, c| acc.union(&c.graph));
        if union.vertices != h.vertices {
            return Err(CertificateError::VertexMismatch);
        }
        if !h.edges.is_subset(&union.edges) {
            return Err(CertificateError::NotSubgraph);
        }
        let added: BTreeSet<CertEdge> = union.edges.difference(&h.edges).copied().collect();
        if added != self.added {
            return Err(CertificateError::Malformed("added-edge record does not match".into()));
        }
        match self.kind {
            NodeKind::Leaf => unreachable!(),
            NodeKind::DisjointUnion => {
                let mut seen = BTreeSet::new();
                for c in &self.children {
                    if !c.graph.vertices.is_disjoint(&seen) {
                        return Err(CertificateError::BadSum("disjoint union children overlap".into()));
                    }
                    seen.extend(c.graph.vertices.iter().copied());
                }
            }
            NodeKind::OneSum => {
                let mut acc = self.children[0].graph.clone();
                for c in &self.children[1..] {
                    let common = acc.intersection(&c.graph);
                    if common.vertices.len() != 1 || common.edges.iter().any(|e| !e.is_loop()) {
                        return Err(CertificateError::BadSum(format!(
                            "1-sum meets in {} vertices",
                            common.vertices.len()
                        )));
                    }
                    acc = acc.union(&c.graph);
                }
            }
            NodeKind::BalancedTwoSum => {
                let [a, b] = &self.children[..] else {
                    return Err(CertificateError::BadSum("2-sum needs two children".into()));
                };
                if !a.graph.is_all_zero() {
                    return Err(CertificateError::BadSum("first summand is not all-zero".into()));
                }
                if !a.graph.intersection(&b.graph).is_balanced_k2() {
                    return Err(CertificateError::BadSum("summands do not meet in (K2,0)".into()));
                }
            }
        }
        Ok(())
    }
}

/// Building blocks: for `d = 1` a single vertex (any loops) or one edge on
/// two vertices; for `d = 2` anything on at most two vertices or `(K_3, 0)`.
fn leaf_in_family(h: &CertGraph, d: u8) -> bool {
    match d {
        1 => {
            h.vertices.len() <= 1
                || (h.vertices.len() == 2 && h.edges.len() == 1 && !h.edges.iter().any(CertEdge::is_loop))
        }
        2 => h.vertices.len() <= 2 || h.is_balanced_triangle(),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cg(vertices: &[Vertex], edges: &[(Vertex, Vertex, i128)]) -> CertGraph {
        CertGraph {
            vertices: vertices.iter().copied().collect(),
            edges: edges.iter().map(|&(a, b, z)| CertEdge::new(a, b, z)).collect(),
        }
    }

    #[test]
    fn orientation_is_normalized() {
        assert_eq!(CertEdge::new(2, 1, 3), CertEdge::new(1, 2, -3));
        assert_eq!(CertEdge::new(4, 4, -2), CertEdge::new(4, 4, 2));
    }

    #[test]
    fn triangle_two_sum_verifies() {
        // (1,2;0),(2,3;0),(1,3;1) plus a doubled pair: sum of (K3,0) and a 2-vertex piece.
        let g = cg(&[1, 2, 3], &[(1, 3, 0), (2, 3, 0), (1, 2, 1)]);
        let k3 = DecompositionTree::leaf(cg(&[1, 2, 3], &[(1, 3, 0), (2, 3, 0), (1, 2, 0)]));
        let pair = DecompositionTree::leaf(cg(&[1, 2], &[(1, 2, 1), (1, 2, 0)]));
        let t = DecompositionTree::node(NodeKind::BalancedTwoSum, g, BTreeMap::new(), vec![k3, pair]);
        assert_eq!(t.added.len(), 1);
        t.verify(2).unwrap();
        assert!(t.verify(1).is_err());
    }

    #[test]
    fn rejects_unbalanced_first_summand() {
        let g = cg(&[1, 2, 3], &[(1, 3, 0), (2, 3, 0), (1, 2, 1)]);
        let bad = DecompositionTree::leaf(cg(&[1, 2, 3], &[(1, 3, 0), (2, 3, 1), (1, 2, 0)]));
        let pair = DecompositionTree::leaf(cg(&[1, 2], &[(1, 2, 1), (1, 2, 0)]));
        let t = DecompositionTree::node(NodeKind::BalancedTwoSum, g, BTreeMap::new(), vec![bad, pair]);
        assert!(t.verify(2).is_err());
    }

    #[test]
    fn one_sum_must_meet_in_one_vertex() {
        let g = cg(&[1, 2, 3], &[(1, 2, 0), (2, 3, 0)]);
        let good = DecompositionTree::node(
            NodeKind::OneSum,
            g.clone(),
            BTreeMap::new(),
            vec![
                DecompositionTree::leaf(cg(&[1, 2], &[(1, 2, 0)])),
                DecompositionTree::leaf(cg(&[2, 3], &[(2, 3, 0)])),
            ],
        );
        good.verify(1).unwrap();
        let bad = DecompositionTree::node(
            NodeKind::DisjointUnion,
            g,
            BTreeMap::new(),
            vec![
                DecompositionTree::leaf(cg(&[1, 2], &[(1, 2, 0)])),
                DecompositionTree::leaf(cg(&[2, 3], &[(2, 3, 0)])),
            ],
        );
        assert!(bad.verify(1).is_err());
    }

    #[test]
    fn balancing_potential_zeroes_labels() {
        let g = cg(&[1, 2, 3, 7], &[(1, 2, 3), (2, 3, -1), (1, 3, 2), (7, 3, 5)]);
        let phi = g.balancing_potential().unwrap();
        assert!(g.switched(&phi).is_all_zero());
        let h = g.clone().with_edge(CertEdge::new(1, 7, 0));
        assert!(h.balancing_potential().is_none());
        assert_eq!(h.multiplicity(7, 1), 1);
        let (si, global) = h.underlying();
        assert_eq!(global, vec![1, 2, 3, 7]);
        assert!(si.has_edge(1, 4));
    }

    #[test]
    fn frame_is_applied_before_comparison() {
        let g = cg(&[1, 2, 3], &[(1, 2, 5), (2, 3, -5), (1, 3, 0)]);
        let mut frame = BTreeMap::new();
        frame.insert(2, -5);
        assert!(g.switched(&frame).is_balanced_triangle());
        assert!(g.is_balanced_triangle());
        let skew = cg(&[1, 2, 3], &[(1, 2, 5), (2, 3, -4), (1, 3, 0)]);
        assert!(!skew.is_balanced_triangle());
    }
}
