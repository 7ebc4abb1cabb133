use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{checked_label, validate_simple, EdgeId, GainEdge, GainGraph, GraphError, Vertex};

/// A Z-labelled graph living inside a larger ambient graph: vertex and edge
/// ids are global, so pieces can be glued, intersected and compared.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    vertices: BTreeSet<Vertex>,
    /// Sorted by id.
    edges: Vec<GainEdge>,
}

/// A balanced k-sum together with the record of how it was formed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KSum {
    pub graph: Piece,
    pub k: usize,
    pub shared: Vec<Vertex>,
}

impl Piece {
    pub fn new(
        vertices: impl IntoIterator<Item = Vertex>,
        edges: impl IntoIterator<Item = GainEdge>,
    ) -> Result<Self, GraphError> {
        let vertices: BTreeSet<Vertex> = vertices.into_iter().collect();
        let mut edges: Vec<GainEdge> = edges.into_iter().collect();
        edges.sort_by_key(|e| e.id);
        for w in edges.windows(2) {
            if w[0].id == w[1].id {
                return Err(GraphError::DuplicateEdgeId(w[0].id));
            }
        }
        for e in &edges {
            for v in [e.tail, e.head] {
                if !vertices.contains(&v) {
                    return Err(GraphError::UnknownVertex(v));
                }
            }
        }
        validate_simple(&edges).map_err(GraphError::NotSimple)?;
        Ok(Piece { vertices, edges })
    }

    pub fn from_graph(g: &GainGraph) -> Self {
        let mut edges = g.edges().to_vec();
        edges.sort_by_key(|e| e.id);
        Piece { vertices: g.vertices().collect(), edges }
    }

    pub fn vertices(&self) -> &BTreeSet<Vertex> {
        &self.vertices
    }

    pub fn edges(&self) -> &[GainEdge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge(&self, id: EdgeId) -> Option<&GainEdge> {
        self.edges.binary_search_by_key(&id, |e| e.id).ok().map(|k| &self.edges[k])
    }

    pub fn is_all_zero(&self) -> bool {
        self.edges.iter().all(|e| e.label == 0)
    }

    /// Dense copy on `1..=n` (vertices in increasing global order) and the
    /// local-to-global table, `global[k]` being the id of local vertex `k + 1`.
    pub fn to_graph(&self) -> (GainGraph, Vec<Vertex>) {
        let global: Vec<Vertex> = self.vertices.iter().copied().collect();
        let local: BTreeMap<Vertex, Vertex> =
            global.iter().enumerate().map(|(k, &v)| (v, k + 1)).collect();
        let edges = self
            .edges
            .iter()
            .map(|e| GainEdge { tail: local[&e.tail], head: local[&e.head], ..*e })
            .collect();
        (GainGraph::from_edges(global.len(), edges).expect("piece is simple"), global)
    }

    /// Inverse of [`Self::to_graph`].
    pub fn from_local(g: &GainGraph, global: &[Vertex]) -> Self {
        let edges = g
            .edges()
            .iter()
            .map(|e| GainEdge { tail: global[e.tail - 1], head: global[e.head - 1], ..*e })
            .collect::<Vec<_>>();
        Piece::new(global.iter().copied(), edges).expect("relabelled simple graph")
    }

    /// Switches every listed vertex by its potential; others stay put.
    pub fn switch_all(&self, potential: &BTreeMap<Vertex, i128>) -> Result<Piece, GraphError> {
        let phi = |v: Vertex| potential.get(&v).copied().unwrap_or(0);
        let edges = self
            .edges
            .iter()
            .map(|e| {
                if e.is_loop() {
                    return Ok(*e);
                }
                let label = checked_label(e.label as i128 + phi(e.tail) - phi(e.head))?;
                Ok(GainEdge { label, ..*e })
            })
            .collect::<Result<Vec<_>, GraphError>>()?;
        Ok(Piece { vertices: self.vertices.clone(), edges })
    }

    /// Every vertex and edge of `self` occurs in `other`, edges matched by id
    /// and equal up to inversion.
    pub fn is_subgraph_of(&self, other: &Piece) -> bool {
        self.vertices.is_subset(&other.vertices)
            && self.edges.iter().all(|e| other.edge(e.id).is_some_and(|f| f.key() == e.key()))
    }

    fn shared_edge_check(&self, other: &Piece) -> Result<(), GraphError> {
        for e in &self.edges {
            if let Some(f) = other.edge(e.id) {
                if f.key() != e.key() {
                    return Err(GraphError::LabelConflict(e.id));
                }
            }
        }
        Ok(())
    }

    pub fn union(&self, other: &Piece) -> Result<Piece, GraphError> {
        self.shared_edge_check(other)?;
        let vertices = self.vertices.union(&other.vertices).copied();
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().filter(|e| self.edge(e.id).is_none()).copied());
        Piece::new(vertices, edges)
    }

    pub fn intersection(&self, other: &Piece) -> Result<Piece, GraphError> {
        self.shared_edge_check(other)?;
        let vertices: BTreeSet<Vertex> = self.vertices.intersection(&other.vertices).copied().collect();
        let edges = self.edges.iter().filter(|e| other.edge(e.id).is_some()).copied();
        Piece::new(vertices, edges)
    }

    /// `true` if the piece is `(K_k, 0)` on its vertex set (`k` may be 0).
    pub fn is_balanced_complete(&self) -> bool {
        let k = self.vertices.len();
        if self.edges.len() != k * k.saturating_sub(1) / 2 {
            return false;
        }
        let pairs: BTreeSet<(Vertex, Vertex)> = self
            .edges
            .iter()
            .filter(|e| !e.is_loop() && e.label == 0)
            .map(|e| (e.tail.min(e.head), e.tail.max(e.head)))
            .collect();
        pairs.len() == self.edges.len()
    }

    /// Glues an all-zero `g1` to `g2` along a shared `(K_k, 0)`.
    pub fn balanced_k_sum(g1: &Piece, g2: &Piece) -> Result<KSum, GraphError> {
        if !g1.is_all_zero() {
            return Err(GraphError::SumPrecondition("first summand has a nonzero label".into()));
        }
        let common = g1.intersection(g2)?;
        if !common.is_balanced_complete() {
            return Err(GraphError::SumPrecondition(
                "intersection is not a balanced complete graph".into(),
            ));
        }
        Ok(KSum {
            graph: g1.union(g2)?,
            k: common.vertex_count(),
            shared: common.vertices.iter().copied().collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::named::glued_counterexample;
    use super::*;

    fn piece_of(g: &GainGraph, ids: &[u32]) -> Piece {
        let edges: Vec<GainEdge> = ids.iter().map(|&k| *g.edge(EdgeId(k)).unwrap()).collect();
        let vertices: BTreeSet<Vertex> = edges.iter().flat_map(|e| [e.tail, e.head]).collect();
        Piece::new(vertices, edges).unwrap()
    }

    #[test]
    fn counterexample_union_and_intersection() {
        let c = glued_counterexample();
        let a = piece_of(&c, &[1, 2, 3, 4]);
        let b = piece_of(&c, &[4, 5, 6]);
        assert_eq!(a.union(&b).unwrap(), Piece::from_graph(&c));
        let common = a.intersection(&b).unwrap();
        assert_eq!(common.vertices().iter().copied().collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(common.edges(), &[GainEdge::new(EdgeId(4), 1, 2, 0)]);
        assert!(common.is_balanced_complete());
        // (a) is not all-zero, (b) glued first is not either.
        assert!(Piece::balanced_k_sum(&a, &b).is_err());
        assert!(Piece::balanced_k_sum(&b, &a).is_err());
    }

    #[test]
    fn one_sum_of_two_edges_is_a_path() {
        let p = Piece::new([1, 2], [GainEdge::new(EdgeId(1), 1, 2, 0)]).unwrap();
        let q = Piece::new([2, 3], [GainEdge::new(EdgeId(2), 2, 3, 0)]).unwrap();
        let sum = Piece::balanced_k_sum(&p, &q).unwrap();
        assert_eq!(sum.k, 1);
        assert_eq!(sum.shared, vec![2]);
        assert_eq!(sum.graph.edges().len(), 2);
        assert_eq!(sum.graph.vertex_count(), 3);
    }

    #[test]
    fn label_conflict_on_shared_id() {
        let p = Piece::new([1, 2], [GainEdge::new(EdgeId(1), 1, 2, 0)]).unwrap();
        let q = Piece::new([1, 2], [GainEdge::new(EdgeId(1), 1, 2, 1)]).unwrap();
        assert_eq!(p.union(&q), Err(GraphError::LabelConflict(EdgeId(1))));
        let inverted = Piece::new([1, 2], [GainEdge::new(EdgeId(1), 2, 1, 0)]).unwrap();
        assert!(p.union(&inverted).is_ok());
    }

    #[test]
    fn union_rejects_non_simple_result() {
        let p = Piece::new([1, 2], [GainEdge::new(EdgeId(1), 1, 2, 0)]).unwrap();
        let q = Piece::new([1, 2], [GainEdge::new(EdgeId(2), 2, 1, 0)]).unwrap();
        assert!(matches!(p.union(&q), Err(GraphError::NotSimple(_))));
    }

    #[test]
    fn dense_round_trip() {
        let p = Piece::new([2, 5, 9], [GainEdge::new(EdgeId(7), 9, 2, 3)]).unwrap();
        let (g, global) = p.to_graph();
        assert_eq!(g.edges(), &[GainEdge::new(EdgeId(7), 3, 1, 3)]);
        assert_eq!(Piece::from_local(&g, &global), p);
    }
}
