use serde::{Deserialize, Serialize};

use super::{GainGraph, Vertex};
use crate::simple_graph::SimpleGraph;

/// Finite slice of the lift: vertices `(i, gamma)` for `gamma` in
/// `[from, to]` and every lifted edge with both ends in the slice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftWindow {
    pub from: i64,
    pub to: i64,
    /// Position `k` holds the vertex numbered `k + 1` in [`Self::graph`].
    pub vertices: Vec<(Vertex, i64)>,
    pub graph: SimpleGraph,
}

impl LiftWindow {
    pub fn index_of(&self, v: Vertex, shift: i64) -> Option<usize> {
        self.vertices.iter().position(|&(u, s)| u == v && s == shift).map(|k| k + 1)
    }
}

impl GainGraph {
    /// `{(i, gamma), (j, gamma + z)}` for each edge `(i, j; z)`. Returns an
    /// empty window when `from > to`.
    pub fn lift_window(&self, from: i64, to: i64) -> LiftWindow {
        let n = self.vertex_count();
        let width = if from > to { 0 } else { (to - from + 1) as usize };
        let vertices: Vec<(Vertex, i64)> =
            (0..width).flat_map(|s| (1..=n).map(move |v| (v, from + s as i64))).collect();
        let index = |v: Vertex, shift: i64| -> Option<usize> {
            (shift >= from && shift <= to).then(|| (shift - from) as usize * n + v)
        };
        let mut graph = SimpleGraph::new(vertices.len());
        for e in self.edges() {
            for s in 0..width as i64 {
                let gamma = from + s;
                let Some(target) = gamma.checked_add(e.label) else { continue };
                if let (Some(a), Some(b)) = (index(e.tail, gamma), index(e.head, target)) {
                    graph.add_edge(a, b);
                }
            }
        }
        LiftWindow { from, to, vertices, graph }
    }
}

#[cfg(test)]
mod tests {
    use super::super::named::*;
    use super::*;

    #[test]
    fn single_edge() {
        let w = balanced_complete(2).lift_window(0, 0);
        assert_eq!(w.graph, SimpleGraph::complete(2));
    }

    #[test]
    fn loop_lifts_to_path() {
        let w = GainGraph::new(1, [(1, 1, 1)]).unwrap().lift_window(0, 2);
        assert_eq!(w.graph.vertex_count(), 3);
        assert_eq!(w.graph.edge_count(), 2);
        assert!(w.graph.has_edge(1, 2) && w.graph.has_edge(2, 3));
    }

    #[test]
    fn balanced_edge_lifts_to_disjoint_copies() {
        let w = balanced_complete(2).lift_window(0, 2);
        assert_eq!(w.graph.edge_count(), 3);
        assert_eq!(w.graph.components().len(), 3);
    }

    #[test]
    fn stress_example_two_cells() {
        let g = stress_example();
        let w = g.lift_window(0, 1);
        assert_eq!(w.graph.vertex_count(), 6);
        let idx = |v, s| w.index_of(v, s).unwrap();
        // zero-label edges appear in both cells, label-1 edges only across them
        for s in 0..=1 {
            assert!(w.graph.has_edge(idx(1, s), idx(2, s)));
            assert!(w.graph.has_edge(idx(3, s), idx(1, s)));
            assert!(w.graph.has_edge(idx(3, s), idx(2, s)));
        }
        assert!(w.graph.has_edge(idx(3, 0), idx(1, 1)));
        assert!(w.graph.has_edge(idx(3, 0), idx(2, 1)));
        assert_eq!(w.graph.edge_count(), 8);
    }
}
