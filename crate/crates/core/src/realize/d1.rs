use std::collections::{BTreeMap, VecDeque};

use super::tree::{CertGraph, DecompositionTree, NodeKind};
use crate::gain_graph::GainGraph;

/// 1-realizable iff, ignoring selfloops, the graph has no cycle at all
/// (a parallel pair counts as a cycle).
pub(super) fn decide(g: &GainGraph) -> bool {
    g.find_cycle().is_none()
}

/// Single edges and single-vertex loop bundles, glued by 1-sums within a
/// component and by disjoint unions across components.
pub(super) fn decompose(g: &GainGraph) -> Option<DecompositionTree> {
    if !decide(g) {
        return None;
    }
    let full = CertGraph::from_graph(g);
    let si = g.si_graph();
    let adj = si.adjacency();
    let mut components = Vec::new();
    for comp in si.components() {
        let mut children = Vec::new();
        let mut seen = vec![false; g.vertex_count() + 1];
        seen[comp[0]] = true;
        let mut queue = VecDeque::from([comp[0]]);
        while let Some(a) = queue.pop_front() {
            for &b in &adj[a] {
                if !seen[b] {
                    seen[b] = true;
                    children.push(DecompositionTree::leaf(full.induced([a, b]).without_loops()));
                    queue.push_back(b);
                }
            }
        }
        for &v in &comp {
            let loops = full.loops_at(v);
            if !loops.edges.is_empty() {
                children.push(DecompositionTree::leaf(loops));
            }
        }
        components.push(glue(NodeKind::OneSum, full.induced(comp), children));
    }
    Some(glue(NodeKind::DisjointUnion, full, components))
}

/// Node over `children`, collapsing the trivial cases.
pub(super) fn glue(kind: NodeKind, graph: CertGraph, mut children: Vec<DecompositionTree>) -> DecompositionTree {
    match children.len() {
        0 => DecompositionTree::leaf(graph),
        1 if children[0].graph == graph => children.pop().expect("one child"),
        _ => DecompositionTree::node(kind, graph, BTreeMap::new(), children),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forest_with_loops() {
        let g = GainGraph::new(6, [(1, 2, 4), (2, 3, -1), (2, 4, 0), (5, 6, 2), (2, 2, 1), (6, 6, 3)]).unwrap();
        let t = decompose(&g).unwrap();
        t.verify(1).unwrap();
        assert_eq!(t.kind, NodeKind::DisjointUnion);
        assert_eq!(t.leaf_count(), 6);
    }

    #[test]
    fn isolated_vertices_and_parallel_pairs() {
        let g = GainGraph::empty(3);
        decompose(&g).unwrap().verify(1).unwrap();
        let p = GainGraph::new(2, [(1, 2, 0), (1, 2, 1)]).unwrap();
        assert!(decompose(&p).is_none());
    }
}
