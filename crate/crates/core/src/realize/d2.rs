use std::collections::{BTreeMap, BTreeSet};

use super::d1::glue;
use super::tree::{CertEdge, CertGraph, DecompositionTree, NodeKind};
use crate::gain_graph::Vertex;

/// Reattaches the selfloops of `full` to a tree for its loopless part.
pub(super) fn attach_loops(full: &CertGraph, tree: DecompositionTree) -> DecompositionTree {
    let mut children = vec![tree];
    for &v in &full.vertices {
        let loops = full.loops_at(v);
        if !loops.edges.is_empty() {
            children.push(DecompositionTree::leaf(loops));
        }
    }
    glue(NodeKind::OneSum, full.clone(), children)
}

/// Decomposition of a loopless graph into `(K_3, 0)` and graphs on at most
/// two vertices, or `None` if it is not 2-realizable.
pub(super) fn decompose(g: &CertGraph) -> Option<DecompositionTree> {
    let n = g.vertices.len();
    if n <= 2 {
        return Some(DecompositionTree::leaf(g.clone()));
    }
    let (si, global) = g.underlying();
    let to_global = |vs: &[Vertex]| vs.iter().map(|&v| global[v - 1]).collect::<Vec<_>>();

    let components = si.components();
    if components.len() > 1 {
        let children = components
            .iter()
            .map(|c| decompose(&g.induced(to_global(c))))
            .collect::<Option<Vec<_>>>()?;
        return Some(DecompositionTree::node(NodeKind::DisjointUnion, g.clone(), BTreeMap::new(), children));
    }
    let (blocks, _) = si.blocks();
    if blocks.len() > 1 {
        let children = block_order(blocks)
            .iter()
            .map(|b| decompose(&g.induced(to_global(b))))
            .collect::<Option<Vec<_>>>()?;
        return Some(DecompositionTree::node(NodeKind::OneSum, g.clone(), BTreeMap::new(), children));
    }
    if n == 3 {
        return three_vertex(g);
    }

    let v_local = (1..=n).find(|&v| si.degree(v) == 2)?;
    let adj = si.adjacency();
    let (v, mut x, mut y) = (global[v_local - 1], global[adj[v_local][0] - 1], global[adj[v_local][1] - 1]);
    if x > y {
        std::mem::swap(&mut x, &mut y);
    }
    let (mx, my) = (g.multiplicity(v, x), g.multiplicity(v, y));
    let rest: Vec<Vertex> = g.vertices.iter().copied().filter(|&u| u != v).collect();
    if mx >= 2 && my >= 2 {
        return None;
    }
    if mx == 1 && my == 1 {
        // Zero both edges at v; the rest is the contraction of v into x.
        let frame = BTreeMap::from([(x, read(g, v, x)), (y, read(g, v, y))]);
        let h = g.switched(&frame);
        let child = decompose(&h.induced(rest).with_edge(CertEdge::new(x, y, 0)))?;
        let triangle = zero_triangle(v, x, y);
        return Some(DecompositionTree::node(NodeKind::BalancedTwoSum, g.clone(), frame, vec![triangle, child]));
    }
    if my >= 2 {
        std::mem::swap(&mut x, &mut y);
    }
    // x carries the parallel edges, y the single one.
    let mut frame = g.induced(rest.iter().copied()).balancing_potential()?;
    let phi_v = frame[&y] - read(g, v, y);
    frame.insert(v, phi_v);
    frame.retain(|_, p| *p != 0);
    let h = g.switched(&frame);
    let xy = CertEdge::new(x, y, 0);
    let big = decompose(&h.induced(rest).with_edge(xy))?;
    let small = three_vertex(&h.induced([v, x, y]).with_edge(xy))?;
    Some(DecompositionTree::node(NodeKind::BalancedTwoSum, g.clone(), frame, vec![big, small]))
}

/// Label of the unique `a`-`b` edge read from `a` to `b`.
fn read(g: &CertGraph, a: Vertex, b: Vertex) -> i128 {
    let e = g.between(a, b).next().expect("edge present");
    if e.lo == a {
        e.label
    } else {
        -e.label
    }
}

fn zero_triangle(a: Vertex, b: Vertex, c: Vertex) -> DecompositionTree {
    DecompositionTree::leaf(CertGraph {
        vertices: BTreeSet::from([a, b, c]),
        edges: BTreeSet::from([CertEdge::new(a, b, 0), CertEdge::new(a, c, 0), CertEdge::new(b, c, 0)]),
    })
}

/// Three vertices with `si = K_3`: no iff the multiplicity graph is
/// spanning, otherwise a 2-sum of `(K_3, 0)` and the doubled pair.
fn three_vertex(g: &CertGraph) -> Option<DecompositionTree> {
    let vs: Vec<Vertex> = g.vertices.iter().copied().collect();
    let pairs = [(vs[0], vs[1]), (vs[0], vs[2]), (vs[1], vs[2])];
    let doubled: Vec<(Vertex, Vertex)> = pairs.iter().copied().filter(|&(a, b)| g.multiplicity(a, b) >= 2).collect();
    if doubled.len() >= 2 {
        return None;
    }
    if g.is_balanced_triangle() {
        return Some(DecompositionTree::leaf(g.clone()));
    }
    let (a, b) = doubled.first().copied().unwrap_or(pairs[0]);
    let c = vs.iter().copied().find(|&u| u != a && u != b).expect("third vertex");
    let frame: BTreeMap<Vertex, i128> =
        [(a, read(g, c, a)), (b, read(g, c, b))].into_iter().filter(|&(_, p)| p != 0).collect();
    let h = g.switched(&frame);
    let pair = DecompositionTree::leaf(h.induced([a, b]).with_edge(CertEdge::new(a, b, 0)));
    Some(DecompositionTree::node(NodeKind::BalancedTwoSum, g.clone(), frame, vec![zero_triangle(a, b, c), pair]))
}

/// Blocks reordered so that each meets the union of the earlier ones.
fn block_order(mut blocks: Vec<Vec<Vertex>>) -> Vec<Vec<Vertex>> {
    let mut placed: BTreeSet<Vertex> = BTreeSet::new();
    let mut order = Vec::with_capacity(blocks.len());
    while !blocks.is_empty() {
        let k = if placed.is_empty() {
            0
        } else {
            blocks.iter().position(|b| b.iter().any(|v| placed.contains(v))).expect("connected")
        };
        let b = blocks.remove(k);
        placed.extend(b.iter().copied());
        order.push(b);
    }
    order
}
