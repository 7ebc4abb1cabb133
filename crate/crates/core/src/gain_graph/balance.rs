use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{EdgeId, GainEdge, GainGraph, Vertex};

/// Closed walk `v0 e1 v1 ... ek vk` with `vk = v0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkWitness {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<EdgeId>,
    pub gain: i128,
}

impl WalkWitness {
    /// Checks incidences and recomputes the gain. A selfloop is traversed
    /// forwards.
    pub fn verify(&self, g: &GainGraph) -> bool {
        if self.vertices.len() != self.edges.len() + 1 || self.edges.is_empty() {
            return false;
        }
        if self.vertices.first() != self.vertices.last() {
            return false;
        }
        match walk_gain(g, &self.vertices, &self.edges) {
            Some(gain) => gain == self.gain,
            None => false,
        }
    }
}

/// Gain `sum sign(e_i) z(e_i)` of a walk, or `None` if an incidence fails.
pub fn walk_gain(g: &GainGraph, vertices: &[Vertex], edges: &[EdgeId]) -> Option<i128> {
    let mut gain = 0i128;
    for (k, id) in edges.iter().enumerate() {
        let e = g.edge(*id)?;
        let (a, b) = (vertices[k], vertices[k + 1]);
        if e.tail == a && e.head == b {
            gain += e.label as i128;
        } else if e.tail == b && e.head == a {
            gain -= e.label as i128;
        } else {
            return None;
        }
    }
    Some(gain)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Balance {
    /// Switching each vertex `v` by `potential[v - 1]` makes every label 0.
    Balanced { potential: Vec<i128> },
    Unbalanced(WalkWitness),
}

impl Balance {
    pub fn is_balanced(&self) -> bool {
        matches!(self, Balance::Balanced { .. })
    }
}

/// BFS spanning forest of the underlying graph. `phi(b) = phi(a) + z` along a
/// tree edge `(a, b; z)`; switching by `phi` then zeroes tree labels.
pub(crate) struct Forest {
    pub phi: Vec<i128>,
    /// Tree edge by which each vertex was reached, `None` for roots.
    pub parent: Vec<Option<(Vertex, EdgeId)>>,
    pub depth: Vec<usize>,
}

pub(crate) fn spanning_forest(g: &GainGraph) -> Forest {
    let n = g.vertex_count();
    let mut adj: Vec<Vec<&GainEdge>> = vec![Vec::new(); n + 1];
    for e in g.edges().iter().filter(|e| !e.is_loop()) {
        adj[e.tail].push(e);
        adj[e.head].push(e);
    }
    let mut phi = vec![0i128; n + 1];
    let mut parent = vec![None; n + 1];
    let mut depth = vec![0usize; n + 1];
    let mut seen = vec![false; n + 1];
    for root in 1..=n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(a) = queue.pop_front() {
            for e in &adj[a] {
                let b = e.other(a);
                if !seen[b] {
                    seen[b] = true;
                    phi[b] = phi[a] + e.label_from(a) as i128;
                    parent[b] = Some((a, e.id));
                    depth[b] = depth[a] + 1;
                    queue.push_back(b);
                }
            }
        }
    }
    Forest { phi, parent, depth }
}

impl Forest {
    /// Tree path from `u` up to the common ancestor and down to `v`.
    pub(crate) fn path(&self, u: Vertex, v: Vertex) -> (Vec<Vertex>, Vec<EdgeId>) {
        let (mut a, mut b) = (u, v);
        let mut up: Vec<(Vertex, EdgeId)> = Vec::new();
        let mut down: Vec<(Vertex, EdgeId)> = Vec::new();
        while a != b {
            if self.depth[a] >= self.depth[b] {
                let (p, e) = self.parent[a].expect("same component");
                up.push((a, e));
                a = p;
            } else {
                let (p, e) = self.parent[b].expect("same component");
                down.push((b, e));
                b = p;
            }
        }
        let mut vertices = vec![u];
        let mut edges = Vec::new();
        for (_, e) in &up {
            edges.push(*e);
        }
        let mut cur = u;
        for (x, _) in &up {
            debug_assert_eq!(*x, cur);
            cur = self.parent[*x].expect("tree").0;
            vertices.push(cur);
        }
        for (x, e) in down.iter().rev() {
            edges.push(*e);
            vertices.push(*x);
        }
        (vertices, edges)
    }
}

impl GainGraph {
    /// A cycle other than a selfloop, as a closed walk (first vertex
    /// repeated at the end), or `None` if the graph has none.
    pub fn find_cycle(&self) -> Option<(Vec<Vertex>, Vec<EdgeId>)> {
        let forest = spanning_forest(self);
        let tree: std::collections::BTreeSet<EdgeId> =
            forest.parent.iter().flatten().map(|&(_, e)| e).collect();
        let e = self.edges().iter().find(|e| !e.is_loop() && !tree.contains(&e.id))?;
        let (path_v, path_e) = forest.path(e.head, e.tail);
        let mut vertices = vec![e.tail];
        vertices.extend(path_v);
        let mut edges = vec![e.id];
        edges.extend(path_e);
        Some((vertices, edges))
    }

    pub fn is_balanced(&self) -> Balance {
        if let Some(l) = self.loops().next() {
            return Balance::Unbalanced(WalkWitness {
                vertices: vec![l.tail, l.tail],
                edges: vec![l.id],
                gain: l.label as i128,
            });
        }
        let forest = spanning_forest(self);
        for e in self.edges() {
            let residual = e.label as i128 + forest.phi[e.tail] - forest.phi[e.head];
            if residual != 0 {
                // Close the cycle: tail --e--> head, then the tree path back.
                let (path_v, path_e) = forest.path(e.head, e.tail);
                let mut vertices = vec![e.tail];
                vertices.extend(path_v);
                let mut edges = vec![e.id];
                edges.extend(path_e);
                let gain = super::balance::walk_gain(self, &vertices, &edges).expect("valid walk");
                return Balance::Unbalanced(WalkWitness { vertices, edges, gain });
            }
        }
        Balance::Balanced { potential: forest.phi[1..].to_vec() }
    }
}

#[cfg(test)]
mod tests {
    use super::super::named::*;
    use super::*;

    #[test]
    fn balanced_complete_graph() {
        assert!(balanced_complete(4).is_balanced().is_balanced());
    }

    #[test]
    fn k2_bullet_witness() {
        let g = k2_bullet(0, 1).unwrap();
        match g.is_balanced() {
            Balance::Unbalanced(w) => {
                assert!(w.verify(&g));
                assert_eq!(w.gain.abs(), 1);
                assert_eq!(w.edges.len(), 2);
            }
            b => panic!("expected unbalanced, got {b:?}"),
        }
    }

    #[test]
    fn stress_example_is_unbalanced() {
        let g = stress_example();
        let Balance::Unbalanced(w) = g.is_balanced() else { panic!("balanced") };
        assert!(w.verify(&g));
        assert_ne!(w.gain, 0);
        let inverted = g.invert_edge(EdgeId(3)).unwrap();
        assert!(!inverted.is_balanced().is_balanced());
    }

    #[test]
    fn loop_is_unbalanced() {
        let g = GainGraph::new(2, [(1, 2, 0), (2, 2, -3)]).unwrap();
        let Balance::Unbalanced(w) = g.is_balanced() else { panic!() };
        assert!(w.verify(&g));
        assert_eq!(w.gain, -3);
    }

    #[test]
    fn potentials_zero_the_labels() {
        let g = GainGraph::new(4, [(1, 2, 3), (2, 3, -1), (1, 3, 2), (4, 3, 5)]).unwrap();
        let Balance::Balanced { potential } = g.is_balanced() else { panic!("unbalanced") };
        assert!(g.switch_all(&potential).unwrap().is_all_zero());
    }

    #[test]
    fn cycles_found_and_absent() {
        let tree = GainGraph::new(4, [(1, 2, 0), (2, 3, 5), (2, 4, 1), (4, 4, 1)]).unwrap();
        assert!(tree.find_cycle().is_none());
        let g = GainGraph::new(4, [(1, 2, 0), (2, 3, 5), (3, 4, 1), (4, 2, 0)]).unwrap();
        let (vs, es) = g.find_cycle().unwrap();
        assert_eq!(es.len(), 3);
        assert_eq!(vs.first(), vs.last());
        assert!(walk_gain(&g, &vs, &es).is_some());
        let k2 = k2_bullet(0, 1).unwrap();
        assert_eq!(k2.find_cycle().unwrap().1.len(), 2);
    }

    #[test]
    fn long_cycle_witness() {
        let g = GainGraph::new(5, [(1, 2, 0), (2, 3, 0), (3, 4, 1), (4, 5, 0), (5, 1, 0)]).unwrap();
        let Balance::Unbalanced(w) = g.is_balanced() else { panic!() };
        assert!(w.verify(&g));
        assert_eq!(w.gain.abs(), 1);
        assert_eq!(w.edges.len(), 5);
    }
}
