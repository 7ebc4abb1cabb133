//! Z-labelled minor testing against small patterns and pattern families,
//! and the finite forbidden-minor checks.
//!
//! The search is exhaustive and memoized on canonical forms. It is the
//! reference against which the polynomial deciders are tested, so it trades
//! speed for obviousness.

mod builder;
mod finite;

pub use builder::WitnessBuilder;
pub use finite::{finite_has_minor, finite_rd_upper3, FinitePattern, FiniteRd, BRUTE_FORCE_BOUND};

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gain_graph::{named, CanonicalForm, EdgeId, GainGraph, GraphError, Vertex};

pub const ORACLE_VERTEX_BOUND: usize = 8;
pub const ORACLE_EDGE_BOUND: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MinorError {
    #[error("host too large for exhaustive search ({vertices} vertices, {edges} edges)")]
    TooLarge { vertices: usize, edges: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "graph", rename_all = "snake_case")]
pub enum MinorPattern {
    Exact(GainGraph),
    /// Any `(K_2^•, z)`: two vertices joined by exactly two edges.
    K2Bullet,
    /// Any `(K_3^••, z)`: a triangle with two of its pairs doubled.
    K3BulletBullet,
    /// Loopless, no parallel edges, underlying graph isomorphic to the
    /// finite pattern; labels arbitrary.
    Finite(FinitePattern),
}

impl MinorPattern {
    pub fn balanced_triangle() -> Self {
        MinorPattern::Exact(named::balanced_complete(3))
    }

    pub fn balanced_k4() -> Self {
        MinorPattern::Exact(named::balanced_complete(4))
    }

    fn vertex_count(&self) -> usize {
        match self {
            MinorPattern::Exact(g) => g.vertex_count(),
            MinorPattern::K2Bullet => 2,
            MinorPattern::K3BulletBullet => 3,
            MinorPattern::Finite(p) => p.graph().vertex_count(),
        }
    }

    fn edge_count(&self) -> usize {
        match self {
            MinorPattern::Exact(g) => g.edge_count(),
            MinorPattern::K2Bullet => 2,
            MinorPattern::K3BulletBullet => 5,
            MinorPattern::Finite(p) => p.graph().edge_count(),
        }
    }

    fn loopless(&self) -> bool {
        match self {
            MinorPattern::Exact(g) => !g.has_loops(),
            _ => true,
        }
    }

    /// Whether `g` is isomorphic to (a member of) the pattern.
    pub fn matches(&self, g: &GainGraph) -> bool {
        match self {
            MinorPattern::Exact(p) => {
                p.vertex_count() == g.vertex_count()
                    && p.edge_count() == g.edge_count()
                    && match (p.canonical_form(), g.canonical_form()) {
                        (Ok(a), Ok(b)) => a == b,
                        _ => false,
                    }
            }
            MinorPattern::K2Bullet => {
                g.vertex_count() == 2 && g.edge_count() == 2 && !g.has_loops()
            }
            MinorPattern::K3BulletBullet => {
                if g.vertex_count() != 3 || g.edge_count() != 5 || g.has_loops() {
                    return false;
                }
                let mut m = [g.multiplicity(1, 2), g.multiplicity(1, 3), g.multiplicity(2, 3)];
                m.sort_unstable();
                m == [1, 2, 2]
            }
            MinorPattern::Finite(p) => {
                let target = p.graph();
                if g.vertex_count() != target.vertex_count()
                    || g.edge_count() != target.edge_count()
                    || g.has_loops()
                {
                    return false;
                }
                let si = g.si_graph();
                si.edge_count() == g.edge_count()
                    && GainGraph::balanced_from(&si).canonical_form().ok()
                        == GainGraph::balanced_from(&target).canonical_form().ok()
            }
        }
    }
}

impl fmt::Display for MinorPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MinorPattern::Exact(g) => write!(f, "exact {g}"),
            MinorPattern::K2Bullet => write!(f, "(K2^*, z)"),
            MinorPattern::K3BulletBullet => write!(f, "(K3^**, z)"),
            MinorPattern::Finite(p) => write!(f, "finite {p:?}"),
        }
    }
}

/// One step of a minor sequence. Vertex numbers refer to the graph as it is
/// just before the step; edge ids are stable throughout.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", content = "target", rename_all = "snake_case")]
pub enum MinorOp {
    DeleteVertex(Vertex),
    DeleteEdge(EdgeId),
    /// Contraction, switching the head first when the label is nonzero.
    Contract(EdgeId),
}

impl fmt::Display for MinorOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MinorOp::DeleteVertex(v) => write!(f, "delete vertex {v}"),
            MinorOp::DeleteEdge(e) => write!(f, "delete edge {e}"),
            MinorOp::Contract(e) => write!(f, "contract {e}"),
        }
    }
}

impl MinorOp {
    pub fn apply(&self, g: &GainGraph) -> Result<GainGraph, GraphError> {
        match *self {
            MinorOp::DeleteVertex(v) => g.delete_vertex(v),
            MinorOp::DeleteEdge(e) => g.delete_edge(e),
            MinorOp::Contract(e) => g.contract_edge(e),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorWitness {
    pub pattern: MinorPattern,
    pub ops: Vec<MinorOp>,
}

impl MinorWitness {
    pub fn replay(&self, host: &GainGraph) -> Result<GainGraph, GraphError> {
        self.ops.iter().try_fold(host.clone(), |g, op| op.apply(&g))
    }

    /// Replays on `host` and checks the result against the pattern.
    pub fn verify(&self, host: &GainGraph) -> bool {
        self.replay(host).is_ok_and(|g| self.pattern.matches(&g))
    }
}

/// Exhaustive search for a single pattern.
pub fn has_minor(host: &GainGraph, pattern: &MinorPattern) -> Result<Option<MinorWitness>, MinorError> {
    has_minor_any(host, std::slice::from_ref(pattern))
}

/// Exhaustive search for the first of several patterns reachable from
/// `host`. Patterns are tried on each state in the given order.
pub fn has_minor_any(
    host: &GainGraph,
    patterns: &[MinorPattern],
) -> Result<Option<MinorWitness>, MinorError> {
    if host.vertex_count() > ORACLE_VERTEX_BOUND || host.edge_count() > ORACLE_EDGE_BOUND {
        return Err(MinorError::TooLarge { vertices: host.vertex_count(), edges: host.edge_count() });
    }
    let strip_loops = patterns.iter().all(MinorPattern::loopless);
    let min_v = patterns.iter().map(MinorPattern::vertex_count).min().unwrap_or(0);
    let min_e = patterns.iter().map(MinorPattern::edge_count).min().unwrap_or(0);
    let mut search = Search { patterns, strip_loops, min_v, min_e, failed: HashSet::new() };
    let mut ops = Vec::new();
    let start = if strip_loops { search.drop_loops(host, &mut ops) } else { host.clone() };
    Ok(search.dfs(&start, &mut ops).map(|k| MinorWitness { pattern: patterns[k].clone(), ops }))
}

struct Search<'a> {
    patterns: &'a [MinorPattern],
    strip_loops: bool,
    min_v: usize,
    min_e: usize,
    failed: HashSet<CanonicalForm>,
}

impl Search<'_> {
    fn drop_loops(&self, g: &GainGraph, ops: &mut Vec<MinorOp>) -> GainGraph {
        let loops: Vec<EdgeId> = g.loops().map(|e| e.id).collect();
        ops.extend(loops.iter().map(|&e| MinorOp::DeleteEdge(e)));
        g.without_loops()
    }

    /// Returns the index of the matched pattern, leaving the path in `ops`.
    fn dfs(&mut self, g: &GainGraph, ops: &mut Vec<MinorOp>) -> Option<usize> {
        if let Some(k) = self.patterns.iter().position(|p| p.matches(g)) {
            return Some(k);
        }
        if g.vertex_count() < self.min_v || g.edge_count() < self.min_e {
            return None;
        }
        let key = g.canonical_form().expect("host within bound");
        if self.failed.contains(&key) {
            return None;
        }
        let mut moves: Vec<MinorOp> = Vec::new();
        if g.vertex_count() > self.min_v {
            moves.extend(g.vertices().map(MinorOp::DeleteVertex));
        }
        moves.extend(g.edges().iter().map(|e| MinorOp::DeleteEdge(e.id)));
        if g.vertex_count() > self.min_v {
            moves.extend(g.edges().iter().filter(|e| !e.is_loop()).map(|e| MinorOp::Contract(e.id)));
        }
        for op in moves {
            let next = op.apply(g).expect("move is valid");
            let mark = ops.len();
            ops.push(op);
            let next = if self.strip_loops && matches!(op, MinorOp::Contract(_)) {
                self.drop_loops(&next, ops)
            } else {
                next
            };
            if let Some(k) = self.dfs(&next, ops) {
                return Some(k);
            }
            ops.truncate(mark);
        }
        self.failed.insert(key);
        None
    }
}

/// Forbidden patterns for realizable dimension at most one.
pub fn forbidden_d1() -> Vec<MinorPattern> {
    vec![MinorPattern::K2Bullet, MinorPattern::balanced_triangle()]
}

/// Forbidden patterns for realizable dimension at most two.
pub fn forbidden_d2() -> Vec<MinorPattern> {
    vec![MinorPattern::K3BulletBullet, MinorPattern::balanced_k4()]
}

/// Counts of distinct canonical states reachable from `host` (for tests and
/// diagnostics).
pub fn count_minor_states(host: &GainGraph) -> Result<BTreeMap<usize, usize>, MinorError> {
    if host.vertex_count() > ORACLE_VERTEX_BOUND {
        return Err(MinorError::TooLarge { vertices: host.vertex_count(), edges: host.edge_count() });
    }
    let mut seen: HashSet<CanonicalForm> = HashSet::new();
    let mut stack = vec![host.clone()];
    let mut by_size = BTreeMap::new();
    while let Some(g) = stack.pop() {
        if !seen.insert(g.canonical_form()?) {
            continue;
        }
        *by_size.entry(g.vertex_count()).or_insert(0) += 1;
        for v in g.vertices() {
            stack.push(g.delete_vertex(v)?);
        }
        for e in g.edges() {
            stack.push(g.delete_edge(e.id)?);
            if !e.is_loop() {
                stack.push(g.contract_edge(e.id)?);
            }
        }
    }
    Ok(by_size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gain_graph::named::*;

    #[test]
    fn balanced_triangle_has_no_k2_bullet() {
        assert_eq!(has_minor(&balanced_complete(3), &MinorPattern::K2Bullet).unwrap(), None);
    }

    #[test]
    fn counterexample_contains_k3_bullet_bullet() {
        let c = glued_counterexample();
        let w = has_minor(&c, &MinorPattern::K3BulletBullet).unwrap().expect("minor exists");
        assert!(w.verify(&c));
        // The direct route: contract the 1-4 edge.
        let direct = MinorWitness { pattern: MinorPattern::K3BulletBullet, ops: vec![MinorOp::Contract(EdgeId(5))] };
        assert!(direct.verify(&c));
    }

    #[test]
    fn exact_self_is_empty_witness() {
        let g = stress_example();
        let w = has_minor(&g, &MinorPattern::Exact(g.clone())).unwrap().unwrap();
        assert!(w.ops.is_empty());
    }

    #[test]
    fn k4_contains_balanced_triangle_but_no_k3bb() {
        let k4 = balanced_complete(4);
        let w = has_minor(&k4, &MinorPattern::balanced_triangle()).unwrap().unwrap();
        assert!(w.verify(&k4));
        assert!(has_minor(&k4, &MinorPattern::K3BulletBullet).unwrap().is_none());
        assert!(has_minor(&k4, &MinorPattern::K2Bullet).unwrap().is_none());
    }

    #[test]
    fn unbalanced_triangle_contracts_to_k2_bullet() {
        let g = GainGraph::new(3, [(1, 2, 0), (2, 3, 0), (3, 1, 1)]).unwrap();
        let w = has_minor(&g, &MinorPattern::K2Bullet).unwrap().unwrap();
        assert!(w.verify(&g));
        assert!(has_minor(&g, &MinorPattern::balanced_triangle()).unwrap().is_none());
    }

    #[test]
    fn loops_are_irrelevant_to_loopless_patterns() {
        let g = GainGraph::new(2, [(1, 1, 1), (2, 2, 3), (1, 2, 0)]).unwrap();
        assert!(has_minor_any(&g, &forbidden_d1()).unwrap().is_none());
        let looped = MinorPattern::Exact(GainGraph::new(1, [(1, 1, 3)]).unwrap());
        let w = has_minor(&g, &looped).unwrap().unwrap();
        assert!(w.verify(&g));
    }

    #[test]
    fn finite_pattern_matching() {
        let k4 = balanced_complete(4);
        assert!(MinorPattern::Finite(FinitePattern::K4).matches(&k4));
        let w = has_minor(&named::k3_bullet_bullet(0, (0, 1), (0, 1)).unwrap(), &MinorPattern::Finite(FinitePattern::K3))
            .unwrap()
            .unwrap();
        assert!(!w.ops.is_empty());
    }

    #[test]
    fn bounds() {
        assert!(matches!(
            has_minor(&GainGraph::empty(9), &MinorPattern::K2Bullet),
            Err(MinorError::TooLarge { .. })
        ));
    }

    #[test]
    fn state_count_of_triangle() {
        let counts = count_minor_states(&balanced_complete(3)).unwrap();
        // triangle, path, edge+vertex, 3 isolated; K2, 2 isolated; 1 vertex; empty
        assert_eq!(counts[&3], 4);
        assert_eq!(counts[&2], 2);
        assert_eq!(counts[&1], 1);
        assert_eq!(counts[&0], 1);
    }
}
