//! Z-labelled (gain) graphs.
//!
//! A [`GainGraph`] is a finite directed multigraph on the dense vertex set
//! `1..=n` whose edges carry integer labels. It is the quotient of a
//! Z-symmetric graph: the edge `(i, j; g)` stands for the orbit
//! `{ {i + b, j + b + g} : b in Z }` of the lift.
//!
//! Every value is immutable; operations return new graphs. Edge ids survive
//! every operation, vertex ids are re-packed to `1..=n'` after deletions and
//! contractions (use the `*_with_map` variants to recover the mapping).

mod balance;
mod canonical;
mod lift;
mod piece;

pub use balance::{walk_gain, Balance, WalkWitness};
pub use canonical::{CanonicalForm, DEFAULT_CANONICAL_BOUND};
pub use lift::LiftWindow;
pub use piece::{KSum, Piece};

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::simple_graph::SimpleGraph;

/// Vertex ids are 1-based.
pub type Vertex = usize;

/// Largest label magnitude a graph may store. Keeps every label exactly
/// representable as `f64` and leaves headroom for gains summed in `i128`.
pub const MAX_LABEL: i64 = 1 << 53;

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GainEdge {
    pub id: EdgeId,
    pub tail: Vertex,
    pub head: Vertex,
    pub label: i64,
}

impl GainEdge {
    pub fn new(id: EdgeId, tail: Vertex, head: Vertex, label: i64) -> Self {
        GainEdge { id, tail, head, label }
    }

    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }

    pub fn inverted(&self) -> GainEdge {
        GainEdge { id: self.id, tail: self.head, head: self.tail, label: -self.label }
    }

    /// Orientation-free identity of the edge orbit: non-loops are oriented
    /// from the smaller endpoint, loops carry `|label|`.
    pub fn key(&self) -> EdgeKey {
        if self.is_loop() {
            EdgeKey { lo: self.tail, hi: self.head, label: self.label.abs() }
        } else if self.tail < self.head {
            EdgeKey { lo: self.tail, hi: self.head, label: self.label }
        } else {
            EdgeKey { lo: self.head, hi: self.tail, label: -self.label }
        }
    }

    pub fn touches(&self, v: Vertex) -> bool {
        self.tail == v || self.head == v
    }

    /// Label read in the direction `from -> other end`.
    pub fn label_from(&self, from: Vertex) -> i64 {
        if self.tail == from {
            self.label
        } else {
            -self.label
        }
    }

    pub fn other(&self, v: Vertex) -> Vertex {
        if self.tail == v {
            self.head
        } else {
            self.tail
        }
    }
}

impl fmt::Display for GainEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}=({},{};{:+})", self.id, self.tail, self.head, self.label)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeKey {
    pub lo: Vertex,
    pub hi: Vertex,
    pub label: i64,
}

/// Why a labelling fails to be simple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimplicityViolation {
    ZeroLoop { edge: EdgeId },
    SameDirection { first: EdgeId, second: EdgeId },
    InverseDirection { first: EdgeId, second: EdgeId },
}

impl SimplicityViolation {
    pub fn edges(&self) -> Vec<EdgeId> {
        match *self {
            SimplicityViolation::ZeroLoop { edge } => vec![edge],
            SimplicityViolation::SameDirection { first, second }
            | SimplicityViolation::InverseDirection { first, second } => vec![first, second],
        }
    }
}

impl fmt::Display for SimplicityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimplicityViolation::ZeroLoop { edge } => write!(f, "selfloop {edge} has label 0"),
            SimplicityViolation::SameDirection { first, second } => {
                write!(f, "parallel edges {first} and {second} have the same direction and label")
            }
            SimplicityViolation::InverseDirection { first, second } => write!(
                f,
                "parallel edges {first} and {second} have inverse directions and inverse labels"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown vertex {0}")]
    UnknownVertex(Vertex),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("duplicate edge id {0}")]
    DuplicateEdgeId(EdgeId),
    #[error("labelling is not simple: {0}")]
    NotSimple(SimplicityViolation),
    #[error("cannot contract selfloop {0}")]
    LoopContraction(EdgeId),
    #[error("label magnitude exceeds {MAX_LABEL}")]
    LabelOverflow,
    #[error("graph has {vertices} vertices, bound is {bound}")]
    TooLarge { vertices: usize, bound: usize },
    #[error("edge {0} carries different endpoints or labels in the two graphs")]
    LabelConflict(EdgeId),
    #[error("k-sum precondition violated: {0}")]
    SumPrecondition(String),
}

/// Checks both simplicity clauses on a raw edge list.
pub fn validate_simple(edges: &[GainEdge]) -> Result<(), SimplicityViolation> {
    let mut seen: BTreeMap<EdgeKey, &GainEdge> = BTreeMap::new();
    for e in edges {
        if e.is_loop() && e.label == 0 {
            return Err(SimplicityViolation::ZeroLoop { edge: e.id });
        }
        if let Some(prev) = seen.get(&e.key()) {
            let same_direction =
                (prev.tail == e.tail && prev.head == e.head && prev.label == e.label)
                    || (prev.is_loop() && prev.label == e.label);
            return Err(if same_direction {
                SimplicityViolation::SameDirection { first: prev.id, second: e.id }
            } else {
                SimplicityViolation::InverseDirection { first: prev.id, second: e.id }
            });
        }
        seen.insert(e.key(), e);
    }
    Ok(())
}

/// `old_to_new[v - 1]` is the new id of old vertex `v`, if it survived.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexMap {
    pub old_to_new: Vec<Option<Vertex>>,
}

impl VertexMap {
    pub fn get(&self, v: Vertex) -> Option<Vertex> {
        self.old_to_new.get(v.wrapping_sub(1)).copied().flatten()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph")]
pub struct GainGraph {
    n: usize,
    edges: Vec<GainEdge>,
}

#[derive(Deserialize)]
struct RawGraph {
    n: usize,
    edges: Vec<GainEdge>,
}

impl TryFrom<RawGraph> for GainGraph {
    type Error = GraphError;

    fn try_from(raw: RawGraph) -> Result<Self, GraphError> {
        GainGraph::from_edges(raw.n, raw.edges)
    }
}

/// Deletion target for [`GainGraph::delete`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Target {
    Vertex(Vertex),
    Edge(EdgeId),
}

impl GainGraph {
    /// Builds a graph on `1..=n`, numbering edges `e1, e2, ...` in order.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex, i64)>,
    {
        let edges = edges
            .into_iter()
            .enumerate()
            .map(|(k, (t, h, z))| GainEdge::new(EdgeId(k as u32 + 1), t, h, z))
            .collect();
        Self::from_edges(n, edges)
    }

    pub fn from_edges(n: usize, edges: Vec<GainEdge>) -> Result<Self, GraphError> {
        let mut ids = std::collections::BTreeSet::new();
        for e in &edges {
            for v in [e.tail, e.head] {
                if v == 0 || v > n {
                    return Err(GraphError::UnknownVertex(v));
                }
            }
            if e.label.abs() > MAX_LABEL {
                return Err(GraphError::LabelOverflow);
            }
            if !ids.insert(e.id) {
                return Err(GraphError::DuplicateEdgeId(e.id));
            }
        }
        validate_simple(&edges).map_err(GraphError::NotSimple)?;
        Ok(GainGraph { n, edges })
    }

    /// `(G, 0)`: the simple graph with every edge `u -> v` (`u < v`) labelled 0.
    pub fn balanced_from(g: &SimpleGraph) -> Self {
        GainGraph::new(g.vertex_count(), g.edges().map(|(u, v)| (u, v, 0))).expect("simple")
    }

    pub fn empty(n: usize) -> Self {
        GainGraph { n, edges: Vec::new() }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> std::ops::RangeInclusive<Vertex> {
        1..=self.n
    }

    pub fn edges(&self) -> &[GainEdge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Option<&GainEdge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        v >= 1 && v <= self.n
    }

    pub fn max_edge_id(&self) -> Option<EdgeId> {
        self.edges.iter().map(|e| e.id).max()
    }

    pub fn loops(&self) -> impl Iterator<Item = &GainEdge> {
        self.edges.iter().filter(|e| e.is_loop())
    }

    pub fn has_loops(&self) -> bool {
        self.edges.iter().any(GainEdge::is_loop)
    }

    pub fn without_loops(&self) -> GainGraph {
        GainGraph { n: self.n, edges: self.edges.iter().filter(|e| !e.is_loop()).copied().collect() }
    }

    pub fn is_all_zero(&self) -> bool {
        self.edges.iter().all(|e| e.label == 0)
    }

    /// Number of non-loop edges between `u` and `v`, direction ignored.
    pub fn multiplicity(&self, u: Vertex, v: Vertex) -> usize {
        if u == v {
            return 0;
        }
        self.edges.iter().filter(|e| e.touches(u) && e.touches(v) && !e.is_loop()).count()
    }

    /// Smallest-id non-loop edge joining `u` and `v`.
    pub fn edge_between(&self, u: Vertex, v: Vertex) -> Option<&GainEdge> {
        self.edges
            .iter()
            .filter(|e| u != v && e.touches(u) && e.touches(v))
            .min_by_key(|e| e.id)
    }

    /// Non-loop edges incident to `v`.
    pub fn incident(&self, v: Vertex) -> impl Iterator<Item = &GainEdge> {
        self.edges.iter().filter(move |e| !e.is_loop() && e.touches(v))
    }

    fn check_vertex(&self, v: Vertex) -> Result<(), GraphError> {
        if self.contains_vertex(v) {
            Ok(())
        } else {
            Err(GraphError::UnknownVertex(v))
        }
    }

    fn check_edge(&self, id: EdgeId) -> Result<&GainEdge, GraphError> {
        self.edge(id).ok_or(GraphError::UnknownEdge(id))
    }

    /// Switching at `v` by `gamma`: `+gamma` on non-loop edges leaving `v`,
    /// `-gamma` on those entering it.
    pub fn switch(&self, v: Vertex, gamma: i64) -> Result<GainGraph, GraphError> {
        self.check_vertex(v)?;
        let mut potential = vec![0i128; self.n];
        potential[v - 1] = gamma as i128;
        self.switch_all(&potential)
    }

    /// Switches every vertex `v` by `potential[v - 1]` at once.
    pub fn switch_all(&self, potential: &[i128]) -> Result<GainGraph, GraphError> {
        assert_eq!(potential.len(), self.n, "one potential per vertex");
        let edges = self
            .edges
            .iter()
            .map(|e| {
                if e.is_loop() {
                    return Ok(*e);
                }
                let z = e.label as i128 + potential[e.tail - 1] - potential[e.head - 1];
                let label = checked_label(z)?;
                Ok(GainEdge { label, ..*e })
            })
            .collect::<Result<Vec<_>, GraphError>>()?;
        Ok(GainGraph { n: self.n, edges })
    }

    pub fn invert_edge(&self, id: EdgeId) -> Result<GainGraph, GraphError> {
        self.check_edge(id)?;
        let edges = self.edges.iter().map(|e| if e.id == id { e.inverted() } else { *e }).collect();
        Ok(GainGraph { n: self.n, edges })
    }

    pub fn delete(&self, target: Target) -> Result<GainGraph, GraphError> {
        match target {
            Target::Vertex(v) => self.delete_vertex(v),
            Target::Edge(e) => self.delete_edge(e),
        }
    }

    pub fn delete_edge(&self, id: EdgeId) -> Result<GainGraph, GraphError> {
        self.check_edge(id)?;
        Ok(GainGraph { n: self.n, edges: self.edges.iter().filter(|e| e.id != id).copied().collect() })
    }

    pub fn delete_vertex(&self, v: Vertex) -> Result<GainGraph, GraphError> {
        self.delete_vertex_with_map(v).map(|(g, _)| g)
    }

    pub fn delete_vertex_with_map(&self, v: Vertex) -> Result<(GainGraph, VertexMap), GraphError> {
        self.check_vertex(v)?;
        let map = VertexMap {
            old_to_new: (1..=self.n)
                .map(|u| match u.cmp(&v) {
                    std::cmp::Ordering::Less => Some(u),
                    std::cmp::Ordering::Equal => None,
                    std::cmp::Ordering::Greater => Some(u - 1),
                })
                .collect(),
        };
        let edges = self
            .edges
            .iter()
            .filter(|e| !e.touches(v))
            .map(|e| GainEdge {
                tail: map.get(e.tail).expect("kept"),
                head: map.get(e.head).expect("kept"),
                ..*e
            })
            .collect();
        Ok((GainGraph { n: self.n - 1, edges }, map))
    }

    /// Keeps only `keep` (any order), packing them in increasing id order.
    pub fn induced_with_map(&self, keep: &[Vertex]) -> Result<(GainGraph, VertexMap), GraphError> {
        let mut flags = vec![false; self.n];
        for &v in keep {
            self.check_vertex(v)?;
            flags[v - 1] = true;
        }
        let mut next = 0;
        let old_to_new = flags
            .iter()
            .map(|&k| {
                k.then(|| {
                    next += 1;
                    next
                })
            })
            .collect();
        let map = VertexMap { old_to_new };
        let edges = self
            .edges
            .iter()
            .filter_map(|e| {
                Some(GainEdge { tail: map.get(e.tail)?, head: map.get(e.head)?, ..*e })
            })
            .collect();
        Ok((GainGraph { n: next, edges }, map))
    }

    pub fn contract_edge(&self, id: EdgeId) -> Result<GainGraph, GraphError> {
        self.contract_edge_with_map(id).map(|(g, _)| g)
    }

    /// Contracts a non-loop edge. A nonzero label is first cleared by
    /// switching at the head. The endpoints merge into the smaller id;
    /// zero-label loops are dropped and, among edges that became
    /// equivalent, the smallest edge id is kept.
    pub fn contract_edge_with_map(&self, id: EdgeId) -> Result<(GainGraph, VertexMap), GraphError> {
        let e = *self.check_edge(id)?;
        if e.is_loop() {
            return Err(GraphError::LoopContraction(id));
        }
        let g = if e.label != 0 { self.switch(e.head, e.label)? } else { self.clone() };
        let (keep, gone) = (e.tail.min(e.head), e.tail.max(e.head));
        let map = VertexMap {
            old_to_new: (1..=self.n)
                .map(|u| {
                    Some(match u.cmp(&gone) {
                        std::cmp::Ordering::Less => u,
                        std::cmp::Ordering::Equal => keep,
                        std::cmp::Ordering::Greater => u - 1,
                    })
                })
                .collect(),
        };
        let mut by_key: BTreeMap<EdgeKey, GainEdge> = BTreeMap::new();
        for f in g.edges.iter().filter(|f| f.id != id) {
            let moved = GainEdge {
                tail: map.get(f.tail).expect("total"),
                head: map.get(f.head).expect("total"),
                ..*f
            };
            if moved.is_loop() && moved.label == 0 {
                continue;
            }
            by_key
                .entry(moved.key())
                .and_modify(|kept| {
                    if moved.id < kept.id {
                        *kept = moved;
                    }
                })
                .or_insert(moved);
        }
        let mut edges: Vec<GainEdge> = by_key.into_values().collect();
        let order: BTreeMap<EdgeId, usize> =
            self.edges.iter().enumerate().map(|(k, e)| (e.id, k)).collect();
        edges.sort_by_key(|e| order[&e.id]);
        Ok((GainGraph { n: self.n - 1, edges }, map))
    }

    /// Renames vertex `v` to `perm[v - 1]`; `perm` must be a permutation of `1..=n`.
    pub fn permute(&self, perm: &[Vertex]) -> Result<GainGraph, GraphError> {
        assert_eq!(perm.len(), self.n, "permutation length");
        let edges = self
            .edges
            .iter()
            .map(|e| GainEdge { tail: perm[e.tail - 1], head: perm[e.head - 1], ..*e })
            .collect();
        GainGraph::from_edges(self.n, edges)
    }

    pub fn negated(&self) -> GainGraph {
        GainGraph {
            n: self.n,
            edges: self.edges.iter().map(|e| GainEdge { label: -e.label, ..*e }).collect(),
        }
    }

    /// Selfloops dropped, directions and multiplicities forgotten.
    pub fn si_graph(&self) -> SimpleGraph {
        let mut g = SimpleGraph::new(self.n);
        for e in self.edges.iter().filter(|e| !e.is_loop()) {
            g.add_edge(e.tail, e.head);
        }
        g
    }

    /// Pairs of distinct vertices joined by at least two edges.
    pub fn multiplicity_graph(&self) -> SimpleGraph {
        let mut counts: BTreeMap<(Vertex, Vertex), usize> = BTreeMap::new();
        for e in self.edges.iter().filter(|e| !e.is_loop()) {
            *counts.entry((e.tail.min(e.head), e.tail.max(e.head))).or_default() += 1;
        }
        let mut g = SimpleGraph::new(self.n);
        for ((u, v), c) in counts {
            if c >= 2 {
                g.add_edge(u, v);
            }
        }
        g
    }
}

impl fmt::Display for GainGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} [", self.n)?;
        for (k, e) in self.edges.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({},{};{:+})", e.tail, e.head, e.label)?;
        }
        write!(f, "]")
    }
}

pub(crate) fn checked_label(z: i128) -> Result<i64, GraphError> {
    if z.abs() > MAX_LABEL as i128 {
        Err(GraphError::LabelOverflow)
    } else {
        Ok(z as i64)
    }
}

/// Named graphs that recur in the theory and the tests.
pub mod named {
    use super::*;

    /// `(K_n, 0)`: complete graph, edges `i -> j` for `i < j`, all labels 0.
    pub fn balanced_complete(n: usize) -> GainGraph {
        let edges = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j, 0)));
        GainGraph::new(n, edges).expect("simple")
    }

    /// `(K_2^•, z)`: two parallel edges `1 -> 2` with labels `a != b`.
    pub fn k2_bullet(a: i64, b: i64) -> Result<GainGraph, GraphError> {
        GainGraph::new(2, [(1, 2, a), (1, 2, b)])
    }

    /// `(K_3^••, z)`: single edge `1 -> 2`, doubled pairs `{1,3}` and `{2,3}`.
    pub fn k3_bullet_bullet(
        single: i64,
        one_three: (i64, i64),
        two_three: (i64, i64),
    ) -> Result<GainGraph, GraphError> {
        GainGraph::new(
            3,
            [
                (1, 2, single),
                (1, 3, one_three.0),
                (1, 3, one_three.1),
                (2, 3, two_three.0),
                (2, 3, two_three.1),
            ],
        )
    }

    /// Quotient of the worked 2-dimensional super stable example:
    /// `(1,2;0), (3,1;0), (3,1;1), (3,2;0), (3,2;1)`.
    pub fn stress_example() -> GainGraph {
        GainGraph::new(3, [(1, 2, 0), (3, 1, 0), (3, 1, 1), (3, 2, 0), (3, 2, 1)]).expect("simple")
    }

    /// The non-2-realizable union of two 2-realizable graphs glued along an
    /// unbalanced-side `(K_2, 0)`. Edge ids: `e1=(1,3;0) e2=(3,2;0)
    /// e3=(3,2;1) e4=(1,2;0) e5=(1,4;0) e6=(4,2;1)`.
    pub fn glued_counterexample() -> GainGraph {
        GainGraph::new(4, [(1, 3, 0), (3, 2, 0), (3, 2, 1), (1, 2, 0), (1, 4, 0), (4, 2, 1)])
            .expect("simple")
    }
}
