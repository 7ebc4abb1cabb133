//! Deciders for realizable dimension at most one and at most two, the exact
//! value for quotients whose underlying simple graph is complete, and general
//! bounds.
//!
//! A yes-answer carries a [`DecompositionTree`] that re-checks every gluing
//! step on its own; a no-answer carries a [`MinorWitness`] replayable on the
//! input.

mod d1;
mod d2;
mod tree;
mod witness;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gain_graph::{GainGraph, Vertex};
use crate::minor::{finite_rd_upper3, forbidden_d1, forbidden_d2, FiniteRd, MinorError, MinorPattern, MinorWitness};

pub use tree::{CertEdge, CertGraph, DecompositionTree, NodeKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error("leaf on vertices {vertices:?} is outside the leaf family")]
    LeafNotInFamily { vertices: Vec<Vertex> },
    #[error("children do not cover the node's vertex set")]
    VertexMismatch,
    #[error("node graph is not contained in the union of its children")]
    NotSubgraph,
    #[error("bad gluing: {0}")]
    BadSum(String),
    #[error("decomposition root differs from the input graph")]
    RootMismatch,
    #[error("minor witness does not replay to its pattern")]
    WitnessFailed,
    #[error("pattern {0} is not forbidden in this dimension")]
    WrongPattern(String),
    #[error("reason traces cannot be replayed")]
    NotReplayable,
    #[error("certificate kind does not match the answer")]
    AnswerMismatch,
    #[error("dimension {0} has no decider")]
    UnsupportedDimension(u8),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealizeError {
    #[error("the empty graph has no realizable dimension")]
    Empty,
    #[error("underlying simple graph is not complete")]
    NotComplete,
    #[error(transparent)]
    Minor(#[from] MinorError),
}

/// Human-readable account of a negative answer that could not be turned
/// into a replayable witness.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReasonTrace {
    pub steps: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    Decomposition(DecompositionTree),
    Minor(MinorWitness),
    Trace(ReasonTrace),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizabilityVerdict {
    /// The `d` in "is d-realizable".
    pub decided_dimension_bound: u8,
    pub answer: bool,
    pub certificate: Certificate,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RdBounds {
    pub lo: usize,
    pub hi: usize,
}

impl RdBounds {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

pub fn forbidden(d: u8) -> Option<Vec<MinorPattern>> {
    match d {
        1 => Some(forbidden_d1()),
        2 => Some(forbidden_d2()),
        _ => None,
    }
}

/// Decision only, without certificates.
pub fn decide(g: &GainGraph, d: u8) -> bool {
    match d {
        1 => d1::decide(g),
        2 => d2::decompose(&CertGraph::from_graph(g).without_loops()).is_some(),
        _ => false,
    }
}

pub fn is_1_realizable(g: &GainGraph) -> RealizabilityVerdict {
    match d1::decompose(g) {
        Some(tree) => RealizabilityVerdict {
            decided_dimension_bound: 1,
            answer: true,
            certificate: Certificate::Decomposition(tree),
        },
        None => negative(g, 1),
    }
}

pub fn is_2_realizable(g: &GainGraph) -> RealizabilityVerdict {
    let full = CertGraph::from_graph(g);
    match d2::decompose(&full.without_loops()) {
        Some(tree) => RealizabilityVerdict {
            decided_dimension_bound: 2,
            answer: true,
            certificate: Certificate::Decomposition(d2::attach_loops(&full, tree)),
        },
        None => negative(g, 2),
    }
}

fn negative(g: &GainGraph, d: u8) -> RealizabilityVerdict {
    let certificate = match witness::minimal_witness(g, d) {
        Some(w) => Certificate::Minor(w),
        None => Certificate::Trace(ReasonTrace {
            steps: vec![
                format!("decider answered no for d = {d}"),
                "reduction to a minimal non-realizable minor did not end at a forbidden pattern".into(),
            ],
        }),
    };
    RealizabilityVerdict { decided_dimension_bound: d, answer: false, certificate }
}

/// `n` if the multiplicity graph is connected on all `n` vertices, else
/// `n - 1`. Requires `si(g) = K_n`.
pub fn rd_complete_case(g: &GainGraph) -> Result<usize, RealizeError> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(RealizeError::Empty);
    }
    if !g.si_graph().is_complete() {
        return Err(RealizeError::NotComplete);
    }
    Ok(if g.multiplicity_graph().is_connected() { n } else { n - 1 })
}

pub fn rd_bounds(g: &GainGraph) -> Result<RdBounds, RealizeError> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(RealizeError::Empty);
    }
    let exact = |r| Ok(RdBounds { lo: r, hi: r });
    if decide(g, 1) {
        return exact(1);
    }
    if decide(g, 2) {
        return exact(2);
    }
    let si = g.si_graph();
    if si.is_complete() {
        return exact(rd_complete_case(g)?);
    }
    let lo = match finite_rd_upper3(&si)? {
        FiniteRd::AtLeast4 => 4,
        FiniteRd::Exact(_) => 3,
    };
    Ok(RdBounds { lo: lo.min(n), hi: n })
}

/// Re-checks a verdict against its input from scratch.
pub fn verify_certificate(input: &GainGraph, verdict: &RealizabilityVerdict) -> Result<(), CertificateError> {
    let d = verdict.decided_dimension_bound;
    let patterns = forbidden(d).ok_or(CertificateError::UnsupportedDimension(d))?;
    match (&verdict.certificate, verdict.answer) {
        (Certificate::Decomposition(tree), true) => {
            if tree.graph != CertGraph::from_graph(input) {
                return Err(CertificateError::RootMismatch);
            }
            tree.verify(d)
        }
        (Certificate::Minor(w), false) => {
            if !patterns.contains(&w.pattern) {
                return Err(CertificateError::WrongPattern(w.pattern.to_string()));
            }
            if w.verify(input) {
                Ok(())
            } else {
                Err(CertificateError::WitnessFailed)
            }
        }
        (Certificate::Trace(_), _) => Err(CertificateError::NotReplayable),
        _ => Err(CertificateError::AnswerMismatch),
    }
}
