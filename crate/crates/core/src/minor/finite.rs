use serde::{Deserialize, Serialize};

use super::MinorError;
use crate::simple_graph::SimpleGraph;

/// Largest host (after low-degree reduction) for the brute-force patterns.
pub const BRUTE_FORCE_BOUND: usize = 10;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FinitePattern {
    K3,
    K4,
    K5,
    K222,
}

impl FinitePattern {
    pub fn graph(self) -> SimpleGraph {
        match self {
            FinitePattern::K3 => SimpleGraph::complete(3),
            FinitePattern::K4 => SimpleGraph::complete(4),
            FinitePattern::K5 => SimpleGraph::complete(5),
            FinitePattern::K222 => SimpleGraph::complete_multipartite(&[2, 2, 2]),
        }
    }
}

/// Upper bound on the realizable dimension of a finite graph from the
/// forbidden-minor lists for dimensions one to three.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FiniteRd {
    Exact(u8),
    AtLeast4,
}

pub fn finite_has_minor(host: &SimpleGraph, pattern: FinitePattern) -> Result<bool, MinorError> {
    Ok(match pattern {
        FinitePattern::K3 => host.has_cycle(),
        FinitePattern::K4 => !host.is_series_parallel(),
        FinitePattern::K5 | FinitePattern::K222 => {
            // Both patterns have minimum degree four, so suppressing degree-2
            // vertices and deleting leaves cannot destroy a model.
            let reduced = host.reduce_low_degree();
            if reduced.vertex_count() > BRUTE_FORCE_BOUND {
                return Err(MinorError::TooLarge {
                    vertices: reduced.vertex_count(),
                    edges: reduced.edge_count(),
                });
            }
            reduced.has_minor_brute_force(&pattern.graph())
        }
    })
}

/// 0 for edgeless graphs, otherwise the least `d <= 3` whose forbidden
/// minors are all absent, or [`FiniteRd::AtLeast4`].
pub fn finite_rd_upper3(host: &SimpleGraph) -> Result<FiniteRd, MinorError> {
    if host.edge_count() == 0 {
        return Ok(FiniteRd::Exact(0));
    }
    if !finite_has_minor(host, FinitePattern::K3)? {
        return Ok(FiniteRd::Exact(1));
    }
    if !finite_has_minor(host, FinitePattern::K4)? {
        return Ok(FiniteRd::Exact(2));
    }
    if finite_has_minor(host, FinitePattern::K5)? || finite_has_minor(host, FinitePattern::K222)? {
        return Ok(FiniteRd::AtLeast4);
    }
    Ok(FiniteRd::Exact(3))
}
