use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{GainGraph, GraphError};

pub const DEFAULT_CANONICAL_BOUND: usize = 8;

/// Isomorphism-class encoding of a Z-labelled graph: two graphs get the same
/// form iff one maps to the other by switchings, inversions, a vertex
/// bijection and (the automorphism of Z) a global label negation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub vertices: usize,
    /// `(a, b, z)` with `a <= b` (0-based), sorted; loops carry `|z|`.
    pub edges: Vec<(usize, usize, i128)>,
}

impl GainGraph {
    pub fn canonical_form(&self) -> Result<CanonicalForm, GraphError> {
        self.canonical_form_bounded(DEFAULT_CANONICAL_BOUND)
    }

    pub fn canonical_form_bounded(&self, bound: usize) -> Result<CanonicalForm, GraphError> {
        let n = self.vertex_count();
        if n > bound {
            return Err(GraphError::TooLarge { vertices: n, bound });
        }
        let raw: Vec<(usize, usize, i128)> =
            self.edges().iter().map(|e| (e.tail - 1, e.head - 1, e.label as i128)).collect();
        let negated: Vec<(usize, usize, i128)> = raw.iter().map(|&(a, b, z)| (a, b, -z)).collect();

        let cells = invariant_cells(self);
        let mut best: Option<Vec<(usize, usize, i128)>> = None;
        let mut order: Vec<usize> = cells.iter().flatten().copied().collect();
        let mut pos = vec![0usize; n];
        for_each_ordering(&cells, &mut order, 0, 0, &mut |order| {
            for (k, &v) in order.iter().enumerate() {
                pos[v] = k;
            }
            for edges in [&raw, &negated] {
                let enc = encode(n, edges, &pos);
                if best.as_ref().is_none_or(|b| enc < *b) {
                    best = Some(enc);
                }
            }
        });
        Ok(CanonicalForm { vertices: n, edges: best.unwrap_or_default() })
    }
}

/// Groups vertices by an isomorphism-invariant signature; candidate orderings
/// only permute within a group.
fn invariant_cells(g: &GainGraph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut mult: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut loops: Vec<Vec<i64>> = vec![Vec::new(); n];
    for e in g.edges() {
        if e.is_loop() {
            loops[e.tail - 1].push(e.label.abs());
        } else {
            let (a, b) = (e.tail.min(e.head) - 1, e.tail.max(e.head) - 1);
            *mult.entry((a, b)).or_default() += 1;
        }
    }
    let mut nbr: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (&(a, b), &m) in &mult {
        nbr[a].push(m);
        nbr[b].push(m);
    }
    let mut sig: Vec<(usize, usize, Vec<usize>, Vec<i64>)> = (0..n)
        .map(|v| {
            let mut ms = nbr[v].clone();
            ms.sort_unstable();
            let mut ls = loops[v].clone();
            ls.sort_unstable();
            (ms.len(), ms.iter().sum(), ms, ls)
        })
        .collect();
    // One refinement round: append the sorted signatures of neighbours.
    let base = sig.clone();
    let mut refined: Vec<(_, Vec<_>)> = (0..n)
        .map(|v| {
            let mut around: Vec<_> = mult
                .iter()
                .filter_map(|(&(a, b), &m)| {
                    if a == v {
                        Some((m, base[b].clone()))
                    } else if b == v {
                        Some((m, base[a].clone()))
                    } else {
                        None
                    }
                })
                .collect();
            around.sort();
            (std::mem::take(&mut sig[v]), around)
        })
        .collect();
    let mut by_sig: BTreeMap<_, Vec<usize>> = BTreeMap::new();
    for (v, s) in refined.drain(..).enumerate() {
        by_sig.entry(s).or_default().push(v);
    }
    by_sig.into_values().collect()
}

fn for_each_ordering<F: FnMut(&[usize])>(
    cells: &[Vec<usize>],
    order: &mut Vec<usize>,
    cell: usize,
    offset: usize,
    f: &mut F,
) {
    if cell == cells.len() {
        f(order);
        return;
    }
    let len = cells[cell].len();
    permute(order, offset, offset + len, &mut |order| {
        for_each_ordering(cells, order, cell + 1, offset + len, f)
    });
}

/// Recursive in-place permutation of `order[k..end]`.
fn permute<F: FnMut(&mut Vec<usize>)>(order: &mut Vec<usize>, k: usize, end: usize, f: &mut F) {
    if k + 1 >= end {
        f(order);
        return;
    }
    for i in k..end {
        order.swap(k, i);
        permute(order, k + 1, end, f);
        order.swap(k, i);
    }
}

/// Normalizes labels for a fixed vertex ordering: BFS per component from
/// the smallest position, shifting each child's potential so that the
/// smallest label on its tree pair (read parent to child) becomes 0.
fn encode(n: usize, edges: &[(usize, usize, i128)], pos: &[usize]) -> Vec<(usize, usize, i128)> {
    let placed: Vec<(usize, usize, i128)> = edges.iter().map(|&(a, b, z)| (pos[a], pos[b], z)).collect();
    // pair -> labels read from the smaller to the larger position
    let mut pair: BTreeMap<(usize, usize), Vec<i128>> = BTreeMap::new();
    for &(a, b, z) in placed.iter().filter(|e| e.0 != e.1) {
        if a < b {
            pair.entry((a, b)).or_default().push(z);
        } else {
            pair.entry((b, a)).or_default().push(-z);
        }
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in pair.keys() {
        adj[a].push(b);
        adj[b].push(a);
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let mut phi = vec![0i128; n];
    let mut seen = vec![false; n];
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(p) = queue.pop_front() {
            for &c in &adj[p] {
                if seen[c] {
                    continue;
                }
                seen[c] = true;
                let labels = &pair[&(p.min(c), p.max(c))];
                let min_pc = labels.iter().map(|&z| if p < c { z } else { -z }).min().expect("pair");
                phi[c] = phi[p] + min_pc;
                queue.push_back(c);
            }
        }
    }
    let mut out: Vec<(usize, usize, i128)> = placed
        .iter()
        .map(|&(a, b, z)| {
            if a == b {
                (a, a, z.abs())
            } else {
                let w = z + phi[a] - phi[b];
                if a < b {
                    (a, b, w)
                } else {
                    (b, a, -w)
                }
            }
        })
        .collect();
    out.sort_unstable();
    out
}
