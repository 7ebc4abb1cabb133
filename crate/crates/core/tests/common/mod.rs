#![allow(dead_code)]

use proptest::prelude::*;
use rand::Rng;
use zrd_core::gain_graph::validate_simple;
use zrd_core::numeric::QuotientFramework;
use zrd_core::{EdgeId, GainEdge, GainGraph};

/// Adds candidate edges in order, skipping any that would break simplicity.
pub fn simple_from(n: usize, candidates: &[(usize, usize, i64)]) -> GainGraph {
    let mut edges: Vec<GainEdge> = Vec::new();
    for &(t, h, z) in candidates {
        let e = GainEdge::new(EdgeId(edges.len() as u32 + 1), t, h, z);
        edges.push(e);
        if validate_simple(&edges).is_err() {
            edges.pop();
        }
    }
    GainGraph::from_edges(n, edges).expect("filtered to a simple graph")
}

pub fn arb_graph(max_n: usize, max_m: usize, max_label: i64) -> impl Strategy<Value = GainGraph> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec((1..=n, 1..=n, -max_label..=max_label), 0..=max_m)
            .prop_map(move |cands| simple_from(n, &cands))
    })
}

pub fn random_graph<R: Rng>(rng: &mut R, max_n: usize, max_m: usize, max_label: i64) -> GainGraph {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(0..=max_m);
    let cands: Vec<_> = (0..m)
        .map(|_| (rng.gen_range(1..=n), rng.gen_range(1..=n), rng.gen_range(-max_label..=max_label)))
        .collect();
    simple_from(n, &cands)
}

/// Graph plus positions in `R^d` and a lattice vector bounded away from 0.
pub fn arb_framework(max_n: usize, max_m: usize, max_label: i64) -> impl Strategy<Value = QuotientFramework> {
    (arb_graph(max_n, max_m, max_label), 1usize..=3).prop_flat_map(|(g, d)| {
        let n = g.vertex_count();
        (
            Just(g),
            prop::collection::vec(prop::collection::vec(-3.0f64..3.0, d), n),
            prop::collection::vec(-3.0f64..3.0, d).prop_filter("lattice away from 0", |l| {
                l.iter().map(|x| x * x).sum::<f64>() > 0.25
            }),
        )
            .prop_map(|(g, pts, l)| QuotientFramework::from_points(g, &pts, &l).expect("valid framework"))
    })
}

/// A permutation of `1..=n`.
pub fn arb_perm(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((1..=n).collect::<Vec<_>>()).prop_shuffle()
}
