use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use zrd_core::gain_graph::{validate_simple, EdgeId, GainEdge};
use zrd_core::minor::has_minor_any;
use zrd_core::realize::{decide, forbidden, is_1_realizable, is_2_realizable, verify_certificate};
use zrd_core::GainGraph;

use crate::report::{Report, NEGATIVE, OK};

/// Random simple graph: up to `max_m` candidate edges, each kept only if
/// the graph stays simple.
pub fn random_graph(rng: &mut impl Rng, max_n: usize, max_m: usize, max_label: i64) -> GainGraph {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(0..=max_m);
    let mut edges: Vec<GainEdge> = Vec::new();
    for _ in 0..m {
        let e = GainEdge::new(
            EdgeId(edges.len() as u32 + 1),
            rng.gen_range(1..=n),
            rng.gen_range(1..=n),
            rng.gen_range(-max_label..=max_label),
        );
        edges.push(e);
        if validate_simple(&edges).is_err() {
            edges.pop();
        }
    }
    GainGraph::from_edges(n, edges).expect("simple by construction")
}

fn check(g: &GainGraph, rng: &mut impl Rng) -> Vec<String> {
    let mut failures = Vec::new();
    for d in [1u8, 2] {
        let patterns = forbidden(d).expect("decided dimension");
        let oracle = match has_minor_any(g, &patterns) {
            Ok(w) => w.is_none(),
            Err(e) => {
                failures.push(format!("d={d}: oracle failed: {e}"));
                continue;
            }
        };
        let verdict = if d == 1 { is_1_realizable(g) } else { is_2_realizable(g) };
        if verdict.answer != oracle {
            failures.push(format!("d={d}: decider says {}, minor search says {oracle}", verdict.answer));
        }
        if let Err(e) = verify_certificate(g, &verdict) {
            failures.push(format!("d={d}: certificate rejected: {e}"));
        }
        let v = rng.gen_range(1..=g.vertex_count());
        let gamma = rng.gen_range(-3..=3);
        let switched = g.switch(v, gamma).expect("small labels");
        if decide(&switched, d) != verdict.answer {
            failures.push(format!("d={d}: verdict changes when switching vertex {v} by {gamma}"));
        }
    }
    failures
}

pub fn run(seed: u64, cases: usize) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for k in 0..cases {
        let g = random_graph(&mut rng, 5, 9, 2);
        for f in check(&g, &mut rng) {
            failures.push((k, g.to_string(), f));
        }
    }
    let code = if failures.is_empty() { OK } else { NEGATIVE };
    let mut text = format!("seed {seed}: {cases} random graphs, {} failures\n", failures.len());
    for (k, g, f) in &failures {
        let _ = writeln!(text, "  case {k}: {g}: {f}");
    }
    let json = json!({
        "seed": seed,
        "cases": cases,
        "failures": failures.iter().map(|(k, g, f)| json!({ "case": k, "graph": g, "failure": f })).collect::<Vec<_>>(),
        "exit": code,
    });
    Report { text, json, code }
}
