//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zrd_core::gain_graph::named::{balanced_complete, glued_counterexample, k2_bullet, k3_bullet_bullet};
use zrd_core::gain_graph::{validate_simple, EdgeId, GainEdge};
use zrd_core::io::{self, Format, GraphDocument};
use zrd_core::minor::{has_minor_any, MinorOp};
use zrd_core::numeric::exact::{inertia, int};
use zrd_core::numeric::{
    affine_dimension, conic_condition, equilibrium_residuals, flatten, flatten_until_conic, indicator,
    rigidity_matrix, signature, span_check, stress_kernel, stress_matrix, stress_matrix_exact, verify_super_stable,
    Conic, EdgeRef, QuotientFramework, StressSignature, Tol,
};
use zrd_core::realize::{decide, forbidden, is_1_realizable, is_2_realizable, rd_bounds, rd_complete_case};
use zrd_core::GainGraph;

const TOL: Tol = Tol(1e-8);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(failures: &[String], ok: String) -> Outcome {
    match failures.first() {
        None => Outcome { pass: true, detail: ok },
        Some(f) => Outcome { pass: false, detail: format!("{} failures, first: {f}", failures.len()) },
    }
}

fn simple_from(n: usize, candidates: &[(usize, usize, i64)]) -> GainGraph {
    let mut edges: Vec<GainEdge> = Vec::new();
    for &(t, h, z) in candidates {
        edges.push(GainEdge::new(EdgeId(edges.len() as u32 + 1), t, h, z));
        if validate_simple(&edges).is_err() {
            edges.pop();
        }
    }
    GainGraph::from_edges(n, edges).expect("simple")
}

fn random_graph(rng: &mut impl Rng, max_n: usize, max_m: usize, max_label: i64) -> GainGraph {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(0..=max_m);
    let cands: Vec<_> = (0..m)
        .map(|_| (rng.gen_range(1..=n), rng.gen_range(1..=n), rng.gen_range(-max_label..=max_label)))
        .collect();
    simple_from(n, &cands)
}

fn random_framework(rng: &mut impl Rng, g: GainGraph, d: usize) -> QuotientFramework {
    let pts: Vec<Vec<f64>> =
        (0..g.vertex_count()).map(|_| (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect()).collect();
    loop {
        let l: Vec<f64> = (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect();
        if l.iter().map(|x| x * x).sum::<f64>() > 0.25 {
            return QuotientFramework::from_points(g, &pts, &l).expect("valid");
        }
    }
}

fn oracle(g: &GainGraph, d: u8) -> bool {
    has_minor_any(g, &forbidden(d).unwrap()).unwrap().is_none()
}

// ---------------------------------------------------------------- 1

fn worked_example() -> Outcome {
    let text = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/super_stable.zf")).unwrap();
    let fw = io::parse_framework(&text).unwrap().framework;
    let omega = [-1.0, 1.0, 1.0, 1.0, 1.0, -1.0];
    let mut failures = Vec::new();
    let expected = [[1, 1, -2, 1], [1, 1, -2, 1], [-2, -2, 4, -2], [1, 1, -2, 1]];
    let ws: Vec<_> = omega.iter().map(|&x| int(x as i64)).collect();
    let l = stress_matrix_exact(&fw.graph, &ws).unwrap();
    for (r, row) in expected.iter().enumerate() {
        for (c, &x) in row.iter().enumerate() {
            if l[r][c] != int(x) {
                failures.push(format!("L[{r}][{c}] = {} not {x}", l[r][c]));
            }
        }
    }
    let target = StressSignature { n_plus: 1, n_minus: 0, n_zero: 3 };
    if inertia(&l) != target {
        failures.push(format!("exact signature {}", inertia(&l)));
    }
    let numeric = signature(&stress_matrix(&fw.graph, &omega).unwrap(), TOL).unwrap();
    if numeric != target {
        failures.push(format!("numeric signature {numeric}"));
    }
    let residual = equilibrium_residuals(&fw, &omega).unwrap().max_abs();
    if residual != 0.0 {
        failures.push(format!("equilibrium residual {residual}"));
    }
    if conic_condition(&fw, TOL) != Conic::Holds {
        failures.push("conic condition violated".into());
    }
    let rep = verify_super_stable(&fw, &omega, TOL).unwrap();
    if !rep.verified {
        failures.push(format!("not verified: {rep:?}"));
    }
    outcome(&failures, "L exact, signature (1,0,3), conic holds, super stable".into())
}

// ---------------------------------------------------------------- 2

fn table_graphs() -> Vec<(String, GainGraph)> {
    let mut out = vec![
        ("(K2,0)".to_string(), balanced_complete(2)),
        ("vertex with loops".to_string(), GainGraph::new(1, [(1, 1, 1), (1, 1, 2), (1, 1, -5)]).unwrap()),
        ("(K3,0)".to_string(), balanced_complete(3)),
        ("(K4,0)".to_string(), balanced_complete(4)),
    ];
    for a in -2..=2 {
        for b in a + 1..=2 {
            out.push((format!("(K2^*,{a},{b})"), k2_bullet(a, b).unwrap()));
        }
    }
    for (s, p, q) in [(0, (0, 1), (0, 1)), (0, (0, 1), (0, 2)), (3, (-1, 2), (4, 0)), (0, (1, 0), (0, -1))] {
        out.push((format!("(K3^**,{s},{p:?},{q:?})"), k3_bullet_bullet(s, p, q).unwrap()));
    }
    out.push(("counterexample (a)".into(), GainGraph::new(4, [(1, 3, 0), (3, 2, 0), (1, 2, 0), (1, 4, 0), (4, 2, 1)]).unwrap()));
    out.push(("counterexample (b)".into(), GainGraph::new(4, [(1, 3, 0), (3, 2, 0), (3, 2, 1), (1, 2, 0), (1, 4, 0)]).unwrap()));
    out.push(("counterexample (c)".into(), glued_counterexample()));
    out
}

fn classification_table() -> Outcome {
    let mut failures = Vec::new();
    let mut k4 = String::new();
    for (name, g) in table_graphs() {
        let b = rd_bounds(&g).unwrap();
        let (r1, r2) = (is_1_realizable(&g).answer, is_2_realizable(&g).answer);
        let ok = match name.as_str() {
            "(K2,0)" | "vertex with loops" => b.lo == 1 && b.hi == 1 && r1,
            "(K3,0)" => b.lo == 2 && b.hi == 2 && !r1 && r2,
            "(K4,0)" => {
                k4 = format!("[{},{}]", b.lo, b.hi);
                b.lo == 3 && b.hi <= 4 && !r2
            }
            "counterexample (a)" | "counterexample (b)" => r2,
            "counterexample (c)" => !r2 && b.lo == 3 && b.hi == 4,
            n if n.starts_with("(K2^*") => b.lo == 2 && b.hi == 2 && !r1 && r2,
            n if n.starts_with("(K3^**") => rd_complete_case(&g) == Ok(3) && b.lo == 3 && b.hi == 3 && !r2,
            _ => unreachable!(),
        };
        if !ok {
            failures.push(format!("{name}: bounds [{},{}], 1: {r1}, 2: {r2}", b.lo, b.hi));
        }
    }
    outcome(&failures, format!("all rows match; (K4,0) bounds {k4} within [3,4]"))
}

// ---------------------------------------------------------------- 3, 4

fn oracle_corpus() -> Vec<GainGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    (0..600).map(|_| random_graph(&mut rng, 5, 9, 2)).collect()
}

fn oracle_equivalence(corpus: &[GainGraph]) -> Outcome {
    let mut failures = Vec::new();
    for g in corpus {
        for (d, v) in [(1, is_1_realizable(g)), (2, is_2_realizable(g))] {
            if v.answer != oracle(g, d) {
                failures.push(format!("d = {d} on {g}"));
            }
        }
    }
    outcome(&failures, format!("{} graphs, both dimensions agree", corpus.len()))
}

fn cycle_condition(corpus: &[GainGraph]) -> Outcome {
    let failures: Vec<String> = corpus
        .iter()
        .filter(|g| g.find_cycle().is_none() != oracle(g, 1))
        .map(ToString::to_string)
        .collect();
    outcome(&failures, format!("{} graphs, no-cycle test matches oracle", corpus.len()))
}

// ---------------------------------------------------------------- 5

fn transform(fw: &QuotientFramework, rng: &mut impl Rng) -> QuotientFramework {
    let mut out = fw.clone();
    for v in fw.graph.vertices() {
        out = out.switch(v, rng.gen_range(-3..=3)).unwrap();
    }
    for e in fw.graph.edges() {
        if rng.gen_bool(0.5) {
            let g = out.graph.invert_edge(e.id).unwrap();
            out = QuotientFramework::new(g, out.positions.clone(), out.lattice.clone()).unwrap();
        }
    }
    let n = fw.vertex_count();
    let mut perm: Vec<usize> = (1..=n).collect();
    perm.shuffle(rng);
    let mut positions = out.positions.clone();
    for v in 1..=n {
        positions.set_column(perm[v - 1] - 1, &out.position(v));
    }
    QuotientFramework::new(out.graph.permute(&perm).unwrap(), positions, out.lattice.clone()).unwrap()
}

fn in_kernel(fw: &QuotientFramework, omega: &[f64]) -> bool {
    let scale = rigidity_matrix(fw).amax() * DVector::from_column_slice(omega).amax();
    equilibrium_residuals(fw, omega).unwrap().max_abs() <= TOL.threshold(scale)
}

fn invariance_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = Vec::new();
    let mut nontrivial = 0;
    let cases = 250;
    for _ in 0..cases {
        let g = random_graph(&mut rng, 5, 8, 2);
        let d = rng.gen_range(1..=3);
        let fw = random_framework(&mut rng, g, d);
        let h = transform(&fw, &mut rng);
        let (g, hg) = (&fw.graph, &h.graph);
        for d in [1, 2] {
            if decide(g, d) != decide(hg, d) {
                failures.push(format!("decider d = {d} on {g}"));
            }
        }
        if g.is_balanced().is_balanced() != hg.is_balanced().is_balanced() {
            failures.push(format!("balance on {g}"));
        }
        if g.canonical_form().unwrap() != hg.canonical_form().unwrap() {
            failures.push(format!("canonical form on {g}"));
        }
        let mut kernel_omega = DVector::zeros(g.edge_count() + 1);
        let basis = stress_kernel(&fw, TOL);
        nontrivial += usize::from(!basis.is_empty());
        for b in basis {
            kernel_omega += b * rng.gen_range(-2.0..2.0);
        }
        let random_omega: Vec<f64> = (0..=g.edge_count()).map(|_| rng.gen_range(-2.0..2.0)).collect();
        for omega in [kernel_omega.as_slice(), &random_omega] {
            let member = in_kernel(&fw, omega);
            if member != in_kernel(&h, omega) {
                failures.push(format!("kernel membership on {g}"));
            }
            let s = signature(&stress_matrix(g, omega).unwrap(), TOL).unwrap();
            let t = signature(&stress_matrix(hg, omega).unwrap(), TOL).unwrap();
            if s != t {
                failures.push(format!("signature {s} vs {t} on {g}"));
            }
        }
    }
    outcome(&failures, format!("{cases} tuples ({nontrivial} with nonzero stresses), zero changes"))
}

// ---------------------------------------------------------------- 6

fn numeric_span_rank(g: &GainGraph) -> usize {
    let n = g.vertex_count();
    let refs = g.edges().iter().map(EdgeRef::Edge).chain([EdgeRef::Lattice]);
    let rows: Vec<Vec<f64>> = refs
        .map(|e| {
            let i = indicator(n, e);
            (0..=n).flat_map(|r| (r..=n).map(move |c| (r, c))).map(|(r, c)| i[r] * i[c]).collect()
        })
        .collect();
    let m = DMatrix::from_fn(rows.len(), rows[0].len(), |r, c| rows[r][c]);
    let sv = m.singular_values();
    let cut = TOL.threshold(sv.max());
    sv.iter().filter(|&&s| s > cut).count()
}

fn span_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = Vec::new();
    let (mut independent, mut spanning) = (0, 0);
    let cases = 300;
    for _ in 0..cases {
        let g = random_graph(&mut rng, 6, 14, 2);
        let rep = span_check(&g);
        let rank = numeric_span_rank(&g);
        let ind = rank == g.edge_count() + 1;
        let span = rank == rep.dimension;
        independent += usize::from(ind);
        spanning += usize::from(span);
        if ind != rep.predicted_independent || span != rep.predicted_spanning {
            failures.push(format!("{g}: rank {rank}, predicted {:?}", rep));
        }
    }
    outcome(&failures, format!("{cases} graphs ({independent} independent, {spanning} spanning)"))
}

// ---------------------------------------------------------------- 7

fn complete_non_spanning(rng: &mut impl Rng) -> GainGraph {
    loop {
        let n = rng.gen_range(3..=5);
        let mut cands = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                let z = rng.gen_range(-2..=2);
                cands.push((i, j, z));
                if rng.gen_bool(0.3) {
                    cands.push((i, j, z + rng.gen_range(1..=2)));
                }
            }
        }
        let g = simple_from(n, &cands);
        if !g.multiplicity_graph().is_connected() {
            return g;
        }
    }
}

fn edge_lengths(fw: &QuotientFramework) -> Vec<f64> {
    fw.edges_with_lattice().map(|e| fw.edge_vector(e).norm_squared()).collect()
}

fn flattening() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = Vec::new();
    let cases = 120;
    for k in 0..cases {
        let g = if k % 4 == 0 { balanced_complete(3) } else { complete_non_spanning(&mut rng) };
        let n = g.vertex_count();
        let fw = random_framework(&mut rng, g, n);
        let start = affine_dimension(&fw, TOL);
        let Conic::Violated(s) = conic_condition(&fw, TOL) else {
            failures.push(format!("conic holds for {}", fw.graph));
            continue;
        };
        let flat = match flatten(&fw, &s, TOL) {
            Ok(f) => f,
            Err(e) => {
                failures.push(format!("flatten failed on {}: {e}", fw.graph));
                continue;
            }
        };
        let drift = edge_lengths(&fw)
            .iter()
            .zip(edge_lengths(&flat))
            .map(|(a, b)| (a - b).abs() / a.max(1e-300))
            .fold(0.0, f64::max);
        if drift > 1e-9 {
            failures.push(format!("lengths drift {drift:e} on {}", fw.graph));
        }
        if affine_dimension(&flat, TOL) >= start {
            failures.push(format!("dimension stays {start} on {}", fw.graph));
        }
        match flatten_until_conic(&fw, TOL) {
            Ok(steps) => {
                let end = affine_dimension(steps.last().unwrap(), TOL);
                if end != n - 1 {
                    failures.push(format!("iteration ends at dimension {end}, not {} on {}", n - 1, fw.graph));
                }
            }
            Err(e) => failures.push(format!("iteration failed on {}: {e}", fw.graph)),
        }
    }
    outcome(&failures, format!("{cases} frameworks flattened to dimension n - 1, lengths kept within 1e-9"))
}

// ---------------------------------------------------------------- 8

fn monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut failures = Vec::new();
    let mut kept = 0;
    let cases = 400;
    for _ in 0..cases {
        let g = random_graph(&mut rng, 6, 10, 3);
        let mut ops: Vec<MinorOp> = g.vertices().map(MinorOp::DeleteVertex).collect();
        for e in g.edges() {
            ops.push(MinorOp::DeleteEdge(e.id));
            if !e.is_loop() {
                ops.push(MinorOp::Contract(e.id));
            }
        }
        let op = *ops.choose(&mut rng).unwrap();
        let h = op.apply(&g).unwrap();
        for d in [1, 2] {
            if decide(&g, d) {
                kept += 1;
                if !decide(&h, d) {
                    failures.push(format!("d = {d}, {op} on {g}"));
                }
            }
        }
    }
    outcome(&failures, format!("{cases} pairs, {kept} realizable hosts, none lost"))
}

// ---------------------------------------------------------------- 9

fn certificate_round_trips(corpus: &[GainGraph]) -> Outcome {
    let zrd = env!("CARGO_BIN_EXE_zrd");
    let dir = tempfile::tempdir().unwrap();
    let graphs = table_graphs().into_iter().map(|(_, g)| g).chain(corpus.iter().cloned());
    let mut count = 0;
    for (k, g) in graphs.enumerate() {
        let doc = GraphDocument { name: None, graph: g };
        fs::write(dir.path().join(format!("g{k:04}.zg")), io::serialize_graph(&doc, Format::Text)).unwrap();
        count += 1;
    }
    let status = Command::new(zrd).args(["classify", "--batch"]).arg(dir.path()).output().unwrap().status;
    if !matches!(status.code(), Some(0 | 1)) {
        return Outcome { pass: false, detail: format!("batch classify exited with {status}") };
    }
    let mut certs: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.to_string_lossy().ends_with(".cert.json"))
        .collect();
    certs.sort();
    let mut failures = Vec::new();
    if certs.len() != 2 * count {
        failures.push(format!("{} certificates for {count} graphs", certs.len()));
    }
    for c in &certs {
        let o = Command::new(zrd).arg("verify-cert").arg(c).output().unwrap();
        if o.status.code() != Some(0) {
            failures.push(format!("{}: {}", c.display(), String::from_utf8_lossy(&o.stdout).trim()));
        }
    }
    outcome(&failures, format!("{} certificates from {count} graphs replay", certs.len()))
}

fn main() {
    let corpus = oracle_corpus();
    type Criterion<'a> = (&'static str, Duration, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("worked example", Duration::from_secs(1), Box::new(worked_example)),
        ("classification table", Duration::from_secs(1), Box::new(classification_table)),
        ("oracle equivalence", Duration::from_secs(60), Box::new(|| oracle_equivalence(&corpus))),
        ("no-cycle condition", Duration::from_secs(60), Box::new(|| cycle_condition(&corpus))),
        ("invariance", Duration::from_secs(60), Box::new(invariance_suite)),
        ("span rank", Duration::from_secs(60), Box::new(span_agreement)),
        ("flattening", Duration::from_secs(60), Box::new(flattening)),
        ("monotonicity", Duration::from_secs(60), Box::new(monotonicity)),
        ("certificate round trips", Duration::from_secs(120), Box::new(|| certificate_round_trips(&corpus))),
    ];
    let mut failed = 0;
    for (k, (name, budget, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let mut o = run();
        let took = t.elapsed();
        if took > *budget {
            o.pass = false;
            o.detail = format!("{}; over the {:?} budget", o.detail, budget);
        }
        failed += usize::from(!o.pass);
        println!(
            "criterion {}: {} {name}: {} ({:.2} s)",
            k + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
