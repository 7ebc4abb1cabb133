use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use nalgebra::DVector;
use rayon::prelude::*;
use serde_json::{json, Value};
use zrd_core::gain_graph::Balance;
use zrd_core::io::{
    self, CertificateDocument, Format, FrameworkDocument, GraphDocument, StressDocument,
};
use zrd_core::minor::{has_minor, MinorError, MinorPattern};
use zrd_core::numeric::{
    self, conic_condition, equilibrium_residuals, exact, flatten_until_conic, rigidity_matrix, stress_kernel,
    stress_matrix, stress_matrix_exact, verify_super_stable, Conic, QuotientFramework, Tol,
};
use zrd_core::realize::{
    is_1_realizable, is_2_realizable, rd_bounds, verify_certificate, Certificate, RealizabilityVerdict,
    RealizeError,
};
use zrd_core::GainGraph;

use crate::report::{BoundExceeded, Report, BOUND, NEGATIVE, OK};
use crate::svg;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn read_graph(path: &Path) -> Result<GraphDocument> {
    io::parse_graph(&read(path)?).with_context(|| format!("{}", path.display()))
}

pub fn read_framework(path: &Path) -> Result<FrameworkDocument> {
    io::parse_framework(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn minor_error(e: MinorError) -> anyhow::Error {
    match e {
        MinorError::TooLarge { .. } => BoundExceeded(e.to_string()).into(),
        e => e.into(),
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn describe(c: &Certificate) -> String {
    match c {
        Certificate::Decomposition(t) => format!("decomposition tree, {} leaves", t.leaf_count()),
        Certificate::Minor(w) => match w.ops.len() {
            1 => format!("minor {} after 1 operation", w.pattern),
            k => format!("minor {} after {k} operations", w.pattern),
        },
        Certificate::Trace(_) => "reason trace".into(),
    }
}

fn cert_kind(c: &Certificate) -> &'static str {
    match c {
        Certificate::Decomposition(_) => "decomposition",
        Certificate::Minor(_) => "minor",
        Certificate::Trace(_) => "trace",
    }
}

// ---------------------------------------------------------------- classify

pub fn classify(path: &Path, certs: Option<Option<&Path>>) -> Result<Report> {
    let doc = read_graph(path)?;
    let g = &doc.graph;
    if g.vertex_count() == 0 {
        bail!("{}: {}", path.display(), RealizeError::Empty);
    }
    let verdicts = [is_1_realizable(g), is_2_realizable(g)];
    let (bounds, bound_note) = match rd_bounds(g) {
        Ok(b) => (Some(b), None),
        Err(RealizeError::Minor(e @ MinorError::TooLarge { .. })) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };

    let mut written = Vec::new();
    if let Some(dir) = certs {
        let dir = dir.map(Path::to_path_buf).unwrap_or_else(|| path.parent().unwrap_or(Path::new(".")).to_path_buf());
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("graph");
        for v in &verdicts {
            let file = dir.join(format!("{stem}.d{}.cert.json", v.decided_dimension_bound));
            let cert = CertificateDocument { graph: g.clone(), verdict: v.clone() };
            fs::write(&file, io::serialize_certificate(&cert))
                .with_context(|| format!("cannot write {}", file.display()))?;
            written.push(file);
        }
    }

    let mut text = String::new();
    let _ = writeln!(text, "graph: {}", doc.name.as_deref().unwrap_or(&path.display().to_string()));
    for v in &verdicts {
        let _ = writeln!(
            text,
            "{}-realizable: {} ({})",
            v.decided_dimension_bound,
            yes_no(v.answer),
            describe(&v.certificate)
        );
    }
    match (&bounds, &bound_note) {
        (Some(b), _) => {
            let _ = writeln!(text, "rd bounds: [{},{}]", b.lo, b.hi);
        }
        (None, Some(note)) => {
            let _ = writeln!(text, "rd bounds: unknown ({note})");
        }
        _ => {}
    }
    for f in &written {
        let _ = writeln!(text, "certificate: {}", f.display());
    }

    let code = if bound_note.is_some() {
        BOUND
    } else if verdicts[1].answer {
        OK
    } else {
        NEGATIVE
    };
    let json = json!({
        "input": path.display().to_string(),
        "name": doc.name,
        "realizable": verdicts.iter().map(|v| json!({
            "d": v.decided_dimension_bound,
            "answer": v.answer,
            "certificate": cert_kind(&v.certificate),
        })).collect::<Vec<_>>(),
        "rd_bounds": bounds.map(|b| json!([b.lo, b.hi])),
        "bound_exceeded": bound_note,
        "certificates": written.iter().map(|f| f.display().to_string()).collect::<Vec<_>>(),
        "exit": code,
    });
    Ok(Report { text, json, code })
}

pub fn classify_batch(dir: &Path, certs: Option<Option<&Path>>) -> Result<Report> {
    let mut inputs: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot list {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "zg"))
        .collect();
    inputs.sort();
    let results: Vec<(PathBuf, Result<Report>)> = inputs.par_iter().map(|p| (p.clone(), classify(p, certs))).collect();
    let mut text = String::new();
    let mut entries = Vec::new();
    let mut code = OK;
    for (path, r) in results {
        let (t, j, c) = match r {
            Ok(rep) => (rep.text, rep.json, rep.code),
            Err(e) => {
                let c = crate::report::exit_code(&e);
                (format!("{}: error: {e:#}\n", path.display()), json!({ "input": path.display().to_string(), "error": format!("{e:#}"), "exit": c }), c)
            }
        };
        if !text.is_empty() {
            text.push('\n');
        }
        text.push_str(&t);
        entries.push(j);
        code = code.max(c);
    }
    let _ = writeln!(text, "\nclassified {} files", entries.len());
    Ok(Report { text, json: json!({ "results": entries, "exit": code }), code })
}

// ---------------------------------------------------------------- minor

fn parse_pattern(spec: &str) -> Result<MinorPattern> {
    Ok(match spec {
        "k3-balanced" => MinorPattern::balanced_triangle(),
        "k2-bullet" => MinorPattern::K2Bullet,
        "k3-bulletbullet" => MinorPattern::K3BulletBullet,
        "k4-balanced" => MinorPattern::balanced_k4(),
        s => match s.strip_prefix("file:") {
            Some(p) => MinorPattern::Exact(read_graph(Path::new(p))?.graph),
            None => bail!("unknown pattern {s:?}"),
        },
    })
}

pub fn minor(path: &Path, pattern: &str) -> Result<Report> {
    let g = read_graph(path)?.graph;
    let p = parse_pattern(pattern)?;
    let found = has_minor(&g, &p).map_err(minor_error)?;
    let mut text = format!("pattern: {p}\nfound: {}\n", yes_no(found.is_some()));
    if let Some(w) = &found {
        for op in &w.ops {
            let _ = writeln!(text, "  {op}");
        }
        let _ = writeln!(text, "minor: {}", w.replay(&g)?);
    }
    let json = json!({ "pattern": p.to_string(), "found": found.is_some(), "witness": found });
    Ok(Report { text, json, code: OK })
}

// ---------------------------------------------------------------- balance

pub fn balance(path: &Path) -> Result<Report> {
    let g = read_graph(path)?.graph;
    let (text, json) = match g.is_balanced() {
        Balance::Balanced { potential } => {
            let switches: Vec<(usize, i128)> =
                potential.iter().enumerate().filter(|(_, &p)| p != 0).map(|(k, &p)| (k + 1, p)).collect();
            let mut text = String::from("balanced: yes\n");
            if switches.is_empty() {
                text.push_str("all labels already zero\n");
            }
            for (v, p) in &switches {
                let _ = writeln!(text, "switch vertex {v} by {p}");
            }
            let json = json!({
                "balanced": true,
                "switches": switches.iter().map(|(v, p)| json!({ "vertex": v, "by": p.to_string() })).collect::<Vec<_>>(),
            });
            (text, json)
        }
        Balance::Unbalanced(w) => {
            let mut walk = w.vertices[0].to_string();
            for (e, v) in w.edges.iter().zip(&w.vertices[1..]) {
                let _ = write!(walk, " -{e}- {v}");
            }
            let text = format!("balanced: no\ncycle: {walk}\ngain: {}\n", w.gain);
            let json = json!({
                "balanced": false,
                "cycle": { "vertices": w.vertices, "edges": w.edges, "gain": w.gain.to_string() },
            });
            (text, json)
        }
    };
    Ok(Report { text, json, code: OK })
}

// ---------------------------------------------------------------- stress

fn weights_for(doc: &FrameworkDocument, weights: Option<&Path>) -> Result<Option<Vec<f64>>> {
    match weights {
        Some(p) => {
            let s = io::parse_stress(&read(p)?).with_context(|| format!("{}", p.display()))?;
            Ok(Some(s.resolve(&doc.framework.graph)?))
        }
        None => Ok(doc.stress.clone()),
    }
}

fn keyed(g: &GainGraph, omega: &[f64]) -> Value {
    let doc = StressDocument::from_vector(g, omega);
    let map: serde_json::Map<String, Value> = doc.weights.iter().map(|(k, w)| (k.to_string(), json!(w))).collect();
    Value::Object(map)
}

fn keyed_text(g: &GainGraph, omega: &[f64]) -> String {
    let doc = StressDocument::from_vector(g, omega);
    doc.weights.iter().map(|(k, w)| format!("{k}={w}")).collect::<Vec<_>>().join(" ")
}

fn matrix_text(rows: &[Vec<String>]) -> String {
    let width = rows.iter().flatten().map(String::len).max().unwrap_or(1);
    rows.iter()
        .map(|r| format!("  [{}]\n", r.iter().map(|x| format!("{x:>width$}")).collect::<Vec<_>>().join(" ")))
        .collect()
}

pub fn stress(path: &Path, weights: Option<&Path>, tol: Tol) -> Result<Report> {
    let doc = read_framework(path)?;
    let fw = &doc.framework;
    let Some(omega) = weights_for(&doc, weights)? else {
        let basis = stress_kernel(fw, tol);
        let mut text = format!("stress space dimension: {}\n", basis.len());
        for (k, w) in basis.iter().enumerate() {
            let _ = writeln!(text, "  w{}: {}", k + 1, keyed_text(&fw.graph, w.as_slice()));
        }
        let json = json!({
            "dimension": basis.len(),
            "basis": basis.iter().map(|w| keyed(&fw.graph, w.as_slice())).collect::<Vec<_>>(),
        });
        return Ok(Report { text, json, code: OK });
    };
    let residuals = equilibrium_residuals(fw, &omega)?;
    let r = rigidity_matrix(fw);
    let scale = r.amax() * DVector::from_column_slice(&omega).amax();
    let equilibrium = residuals.max_abs() <= tol.threshold(scale);
    let integral: Option<Vec<_>> = omega.iter().map(|&x| exact::from_integral_f64(x)).collect();
    let (rows, signature, exact_flag) = match integral {
        Some(ws) => {
            let l = stress_matrix_exact(&fw.graph, &ws)?;
            let rows: Vec<Vec<String>> = l.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
            (rows, exact::inertia(&l), true)
        }
        None => {
            let l = stress_matrix(&fw.graph, &omega)?;
            let rows = l.row_iter().map(|r| r.iter().map(|x| format!("{x}")).collect()).collect();
            (rows, numeric::signature(&l, tol)?, false)
        }
    };
    let code = if equilibrium { OK } else { NEGATIVE };
    let text = format!(
        "weights: {}\nequilibrium: {} (max residual {:e})\nstress matrix{}:\n{}signature: {}\n",
        keyed_text(&fw.graph, &omega),
        yes_no(equilibrium),
        residuals.max_abs(),
        if exact_flag { " (exact)" } else { "" },
        matrix_text(&rows),
        signature,
    );
    let json = json!({
        "weights": keyed(&fw.graph, &omega),
        "equilibrium": equilibrium,
        "residual": residuals.max_abs(),
        "exact": exact_flag,
        "stress_matrix": rows,
        "signature": [signature.n_plus, signature.n_minus, signature.n_zero],
        "exit": code,
    });
    Ok(Report { text, json, code })
}

pub fn superstable(path: &Path, weights: Option<&Path>, tol: Tol) -> Result<Report> {
    let doc = read_framework(path)?;
    let Some(omega) = weights_for(&doc, weights)? else {
        bail!("no stress: pass --weights or add stress records to the framework");
    };
    let rep = verify_super_stable(&doc.framework, &omega, tol)?;
    let code = if rep.verified { OK } else { NEGATIVE };
    let mut text = format!(
        "equilibrium: {} (max residual {:e})\nsignature: {}{} expected {}\nconic condition: {}\nsuper stable: {}\n",
        yes_no(rep.equilibrium),
        rep.equilibrium_residual,
        rep.signature,
        if rep.exact_signature { " (exact)," } else { "," },
        rep.expected_signature,
        if rep.conic_holds { "holds" } else { "violated" },
        yes_no(rep.verified),
    );
    if let Some(a) = &rep.annotation {
        let _ = writeln!(text, "{a}");
    }
    let mut json = serde_json::to_value(&rep)?;
    json["exit"] = json!(code);
    Ok(Report { text, json, code })
}

// ---------------------------------------------------------------- flatten

pub fn flatten(path: &Path, out: Option<&Path>, tol: Tol) -> Result<Report> {
    let doc = read_framework(path)?;
    let fw = &doc.framework;
    if conic_condition(fw, tol) == Conic::Holds {
        let text = "conic condition: holds\n".to_string();
        return Ok(Report { text, json: json!({ "conic": "holds" }), code: OK });
    }
    let steps = flatten_until_conic(fw, tol)?;
    let dims: Vec<usize> = steps.iter().map(|f| numeric::affine_dimension(f, tol)).collect();
    let last = steps.last().expect("nonempty").clone();
    let flat_holds = conic_condition(&last, tol) == Conic::Holds;
    let flat = FrameworkDocument { name: doc.name.clone(), framework: last, stress: None };
    let rendered = io::serialize_framework(&flat, Format::Text);
    let mut text = format!(
        "conic condition: violated\naffine dimension: {}\nconic condition after flattening: {}\n",
        dims.iter().map(ToString::to_string).collect::<Vec<_>>().join(" -> "),
        if flat_holds { "holds" } else { "violated" },
    );
    match out {
        Some(p) => {
            fs::write(p, &rendered).with_context(|| format!("cannot write {}", p.display()))?;
            let _ = writeln!(text, "flattened framework: {}", p.display());
        }
        None => text.push_str(&rendered),
    }
    let json = json!({
        "conic": "violated",
        "affine_dimensions": dims,
        "conic_after": flat_holds,
        "framework": serde_json::from_str::<Value>(&io::serialize_framework(&flat, Format::Json))?,
    });
    Ok(Report { text, json, code: OK })
}

// ---------------------------------------------------------------- lift

pub fn lift(path: &Path, from: i64, to: i64, framework: Option<&Path>, svg_out: Option<&Path>) -> Result<Report> {
    let doc = read_graph(path)?;
    if from > to {
        bail!("empty window: --from {from} is greater than --to {to}");
    }
    let window = doc.graph.lift_window(from, to);
    let lifted = GainGraph::balanced_from(&window.graph);
    let name = Some(format!("lift {from}..{to}"));
    let fw_doc = match framework {
        Some(p) => {
            let f = read_framework(p)?;
            if f.framework.graph != doc.graph {
                bail!("{}: framework graph differs from {}", p.display(), path.display());
            }
            let points: Vec<Vec<f64>> =
                f.framework.lift_positions(from, to).iter().map(|c| c.iter().copied().collect()).collect();
            let lattice: Vec<f64> = f.framework.lattice.iter().copied().collect();
            Some(FrameworkDocument {
                name: name.clone(),
                framework: QuotientFramework::from_points(lifted.clone(), &points, &lattice)?,
                stress: None,
            })
        }
        None => None,
    };
    if let Some(p) = svg_out {
        let f = fw_doc.as_ref().expect("clap requires --framework");
        if f.framework.dim() != 2 {
            bail!("SVG output needs a 2-dimensional framework, this one has dimension {}", f.framework.dim());
        }
        fs::write(p, svg::render(&f.framework, &window.vertices)).with_context(|| format!("cannot write {}", p.display()))?;
    }
    let (mut text, doc_json) = match &fw_doc {
        Some(f) => (io::serialize_framework(f, Format::Text), io::serialize_framework(f, Format::Json)),
        None => {
            let g = GraphDocument { name, graph: lifted };
            (io::serialize_graph(&g, Format::Text), io::serialize_graph(&g, Format::Json))
        }
    };
    for (k, (v, s)) in window.vertices.iter().enumerate() {
        let _ = writeln!(text, "# vertex {} is ({v}, {s})", k + 1);
    }
    let json = json!({
        "from": from,
        "to": to,
        "vertices": window.vertices,
        "document": serde_json::from_str::<Value>(&doc_json)?,
        "svg": svg_out.map(|p| p.display().to_string()),
    });
    Ok(Report { text, json, code: OK })
}

// ---------------------------------------------------------------- verify-cert

pub fn verify_cert(path: &Path, graph: Option<&Path>) -> Result<Report> {
    let cert = io::parse_certificate(&read(path)?).with_context(|| format!("{}", path.display()))?;
    let input = match graph {
        Some(p) => read_graph(p)?.graph,
        None => cert.graph.clone(),
    };
    let v: &RealizabilityVerdict = &cert.verdict;
    let outcome = if input != cert.graph {
        Err("certificate was issued for a different graph".to_string())
    } else {
        verify_certificate(&input, v).map_err(|e| e.to_string())
    };
    let code = if outcome.is_ok() { OK } else { NEGATIVE };
    let claim = format!("{}-realizable: {}", v.decided_dimension_bound, yes_no(v.answer));
    let text = match &outcome {
        Ok(()) => format!("{claim}\ncertificate ({}): valid\n", describe(&v.certificate)),
        Err(e) => format!("{claim}\ncertificate: invalid: {e}\n"),
    };
    let json = json!({
        "d": v.decided_dimension_bound,
        "answer": v.answer,
        "certificate": cert_kind(&v.certificate),
        "valid": outcome.is_ok(),
        "reason": outcome.err(),
        "exit": code,
    });
    Ok(Report { text, json, code })
}
