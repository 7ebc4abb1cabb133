//! Graph, framework and stress documents: a line-oriented text format and
//! an equivalent JSON form. Parsers detect the form from the first
//! non-blank character.
//!
//! ```text
//! zframework 1
//! name example
//! vertices 3
//! dim 2
//! edge 1 2 0
//! edge e7 3 1 1      # explicit edge id
//! position 1 4 0
//! lattice 4 0
//! stress e1 -1
//! stress eL -1
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gain_graph::{validate_simple, EdgeId, GainEdge, GainGraph, GraphError, SimplicityViolation};
use crate::numeric::{NumericError, QuotientFramework};
use crate::realize::RealizabilityVerdict;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IoError {
    #[error("line {line}, field {field}: {message}")]
    Syntax { line: usize, field: usize, message: String },
    #[error("{}{violation}", lines_prefix(.lines))]
    NotSimple { lines: Vec<usize>, violation: SimplicityViolation },
    #[error("{}lattice vector is zero", lines_prefix(.lines))]
    ZeroLattice { lines: Vec<usize> },
    #[error("{}{source}", lines_prefix(.lines))]
    Graph { lines: Vec<usize>, source: GraphError },
    #[error("json line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Numeric(NumericError),
}

fn lines_prefix(lines: &[usize]) -> String {
    match lines {
        [] => String::new(),
        [l] => format!("line {l}: "),
        ls => format!(
            "lines {}: ",
            ls.iter().map(usize::to_string).collect::<Vec<_>>().join(" and ")
        ),
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphDocument {
    pub name: Option<String>,
    pub graph: GainGraph,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameworkDocument {
    pub name: Option<String>,
    pub framework: QuotientFramework,
    /// Weights for the edges in storage order, then `e_L`.
    pub stress: Option<Vec<f64>>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum StressKey {
    Edge(EdgeId),
    Lattice,
}

impl std::fmt::Display for StressKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StressKey::Edge(id) => write!(f, "{id}"),
            StressKey::Lattice => write!(f, "eL"),
        }
    }
}

impl std::str::FromStr for StressKey {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        if s == "eL" {
            Ok(StressKey::Lattice)
        } else {
            parse_edge_id(s).map(StressKey::Edge).ok_or(())
        }
    }
}

/// Stress weights keyed by edge id, not yet tied to a graph.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StressDocument {
    pub weights: BTreeMap<StressKey, f64>,
}

impl StressDocument {
    pub fn from_vector(g: &GainGraph, omega: &[f64]) -> Self {
        let keys = g.edges().iter().map(|e| StressKey::Edge(e.id)).chain([StressKey::Lattice]);
        StressDocument { weights: keys.zip(omega.iter().copied()).collect() }
    }

    /// Weight vector for `g`; absent edges weigh 0.
    pub fn resolve(&self, g: &GainGraph) -> Result<Vec<f64>, IoError> {
        for key in self.weights.keys() {
            if let StressKey::Edge(id) = key {
                if g.edge(*id).is_none() {
                    return Err(IoError::Invalid(format!("stress names unknown edge {id}")));
                }
            }
        }
        let mut out: Vec<f64> =
            g.edges().iter().map(|e| self.weights.get(&StressKey::Edge(e.id)).copied().unwrap_or(0.0)).collect();
        out.push(self.weights.get(&StressKey::Lattice).copied().unwrap_or(0.0));
        Ok(out)
    }
}

fn parse_edge_id(s: &str) -> Option<EdgeId> {
    s.strip_prefix('e')?.parse::<u32>().ok().filter(|&k| k > 0).map(EdgeId)
}

/// Integers exactly, other reals with 17 significant digits.
pub fn format_real(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x:.16e}")
    }
}

fn is_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

// ---------------------------------------------------------------- text

struct Line<'a> {
    number: usize,
    tokens: Vec<&'a str>,
}

impl<'a> Line<'a> {
    fn err(&self, field: usize, message: impl Into<String>) -> IoError {
        IoError::Syntax { line: self.number, field, message: message.into() }
    }

    fn arity(&self, n: usize) -> Result<(), IoError> {
        if self.tokens.len() == n {
            Ok(())
        } else {
            Err(self.err(self.tokens.len().min(n), format!("expected {} fields, found {}", n, self.tokens.len())))
        }
    }

    fn parse<T: std::str::FromStr>(&self, field: usize, what: &str) -> Result<T, IoError> {
        let tok = self.tokens.get(field - 1).ok_or_else(|| self.err(field, format!("missing {what}")))?;
        tok.parse().map_err(|_| self.err(field, format!("bad {what} {tok:?}")))
    }
}

fn lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(k, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some(Line { number: k + 1, tokens })
    })
}

#[derive(Default)]
struct TextRecords {
    name: Option<String>,
    vertices: Option<(usize, usize)>,
    dim: Option<usize>,
    edges: Vec<(GainEdge, usize)>,
    positions: BTreeMap<usize, (Vec<f64>, usize)>,
    lattice: Option<(Vec<f64>, usize)>,
    stress: Vec<(StressKey, f64, usize)>,
}

fn read_text(text: &str, kind: &str, allowed: &[&str]) -> Result<TextRecords, IoError> {
    let mut it = lines(text);
    let header = it.next().ok_or(IoError::Syntax { line: 1, field: 1, message: "empty document".into() })?;
    if header.tokens[0] != kind {
        return Err(header.err(1, format!("expected header {kind:?}")));
    }
    header.arity(2)?;
    let version: u32 = header.parse(2, "version")?;
    if version != FORMAT_VERSION {
        return Err(header.err(2, format!("unsupported version {version}")));
    }
    let mut rec = TextRecords::default();
    for line in it {
        let key = line.tokens[0];
        if !allowed.contains(&key) {
            return Err(line.err(1, format!("unknown record {key:?}")));
        }
        match key {
            "name" => rec.name = Some(line.tokens[1..].join(" ")),
            "vertices" => {
                line.arity(2)?;
                rec.vertices = Some((line.parse(2, "vertex count")?, line.number));
            }
            "dim" => {
                line.arity(2)?;
                rec.dim = Some(line.parse(2, "dimension")?);
            }
            "edge" => {
                let explicit = line.tokens.get(1).is_some_and(|t| t.starts_with('e'));
                let off = usize::from(explicit);
                line.arity(4 + off)?;
                let id = if explicit {
                    parse_edge_id(line.tokens[1]).ok_or_else(|| line.err(2, "bad edge id"))?
                } else {
                    EdgeId(rec.edges.len() as u32 + 1)
                };
                let tail = line.parse(2 + off, "tail")?;
                let head = line.parse(3 + off, "head")?;
                let label = line.parse(4 + off, "label")?;
                rec.edges.push((GainEdge::new(id, tail, head, label), line.number));
            }
            "position" => {
                let v: usize = line.parse(2, "vertex")?;
                let coords = (3..=line.tokens.len()).map(|f| line.parse(f, "coordinate")).collect::<Result<_, _>>()?;
                if rec.positions.insert(v, (coords, line.number)).is_some() {
                    return Err(line.err(2, format!("second position for vertex {v}")));
                }
            }
            "lattice" => {
                let coords = (2..=line.tokens.len()).map(|f| line.parse(f, "coordinate")).collect::<Result<_, _>>()?;
                rec.lattice = Some((coords, line.number));
            }
            "stress" => {
                line.arity(3)?;
                let key: StressKey = line.parse(2, "stress key")?;
                rec.stress.push((key, line.parse(3, "weight")?, line.number));
            }
            _ => unreachable!(),
        }
    }
    Ok(rec)
}

fn build_graph(n: usize, edges: Vec<(GainEdge, usize)>) -> Result<GainGraph, IoError> {
    let line_of: BTreeMap<EdgeId, usize> = edges.iter().map(|(e, l)| (e.id, *l)).collect();
    let raw: Vec<GainEdge> = edges.iter().map(|(e, _)| *e).collect();
    if let Err(violation) = validate_simple(&raw) {
        let lines = violation.edges().iter().filter_map(|id| line_of.get(id).copied()).collect();
        return Err(IoError::NotSimple { lines, violation });
    }
    GainGraph::from_edges(n, raw).map_err(|source| {
        let lines = match &source {
            GraphError::UnknownVertex(v) => {
                edges.iter().filter(|(e, _)| e.tail == *v || e.head == *v).map(|(_, l)| *l).take(1).collect()
            }
            GraphError::DuplicateEdgeId(id) => edges.iter().filter(|(e, _)| e.id == *id).map(|(_, l)| *l).collect(),
            GraphError::LabelOverflow => edges
                .iter()
                .filter(|(e, _)| e.label.abs() > crate::gain_graph::MAX_LABEL)
                .map(|(_, l)| *l)
                .take(1)
                .collect(),
            _ => Vec::new(),
        };
        IoError::Graph { lines, source }
    })
}

fn required<T>(value: Option<T>, what: &str) -> Result<T, IoError> {
    value.ok_or_else(|| IoError::Invalid(format!("missing {what} record")))
}

fn parse_graph_text(text: &str) -> Result<GraphDocument, IoError> {
    let rec = read_text(text, "zgraph", &["name", "vertices", "edge"])?;
    let (n, _) = required(rec.vertices, "vertices")?;
    Ok(GraphDocument { name: rec.name, graph: build_graph(n, rec.edges)? })
}

fn parse_framework_text(text: &str) -> Result<FrameworkDocument, IoError> {
    let rec = read_text(text, "zframework", &["name", "vertices", "dim", "edge", "position", "lattice", "stress"])?;
    let (n, _) = required(rec.vertices, "vertices")?;
    let d = required(rec.dim, "dim")?;
    let graph = build_graph(n, rec.edges)?;
    let mut points = Vec::with_capacity(n);
    for v in 1..=n {
        let (coords, line) = rec.positions.get(&v).ok_or_else(|| IoError::Invalid(format!("no position for vertex {v}")))?;
        if coords.len() != d {
            return Err(IoError::Syntax { line: *line, field: 3, message: format!("expected {d} coordinates, found {}", coords.len()) });
        }
        points.push(coords.clone());
    }
    if let Some((&v, (_, line))) = rec.positions.iter().find(|(&v, _)| v == 0 || v > n) {
        return Err(IoError::Syntax { line: *line, field: 2, message: format!("vertex {v} out of range") });
    }
    let (lattice, lattice_line) = required(rec.lattice, "lattice")?;
    if lattice.len() != d {
        return Err(IoError::Syntax { line: lattice_line, field: 2, message: format!("expected {d} coordinates, found {}", lattice.len()) });
    }
    let framework = QuotientFramework::from_points(graph, &points, &lattice).map_err(|e| match e {
        NumericError::ZeroLattice => IoError::ZeroLattice { lines: vec![lattice_line] },
        e => IoError::Numeric(e),
    })?;
    let stress = if rec.stress.is_empty() {
        None
    } else {
        let mut doc = StressDocument::default();
        for (key, w, line) in rec.stress {
            if doc.weights.insert(key, w).is_some() {
                return Err(IoError::Syntax { line, field: 2, message: format!("second weight for {key}") });
            }
        }
        Some(doc.resolve(&framework.graph)?)
    };
    Ok(FrameworkDocument { name: rec.name, framework, stress })
}

fn parse_stress_text(text: &str) -> Result<StressDocument, IoError> {
    let rec = read_text(text, "zstress", &["stress"])?;
    let mut doc = StressDocument::default();
    for (key, w, line) in rec.stress {
        if doc.weights.insert(key, w).is_some() {
            return Err(IoError::Syntax { line, field: 2, message: format!("second weight for {key}") });
        }
    }
    Ok(doc)
}

fn contiguous_ids(g: &GainGraph) -> bool {
    g.edges().iter().enumerate().all(|(k, e)| e.id == EdgeId(k as u32 + 1))
}

fn write_edges(out: &mut String, g: &GainGraph) {
    let explicit = !contiguous_ids(g);
    for e in g.edges() {
        if explicit {
            let _ = writeln!(out, "edge {} {} {} {}", e.id, e.tail, e.head, e.label);
        } else {
            let _ = writeln!(out, "edge {} {} {}", e.tail, e.head, e.label);
        }
    }
}

fn join_reals(xs: impl IntoIterator<Item = f64>) -> String {
    xs.into_iter().map(format_real).collect::<Vec<_>>().join(" ")
}

// ---------------------------------------------------------------- json

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonEdge {
    id: u32,
    tail: usize,
    head: usize,
    label: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonGraph {
    format: String,
    version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    vertices: usize,
    edges: Vec<JsonEdge>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonFramework {
    format: String,
    version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    vertices: usize,
    dim: usize,
    edges: Vec<JsonEdge>,
    positions: Vec<Vec<f64>>,
    lattice: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stress: Option<BTreeMap<String, f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonStress {
    format: String,
    version: u32,
    weights: BTreeMap<String, f64>,
}

fn json_err(e: serde_json::Error) -> IoError {
    IoError::Json { line: e.line(), column: e.column(), message: e.to_string() }
}

fn check_header(format: &str, version: u32, kind: &str) -> Result<(), IoError> {
    if format != kind {
        return Err(IoError::Invalid(format!("expected format {kind:?}, found {format:?}")));
    }
    if version != FORMAT_VERSION {
        return Err(IoError::Invalid(format!("unsupported version {version}")));
    }
    Ok(())
}

fn json_edges(g: &GainGraph) -> Vec<JsonEdge> {
    g.edges().iter().map(|e| JsonEdge { id: e.id.0, tail: e.tail, head: e.head, label: e.label }).collect()
}

/// Edges with their 1-based record position standing in for a line.
fn from_json_edges(edges: &[JsonEdge]) -> Vec<(GainEdge, usize)> {
    edges.iter().enumerate().map(|(k, e)| (GainEdge::new(EdgeId(e.id), e.tail, e.head, e.label), k + 1)).collect()
}

fn stress_map(doc: &StressDocument) -> BTreeMap<String, f64> {
    doc.weights.iter().map(|(k, w)| (k.to_string(), *w)).collect()
}

fn stress_from_map(map: BTreeMap<String, f64>) -> Result<StressDocument, IoError> {
    let mut doc = StressDocument::default();
    for (k, w) in map {
        let key: StressKey = k.parse().map_err(|_| IoError::Invalid(format!("bad stress key {k:?}")))?;
        doc.weights.insert(key, w);
    }
    Ok(doc)
}

// ---------------------------------------------------------------- api

pub fn parse_graph(text: &str) -> Result<GraphDocument, IoError> {
    if !is_json(text) {
        return parse_graph_text(text);
    }
    let j: JsonGraph = serde_json::from_str(text).map_err(json_err)?;
    check_header(&j.format, j.version, "zgraph")?;
    Ok(GraphDocument { name: j.name, graph: build_graph(j.vertices, from_json_edges(&j.edges))? })
}

pub fn serialize_graph(doc: &GraphDocument, format: Format) -> String {
    match format {
        Format::Json => {
            let j = JsonGraph {
                format: "zgraph".into(),
                version: FORMAT_VERSION,
                name: doc.name.clone(),
                vertices: doc.graph.vertex_count(),
                edges: json_edges(&doc.graph),
            };
            serde_json::to_string_pretty(&j).expect("serializable") + "\n"
        }
        Format::Text => {
            let mut out = format!("zgraph {FORMAT_VERSION}\n");
            if let Some(name) = &doc.name {
                let _ = writeln!(out, "name {name}");
            }
            let _ = writeln!(out, "vertices {}", doc.graph.vertex_count());
            write_edges(&mut out, &doc.graph);
            out
        }
    }
}

pub fn parse_framework(text: &str) -> Result<FrameworkDocument, IoError> {
    if !is_json(text) {
        return parse_framework_text(text);
    }
    let j: JsonFramework = serde_json::from_str(text).map_err(json_err)?;
    check_header(&j.format, j.version, "zframework")?;
    let graph = build_graph(j.vertices, from_json_edges(&j.edges))?;
    if j.positions.len() != j.vertices {
        return Err(IoError::Invalid(format!("expected {} positions, found {}", j.vertices, j.positions.len())));
    }
    for (k, p) in j.positions.iter().enumerate() {
        if p.len() != j.dim {
            return Err(IoError::Invalid(format!("position {} has {} coordinates, dim is {}", k + 1, p.len(), j.dim)));
        }
    }
    if j.lattice.len() != j.dim {
        return Err(IoError::Invalid(format!("lattice has {} coordinates, dim is {}", j.lattice.len(), j.dim)));
    }
    let framework = QuotientFramework::from_points(graph, &j.positions, &j.lattice).map_err(|e| match e {
        NumericError::ZeroLattice => IoError::ZeroLattice { lines: Vec::new() },
        e => IoError::Numeric(e),
    })?;
    let stress = match j.stress {
        Some(map) => Some(stress_from_map(map)?.resolve(&framework.graph)?),
        None => None,
    };
    Ok(FrameworkDocument { name: j.name, framework, stress })
}

pub fn serialize_framework(doc: &FrameworkDocument, format: Format) -> String {
    let fw = &doc.framework;
    let points: Vec<Vec<f64>> = fw.positions.column_iter().map(|c| c.iter().copied().collect()).collect();
    let stress = doc.stress.as_ref().map(|w| StressDocument::from_vector(&fw.graph, w));
    match format {
        Format::Json => {
            let j = JsonFramework {
                format: "zframework".into(),
                version: FORMAT_VERSION,
                name: doc.name.clone(),
                vertices: fw.vertex_count(),
                dim: fw.dim(),
                edges: json_edges(&fw.graph),
                positions: points,
                lattice: fw.lattice.iter().copied().collect(),
                stress: stress.as_ref().map(stress_map),
            };
            serde_json::to_string_pretty(&j).expect("serializable") + "\n"
        }
        Format::Text => {
            let mut out = format!("zframework {FORMAT_VERSION}\n");
            if let Some(name) = &doc.name {
                let _ = writeln!(out, "name {name}");
            }
            let _ = writeln!(out, "vertices {}", fw.vertex_count());
            let _ = writeln!(out, "dim {}", fw.dim());
            write_edges(&mut out, &fw.graph);
            for (k, p) in points.iter().enumerate() {
                let _ = writeln!(out, "position {} {}", k + 1, join_reals(p.iter().copied()));
            }
            let _ = writeln!(out, "lattice {}", join_reals(fw.lattice.iter().copied()));
            if let Some(s) = &stress {
                for (k, w) in &s.weights {
                    let _ = writeln!(out, "stress {k} {}", format_real(*w));
                }
            }
            out
        }
    }
}

pub fn parse_stress(text: &str) -> Result<StressDocument, IoError> {
    if !is_json(text) {
        return parse_stress_text(text);
    }
    let j: JsonStress = serde_json::from_str(text).map_err(json_err)?;
    check_header(&j.format, j.version, "zstress")?;
    stress_from_map(j.weights)
}

pub fn serialize_stress(doc: &StressDocument, format: Format) -> String {
    match format {
        Format::Json => {
            let j = JsonStress { format: "zstress".into(), version: FORMAT_VERSION, weights: stress_map(doc) };
            serde_json::to_string_pretty(&j).expect("serializable") + "\n"
        }
        Format::Text => {
            let mut out = format!("zstress {FORMAT_VERSION}\n");
            for (k, w) in &doc.weights {
                let _ = writeln!(out, "stress {k} {}", format_real(*w));
            }
            out
        }
    }
}

/// A verdict together with the graph it was computed for; JSON only.
#[derive(Clone, Debug, PartialEq)]
pub struct CertificateDocument {
    pub graph: GainGraph,
    pub verdict: RealizabilityVerdict,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonCertificate {
    format: String,
    version: u32,
    graph: JsonGraph,
    verdict: RealizabilityVerdict,
}

pub fn parse_certificate(text: &str) -> Result<CertificateDocument, IoError> {
    let j: JsonCertificate = serde_json::from_str(text).map_err(json_err)?;
    check_header(&j.format, j.version, "zcert")?;
    check_header(&j.graph.format, j.graph.version, "zgraph")?;
    let graph = build_graph(j.graph.vertices, from_json_edges(&j.graph.edges))?;
    Ok(CertificateDocument { graph, verdict: j.verdict })
}

pub fn serialize_certificate(doc: &CertificateDocument) -> String {
    let j = JsonCertificate {
        format: "zcert".into(),
        version: FORMAT_VERSION,
        graph: JsonGraph {
            format: "zgraph".into(),
            version: FORMAT_VERSION,
            name: None,
            vertices: doc.graph.vertex_count(),
            edges: json_edges(&doc.graph),
        },
        verdict: doc.verdict.clone(),
    };
    serde_json::to_string_pretty(&j).expect("serializable") + "\n"
}
