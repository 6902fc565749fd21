//! JSON formats: problem files, types, divisors and decompositions.
//!
//! Rationals are written as `"p/q"` strings (integers as `"n"`) and read from
//! strings or JSON integers. Objects are emitted with sorted keys, so output
//! is byte-for-byte reproducible.

use std::path::Path;

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use crate::error::{Error, InputErrorCode as Code, Result};
use crate::graph::{Divisor, Edge, EdgeSet, Location, MetricGraph, TropicalDivisor, Vertex};
use crate::jacobian::{face_poset, Cell, Decomposition, FaceCheck, Kind, LatticeData, ValidationReport, Zonotope};
use crate::rational::{self, Rational};
use crate::stability::{Polarization, SheafType};

/// A graph with the stability data a computation needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemSpec {
    pub graph: MetricGraph,
    pub polarization: Polarization,
    pub degree: i64,
    pub basepoint: usize,
    /// The vertex `v` of `v`-quasistability, if given.
    pub section: Option<usize>,
}

fn bad(code: Code, message: impl Into<String>) -> Error {
    Error::input(code, message)
}

fn field<'a>(obj: &'a Value, key: &str, code: Code) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| bad(code, format!("missing field `{key}`")))
}

fn as_str<'a>(v: &'a Value, what: &str, code: Code) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| bad(code, format!("{what} must be a string, found {v}")))
}

fn as_int(v: &Value, what: &str, code: Code) -> Result<i64> {
    v.as_i64()
        .ok_or_else(|| bad(code, format!("{what} must be an integer, found {v}")))
}

fn as_array<'a>(v: &'a Value, what: &str, code: Code) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| bad(code, format!("{what} must be an array")))
}

fn as_object<'a>(v: &'a Value, what: &str, code: Code) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| bad(code, format!("{what} must be an object")))
}

fn parse_rational(v: &Value, what: &str) -> Result<Rational> {
    rational::serde_str::from_value(v)
        .ok_or_else(|| bad(Code::Rational, format!("{what} is not an exact rational: {v}")))
}

fn rat(q: &Rational) -> Value {
    Value::String(rational::format(q))
}

fn rats(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rat).collect())
}

fn vertex_id(g: &MetricGraph, v: &Value) -> Result<usize> {
    let id = as_str(v, "vertex id", Code::Json)?;
    g.vertex_index(id)
        .map_err(|_| bad(Code::UnknownId, format!("unknown vertex `{id}`")))
}

fn edge_id(g: &MetricGraph, v: &Value) -> Result<usize> {
    let id = as_str(v, "edge id", Code::Json)?;
    g.edge_index(id)
        .map_err(|_| bad(Code::UnknownId, format!("unknown edge `{id}`")))
}

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| bad(Code::Json, e.to_string()))
}

/// Reads `{"vertices": [...], "edges": [...]}`.
pub fn graph_from_json(v: &Value) -> Result<MetricGraph> {
    let mut vertices: Vec<Vertex> = Vec::new();
    for x in as_array(field(v, "vertices", Code::Json)?, "vertices", Code::Json)? {
        let id = as_str(field(x, "id", Code::Json)?, "vertex id", Code::Json)?.to_string();
        let weight = match x.get("weight") {
            None => 0,
            Some(w) => w
                .as_u64()
                .and_then(|w| u32::try_from(w).ok())
                .ok_or_else(|| bad(Code::Json, format!("weight of `{id}` must be a non-negative integer")))?,
        };
        if vertices.iter().any(|u| u.id == id) {
            return Err(bad(Code::DuplicateId, format!("vertex id `{id}` repeats")));
        }
        vertices.push(Vertex { id, weight });
    }
    let index = |id: &str| vertices.iter().position(|u| u.id == id);
    let mut edges: Vec<Edge> = Vec::new();
    for x in as_array(field(v, "edges", Code::Json)?, "edges", Code::Json)? {
        let id = as_str(field(x, "id", Code::Json)?, "edge id", Code::Json)?.to_string();
        if edges.iter().any(|e| e.id == id) || index(&id).is_some() {
            return Err(bad(Code::DuplicateId, format!("edge id `{id}` repeats")));
        }
        let end = |key: &str| -> Result<usize> {
            let name = as_str(field(x, key, Code::Json)?, key, Code::Json)?;
            index(name).ok_or_else(|| bad(Code::UnknownId, format!("edge `{id}` has unknown {key} `{name}`")))
        };
        let (tail, head) = (end("tail")?, end("head")?);
        let length = parse_rational(field(x, "length", Code::Json)?, &format!("length of `{id}`"))?;
        if length <= Rational::from_integer(BigInt::from(0)) {
            return Err(bad(
                Code::Length,
                format!("edge `{id}` has non-positive length {}", rational::format(&length)),
            ));
        }
        edges.push(Edge { id, tail, head, length });
    }
    MetricGraph::new(vertices, edges)
}

pub fn graph_to_json(g: &MetricGraph) -> Value {
    json!({
        "vertices": g.vertices().iter().map(|v| json!({"id": v.id, "weight": v.weight})).collect::<Vec<_>>(),
        "edges": g.edges().iter().map(|e| json!({
            "id": e.id,
            "tail": g.vertex(e.tail).id,
            "head": g.vertex(e.head).id,
            "length": rat(&e.length),
        })).collect::<Vec<_>>(),
    })
}

fn vertex_map(g: &MetricGraph, v: &Value, code: Code, what: &str) -> Result<Vec<Option<i64>>> {
    let mut out = vec![None; g.num_vertices()];
    for (id, x) in as_object(v, what, code)? {
        let i = g
            .vertex_index(id)
            .map_err(|_| bad(Code::UnknownId, format!("{what} names unknown vertex `{id}`")))?;
        out[i] = Some(as_int(x, what, code)?);
    }
    Ok(out)
}

fn divisor_json(g: &MetricGraph, d: &Divisor) -> Value {
    Value::Object(
        d.0.iter()
            .enumerate()
            .map(|(v, k)| (g.vertex(v).id.clone(), json!(k)))
            .collect(),
    )
}

pub fn polarization_from_json(g: &MetricGraph, v: &Value) -> Result<Polarization> {
    let entries = vertex_map(g, v, Code::Polarization, "polarization")?;
    let mut h = Vec::with_capacity(entries.len());
    for (i, x) in entries.into_iter().enumerate() {
        match x {
            Some(x) if x > 0 => h.push(x),
            Some(x) => {
                return Err(bad(
                    Code::Polarization,
                    format!("polarization at `{}` is {x}, not positive", g.vertex(i).id),
                ))
            }
            None => {
                return Err(bad(
                    Code::Polarization,
                    format!("polarization misses vertex `{}`", g.vertex(i).id),
                ))
            }
        }
    }
    Polarization::new(Divisor(h))
}

/// Reads a problem: a graph plus optional `polarization` (default 1 at every
/// vertex), `degree` (default the genus), `basepoint` (default the first
/// vertex) and `section`.
pub fn problem_from_json(v: &Value) -> Result<ProblemSpec> {
    let graph = graph_from_json(v)?;
    let polarization = match v.get("polarization") {
        Some(p) => polarization_from_json(&graph, p)?,
        None => Polarization::uniform(graph.num_vertices()),
    };
    let degree = match v.get("degree") {
        Some(d) => as_int(d, "degree", Code::Json)?,
        None => graph.genus(),
    };
    let basepoint = match v.get("basepoint") {
        Some(b) => vertex_id(&graph, b)?,
        None => 0,
    };
    let section = v.get("section").map(|s| vertex_id(&graph, s)).transpose()?;
    Ok(ProblemSpec {
        graph,
        polarization,
        degree,
        basepoint,
        section,
    })
}

pub fn parse_problem_str(text: &str) -> Result<ProblemSpec> {
    problem_from_json(&parse_json(text)?)
}

pub fn parse_problem(path: &Path) -> Result<ProblemSpec> {
    parse_problem_str(&std::fs::read_to_string(path)?)
}

pub fn problem_to_json(p: &ProblemSpec) -> Value {
    let mut v = graph_to_json(&p.graph);
    let obj = v.as_object_mut().expect("graph JSON is an object");
    obj.insert(
        "polarization".into(),
        divisor_json(&p.graph, p.polarization.multidegree()),
    );
    obj.insert("degree".into(), json!(p.degree));
    obj.insert("basepoint".into(), json!(p.graph.vertex(p.basepoint).id));
    if let Some(s) = p.section {
        obj.insert("section".into(), json!(p.graph.vertex(s).id));
    }
    v
}

/// Reads `{"S": [edge ids], "d": {vertex id: n}}`; vertices left out of `d`
/// get 0.
pub fn type_from_json(g: &MetricGraph, v: &Value) -> Result<SheafType> {
    let mut s = EdgeSet::EMPTY;
    for e in as_array(field(v, "S", Code::Type)?, "S", Code::Type)? {
        s.insert(edge_id(g, e)?);
    }
    let d = vertex_map(g, field(v, "d", Code::Type)?, Code::Type, "d")?;
    Ok(SheafType::new(
        s,
        Divisor(d.into_iter().map(|x| x.unwrap_or(0)).collect()),
    ))
}

pub fn parse_type(g: &MetricGraph, text: &str) -> Result<SheafType> {
    let v = serde_json::from_str(text).map_err(|e| bad(Code::Type, e.to_string()))?;
    type_from_json(g, &v)
}

pub fn type_to_json(g: &MetricGraph, t: &SheafType) -> Value {
    json!({
        "S": t.s.iter().map(|e| g.edge(e).id.clone()).collect::<Vec<_>>(),
        "d": divisor_json(g, &t.d),
    })
}

fn location_from_json(g: &MetricGraph, v: &Value) -> Result<Location> {
    if v.is_string() {
        return Ok(Location::Vertex(vertex_id(g, v)?));
    }
    let edge = edge_id(g, field(v, "edge", Code::Divisor)?)?;
    let offset = parse_rational(field(v, "offset", Code::Divisor)?, "offset")?;
    Location::EdgePoint { edge, offset }
        .normalized(g)
        .map_err(|e| bad(Code::Divisor, e.to_string()))
}

pub fn location_to_json(g: &MetricGraph, l: &Location) -> Value {
    match l {
        Location::Vertex(v) => json!(g.vertex(*v).id),
        Location::EdgePoint { edge, offset } => json!({"edge": g.edge(*edge).id, "offset": rat(offset)}),
    }
}

/// Reads `[[location, multiplicity], ...]` where a location is a vertex id
/// or `{"edge": id, "offset": "p/q"}`.
pub fn divisor_from_json(g: &MetricGraph, v: &Value) -> Result<TropicalDivisor> {
    let mut points = Vec::new();
    for x in as_array(v, "divisor", Code::Divisor)? {
        let pair = as_array(x, "divisor entry", Code::Divisor)?;
        let [loc, mult] = pair.as_slice() else {
            return Err(bad(
                Code::Divisor,
                format!("divisor entry {x} is not a [location, multiplicity] pair"),
            ));
        };
        points.push((
            location_from_json(g, loc)?,
            as_int(mult, "multiplicity", Code::Divisor)?,
        ));
    }
    TropicalDivisor::new(g, points)
}

pub fn parse_divisor(g: &MetricGraph, text: &str) -> Result<TropicalDivisor> {
    let v = serde_json::from_str(text).map_err(|e| bad(Code::Divisor, e.to_string()))?;
    divisor_from_json(g, &v)
}

pub fn divisor_to_json(g: &MetricGraph, d: &TropicalDivisor) -> Value {
    Value::Array(
        d.points()
            .iter()
            .map(|(l, m)| json!([location_to_json(g, l), m]))
            .collect(),
    )
}

fn kind_to_json(g: &MetricGraph, k: Kind) -> Value {
    match k {
        Kind::Polystable => json!("ps"),
        Kind::Quasistable(v) => json!({"qs": g.vertex(v).id}),
    }
}

fn face_check_name(f: FaceCheck) -> &'static str {
    match f {
        FaceCheck::Exact => "exact",
        FaceCheck::Sampled => "sampled",
        FaceCheck::Skipped => "skipped",
    }
}

pub fn report_to_json(r: &ValidationReport) -> Value {
    json!({
        "covolume": rat(&r.covolume),
        "maximal_volume": rat(&r.maximal_volume),
        "maximal_cells": r.maximal_cells,
        "sampled_points": r.sampled_points,
        "face_check": face_check_name(r.face_check),
        "pairs_checked": r.pairs_checked,
        "faces_checked": r.faces_checked,
        "passed": r.passed(),
    })
}

fn bigints(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect())
}

/// Lattice, cells, face poset and validation report.
pub fn decomposition_to_json(d: &Decomposition) -> Value {
    let g = &d.graph;
    let poset = face_poset(d);
    json!({
        "graph": graph_to_json(g),
        "polarization": divisor_json(g, d.polarization.multidegree()),
        "degree": d.degree,
        "basepoint": g.vertex(d.basepoint).id,
        "kind": kind_to_json(g, d.kind),
        "lattice": {
            "tree": d.lattice.tree.iter().map(|e| g.edge(e).id.clone()).collect::<Vec<_>>(),
            "basis": d.lattice.basis.iter().map(|c| {
                c.0.iter().enumerate()
                    .filter(|(_, x)| !num_traits::Zero::is_zero(*x))
                    .map(|(e, x)| json!([g.edge(e).id, rat(x)]))
                    .collect::<Vec<_>>()
            }).collect::<Vec<_>>(),
            "gram": d.lattice.gram.iter().map(|r| rats(r)).collect::<Vec<_>>(),
        },
        "cells": d.cells.iter().map(|c| json!({
            "label": type_to_json(g, &c.label),
            "edges": c.edges.iter().map(|&e| g.edge(e).id.clone()).collect::<Vec<_>>(),
            "base": rats(&c.zonotope.base),
            "generators": c.zonotope.generators.iter().map(|x| rats(x)).collect::<Vec<_>>(),
            "dim": c.dim,
        })).collect::<Vec<_>>(),
        "poset": {
            "hasse": poset.edges.iter().map(|e| json!([e.face, e.cell, e.multiplicity])).collect::<Vec<_>>(),
            "stars": poset.stars.iter().map(|(v, rays)| json!([v, rays.iter().map(|r| bigints(r)).collect::<Vec<_>>()])).collect::<Vec<_>>(),
        },
        "report": report_to_json(&d.report),
    })
}

fn rationals_from(v: &Value, what: &str) -> Result<Vec<Rational>> {
    as_array(v, what, Code::Json)?
        .iter()
        .map(|x| parse_rational(x, what))
        .collect()
}

fn count(v: &Value, key: &str) -> Result<usize> {
    let x = as_int(field(v, key, Code::Json)?, key, Code::Json)?;
    usize::try_from(x).map_err(|_| bad(Code::Json, format!("`{key}` must be non-negative")))
}

/// Reads a decomposition written by [`decomposition_to_json`]. The lattice
/// is recomputed from the stored tree and must match the stored Gram matrix.
pub fn decomposition_from_json(v: &Value) -> Result<Decomposition> {
    let g = graph_from_json(field(v, "graph", Code::Json)?)?;
    let polarization = polarization_from_json(&g, field(v, "polarization", Code::Json)?)?;
    let degree = as_int(field(v, "degree", Code::Json)?, "degree", Code::Json)?;
    let basepoint = vertex_id(&g, field(v, "basepoint", Code::Json)?)?;
    let kind = match field(v, "kind", Code::Json)? {
        Value::String(s) if s == "ps" => Kind::Polystable,
        k => Kind::Quasistable(vertex_id(&g, field(k, "qs", Code::Json)?)?),
    };
    let lat = field(v, "lattice", Code::Json)?;
    let mut tree = EdgeSet::EMPTY;
    for e in as_array(field(lat, "tree", Code::Json)?, "tree", Code::Json)? {
        tree.insert(edge_id(&g, e)?);
    }
    let lattice = LatticeData::with_tree(&g, tree)?;
    let gram: Vec<Vec<Rational>> = as_array(field(lat, "gram", Code::Json)?, "gram", Code::Json)?
        .iter()
        .map(|r| rationals_from(r, "gram row"))
        .collect::<Result<_>>()?;
    if gram != lattice.gram {
        return Err(bad(Code::Json, "stored Gram matrix does not match the graph"));
    }
    let mut cells = Vec::new();
    for c in as_array(field(v, "cells", Code::Json)?, "cells", Code::Json)? {
        let label = type_from_json(&g, field(c, "label", Code::Json)?)?;
        let edges = as_array(field(c, "edges", Code::Json)?, "edges", Code::Json)?
            .iter()
            .map(|e| edge_id(&g, e))
            .collect::<Result<Vec<_>>>()?;
        let base = rationals_from(field(c, "base", Code::Json)?, "base")?;
        let generators = as_array(field(c, "generators", Code::Json)?, "generators", Code::Json)?
            .iter()
            .map(|x| rationals_from(x, "generator"))
            .collect::<Result<Vec<_>>>()?;
        let zonotope = Zonotope { base, generators };
        if zonotope.ambient_dim() != lattice.dim()
            || zonotope.generators.iter().any(|x| x.len() != lattice.dim())
            || zonotope.generators.len() != edges.len()
        {
            return Err(bad(Code::Json, "cell dimensions do not match the lattice"));
        }
        cells.push(Cell {
            label,
            edges,
            dim: count(c, "dim")?,
            zonotope,
        });
    }
    let rep = field(v, "report", Code::Json)?;
    let face_check = match as_str(field(rep, "face_check", Code::Json)?, "face_check", Code::Json)? {
        "exact" => FaceCheck::Exact,
        "sampled" => FaceCheck::Sampled,
        "skipped" => FaceCheck::Skipped,
        other => return Err(bad(Code::Json, format!("unknown face check `{other}`"))),
    };
    let report = ValidationReport {
        covolume: parse_rational(field(rep, "covolume", Code::Json)?, "covolume")?,
        maximal_volume: parse_rational(field(rep, "maximal_volume", Code::Json)?, "maximal_volume")?,
        maximal_cells: count(rep, "maximal_cells")?,
        sampled_points: count(rep, "sampled_points")?,
        face_check,
        pairs_checked: count(rep, "pairs_checked")?,
        faces_checked: count(rep, "faces_checked")?,
    };
    let mut d = Decomposition::from_cells(g, polarization, lattice, cells, kind, degree, basepoint);
    d.report = report;
    Ok(d)
}
