//! Text formats: system files and matrix-pair files.
//!
//! ```text
//! file        = { line } ;
//! line        = blank | comment | header | block ;
//! comment     = "#" { any } ;
//! header      = "system" name ;
//! block       = opener "{" NL { entry NL } "}" ;
//! opener      = "graph" | "backend" kind | "action" gen | "cocycle" gen | "assertions" ;
//! kind        = "automaton" | "integer" | "finite" ;
//!
//! graph entry      = "vertices" ":" name { name }
//!                  | "edge" name ":" name "->" name ;        (* source -> range *)
//! automaton entry  = "generators" ":" name { name } ;
//! integer entry    = "generator" ":" name ;
//! finite entry     = "elements" ":" name { name }            (* first is the identity *)
//!                  | "generators" ":" name { name }
//!                  | "row" name ":" name { name } ;          (* products name·x in element order *)
//! action entry     = ( "vertex" | "edge" ) name "->" name ;  (* unlisted items are fixed *)
//! cocycle entry    = name ":" element ;                      (* unlisted edges restrict to 1 *)
//! assertions entry = ( "amenable" | "faithful" ) ":" bool
//!                  | "hypothesis" ":" ( "strong" | "weak" ) ;
//! ```
//!
//! Matrix files hold `A:` followed by rows of integers, then `B:` and its rows.

use std::collections::HashMap;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::graph::Graph;
use crate::group::{FiniteGroup, Group};
use crate::system::{Assertions, GeneratorAction, System, SystemError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column} ({block}): {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub block: String,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Invalid(#[from] SystemError),
}

struct Line<'a> {
    number: usize,
    text: &'a str,
    indent: usize,
}

#[derive(Default)]
struct Raw {
    name: Option<String>,
    vertices: Vec<String>,
    edges: Vec<(String, String, String, usize)>,
    backend: Option<(String, usize)>,
    generators: Vec<String>,
    elements: Vec<String>,
    rows: Vec<(String, Vec<String>, usize)>,
    actions: Vec<(String, Vec<(bool, String, String, usize)>, usize)>,
    cocycles: Vec<(String, Vec<(String, String, usize)>, usize)>,
    assertions: Assertions,
    weak: bool,
}

fn err(line: &Line, column: usize, block: &str, message: impl Into<String>) -> ParseError {
    ParseError { line: line.number, column: column + line.indent + 1, block: block.into(), message: message.into() }
}

fn at(line: usize, block: &str, message: impl Into<String>) -> ParseError {
    ParseError { line, column: 1, block: block.into(), message: message.into() }
}

/// Parses and validates a system file.
pub fn parse_system(text: &str) -> Result<System, LoadError> {
    let raw = parse_raw(text)?;
    assemble(raw)
}

fn parse_raw(text: &str) -> Result<Raw, ParseError> {
    let mut lines = Vec::new();
    for (i, full) in text.lines().enumerate() {
        let body = full.split('#').next().unwrap_or("");
        let trimmed = body.trim();
        if !trimmed.is_empty() {
            let indent = body.len() - body.trim_start().len();
            lines.push(Line { number: i + 1, text: trimmed, indent });
        }
    }
    let mut raw = Raw::default();
    let mut i = 0;
    while i < lines.len() {
        let line = &lines[i];
        let words: Vec<&str> = line.text.split_whitespace().collect();
        if words[0] == "system" {
            if words.len() != 2 {
                return Err(err(line, 0, "top level", "expected `system NAME`"));
            }
            raw.name = Some(words[1].to_string());
            i += 1;
            continue;
        }
        if words.last() != Some(&"{") {
            return Err(err(line, 0, "top level", format!("expected a block opener ending in `{{`, found `{}`", line.text)));
        }
        let head = &words[..words.len() - 1];
        let block = head.join(" ");
        let start = line.number;
        let mut body = Vec::new();
        i += 1;
        loop {
            let Some(l) = lines.get(i) else {
                return Err(at(start, &block, "block is never closed"));
            };
            i += 1;
            if l.text == "}" {
                break;
            }
            body.push(l);
        }
        match head {
            ["graph"] => parse_graph(&mut raw, &body, &block)?,
            ["backend", kind] => {
                if raw.backend.is_some() {
                    return Err(at(start, &block, "second backend block"));
                }
                raw.backend = Some((kind.to_string(), start));
                parse_backend(&mut raw, kind, &body, &block)?;
            }
            ["action", g] => raw.actions.push((g.to_string(), parse_action(&body, &block)?, start)),
            ["cocycle", g] => raw.cocycles.push((g.to_string(), parse_cocycle(&body, &block)?, start)),
            ["assertions"] => parse_assertions(&mut raw, &body, &block)?,
            _ => return Err(at(start, &block, format!("unknown block `{block}`"))),
        }
    }
    Ok(raw)
}

fn split_colon<'a>(l: &'a Line, block: &str) -> Result<(&'a str, &'a str), ParseError> {
    l.text.split_once(':').map(|(a, b)| (a.trim(), b.trim())).ok_or_else(|| err(l, 0, block, "expected `key: value`"))
}

fn parse_graph(raw: &mut Raw, body: &[&Line], block: &str) -> Result<(), ParseError> {
    for l in body {
        let (key, value) = split_colon(l, block)?;
        let key_words: Vec<&str> = key.split_whitespace().collect();
        match key_words.as_slice() {
            ["vertices"] => raw.vertices.extend(value.split_whitespace().map(String::from)),
            ["edge", name] => {
                let (s, r) = value
                    .split_once("->")
                    .ok_or_else(|| err(l, l.text.find(':').unwrap_or(0) + 1, block, "expected `SOURCE -> RANGE`"))?;
                let (s, r) = (s.trim(), r.trim());
                if s.is_empty() || r.is_empty() || s.contains(char::is_whitespace) || r.contains(char::is_whitespace) {
                    return Err(err(l, 0, block, "expected `SOURCE -> RANGE`"));
                }
                raw.edges.push((name.to_string(), s.to_string(), r.to_string(), l.number));
            }
            _ => return Err(err(l, 0, block, format!("unknown graph entry `{key}`"))),
        }
    }
    Ok(())
}

fn parse_backend(raw: &mut Raw, kind: &str, body: &[&Line], block: &str) -> Result<(), ParseError> {
    for l in body {
        let (key, value) = split_colon(l, block)?;
        let items: Vec<String> = value.split_whitespace().map(String::from).collect();
        let kw: Vec<&str> = key.split_whitespace().collect();
        match (kind, kw.as_slice()) {
            ("automaton", ["generators"]) | ("finite", ["generators"]) => raw.generators = items,
            ("integer", ["generator"]) => {
                if items.len() != 1 {
                    return Err(err(l, 0, block, "expected one generator name"));
                }
                raw.generators = items;
            }
            ("finite", ["elements"]) => raw.elements = items,
            ("finite", ["row", name]) => raw.rows.push((name.to_string(), items, l.number)),
            _ => return Err(err(l, 0, block, format!("unexpected `{key}` in a {kind} backend"))),
        }
    }
    Ok(())
}

fn parse_action(body: &[&Line], block: &str) -> Result<Vec<(bool, String, String, usize)>, ParseError> {
    let mut out = Vec::new();
    for l in body {
        let words: Vec<&str> = l.text.split_whitespace().collect();
        match words.as_slice() {
            [kind @ ("vertex" | "edge"), from, "->", to] => out.push((*kind == "edge", from.to_string(), to.to_string(), l.number)),
            _ => return Err(err(l, 0, block, "expected `vertex X -> Y` or `edge X -> Y`")),
        }
    }
    Ok(out)
}

fn parse_cocycle(body: &[&Line], block: &str) -> Result<Vec<(String, String, usize)>, ParseError> {
    let mut out = Vec::new();
    for l in body {
        let (edge, value) = split_colon(l, block)?;
        if edge.is_empty() || value.is_empty() {
            return Err(err(l, 0, block, "expected `EDGE: ELEMENT`"));
        }
        out.push((edge.to_string(), value.to_string(), l.number));
    }
    Ok(out)
}

fn parse_assertions(raw: &mut Raw, body: &[&Line], block: &str) -> Result<(), ParseError> {
    for l in body {
        let (key, value) = split_colon(l, block)?;
        let flag = || match value {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(err(l, l.text.find(':').unwrap_or(0) + 2, block, "expected `true` or `false`")),
        };
        match key {
            "amenable" => raw.assertions.amenable = flag()?,
            "faithful" => raw.assertions.faithful = flag()?,
            "hypothesis" => {
                raw.weak = match value {
                    "strong" => false,
                    "weak" => true,
                    _ => return Err(err(l, 0, block, "expected `strong` or `weak`")),
                }
            }
            _ => return Err(err(l, 0, block, format!("unknown assertion `{key}`"))),
        }
    }
    Ok(())
}

fn assemble(raw: Raw) -> Result<System, LoadError> {
    let mut graph = Graph::new();
    for v in &raw.vertices {
        graph.add_vertex(v.clone()).map_err(|e| at(0, "graph", e.to_string()))?;
    }
    for (name, s, r, line) in &raw.edges {
        let lookup = |v: &str| graph.vertex_id(v).ok_or_else(|| at(*line, "graph", format!("edge `{name}` references unknown vertex `{v}`")));
        let (s, r) = (lookup(s)?, lookup(r)?);
        graph.add_edge(name.clone(), s, r).map_err(|e| at(*line, "graph", e.to_string()))?;
    }
    let (kind, line) = raw.backend.clone().ok_or_else(|| at(0, "top level", "missing backend block"))?;
    let group = match kind.as_str() {
        "automaton" => Group::automaton(raw.generators.clone()).map_err(|e| at(line, "backend", e.to_string()))?,
        "integer" => Group::Integer { generator: raw.generators.first().cloned().unwrap_or_else(|| "t".into()) },
        "finite" => {
            let index: HashMap<&str, usize> = raw.elements.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
            let find = |n: &str, l: usize| index.get(n).copied().ok_or_else(|| at(l, "backend finite", format!("unknown element `{n}`")));
            let mut table = vec![Vec::new(); raw.elements.len()];
            for (name, items, l) in &raw.rows {
                let row = find(name, *l)?;
                table[row] = items.iter().map(|x| find(x, *l)).collect::<Result<_, _>>()?;
            }
            let gens = raw.generators.iter().map(|g| find(g, line)).collect::<Result<_, _>>()?;
            Group::Finite(FiniteGroup::new(raw.elements.clone(), table, gens).map_err(|e| at(line, "backend finite", e.to_string()))?)
        }
        other => return Err(at(line, "backend", format!("unknown backend kind `{other}`")).into()),
    };
    let gen_names = group.generator_names();
    let mut gens: Vec<GeneratorAction> =
        gen_names.iter().map(|_| GeneratorAction::constant(&graph, group.identity())).collect();
    let gen_index = |g: &str, l: usize, block: &str| {
        gen_names.iter().position(|n| n == g).ok_or_else(|| at(l, block, format!("unknown generator `{g}`")))
    };
    for (g, entries, l) in &raw.actions {
        let block = format!("action {g}");
        let k = gen_index(g, *l, &block)?;
        for (is_edge, from, to, line) in entries {
            if *is_edge {
                let (a, b) = (graph.edge_id(from), graph.edge_id(to));
                match (a, b) {
                    (Some(a), Some(b)) => gens[k].edge[a] = b,
                    _ => return Err(at(*line, &block, format!("unknown edge in `{from} -> {to}`")).into()),
                }
            } else {
                match (graph.vertex_id(from), graph.vertex_id(to)) {
                    (Some(a), Some(b)) => gens[k].vertex[a] = b,
                    _ => return Err(at(*line, &block, format!("unknown vertex in `{from} -> {to}`")).into()),
                }
            }
        }
    }
    for (g, entries, l) in &raw.cocycles {
        let block = format!("cocycle {g}");
        let k = gen_index(g, *l, &block)?;
        for (edge, value, line) in entries {
            let e = graph.edge_id(edge).ok_or_else(|| at(*line, &block, format!("unknown edge `{edge}`")))?;
            gens[k].cocycle[e] = group.parse(value).map_err(|x| at(*line, &block, x.to_string()))?;
        }
    }
    let name = raw.name.clone().unwrap_or_else(|| "system".into());
    let sys = if raw.weak {
        System::new_weak(name, graph, group, gens)?
    } else {
        System::new(name, graph, group, gens)?
    };
    Ok(sys.with_assertions(raw.assertions))
}

/// Canonical text for a system; `parse_system` reads it back.
pub fn write_system(s: &System) -> String {
    let g = s.graph();
    let grp = s.group();
    let mut out = String::new();
    writeln!(out, "system {}", s.name()).unwrap();
    writeln!(out, "graph {{").unwrap();
    let names: Vec<&str> = g.vertices().map(|v| g.vertex_name(v)).collect();
    writeln!(out, "  vertices: {}", names.join(" ")).unwrap();
    for e in g.edges() {
        writeln!(out, "  edge {}: {} -> {}", g.edge_name(e), g.vertex_name(g.source(e)), g.vertex_name(g.range(e))).unwrap();
    }
    writeln!(out, "}}").unwrap();
    match grp {
        Group::Automaton { generators } => writeln!(out, "backend automaton {{\n  generators: {}\n}}", generators.join(" ")).unwrap(),
        Group::Integer { generator } => writeln!(out, "backend integer {{\n  generator: {generator}\n}}").unwrap(),
        Group::Finite(f) => {
            writeln!(out, "backend finite {{").unwrap();
            writeln!(out, "  elements: {}", f.names().join(" ")).unwrap();
            let gens: Vec<&str> = f.generators().iter().map(|&x| f.names()[x].as_str()).collect();
            writeln!(out, "  generators:{}", gens.iter().map(|g| format!(" {g}")).collect::<String>()).unwrap();
            for (i, row) in f.table().iter().enumerate() {
                let items: Vec<&str> = row.iter().map(|&x| f.names()[x].as_str()).collect();
                writeln!(out, "  row {}: {}", f.names()[i], items.join(" ")).unwrap();
            }
            writeln!(out, "}}").unwrap();
        }
    }
    for (k, name) in grp.generator_names().iter().enumerate() {
        let a = &s.generator_actions()[k];
        writeln!(out, "action {name} {{").unwrap();
        for v in g.vertices() {
            if a.vertex[v] != v {
                writeln!(out, "  vertex {} -> {}", g.vertex_name(v), g.vertex_name(a.vertex[v])).unwrap();
            }
        }
        for e in g.edges() {
            if a.edge[e] != e {
                writeln!(out, "  edge {} -> {}", g.edge_name(e), g.edge_name(a.edge[e])).unwrap();
            }
        }
        writeln!(out, "}}").unwrap();
        writeln!(out, "cocycle {name} {{").unwrap();
        for e in g.edges() {
            if !grp.is_syntactic_identity(&a.cocycle[e]) {
                writeln!(out, "  {}: {}", g.edge_name(e), grp.display(&a.cocycle[e])).unwrap();
            }
        }
        writeln!(out, "}}").unwrap();
    }
    writeln!(out, "assertions {{").unwrap();
    writeln!(out, "  amenable: {}", s.assertions.amenable).unwrap();
    writeln!(out, "  faithful: {}", s.assertions.faithful).unwrap();
    writeln!(out, "  hypothesis: {}", if s.uses_weak_hypothesis() { "weak" } else { "strong" }).unwrap();
    writeln!(out, "}}").unwrap();
    out
}

/// First 16 hex digits of the SHA-256 of the canonical text.
pub fn fingerprint(s: &System) -> String {
    fingerprint_text(&write_system(s))
}

pub fn fingerprint_text(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    hex::encode(&digest[..8])
}

/// A pair of square integer matrices read from a matrix file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixPair {
    pub a: Vec<Vec<i64>>,
    pub b: Vec<Vec<i64>>,
}

pub fn parse_matrices(text: &str) -> Result<MatrixPair, ParseError> {
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut current: Option<char> = None;
    for (i, full) in text.lines().enumerate() {
        let line = full.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let block = match current {
            Some(c) => c.to_string(),
            None => "top level".to_string(),
        };
        if let Some(rest) = line.strip_suffix(':') {
            current = match rest.trim() {
                "A" => Some('A'),
                "B" => Some('B'),
                other => return Err(at(i + 1, &block, format!("unknown matrix `{other}`"))),
            };
            continue;
        }
        let mut row = Vec::new();
        let mut col = 0;
        for tok in line.split(|c: char| c.is_whitespace() || c == ',') {
            if tok.is_empty() {
                col += 1;
                continue;
            }
            let v: i64 = tok.parse().map_err(|_| ParseError {
                line: i + 1,
                column: full.find(tok).map(|p| p + 1).unwrap_or(col + 1),
                block: block.clone(),
                message: format!("`{tok}` is not an integer"),
            })?;
            row.push(v);
            col += tok.len() + 1;
        }
        match current {
            Some('A') => a.push(row),
            Some('B') => b.push(row),
            _ => return Err(at(i + 1, &block, "row before `A:` or `B:`")),
        }
    }
    let n = a.len();
    if n == 0 || a.iter().any(|r| r.len() != n) {
        return Err(at(0, "A", "A must be a nonempty square matrix"));
    }
    if b.len() != n || b.iter().any(|r| r.len() != n) {
        return Err(at(0, "B", "B must be square with the same size as A"));
    }
    Ok(MatrixPair { a, b })
}

pub fn write_matrices(p: &MatrixPair) -> String {
    let mut out = String::new();
    for (label, m) in [("A", &p.a), ("B", &p.b)] {
        writeln!(out, "{label}:").unwrap();
        for row in m {
            let items: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(out, "{}", items.join(" ")).unwrap();
        }
    }
    out
}
