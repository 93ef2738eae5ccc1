//! Finite directed graphs and paths.
//!
//! Paths compose right to left: for `α = α₁α₂…αₙ` we need `d(αᵢ) = r(αᵢ₊₁)`,
//! so `r(α) = r(α₁)` and `d(α) = d(αₙ)`. A vertex is a path of length zero.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub name: String,
    pub source: VertexId,
    pub range: VertexId,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("edge `{edge}` references unknown vertex `{vertex}`")]
    DanglingEdge { edge: String, vertex: String },
    #[error("paths are not composable: d(p) = {left} but r(q) = {right}")]
    NonComposable { left: String, right: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("not a circuit: {0}")]
    NotACircuit(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    vertex_index: HashMap<String, VertexId>,
    edge_index: HashMap<String, EdgeId>,
    into: Vec<Vec<EdgeId>>,
    out_of: Vec<Vec<EdgeId>>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from vertex names and `(name, source, range)` triples.
    pub fn from_parts<V, E>(vertices: V, edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        E: IntoIterator<Item = (String, String, String)>,
    {
        let mut g = Graph::new();
        for v in vertices {
            g.add_vertex(v)?;
        }
        for (name, s, r) in edges {
            let source = g
                .vertex_id(&s)
                .ok_or_else(|| GraphError::DanglingEdge { edge: name.clone(), vertex: s.clone() })?;
            let range = g
                .vertex_id(&r)
                .ok_or_else(|| GraphError::DanglingEdge { edge: name.clone(), vertex: r.clone() })?;
            g.add_edge(name, source, range)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, name: impl Into<String>) -> Result<VertexId, GraphError> {
        let name = name.into();
        if self.vertex_index.contains_key(&name) {
            return Err(GraphError::DuplicateId(name));
        }
        let id = self.vertices.len();
        self.vertex_index.insert(name.clone(), id);
        self.vertices.push(name);
        self.into.push(Vec::new());
        self.out_of.push(Vec::new());
        Ok(id)
    }

    pub fn add_edge(
        &mut self,
        name: impl Into<String>,
        source: VertexId,
        range: VertexId,
    ) -> Result<EdgeId, GraphError> {
        let name = name.into();
        if self.edge_index.contains_key(&name) {
            return Err(GraphError::DuplicateId(name));
        }
        for v in [source, range] {
            if v >= self.vertices.len() {
                return Err(GraphError::DanglingEdge { edge: name, vertex: v.to_string() });
            }
        }
        let id = self.edges.len();
        self.edge_index.insert(name.clone(), id);
        self.edges.push(Edge { name, source, range });
        self.into[range].push(id);
        self.out_of[source].push(id);
        Ok(id)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.vertices.len()
    }

    pub fn edges(&self) -> std::ops::Range<EdgeId> {
        0..self.edges.len()
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edges[e].name
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.vertex_index.get(name).copied()
    }

    pub fn edge_id(&self, name: &str) -> Option<EdgeId> {
        self.edge_index.get(name).copied()
    }

    pub fn range(&self, e: EdgeId) -> VertexId {
        self.edges[e].range
    }

    pub fn source(&self, e: EdgeId) -> VertexId {
        self.edges[e].source
    }

    /// Edges `e` with `r(e) = v`, in insertion order.
    pub fn edges_into(&self, v: VertexId) -> &[EdgeId] {
        &self.into[v]
    }

    /// Edges `e` with `d(e) = v`, in insertion order.
    pub fn edges_out_of(&self, v: VertexId) -> &[EdgeId] {
        &self.out_of[v]
    }

    /// `r⁻¹(v)` is a singleton.
    pub fn is_simple(&self, v: VertexId) -> bool {
        self.into[v].len() == 1
    }

    /// `r⁻¹(v)` is empty.
    pub fn is_source(&self, v: VertexId) -> bool {
        self.into[v].is_empty()
    }

    /// `d⁻¹(v)` is empty.
    pub fn is_sink(&self, v: VertexId) -> bool {
        self.out_of[v].is_empty()
    }

    pub fn validate(&self) -> ValidationReport {
        let sources: Vec<VertexId> = self.vertices().filter(|&v| self.is_source(v)).collect();
        let sinks: Vec<VertexId> = self.vertices().filter(|&v| self.is_sink(v)).collect();
        ValidationReport {
            no_sources: sources.is_empty(),
            no_sinks: sinks.is_empty(),
            row_finite: true,
            sources,
            sinks,
            simple_vertices: self.vertices().filter(|&v| self.is_simple(v)).collect(),
        }
    }

    pub fn vertex_path(&self, v: VertexId) -> Path {
        Path { range: v, edges: Vec::new() }
    }

    pub fn edge_path(&self, e: EdgeId) -> Path {
        Path { range: self.range(e), edges: vec![e] }
    }

    /// Builds a path from edges, checking `d(αᵢ) = r(αᵢ₊₁)`.
    pub fn path(&self, edges: &[EdgeId]) -> Result<Path, GraphError> {
        let Some(&first) = edges.first() else {
            return Err(GraphError::NotACircuit("empty edge list needs an anchoring vertex".into()));
        };
        for w in edges.windows(2) {
            if self.source(w[0]) != self.range(w[1]) {
                return Err(GraphError::NonComposable {
                    left: self.edge_name(w[0]).to_string(),
                    right: self.edge_name(w[1]).to_string(),
                });
            }
        }
        Ok(Path { range: self.range(first), edges: edges.to_vec() })
    }

    /// Parses a path written as edge names separated by `.` or whitespace, as a
    /// vertex name, or (when every edge name is one character) as a plain string
    /// like `0110`.
    pub fn parse_path(&self, text: &str) -> Result<Path, GraphError> {
        let text = text.trim();
        if let Some(v) = self.vertex_id(text) {
            return Ok(self.vertex_path(v));
        }
        let tokens: Vec<&str> = text.split(|c: char| c == '.' || c.is_whitespace()).filter(|t| !t.is_empty()).collect();
        let mut edges = Vec::new();
        if tokens.len() == 1 && self.edge_id(tokens[0]).is_none() {
            for c in tokens[0].chars() {
                let name = c.to_string();
                edges.push(self.edge_id(&name).ok_or(GraphError::UnknownEdge(text.to_string()))?);
            }
        } else {
            for t in tokens {
                edges.push(self.edge_id(t).ok_or_else(|| GraphError::UnknownEdge(t.to_string()))?);
            }
        }
        self.path(&edges)
    }

    pub fn compose(&self, p: &Path, q: &Path) -> Result<Path, GraphError> {
        let dp = p.source(self);
        if dp != q.range {
            return Err(GraphError::NonComposable {
                left: self.vertex_name(dp).to_string(),
                right: self.vertex_name(q.range).to_string(),
            });
        }
        let mut edges = p.edges.clone();
        edges.extend_from_slice(&q.edges);
        Ok(Path { range: p.range, edges })
    }

    pub fn is_circuit(&self, c: &Path) -> bool {
        !c.edges.is_empty() && c.source(self) == c.range
    }

    /// True iff some vertex `d(γᵢ)` along the circuit receives at least two edges.
    pub fn circuit_has_entry(&self, c: &Path) -> Result<bool, GraphError> {
        if !self.is_circuit(c) {
            return Err(GraphError::NotACircuit(c.display(self)));
        }
        Ok(c.edges.iter().any(|&e| !self.is_simple(self.source(e))))
    }

    /// Every circuit has an entry.
    ///
    /// A circuit without entry runs entirely through simple vertices along their
    /// unique incoming edges, so it suffices to look for a cycle in the functional
    /// graph `v ↦ r(the edge into v)` restricted to simple vertices.
    pub fn condition_l(&self) -> bool {
        let n = self.vertex_count();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; n];
        for start in self.vertices() {
            if state[start] != 0 {
                continue;
            }
            let mut trail = Vec::new();
            let mut v = start;
            loop {
                if !self.is_simple(v) || state[v] == 2 {
                    break;
                }
                if state[v] == 1 {
                    return false;
                }
                state[v] = 1;
                trail.push(v);
                v = self.source(self.into[v][0]);
            }
            for t in trail {
                state[t] = 2;
            }
        }
        true
    }

    /// `x ⇀ y`: some path `α` has `d(α) = x` and `r(α) = y`.
    pub fn reach(&self, x: VertexId, y: VertexId) -> bool {
        self.reachable_from(x)[y]
    }

    /// All `y` with `x ⇀ y`.
    pub fn reachable_from(&self, x: VertexId) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        let mut stack = vec![x];
        seen[x] = true;
        while let Some(v) = stack.pop() {
            for &e in &self.out_of[v] {
                let w = self.range(e);
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Vertices that are the range of some infinite path.
    pub fn infinite_path_vertices(&self) -> Vec<bool> {
        // Repeatedly discard vertices with no incoming edge from a live vertex.
        let n = self.vertex_count();
        let mut live = vec![true; n];
        let mut live_in: Vec<usize> = (0..n).map(|v| self.into[v].len()).collect();
        let mut queue: Vec<VertexId> = (0..n).filter(|&v| live_in[v] == 0).collect();
        while let Some(v) = queue.pop() {
            if !live[v] {
                continue;
            }
            live[v] = false;
            for &e in &self.out_of[v] {
                let w = self.range(e);
                live_in[w] -= 1;
                if live_in[w] == 0 && live[w] {
                    queue.push(w);
                }
            }
        }
        live
    }

    /// All paths `α` with `r(α) = x` and `|α| = len`, in lexicographic edge order.
    pub fn paths_from_range(&self, x: VertexId, len: usize) -> Vec<Path> {
        let mut out = vec![self.vertex_path(x)];
        for _ in 0..len {
            let mut next = Vec::new();
            for p in &out {
                for &e in self.edges_into(p.source(self)) {
                    let mut q = p.clone();
                    q.edges.push(e);
                    next.push(q);
                }
            }
            out = next;
        }
        out
    }

    /// All paths of length at most `max_len`, vertices first.
    pub fn paths_up_to(&self, max_len: usize) -> Vec<Path> {
        let mut out: Vec<Path> = self.vertices().map(|v| self.vertex_path(v)).collect();
        let mut layer = out.clone();
        for _ in 0..max_len {
            let mut next = Vec::new();
            for p in &layer {
                for &e in self.edges_into(p.source(self)) {
                    let mut q = p.clone();
                    q.edges.push(e);
                    next.push(q);
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    pub(crate) fn names_are_single_chars(&self) -> bool {
        self.edges.iter().all(|e| e.name.chars().count() == 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub no_sources: bool,
    pub no_sinks: bool,
    pub row_finite: bool,
    pub sources: Vec<VertexId>,
    pub sinks: Vec<VertexId>,
    pub simple_vertices: Vec<VertexId>,
}

/// A finite path, anchored at its range so that length-zero paths carry a vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub range: VertexId,
    pub edges: Vec<EdgeId>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn source(&self, g: &Graph) -> VertexId {
        match self.edges.last() {
            Some(&e) => g.source(e),
            None => self.range,
        }
    }

    /// If `self = prefix · rest`, returns `rest`.
    pub fn strip_prefix(&self, g: &Graph, prefix: &Path) -> Option<Path> {
        if self.range != prefix.range || !self.edges.starts_with(&prefix.edges) {
            return None;
        }
        Some(Path { range: prefix.source(g), edges: self.edges[prefix.len()..].to_vec() })
    }

    pub fn is_prefix_of(&self, other: &Path) -> bool {
        self.range == other.range && other.edges.starts_with(&self.edges)
    }

    /// The prefix of length `n`.
    pub fn prefix(&self, n: usize) -> Path {
        Path { range: self.range, edges: self.edges[..n].to_vec() }
    }

    pub fn display(&self, g: &Graph) -> String {
        if self.edges.is_empty() {
            return g.vertex_name(self.range).to_string();
        }
        let sep = if g.names_are_single_chars() { "" } else { "." };
        self.edges.iter().map(|&e| g.edge_name(e)).collect::<Vec<_>>().join(sep)
    }
}

/// Displays a path against its graph.
pub struct PathDisplay<'a>(pub &'a Graph, pub &'a Path);

impl fmt::Display for PathDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.1.display(self.0))
    }
}

/// Simple cycles, each reported once starting from its smallest vertex.
/// Exponential; meant for small graphs and cross-checks.
pub fn simple_cycles(g: &Graph) -> Vec<Path> {
    let mut out = Vec::new();
    for start in g.vertices() {
        let mut stack: Vec<(VertexId, Vec<EdgeId>, BTreeSet<VertexId>)> =
            vec![(start, Vec::new(), BTreeSet::from([start]))];
        while let Some((v, edges, seen)) = stack.pop() {
            for &e in g.edges_into(v) {
                let w = g.source(e);
                if w == start {
                    let mut c = edges.clone();
                    c.push(e);
                    out.push(Path { range: start, edges: c });
                } else if w > start && !seen.contains(&w) {
                    let mut c = edges.clone();
                    c.push(e);
                    let mut s = seen.clone();
                    s.insert(w);
                    stack.push((w, c, s));
                }
            }
        }
    }
    out
}
