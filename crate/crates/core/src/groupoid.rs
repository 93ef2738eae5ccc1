//! Eventually periodic infinite paths, the actions of `G` and `S_{G,E}` on
//! them, fixed points, and germs of the tight groupoid.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::graph::{EdgeId, Graph, Path, VertexId};
use crate::group::Elem;
use crate::semigroup::{sge_mul, Sge, Triple};
use crate::system::System;
use crate::verdict::{SearchBudget, Verdict};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupoidError {
    #[error("germs are not composable: {0}")]
    NonComposableGerms(String),
    #[error("base point is not in the domain cylinder Z({0})")]
    NotInDomain(String),
    #[error("expected |α| > |β|")]
    WrongShape,
    #[error("malformed infinite path: {0}")]
    Syntax(String),
    #[error("image could not be certified eventually periodic within {0} cycle passes")]
    Undetermined(usize),
}

/// An infinite path `prefix · cycle · cycle · …`, normalized so that equal
/// paths have equal representations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EpPath {
    range: VertexId,
    prefix: Vec<EdgeId>,
    cycle: Vec<EdgeId>,
}

impl EpPath {
    /// Normalizes: the cycle becomes primitive and the prefix as short as possible.
    /// Panics if the edges do not form an infinite path.
    pub fn new(graph: &Graph, range: VertexId, prefix: Vec<EdgeId>, cycle: Vec<EdgeId>) -> Self {
        Self::try_new(graph, range, prefix, cycle).expect("valid eventually periodic path")
    }

    pub fn try_new(graph: &Graph, range: VertexId, mut prefix: Vec<EdgeId>, mut cycle: Vec<EdgeId>) -> Result<Self, GroupoidError> {
        if cycle.is_empty() {
            return Err(GroupoidError::Syntax("empty cycle".into()));
        }
        let all: Vec<EdgeId> = prefix.iter().chain(&cycle).chain(&cycle[..1]).copied().collect();
        if graph.range(all[0]) != range {
            return Err(GroupoidError::Syntax("range does not match the first edge".into()));
        }
        if all.windows(2).any(|w| graph.source(w[0]) != graph.range(w[1])) {
            return Err(GroupoidError::Syntax("consecutive edges do not compose".into()));
        }
        let n = cycle.len();
        let period = (1..=n).find(|&p| n % p == 0 && (0..n).all(|i| cycle[i] == cycle[i % p])).unwrap();
        cycle.truncate(period);
        while let Some(&last) = prefix.last() {
            if last != *cycle.last().unwrap() {
                break;
            }
            prefix.pop();
            cycle.rotate_right(1);
        }
        Ok(EpPath { range, prefix, cycle })
    }

    /// `γγγ…` for a circuit `γ`.
    pub fn power(graph: &Graph, gamma: &Path) -> Self {
        EpPath::new(graph, gamma.range, Vec::new(), gamma.edges.clone())
    }

    pub fn range(&self) -> VertexId {
        self.range
    }

    pub fn prefix(&self) -> &[EdgeId] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[EdgeId] {
        &self.cycle
    }

    pub fn edge_at(&self, i: usize) -> EdgeId {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// `ξ|ₙ`.
    pub fn truncate(&self, n: usize) -> Path {
        Path { range: self.range, edges: (0..n).map(|i| self.edge_at(i)).collect() }
    }

    /// `ξ ∈ Z(β)`.
    pub fn in_cylinder(&self, beta: &Path) -> bool {
        beta.range == self.range && beta.edges.iter().enumerate().all(|(i, &e)| self.edge_at(i) == e)
    }

    /// The tail after the first `n` edges.
    pub fn shift(&self, graph: &Graph, n: usize) -> EpPath {
        let p = self.prefix.len();
        if n <= p {
            let range = if n < p || !self.cycle.is_empty() { graph.range(self.edge_at(n)) } else { self.range };
            return EpPath::new(graph, range, self.prefix[n..].to_vec(), self.cycle.clone());
        }
        let k = (n - p) % self.cycle.len();
        let mut cycle = self.cycle.clone();
        cycle.rotate_left(k);
        EpPath::new(graph, graph.range(cycle[0]), Vec::new(), cycle)
    }

    /// `α·ξ`, requiring `d(α) = r(ξ)`.
    pub fn prepend(&self, graph: &Graph, alpha: &Path) -> Option<EpPath> {
        if alpha.source(graph) != self.range {
            return None;
        }
        let mut prefix = alpha.edges.clone();
        prefix.extend_from_slice(&self.prefix);
        Some(EpPath::new(graph, alpha.range, prefix, self.cycle.clone()))
    }

    pub fn display(&self, graph: &Graph) -> String {
        let show = |edges: &[EdgeId]| {
            let sep = if graph.edges().all(|e| graph.edge_name(e).chars().count() == 1) { "" } else { "." };
            edges.iter().map(|&e| graph.edge_name(e)).collect::<Vec<_>>().join(sep)
        };
        format!("{}({})^inf", show(&self.prefix), show(&self.cycle))
    }

    /// Parses `prefix(cycle)^inf`; the prefix may be empty.
    pub fn parse(graph: &Graph, text: &str) -> Result<EpPath, GroupoidError> {
        let text = text.trim();
        let body = text
            .strip_suffix("^inf")
            .or_else(|| text.strip_suffix("^∞"))
            .ok_or_else(|| GroupoidError::Syntax(format!("expected prefix(cycle)^inf, got `{text}`")))?;
        let open = body.find('(').ok_or_else(|| GroupoidError::Syntax("missing `(`".into()))?;
        let inner = body[open + 1..].strip_suffix(')').ok_or_else(|| GroupoidError::Syntax("missing `)`".into()))?;
        let cycle = graph.parse_path(inner).map_err(|e| GroupoidError::Syntax(e.to_string()))?;
        let prefix_text = body[..open].trim();
        let prefix = if prefix_text.is_empty() {
            Vec::new()
        } else {
            graph.parse_path(prefix_text).map_err(|e| GroupoidError::Syntax(e.to_string()))?.edges
        };
        let range = match prefix.first().or(cycle.edges.first()) {
            Some(&e) => graph.range(e),
            None => return Err(GroupoidError::Syntax("empty cycle".into())),
        };
        EpPath::try_new(graph, range, prefix, cycle.edges)
    }
}

pub struct EpDisplay<'a>(pub &'a Graph, pub &'a EpPath);

impl fmt::Display for EpDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.1.display(self.0))
    }
}

/// The result of pushing an infinite path through a map: either a certified
/// eventually periodic path or only a finite prefix of the image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InfiniteImage {
    Periodic(EpPath),
    Prefix(Path),
}

impl InfiniteImage {
    pub fn periodic(&self) -> Option<&EpPath> {
        match self {
            InfiniteImage::Periodic(p) => Some(p),
            InfiniteImage::Prefix(_) => None,
        }
    }

    pub fn display(&self, graph: &Graph) -> String {
        match self {
            InfiniteImage::Periodic(p) => p.display(graph),
            InfiniteImage::Prefix(p) => format!("{}… (periodicity not certified)", p.display(graph)),
        }
    }
}

/// `gξ`, with `(gξ)|ₙ = g(ξ|ₙ)`. The image is certified periodic once the
/// restriction at the start of a cycle pass repeats; `depth` bounds the passes.
pub fn g_act_infinite(sys: &System, g: &Elem, xi: &EpPath, depth: usize) -> InfiniteImage {
    let graph = sys.graph();
    let (head, mut h) = sys.act(g, &Path { range: xi.range, edges: xi.prefix.clone() });
    let range = head.range;
    let mut out = head.edges;
    let cycle = Path { range: graph.range(xi.cycle[0]), edges: xi.cycle.clone() };
    let mut seen: HashMap<Elem, usize> = HashMap::new();
    let mut starts = Vec::new();
    for pass in 0..depth.max(1) {
        if let Some(&i) = seen.get(&h) {
            let cut = starts[i];
            let prefix = out[..cut].to_vec();
            let cyc = out[cut..].to_vec();
            return InfiniteImage::Periodic(EpPath::new(graph, range, prefix, cyc));
        }
        seen.insert(h.clone(), pass);
        starts.push(out.len());
        let (img, r) = sys.act(&h, &cycle);
        out.extend(img.edges);
        h = r;
    }
    InfiniteImage::Prefix(Path { range, edges: out })
}

/// `(α, g, β)·βη = α(gη)`, defined for `ξ ∈ Z(β)`.
pub fn sge_act_infinite(sys: &System, t: &Triple, xi: &EpPath, depth: usize) -> Result<InfiniteImage, GroupoidError> {
    let graph = sys.graph();
    if !xi.in_cylinder(&t.beta) {
        return Err(GroupoidError::NotInDomain(sys.show_path(&t.beta)));
    }
    let eta = xi.shift(graph, t.beta.len());
    Ok(match g_act_infinite(sys, &t.g, &eta, depth) {
        InfiniteImage::Periodic(p) => InfiniteImage::Periodic(p.prepend(graph, &t.alpha).expect("membership")),
        InfiniteImage::Prefix(p) => InfiniteImage::Prefix(graph.compose(&t.alpha, &p).expect("membership")),
    })
}

/// A germ `[α, g, β; ξ]` with `ξ ∈ Z(β)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Germ {
    pub s: Triple,
    pub base: EpPath,
}

impl Germ {
    pub fn new(s: Triple, base: EpPath) -> Result<Self, GroupoidError> {
        if !base.in_cylinder(&s.beta) {
            return Err(GroupoidError::NotInDomain(format!("{:?}", s.beta.edges)));
        }
        Ok(Germ { s, base })
    }

    /// `[r(ξ), 1, r(ξ); ξ]`.
    pub fn unit(sys: &System, base: EpPath) -> Self {
        let v = sys.graph().vertex_path(base.range());
        Germ { s: Triple { alpha: v.clone(), g: sys.identity(), beta: v }, base }
    }

    pub fn display(&self, sys: &System) -> String {
        format!("[{}; {}]", self.s.display(sys), self.base.display(sys.graph()))
    }

    /// The range point `sξ`.
    pub fn target(&self, sys: &System, depth: usize) -> Result<EpPath, GroupoidError> {
        match sge_act_infinite(sys, &self.s, &self.base, depth)? {
            InfiniteImage::Periodic(p) => Ok(p),
            InfiniteImage::Prefix(_) => Err(GroupoidError::Undetermined(depth)),
        }
    }

    /// `[s; ξ]⁻¹ = [s*; sξ]`.
    pub fn inverse(&self, sys: &System, depth: usize) -> Result<Germ, GroupoidError> {
        let target = self.target(sys, depth)?;
        let s = Triple { alpha: self.s.beta.clone(), g: sys.inv(&self.s.g), beta: self.s.alpha.clone() };
        Germ::new(s, target)
    }

    /// Parses `[alpha; g; beta] @ prefix(cycle)^inf` (commas also separate).
    pub fn parse(sys: &System, text: &str) -> Result<Germ, String> {
        let (s, xi) = text.split_once('@').ok_or("expected `[alpha; g; beta] @ prefix(cycle)^inf`")?;
        let sge = crate::semigroup::parse_sge(sys, s).map_err(|e| e.to_string())?;
        let Sge::T(t) = sge else { return Err("the zero element has no germs".into()) };
        let base = EpPath::parse(sys.graph(), xi).map_err(|e| e.to_string())?;
        Germ::new(t, base).map_err(|e| e.to_string())
    }
}

/// `[s; tξ]·[t; ξ] = [st; ξ]`.
pub fn germ_compose(sys: &System, u: &Germ, v: &Germ, depth: usize) -> Result<Germ, GroupoidError> {
    let mid = v.target(sys, depth)?;
    if mid != u.base {
        return Err(GroupoidError::NonComposableGerms(format!(
            "{} ≠ {}",
            u.base.display(sys.graph()),
            mid.display(sys.graph())
        )));
    }
    match sge_mul(sys, &Sge::T(u.s.clone()), &Sge::T(v.s.clone())) {
        Sge::T(st) => Germ::new(st, v.base.clone()),
        Sge::Zero => Err(GroupoidError::NonComposableGerms("product is zero".into())),
    }
}

/// `[s; ξ] = [t; ξ]` iff some `e = f_{ξ|n}` below `s*s` and `t*t` has `se = te`.
///
/// Prefixes are scanned in order. The answer is No as soon as the first
/// components of `s f_{ξ|n}` and `t f_{ξ|n}` diverge, or once the pair of
/// restrictions repeats at the same position of the cycle of `ξ` without ever
/// having been equal.
pub fn germ_equal(sys: &System, u: &Germ, v: &Germ, budget: SearchBudget) -> Verdict {
    if u.base != v.base {
        return Verdict::No("different base points".into());
    }
    if u == v {
        return Verdict::Yes("syntactically equal".into());
    }
    let graph = sys.graph();
    let (s, t, xi) = (&u.s, &v.s, &u.base);
    let shift = |x: &Triple| x.alpha.len() as i64 - x.beta.len() as i64;
    if shift(s) != shift(t) {
        return Verdict::No("the two sides shift length differently".into());
    }
    let n0 = s.beta.len().max(t.beta.len());
    let start = |x: &Triple| {
        let eps = xi.truncate(n0).strip_prefix(graph, &x.beta).expect("base lies in both cylinders");
        let (img, h) = sys.act(&x.g, &eps);
        (graph.compose(&x.alpha, &img).expect("membership").edges, h)
    };
    let (mut a, mut h) = start(s);
    let (mut b, mut k) = start(t);
    let mut seen: HashMap<(Elem, Elem, usize), usize> = HashMap::new();
    let mut inconclusive = false;
    let p = xi.prefix().len();
    let c = xi.cycle().len();
    for n in n0..n0 + budget.max_states {
        if a != b {
            return Verdict::No(format!("first components differ along {}", sys.show_path(&xi.truncate(n))));
        }
        match sys.equal(&h, &k, budget) {
            Verdict::Yes(_) => return Verdict::Yes(format!("e = f_{{{}}}", sys.show_path(&xi.truncate(n)))),
            Verdict::Unknown(_) => inconclusive = true,
            Verdict::No(_) => {}
        }
        if n >= p {
            let key = (h.clone(), k.clone(), (n - p) % c);
            if seen.insert(key, n).is_some() {
                return if inconclusive {
                    Verdict::Unknown("restriction comparison inconclusive".into())
                } else {
                    Verdict::No(format!("restriction pair ({}, {}) recurs with no equalizing prefix", sys.show(&h), sys.show(&k)))
                };
            }
        }
        let e = xi.edge_at(n);
        let (e1, h1) = sys.act_edge(&h, e);
        let (e2, k1) = sys.act_edge(&k, e);
        a.push(e1);
        b.push(e2);
        h = h1;
        k = k1;
    }
    Verdict::Unknown(format!("no decision within {} prefixes", budget.max_states))
}

/// For `t = (α, g, β)` with `|α| > |β|`: its unique fixed point `βξ`, if any,
/// where `α = βγ` and `ξ` comes from the `G`-circuit `(g, γ)`.
pub fn unique_fixed_point(sys: &System, t: &Triple, depth: usize) -> Result<Option<InfiniteImage>, GroupoidError> {
    if t.alpha.len() <= t.beta.len() {
        return Err(GroupoidError::WrongShape);
    }
    let graph = sys.graph();
    let Some(gamma) = t.alpha.strip_prefix(graph, &t.beta) else { return Ok(None) };
    if gamma.source(graph) != sys.act_vertex(&t.g, gamma.range) {
        return Ok(None);
    }
    let xi = crate::sfp::g_circuit_fixed_point(sys, &t.g, &gamma, depth).map_err(|_| GroupoidError::WrongShape)?;
    Ok(Some(match xi {
        InfiniteImage::Periodic(p) => InfiniteImage::Periodic(p.prepend(graph, &t.beta).expect("composable")),
        InfiniteImage::Prefix(p) => InfiniteImage::Prefix(graph.compose(&t.beta, &p).expect("composable")),
    }))
}

/// Whether the fixed point of `t = (βγ, g, β)` is isolated: exactly when
/// `γ` has no entry.
pub fn isolated_fixed_point(sys: &System, t: &Triple) -> Result<Verdict, GroupoidError> {
    if t.alpha.len() <= t.beta.len() {
        return Err(GroupoidError::WrongShape);
    }
    let graph = sys.graph();
    let gamma = t.alpha.strip_prefix(graph, &t.beta);
    match gamma {
        Some(gamma) if gamma.source(graph) == sys.act_vertex(&t.g, gamma.range) => {
            let entry = gamma.edges.iter().find(|&&e| !graph.is_simple(graph.source(e)));
            Ok(match entry {
                Some(&e) => Verdict::No(format!("entry at {}", graph.vertex_name(graph.source(e)))),
                None => Verdict::Yes(format!("{} has no entry", sys.show_path(&gamma))),
            })
        }
        _ => Ok(Verdict::No("no fixed point".into())),
    }
}
