//! Self-similar graph systems `(G, E, φ)`: a group acting on a graph by
//! automorphisms together with a restriction cocycle.

use std::collections::{HashMap, HashSet, VecDeque};

use thiserror::Error;

use crate::graph::{EdgeId, Graph, GraphError, Path, VertexId};
use crate::group::{Elem, Group, GroupError};
use crate::verdict::{SearchBudget, Verdict};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("generator `{0}` does not act as a graph automorphism: {1}")]
    NotAutomorphism(String, String),
    #[error("standing hypothesis fails for generator `{g}`, edge `{e}`, vertex `{x}`")]
    StandingHypothesisViolated { g: String, e: String, x: String },
    #[error("cocycle is inconsistent with the group relations: {0}")]
    CocycleInconsistent(String),
    #[error("expected {expected} generator tables, got {got}")]
    GeneratorCount { expected: usize, got: usize },
    #[error("element does not belong to this system's backend")]
    BackendMismatch,
}

/// How one generator acts: images of vertices and edges and the restriction
/// `φ(s, e)` for every edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorAction {
    pub vertex: Vec<VertexId>,
    pub edge: Vec<EdgeId>,
    pub cocycle: Vec<Elem>,
}

impl GeneratorAction {
    /// Identity on vertices and edges with restriction `restriction` everywhere.
    pub fn constant(graph: &Graph, restriction: Elem) -> Self {
        GeneratorAction {
            vertex: graph.vertices().collect(),
            edge: graph.edges().collect(),
            cocycle: vec![restriction; graph.edge_count()],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Assertions {
    pub amenable: bool,
    pub faithful: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Cycles {
    /// `(cycle index, position)` per item.
    place: Vec<(usize, usize)>,
    cycles: Vec<Vec<usize>>,
}

impl Cycles {
    fn of(perm: &[usize]) -> Self {
        let mut place = vec![(usize::MAX, 0); perm.len()];
        let mut cycles = Vec::new();
        for start in 0..perm.len() {
            if place[start].0 != usize::MAX {
                continue;
            }
            let mut cyc = Vec::new();
            let mut x = start;
            while place[x].0 == usize::MAX {
                place[x] = (cycles.len(), cyc.len());
                cyc.push(x);
                x = perm[x];
            }
            cycles.push(cyc);
        }
        Cycles { place, cycles }
    }

    fn shift(&self, x: usize, m: i64) -> usize {
        let (c, p) = self.place[x];
        let cyc = &self.cycles[c];
        cyc[(p as i64 + m).rem_euclid(cyc.len() as i64) as usize]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Derived {
    Words { inverse: Vec<GeneratorAction> },
    Integer { vertices: Cycles, edges: Cycles, steps: Vec<i64> },
    Finite { tables: Vec<GeneratorAction> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct System {
    name: String,
    graph: Graph,
    group: Group,
    gens: Vec<GeneratorAction>,
    derived: Derived,
    pub assertions: Assertions,
    weak_hypothesis: bool,
}

impl System {
    /// Validates and builds a system, checking the standing hypothesis in its
    /// strong form `σ_{φ(g,e)}(x) = σ_g(x)` for all vertices `x`.
    pub fn new(name: impl Into<String>, graph: Graph, group: Group, gens: Vec<GeneratorAction>) -> Result<Self, SystemError> {
        Self::build(name.into(), graph, group, gens, false)
    }

    /// Like [`System::new`] but only requires `σ_{φ(g,e)}(d(e)) = σ_g(d(e))`.
    pub fn new_weak(name: impl Into<String>, graph: Graph, group: Group, gens: Vec<GeneratorAction>) -> Result<Self, SystemError> {
        Self::build(name.into(), graph, group, gens, true)
    }

    /// The trivial group acting on `graph`.
    pub fn trivial(name: impl Into<String>, graph: Graph) -> Self {
        Self::new(name, graph, Group::Finite(crate::group::FiniteGroup::trivial()), Vec::new())
            .expect("trivial action is always valid")
    }

    fn build(name: String, graph: Graph, group: Group, gens: Vec<GeneratorAction>, weak: bool) -> Result<Self, SystemError> {
        if gens.len() != group.generator_count() {
            return Err(SystemError::GeneratorCount { expected: group.generator_count(), got: gens.len() });
        }
        let names = group.generator_names();
        for (k, a) in gens.iter().enumerate() {
            check_automorphism(&graph, &names[k], a)?;
            if a.cocycle.iter().any(|c| !group.owns(c)) {
                return Err(SystemError::BackendMismatch);
            }
        }
        let derived = match &group {
            Group::Automaton { .. } => {
                let inverse = gens.iter().map(|a| invert_action(&group, a)).collect();
                Derived::Words { inverse }
            }
            Group::Integer { .. } => {
                let a = &gens[0];
                let steps = a.cocycle.iter().map(|c| match c {
                    Elem::Int(k) => *k,
                    _ => unreachable!("checked by owns"),
                });
                Derived::Integer { vertices: Cycles::of(&a.vertex), edges: Cycles::of(&a.edge), steps: steps.collect() }
            }
            Group::Finite(f) => Derived::Finite { tables: finite_tables(&graph, &group, f, &gens)? },
        };
        let sys = System { name, graph, group, gens, derived, assertions: Assertions::default(), weak_hypothesis: weak };
        sys.check_standing_hypothesis(weak)?;
        Ok(sys)
    }

    fn check_standing_hypothesis(&self, weak: bool) -> Result<(), SystemError> {
        let names = self.group.generator_names();
        for (k, a) in self.gens.iter().enumerate() {
            let g = self.group.generator(k);
            for e in self.graph.edges() {
                let r = &a.cocycle[e];
                let xs: Vec<VertexId> = if weak { vec![self.graph.source(e)] } else { self.graph.vertices().collect() };
                for x in xs {
                    if self.act_vertex(r, x) != self.act_vertex(&g, x) {
                        return Err(SystemError::StandingHypothesisViolated {
                            g: names[k].clone(),
                            e: self.graph.edge_name(e).into(),
                            x: self.graph.vertex_name(x).into(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn with_assertions(mut self, assertions: Assertions) -> Self {
        self.assertions = assertions;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn generator_actions(&self) -> &[GeneratorAction] {
        &self.gens
    }

    pub fn uses_weak_hypothesis(&self) -> bool {
        self.weak_hypothesis
    }

    pub fn check_elem(&self, g: &Elem) -> Result<(), SystemError> {
        if self.group.owns(g) {
            Ok(())
        } else {
            Err(SystemError::BackendMismatch)
        }
    }

    pub fn identity(&self) -> Elem {
        self.group.identity()
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        self.group.mul(a, b)
    }

    pub fn inv(&self, a: &Elem) -> Elem {
        self.group.inv(a)
    }

    pub fn parse_elem(&self, text: &str) -> Result<Elem, SystemError> {
        Ok(self.group.parse(text)?)
    }

    pub fn show(&self, g: &Elem) -> String {
        self.group.display(g)
    }

    pub fn show_path(&self, p: &Path) -> String {
        p.display(&self.graph)
    }

    pub fn parse_path(&self, text: &str) -> Result<Path, SystemError> {
        Ok(self.graph.parse_path(text)?)
    }

    /// `g·x` for a vertex.
    pub fn act_vertex(&self, g: &Elem, x: VertexId) -> VertexId {
        match (&self.derived, g) {
            (Derived::Words { inverse }, Elem::Word(w)) => w.iter().rev().fold(x, |v, &l| {
                let k = (l.unsigned_abs() - 1) as usize;
                if l > 0 {
                    self.gens[k].vertex[v]
                } else {
                    inverse[k].vertex[v]
                }
            }),
            (Derived::Integer { vertices, .. }, Elem::Int(m)) => vertices.shift(x, *m),
            (Derived::Finite { tables }, Elem::Fin(i)) => tables[*i].vertex[x],
            _ => panic!("{}", SystemError::BackendMismatch),
        }
    }

    /// `(g·e, φ(g, e))` for an edge.
    pub fn act_edge(&self, g: &Elem, e: EdgeId) -> (EdgeId, Elem) {
        self.try_act_edge(g, e).expect("integer backend overflow")
    }

    /// As [`System::act_edge`], but `None` when an integer restriction leaves `i64`.
    pub fn try_act_edge(&self, g: &Elem, e: EdgeId) -> Option<(EdgeId, Elem)> {
        Some(match (&self.derived, g) {
            (Derived::Words { inverse }, Elem::Word(w)) => {
                let mut cur = e;
                let mut res = self.group.identity();
                for &l in w.iter().rev() {
                    let k = (l.unsigned_abs() - 1) as usize;
                    let table = if l > 0 { &self.gens[k] } else { &inverse[k] };
                    res = self.group.mul(&table.cocycle[cur], &res);
                    cur = table.edge[cur];
                }
                (cur, res)
            }
            (Derived::Integer { edges, steps, .. }, Elem::Int(m)) => {
                let (c, p) = edges.place[e];
                let cyc = &edges.cycles[c];
                let len = cyc.len() as i64;
                let q = m.div_euclid(len);
                let r = m.rem_euclid(len) as usize;
                let total: i128 = cyc.iter().map(|&x| steps[x] as i128).sum();
                let partial: i128 = (0..r).map(|k| steps[cyc[(p + k) % cyc.len()]] as i128).sum();
                let k = total.checked_mul(q as i128)?.checked_add(partial)?;
                (edges.shift(e, *m), Elem::Int(i64::try_from(k).ok()?))
            }
            (Derived::Finite { tables }, Elem::Fin(i)) => (tables[*i].edge[e], tables[*i].cocycle[e].clone()),
            _ => panic!("{}", SystemError::BackendMismatch),
        })
    }

    /// `(g·p, φ(g, p))`, threading the restriction edge by edge.
    pub fn act(&self, g: &Elem, p: &Path) -> (Path, Elem) {
        let range = self.act_vertex(g, p.range);
        let mut h = g.clone();
        let mut edges = Vec::with_capacity(p.len());
        for &e in &p.edges {
            let (e2, h2) = self.act_edge(&h, e);
            edges.push(e2);
            h = h2;
        }
        (Path { range, edges }, h)
    }

    pub fn act_path(&self, g: &Elem, p: &Path) -> Path {
        self.act(g, p).0
    }

    /// `φ(g, p)`; for a vertex this is `g` itself.
    pub fn restrict_path(&self, g: &Elem, p: &Path) -> Elem {
        self.act(g, p).1
    }

    /// Decides `g = 1`. Integers and finite tables answer exactly. Words are
    /// compared with the identity by a breadth-first bisimulation over their
    /// restrictions: `g = 1` iff every reachable restriction fixes every vertex
    /// and edge.
    pub fn is_identity(&self, g: &Elem, budget: SearchBudget) -> Verdict {
        match g {
            Elem::Int(m) => Verdict::from_bool(*m == 0, "", format!("{m} ≠ 0")),
            Elem::Fin(i) => Verdict::from_bool(*i == 0, "", format!("{} is not the identity", self.show(g))),
            Elem::Word(_) => self.word_is_identity(g, budget),
        }
    }

    fn word_is_identity(&self, g: &Elem, budget: SearchBudget) -> Verdict {
        let mut seen: HashSet<Elem> = HashSet::new();
        let mut queue: VecDeque<(Elem, Vec<EdgeId>)> = VecDeque::new();
        if !self.group.is_syntactic_identity(g) {
            seen.insert(g.clone());
            queue.push_back((g.clone(), Vec::new()));
        }
        while let Some((h, trail)) = queue.pop_front() {
            let along = |t: &[EdgeId]| {
                if t.is_empty() {
                    String::new()
                } else {
                    let names: Vec<&str> = t.iter().map(|&e| self.graph.edge_name(e)).collect();
                    format!(" after restricting along {}", names.join("."))
                }
            };
            for x in self.graph.vertices() {
                if self.act_vertex(&h, x) != x {
                    return Verdict::No(format!(
                        "{} moves vertex {}{}",
                        self.show(&h),
                        self.graph.vertex_name(x),
                        along(&trail)
                    ));
                }
            }
            for e in self.graph.edges() {
                let (e2, r) = self.act_edge(&h, e);
                if e2 != e {
                    return Verdict::No(format!("{} moves edge {}{}", self.show(&h), self.graph.edge_name(e), along(&trail)));
                }
                if !self.group.is_syntactic_identity(&r) && !seen.contains(&r) {
                    if seen.len() >= budget.max_states {
                        return Verdict::Unknown(format!("bisimulation exceeded {} states", budget.max_states));
                    }
                    seen.insert(r.clone());
                    let mut t = trail.clone();
                    t.push(e);
                    queue.push_back((r, t));
                }
            }
        }
        Verdict::Yes(format!("{} restriction states act trivially", seen.len()))
    }

    pub fn equal(&self, a: &Elem, b: &Elem, budget: SearchBudget) -> Verdict {
        if a == b {
            return Verdict::Yes("syntactically equal".into());
        }
        self.is_identity(&self.mul(a, &self.inv(b)), budget)
    }

    /// Vertex orbits: `orbit[v]` is the least vertex in the orbit of `v`.
    pub fn vertex_orbits(&self) -> Vec<VertexId> {
        let n = self.graph.vertex_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for a in &self.gens {
            for v in 0..n {
                let (x, y) = (find(&mut parent, v), find(&mut parent, a.vertex[v]));
                if x != y {
                    let (lo, hi) = if x < y { (x, y) } else { (y, x) };
                    parent[hi] = lo;
                }
            }
        }
        (0..n).map(|v| find(&mut parent, v)).collect()
    }

    /// Vertices in the orbit of `x`, each with the first generator word
    /// (breadth-first, generators in declared order) carrying `x` there.
    pub fn orbit_with_words(&self, x: VertexId) -> Vec<(VertexId, Elem)> {
        let mut out = vec![(x, self.identity())];
        let mut seen = HashMap::from([(x, 0usize)]);
        let mut i = 0;
        while i < out.len() {
            let (v, w) = out[i].clone();
            for k in 0..self.group.generator_count() {
                let s = self.group.generator(k);
                let y = self.gens[k].vertex[v];
                if let std::collections::hash_map::Entry::Vacant(slot) = seen.entry(y) {
                    slot.insert(out.len());
                    out.push((y, self.group.mul(&s, &w)));
                }
            }
            i += 1;
        }
        out
    }
}

fn check_automorphism(graph: &Graph, name: &str, a: &GeneratorAction) -> Result<(), SystemError> {
    let bad = |msg: String| Err(SystemError::NotAutomorphism(name.to_string(), msg));
    if a.vertex.len() != graph.vertex_count() || a.edge.len() != graph.edge_count() || a.cocycle.len() != graph.edge_count() {
        return bad("table sizes do not match the graph".into());
    }
    if !is_permutation(&a.vertex) {
        return bad("not a bijection on vertices".into());
    }
    if !is_permutation(&a.edge) {
        return bad("not a bijection on edges".into());
    }
    for e in graph.edges() {
        let f = a.edge[e];
        if graph.range(f) != a.vertex[graph.range(e)] || graph.source(f) != a.vertex[graph.source(e)] {
            return bad(format!("edge {} is not carried compatibly with r and d", graph.edge_name(e)));
        }
    }
    Ok(())
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    for &x in p {
        if x >= p.len() || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

fn invert_perm(p: &[usize]) -> Vec<usize> {
    let mut q = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        q[x] = i;
    }
    q
}

/// `s⁻¹·e` is the preimage of `e`, and `φ(s⁻¹, e) = φ(s, s⁻¹e)⁻¹`.
fn invert_action(group: &Group, a: &GeneratorAction) -> GeneratorAction {
    let edge = invert_perm(&a.edge);
    let cocycle = edge.iter().map(|&pre| group.inv(&a.cocycle[pre])).collect();
    GeneratorAction { vertex: invert_perm(&a.vertex), edge, cocycle }
}

fn finite_tables(
    graph: &Graph,
    group: &Group,
    f: &crate::group::FiniteGroup,
    gens: &[GeneratorAction],
) -> Result<Vec<GeneratorAction>, SystemError> {
    let n = f.order();
    let mut tables: Vec<Option<GeneratorAction>> = vec![None; n];
    tables[0] = Some(GeneratorAction::constant(graph, Elem::Fin(0)));
    // Fill by shortest words, then check every product s·x agrees.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&x| f.word(x).len());
    let step = |k: usize, t: &GeneratorAction| -> GeneratorAction {
        let s = &gens[k];
        GeneratorAction {
            vertex: t.vertex.iter().map(|&v| s.vertex[v]).collect(),
            edge: t.edge.iter().map(|&e| s.edge[e]).collect(),
            cocycle: graph.edges().map(|e| group.mul(&s.cocycle[t.edge[e]], &t.cocycle[e])).collect(),
        }
    };
    for &x in &order[1..] {
        let w = f.word(x);
        let tail = tail_element(f, &w[1..]);
        let t = tables[tail].clone().expect("shorter words are filled first");
        tables[x] = Some(step(w[0], &t));
    }
    let tables: Vec<GeneratorAction> = tables.into_iter().map(Option::unwrap).collect();
    for x in 0..n {
        for (k, &s) in f.generators().iter().enumerate() {
            let y = f.mul(s, x);
            if step(k, &tables[x]) != tables[y] {
                return Err(SystemError::CocycleInconsistent(format!(
                    "{}·{} computed two ways disagree",
                    f.names()[s],
                    f.names()[x]
                )));
            }
        }
    }
    Ok(tables)
}

fn tail_element(f: &crate::group::FiniteGroup, word: &[usize]) -> usize {
    word.iter().rev().fold(0, |acc, &k| f.mul(f.generators()[k], acc))
}
