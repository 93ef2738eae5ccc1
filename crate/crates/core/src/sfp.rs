//! Strongly fixed paths, pseudo-freeness, slackness and `G`-circuits.
//!
//! A path `τ` is strongly fixed by `g` when `gτ = τ` and `φ(g, τ) = 1`. The
//! searches here run over abstract states `(h, v)`: the current restriction
//! `h` and the vertex `v = d(τ)` the path has reached.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use crate::graph::{EdgeId, Path, VertexId};
use crate::group::{Elem, Group};
use crate::groupoid::{EpPath, InfiniteImage};
use crate::system::System;
use crate::verdict::{SearchBudget, Verdict};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SfpVerdict {
    /// The listed paths are all minimal strongly fixed paths.
    Finite,
    /// A reachable cycle of restriction states with a strongly fixed exit.
    Infinite { witness: String },
    Unknown { reason: String },
}

impl SfpVerdict {
    pub fn is_infinite(&self) -> bool {
        matches!(self, SfpVerdict::Infinite { .. })
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, SfpVerdict::Finite)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SfpReport {
    pub element: Elem,
    /// Minimal strongly fixed paths up to the listing depth, shortest first.
    pub paths: Vec<Path>,
    pub listing_depth: usize,
    pub verdict: SfpVerdict,
    pub states_explored: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Ident {
    Yes,
    No,
    Unknown,
}

struct StateGraph {
    states: Vec<(Elem, VertexId)>,
    ident: Vec<Ident>,
    /// For each state: edges kept fixed with the state they lead to, or `None`
    /// when the restriction is trivial there.
    moves: Vec<Vec<(EdgeId, Option<usize>)>>,
    roots: Vec<usize>,
    complete: bool,
}

fn classify(sys: &System, h: &Elem, budget: SearchBudget, memo: &mut HashMap<Elem, Ident>) -> Ident {
    if let Some(&v) = memo.get(h) {
        return v;
    }
    let v = match sys.is_identity(h, budget) {
        Verdict::Yes(_) => Ident::Yes,
        Verdict::No(_) => Ident::No,
        Verdict::Unknown(_) => Ident::Unknown,
    };
    memo.insert(h.clone(), v);
    v
}

/// Explores the states `(φ(g, τ), d(τ))` over paths `τ` fixed by `g` that are
/// not yet strongly fixed, starting from the vertices `starts` fixed by `g`.
fn explore(sys: &System, g: &Elem, starts: &[VertexId], budget: SearchBudget, live_only: Option<&[bool]>) -> StateGraph {
    let graph = sys.graph();
    let mut memo = HashMap::new();
    let mut index: HashMap<(Elem, VertexId), usize> = HashMap::new();
    let mut sg = StateGraph { states: Vec::new(), ident: Vec::new(), moves: Vec::new(), roots: Vec::new(), complete: true };
    let mut queue = VecDeque::new();
    for &v in starts {
        let key = (g.clone(), v);
        let id = sg.states.len();
        index.insert(key.clone(), id);
        sg.states.push(key);
        sg.ident.push(classify(sys, g, budget, &mut memo));
        sg.moves.push(Vec::new());
        sg.roots.push(id);
        queue.push_back(id);
    }
    while let Some(id) = queue.pop_front() {
        let (h, v) = sg.states[id].clone();
        for &e in graph.edges_into(v) {
            if let Some(live) = live_only {
                if !live[graph.source(e)] {
                    continue;
                }
            }
            let Some((e2, r)) = sys.try_act_edge(&h, e) else {
                sg.complete = false;
                continue;
            };
            if e2 != e {
                continue;
            }
            let ident = classify(sys, &r, budget, &mut memo);
            if ident == Ident::Yes {
                sg.moves[id].push((e, None));
                continue;
            }
            let key = (r, graph.source(e));
            let next = match index.get(&key) {
                Some(&n) => n,
                None => {
                    if sg.states.len() >= budget.max_states {
                        sg.complete = false;
                        continue;
                    }
                    let n = sg.states.len();
                    index.insert(key.clone(), n);
                    sg.states.push(key);
                    sg.ident.push(ident);
                    sg.moves.push(Vec::new());
                    queue.push_back(n);
                    n
                }
            };
            sg.moves[id].push((e, Some(next)));
        }
    }
    sg
}

/// States from which a strongly fixed exit is reachable.
fn productive(sg: &StateGraph) -> Vec<bool> {
    let n = sg.states.len();
    let mut prod: Vec<bool> = (0..n).map(|i| sg.moves[i].iter().any(|(_, t)| t.is_none())).collect();
    loop {
        let mut changed = false;
        for i in 0..n {
            if !prod[i] && sg.moves[i].iter().any(|(_, t)| matches!(t, Some(j) if prod[*j])) {
                prod[i] = true;
                changed = true;
            }
        }
        if !changed {
            return prod;
        }
    }
}

/// A cycle through states satisfying `keep`, as a list of `(state, edge)` steps.
fn find_cycle(sg: &StateGraph, keep: &dyn Fn(usize) -> bool) -> Option<Vec<(usize, EdgeId)>> {
    let n = sg.states.len();
    let mut color = vec![0u8; n];
    let mut stack_path: Vec<(usize, EdgeId)> = Vec::new();
    fn dfs(
        sg: &StateGraph,
        u: usize,
        keep: &dyn Fn(usize) -> bool,
        color: &mut [u8],
        path: &mut Vec<(usize, EdgeId)>,
    ) -> Option<Vec<(usize, EdgeId)>> {
        color[u] = 1;
        for &(e, t) in &sg.moves[u] {
            let Some(w) = t else { continue };
            if !keep(w) {
                continue;
            }
            path.push((u, e));
            if color[w] == 1 {
                let start = path.iter().position(|&(s, _)| s == w).unwrap();
                return Some(path[start..].to_vec());
            }
            if color[w] == 0 {
                if let Some(c) = dfs(sg, w, keep, color, path) {
                    return Some(c);
                }
            }
            path.pop();
        }
        color[u] = 2;
        None
    }
    for &r in &sg.roots {
        if keep(r) && color[r] == 0 {
            if let Some(c) = dfs(sg, r, keep, &mut color, &mut stack_path) {
                return Some(c);
            }
        }
    }
    None
}

fn describe_cycle(sys: &System, sg: &StateGraph, cycle: &[(usize, EdgeId)]) -> String {
    let mut s = String::new();
    for &(st, e) in cycle {
        write!(s, "{} --{}--> ", sys.show(&sg.states[st].0), sys.graph().edge_name(e)).unwrap();
    }
    s.push_str(&sys.show(&sg.states[cycle[0].0].0));
    s
}

/// Whether `g` has finitely many minimal strongly fixed paths, without listing them.
pub fn sfp_verdict(sys: &System, g: &Elem, budget: SearchBudget) -> (SfpVerdict, usize) {
    if sys.is_identity(g, budget).is_yes() {
        return (SfpVerdict::Finite, 0);
    }
    let (verdict, sg, _) = search(sys, g, budget);
    (verdict, sg.states.len())
}

fn search(sys: &System, g: &Elem, budget: SearchBudget) -> (SfpVerdict, StateGraph, Vec<bool>) {
    let starts: Vec<VertexId> = sys.graph().vertices().filter(|&v| sys.act_vertex(g, v) == v).collect();
    let sg = explore(sys, g, &starts, budget, None);
    let prod = productive(&sg);
    let decided = |i: usize| sg.ident[i] == Ident::No;
    let cycle = find_cycle(&sg, &|i| prod[i] && decided(i));
    let tainted = sg.ident.contains(&Ident::Unknown);
    let verdict = match (&cycle, sg.complete && !tainted) {
        (Some(c), _) => {
            let exit = exit_from(sys, &sg, &prod, c[0].0);
            SfpVerdict::Infinite { witness: format!("cycle {}; exit {}", describe_cycle(sys, &sg, c), exit) }
        }
        (None, true) => SfpVerdict::Finite,
        (None, false) => SfpVerdict::Unknown {
            reason: if tainted {
                "identity test inconclusive for some restriction".into()
            } else {
                format!("state budget {} exhausted", budget.max_states)
            },
        },
    };
    (verdict, sg, prod)
}

/// Minimal strongly fixed paths of `g`, listed up to `budget.max_depth`, with
/// a verdict on whether there are finitely many.
///
/// The listing stops early, lowering `listing_depth`, once a layer would hold
/// more than `budget.max_states` partial paths.
pub fn minimal_strongly_fixed(sys: &System, g: &Elem, budget: SearchBudget) -> SfpReport {
    if sys.is_identity(g, budget).is_yes() {
        let paths = sys.graph().vertices().map(|v| sys.graph().vertex_path(v)).collect();
        return SfpReport { element: g.clone(), paths, listing_depth: 0, verdict: SfpVerdict::Finite, states_explored: 0 };
    }
    let (verdict, sg, prod) = search(sys, g, budget);
    // Without a productive cycle all minimal paths are shorter than the state count.
    let mut listing_depth = if verdict.is_finite() { budget.max_depth.max(sg.states.len()) } else { budget.max_depth };
    let mut paths = Vec::new();
    let mut layer: Vec<(usize, Path)> =
        sg.roots.iter().map(|&r| (r, sys.graph().vertex_path(sg.states[r].1))).collect();
    for depth in 0..listing_depth {
        let mut next = Vec::new();
        let mut found = Vec::new();
        for (st, p) in &layer {
            for &(e, t) in &sg.moves[*st] {
                let mut q = p.clone();
                q.edges.push(e);
                match t {
                    None => found.push(q),
                    Some(n) if prod[n] => next.push((n, q)),
                    Some(_) => {}
                }
            }
        }
        if found.len() + next.len() > budget.max_states {
            listing_depth = depth;
            break;
        }
        paths.extend(found);
        layer = next;
        if layer.is_empty() {
            break;
        }
    }
    paths.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    SfpReport { element: g.clone(), paths, listing_depth, verdict, states_explored: sg.states.len() }
}

/// Shortest path from a state to a strongly fixed exit, written as edges.
fn exit_from(sys: &System, sg: &StateGraph, prod: &[bool], from: usize) -> String {
    let mut prev: HashMap<usize, (usize, EdgeId)> = HashMap::new();
    let mut queue = VecDeque::from([from]);
    let mut seen = vec![false; sg.states.len()];
    seen[from] = true;
    while let Some(u) = queue.pop_front() {
        for &(e, t) in &sg.moves[u] {
            match t {
                None => {
                    let mut edges = vec![e];
                    let mut cur = u;
                    while cur != from {
                        let (p, pe) = prev[&cur];
                        edges.push(pe);
                        cur = p;
                    }
                    edges.reverse();
                    let names: Vec<&str> = edges.iter().map(|&x| sys.graph().edge_name(x)).collect();
                    return format!("{} reaches the identity from {}", names.join("."), sys.show(&sg.states[from].0));
                }
                Some(w) if prod[w] && !seen[w] => {
                    seen[w] = true;
                    prev.insert(w, (u, e));
                    queue.push_back(w);
                }
                _ => {}
            }
        }
    }
    "none".into()
}

/// Rechecks a report: every listed path is strongly fixed and no listed path
/// is a proper prefix of another.
pub fn verify_report(sys: &System, report: &SfpReport, budget: SearchBudget) -> Result<(), String> {
    for p in &report.paths {
        let (img, r) = sys.act(&report.element, p);
        if img != *p {
            return Err(format!("{} is not fixed", sys.show_path(p)));
        }
        if !sys.is_identity(&r, budget).is_yes() {
            return Err(format!("{} is fixed but not strongly fixed", sys.show_path(p)));
        }
        for q in &report.paths {
            if q != p && q.is_prefix_of(p) {
                return Err(format!("{} has the listed prefix {}", sys.show_path(p), sys.show_path(q)));
            }
        }
    }
    Ok(())
}

/// Elements to probe when a property quantifies over all of `G`.
///
/// Finite groups are listed completely. The integers are listed up to
/// `|m| ≤ max_depth`. For words, generators and their inverses come first,
/// followed by restrictions and short products, up to `max_states / 500`
/// elements. The flag reports whether the whole group was covered.
pub fn element_ball(sys: &System, budget: SearchBudget) -> (Vec<Elem>, bool) {
    let grp = sys.group();
    match grp {
        Group::Finite(f) => ((1..f.order()).map(Elem::Fin).collect(), true),
        Group::Integer { .. } => {
            let r = budget.max_depth.max(1) as i64;
            ((1..=r).flat_map(|m| [Elem::Int(m), Elem::Int(-m)]).collect(), false)
        }
        Group::Automaton { .. } => {
            let cap = (budget.max_states / 500).max(grp.generator_count() * 2);
            let mut out: Vec<Elem> = Vec::new();
            let mut seen = std::collections::HashSet::new();
            let mut queue = VecDeque::new();
            let n = grp.generator_count();
            let letters: Vec<Elem> =
                (0..n).map(|k| grp.generator(k)).chain((0..n).map(|k| grp.inv(&grp.generator(k)))).collect();
            for l in &letters {
                if seen.insert(l.clone()) {
                    queue.push_back(l.clone());
                }
            }
            while let Some(g) = queue.pop_front() {
                if out.len() >= cap {
                    break;
                }
                out.push(g.clone());
                let mut nbrs: Vec<Elem> = sys.graph().edges().map(|e| sys.act_edge(&g, e).1).collect();
                if let Elem::Word(w) = &g {
                    if w.len() < budget.max_depth {
                        nbrs.extend(letters.iter().map(|l| grp.mul(&g, l)));
                    }
                }
                for h in nbrs {
                    if !grp.is_syntactic_identity(&h) && seen.insert(h.clone()) {
                        queue.push_back(h);
                    }
                }
            }
            (out, false)
        }
    }
}

/// `ge = e` and `φ(g, e) = 1` force `g = 1`.
pub fn is_pseudo_free(sys: &System, budget: SearchBudget) -> Verdict {
    let graph = sys.graph();
    match sys.group() {
        Group::Integer { .. } => {
            // m fixes e iff the t-orbit length L of e divides m, and then
            // φ(m, e) = (m / L)·S where S sums φ(t, ·) over the orbit.
            let t = Elem::Int(1);
            for e in graph.edges() {
                let mut len = 1i64;
                let mut cur = sys.act_edge(&t, e).0;
                while cur != e {
                    cur = sys.act_edge(&t, cur).0;
                    len += 1;
                }
                if sys.act_edge(&Elem::Int(len), e).1 == Elem::Int(0) {
                    return Verdict::No(format!("{len} fixes {} with trivial restriction", graph.edge_name(e)));
                }
            }
            Verdict::Yes("every edge orbit of the generator has nonzero restriction sum".into())
        }
        _ => {
            let (ball, complete) = element_ball(sys, budget);
            let mut inconclusive = false;
            for g in &ball {
                for e in graph.edges() {
                    let (e2, r) = sys.act_edge(g, e);
                    if e2 != e || !sys.is_identity(&r, budget).is_yes() {
                        continue;
                    }
                    match sys.is_identity(g, budget) {
                        Verdict::No(_) => {
                            return Verdict::No(format!(
                                "{} fixes {} with trivial restriction",
                                sys.show(g),
                                graph.edge_name(e)
                            ))
                        }
                        Verdict::Unknown(_) => inconclusive = true,
                        Verdict::Yes(_) => {}
                    }
                }
            }
            if complete && !inconclusive {
                Verdict::Yes(format!("all {} nontrivial elements checked", ball.len()))
            } else {
                Verdict::Unknown(format!("no witness among {} probed elements", ball.len()))
            }
        }
    }
}

/// How `g` behaves on the cylinder `Z(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CylinderStatus {
    /// Some infinite path in `Z(x)` is moved.
    Moves(String),
    /// `g` is slack at `x`, so it fixes `Z(x)` pointwise.
    Slack(String),
    /// `g` fixes `Z(x)` pointwise without being slack there.
    FixedNotSlack(String),
    /// Not slack; whether `Z(x)` is fixed pointwise was not settled.
    NotSlack(String),
    Unknown(String),
}

pub fn cylinder_status(sys: &System, g: &Elem, x: VertexId, budget: SearchBudget) -> CylinderStatus {
    let graph = sys.graph();
    let live = graph.infinite_path_vertices();
    if !live[x] {
        return CylinderStatus::Slack(format!("Z({}) is empty", graph.vertex_name(x)));
    }
    if sys.act_vertex(g, x) != x {
        return CylinderStatus::Moves(format!("{} moves {}", sys.show(g), graph.vertex_name(x)));
    }
    match sys.is_identity(g, budget) {
        Verdict::Yes(_) => return CylinderStatus::Slack("n = 0".into()),
        Verdict::Unknown(r) => return CylinderStatus::Unknown(r),
        Verdict::No(_) => {}
    }
    // Moves are recorded separately: `explore` drops moved edges.
    let sg = explore(sys, g, &[x], budget, Some(&live));
    for (h, v) in &sg.states {
        for &e in graph.edges_into(*v) {
            if live[graph.source(e)] && sys.try_act_edge(h, e).is_some_and(|(e2, _)| e2 != e) {
                return CylinderStatus::Moves(format!(
                    "restriction {} at vertex {} moves {}",
                    sys.show(h),
                    graph.vertex_name(*v),
                    graph.edge_name(e)
                ));
            }
        }
    }
    let settled = sg.complete && !sg.ident.contains(&Ident::Unknown);
    if let Some(c) = find_cycle(&sg, &|i| sg.ident[i] == Ident::No) {
        let why = format!("restrictions never trivialize along {}", describe_cycle(sys, &sg, &c));
        return if settled { CylinderStatus::FixedNotSlack(why) } else { CylinderStatus::NotSlack(why) };
    }
    if !settled {
        return CylinderStatus::Unknown(format!("state budget {} exhausted", budget.max_states));
    }
    // No cycles: the state graph is a DAG; its depth bounds the fixing level.
    CylinderStatus::Slack(format!("n = {}", dag_depth(&sg) + graph.vertex_count()))
}

/// Whether every sufficiently long path with range `x` is strongly fixed by `g`.
pub fn slack_at(sys: &System, g: &Elem, x: VertexId, budget: SearchBudget) -> Verdict {
    match cylinder_status(sys, g, x, budget) {
        CylinderStatus::Slack(w) => Verdict::Yes(w),
        CylinderStatus::Moves(w) | CylinderStatus::FixedNotSlack(w) | CylinderStatus::NotSlack(w) => Verdict::No(w),
        CylinderStatus::Unknown(w) => Verdict::Unknown(w),
    }
}

fn dag_depth(sg: &StateGraph) -> usize {
    fn go(sg: &StateGraph, u: usize, memo: &mut HashMap<usize, usize>) -> usize {
        if let Some(&d) = memo.get(&u) {
            return d;
        }
        let d = sg.moves[u]
            .iter()
            .map(|&(_, t)| match t {
                None => 1,
                Some(w) => 1 + go(sg, w, memo),
            })
            .max()
            .unwrap_or(0);
        memo.insert(u, d);
        d
    }
    let mut memo = HashMap::new();
    sg.roots.iter().map(|&r| go(sg, r, &mut memo)).max().unwrap_or(0)
}

/// Iterates `γⁿ⁺¹ = gₙγⁿ`, `gₙ₊₁ = φ(gₙ, γⁿ)` from `γ¹ = γ`, `g₁ = g`, and
/// returns `ξ = γ¹γ²γ³…` once a state `(gₙ, γⁿ)` repeats.
pub fn g_circuit_fixed_point(sys: &System, g: &Elem, gamma: &Path, depth: usize) -> Result<InfiniteImage, String> {
    let graph = sys.graph();
    if gamma.is_empty() || gamma.source(graph) != sys.act_vertex(g, gamma.range) {
        return Err(format!("({}, {}) is not a G-circuit", sys.show(g), sys.show_path(gamma)));
    }
    let mut seen: HashMap<(Elem, Vec<EdgeId>), usize> = HashMap::new();
    let mut blocks: Vec<Vec<EdgeId>> = Vec::new();
    let (mut gn, mut cur) = (g.clone(), gamma.clone());
    for step in 0..depth.max(1) {
        let key = (gn.clone(), cur.edges.clone());
        if let Some(&i) = seen.get(&key) {
            let prefix: Vec<EdgeId> = blocks[..i].concat();
            let cycle: Vec<EdgeId> = blocks[i..].concat();
            return Ok(InfiniteImage::Periodic(EpPath::new(graph, gamma.range, prefix, cycle)));
        }
        seen.insert(key, step);
        blocks.push(cur.edges.clone());
        let (next, r) = sys.act(&gn, &cur);
        gn = r;
        cur = next;
    }
    Ok(InfiniteImage::Prefix(Path { range: gamma.range, edges: blocks.concat() }))
}
