//! Hausdorffness, minimality, effectiveness, local contractivity and the
//! simplicity verdicts assembled from them.

use crate::graph::{Graph, VertexId};
use crate::group::{Elem, Group};
use crate::sfp::{cylinder_status, element_ball, is_pseudo_free, sfp_verdict, CylinderStatus, SfpVerdict};
use crate::system::System;
use crate::verdict::{SearchBudget, Verdict};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyReport {
    pub hausdorff: Verdict,
    /// The element with infinitely many minimal strongly fixed paths, if one was found.
    pub hausdorff_witness: Option<Elem>,
    pub minimal: Verdict,
    pub effective: Verdict,
    pub locally_contracting: Verdict,
    pub simple_cstar: Verdict,
    pub simple_algebraic: Verdict,
    pub purely_infinite: Verdict,
    pub amenable: bool,
    pub field_char: Option<u64>,
    pub warnings: Vec<String>,
    pub coverage: String,
}

/// Finitely many minimal strongly fixed paths for every group element.
pub fn check_hausdorff(sys: &System, budget: SearchBudget) -> (Verdict, Option<Elem>) {
    if let Verdict::Yes(why) = is_pseudo_free(sys, budget) {
        return (Verdict::Yes(format!("pseudo-free: {why}")), None);
    }
    let (ball, complete) = element_ball(sys, budget);
    let mut open = 0usize;
    for g in &ball {
        match sfp_verdict(sys, g, budget).0 {
            SfpVerdict::Infinite { witness } => {
                return (
                    Verdict::No(format!("{} has infinitely many minimal strongly fixed paths: {witness}", sys.show(g))),
                    Some(g.clone()),
                )
            }
            SfpVerdict::Unknown { .. } => open += 1,
            SfpVerdict::Finite => {}
        }
    }
    if complete && open == 0 {
        (Verdict::Yes(format!("all {} nontrivial elements have finitely many", ball.len())), None)
    } else {
        (Verdict::Unknown(ball_coverage(ball.len(), complete, open)), None)
    }
}

fn ball_coverage(probed: usize, complete: bool, open: usize) -> String {
    let scope = if complete { "the whole group" } else { "a partial ball" };
    format!("no witness among {probed} probed elements of {scope}; {open} undecided")
}

/// `x ≫ y` for all pairs: `x ⇀ u ∼ y` for some `u`.
pub fn dominance(sys: &System) -> Vec<Vec<bool>> {
    let graph = sys.graph();
    let orbit = sys.vertex_orbits();
    graph
        .vertices()
        .map(|x| {
            let reach = graph.reachable_from(x);
            let mut hit = vec![false; graph.vertex_count()];
            for u in graph.vertices().filter(|&u| reach[u]) {
                hit[orbit[u]] = true;
            }
            graph.vertices().map(|y| hit[orbit[y]]).collect()
        })
        .collect()
}

/// Weak `G`-transitivity: every infinite path meets, for each `x`, a vertex
/// `v ≫ x`. Fails exactly when the vertices not dominating some `x` carry a circuit.
pub fn check_minimal(sys: &System) -> Verdict {
    let targets: Vec<VertexId> = sys.graph().vertices().collect();
    weak_transitivity(sys, &dominance(sys), &targets)
}

/// [`check_minimal`] restricted to the given target vertices.
pub fn weak_transitivity(sys: &System, dom: &[Vec<bool>], targets: &[VertexId]) -> Verdict {
    let graph = sys.graph();
    for &x in targets {
        let keep: Vec<bool> = graph.vertices().map(|v| !dom[v][x]).collect();
        if let Some(v) = vertex_on_circuit(graph, &keep) {
            return Verdict::No(format!(
                "an infinite path through {} never meets a vertex u with u ≫ {}",
                graph.vertex_name(v),
                graph.vertex_name(x)
            ));
        }
    }
    let transitive = targets.iter().all(|&x| graph.vertices().all(|v| dom[v][x]));
    Verdict::Yes(if transitive { "G-transitive".into() } else { "weakly G-transitive".into() })
}

/// A vertex on a circuit of the subgraph induced by `keep`.
fn vertex_on_circuit(graph: &Graph, keep: &[bool]) -> Option<VertexId> {
    // Peel vertices without kept incoming edges; what remains lies on or behind a circuit.
    let n = graph.vertex_count();
    let mut indeg: Vec<usize> = (0..n)
        .map(|v| if keep[v] { graph.edges_into(v).iter().filter(|&&e| keep[graph.source(e)]).count() } else { 0 })
        .collect();
    let mut alive = keep.to_vec();
    let mut stack: Vec<VertexId> = (0..n).filter(|&v| alive[v] && indeg[v] == 0).collect();
    while let Some(v) = stack.pop() {
        alive[v] = false;
        for &e in graph.edges_out_of(v) {
            let w = graph.range(e);
            if alive[w] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    stack.push(w);
                }
            }
        }
    }
    let start = (0..n).find(|&v| alive[v])?;
    // Walk backwards inside the survivors until a vertex repeats.
    let mut seen = vec![false; n];
    let mut v = start;
    while !seen[v] {
        seen[v] = true;
        let e = graph.edges_into(v).iter().find(|&&e| alive[graph.source(e)]).expect("survivors have kept predecessors");
        v = graph.source(*e);
    }
    Some(v)
}

/// Every circuit has an entry.
pub fn check_locally_contracting(sys: &System) -> Verdict {
    let graph = sys.graph();
    if graph.condition_l() {
        Verdict::Yes("every circuit has an entry".into())
    } else {
        let c = crate::graph::simple_cycles(graph)
            .into_iter()
            .find(|c| !graph.circuit_has_entry(c).unwrap_or(true))
            .map(|c| sys.show_path(&c))
            .unwrap_or_default();
        Verdict::No(format!("circuit {c} has no entry"))
    }
}

/// Every `G`-circuit has an entry, and every `g` fixing a cylinder `Z(x)`
/// pointwise is slack at `x`.
pub fn check_effective(sys: &System, budget: SearchBudget) -> Verdict {
    let graph = sys.graph();
    if let Verdict::No(why) = check_locally_contracting(sys) {
        return Verdict::No(why);
    }
    if graph.vertex_count() == 1 && graph.edge_count() >= 2 && sys.assertions.faithful {
        return Verdict::Yes("single vertex, at least two edges, faithful action asserted".into());
    }
    if let Group::Integer { .. } = sys.group() {
        if let Some(why) = integer_moves_every_cylinder(sys) {
            return Verdict::Yes(why);
        }
    }
    let (ball, complete) = element_ball(sys, budget);
    let mut open = 0usize;
    for g in &ball {
        for x in graph.vertices() {
            match cylinder_status(sys, g, x, budget) {
                CylinderStatus::FixedNotSlack(why) => {
                    return Verdict::No(format!(
                        "{} fixes Z({}) pointwise but is not slack there: {why}",
                        sys.show(g),
                        graph.vertex_name(x)
                    ))
                }
                CylinderStatus::Moves(_) | CylinderStatus::Slack(_) => {}
                CylinderStatus::NotSlack(_) | CylinderStatus::Unknown(_) => open += 1,
            }
        }
    }
    if complete && open == 0 {
        Verdict::Yes(format!("every circuit has an entry; all {} nontrivial elements checked on every cylinder", ball.len()))
    } else {
        Verdict::Unknown(format!("every circuit has an entry; cylinder clause: {}", ball_coverage(ball.len(), complete, open)))
    }
}

/// For `ℤ` acting through `t`: every `m ≠ 0` moves some infinite path in every
/// nonempty cylinder, certified by contracting loops.
///
/// An edge orbit of length `L` with restriction sum `S` is fixed by `m` only
/// when `L | m`, and then passes on `mS/L`. A loop whose orbit has
/// `0 < |S| < L` strictly shrinks `m` until it is moved. A vertex is covered
/// when such a loop reaches it through edges whose orbit sums are nonzero.
fn integer_moves_every_cylinder(sys: &System) -> Option<String> {
    let graph = sys.graph();
    let t = Elem::Int(1);
    let mut orbit_len = vec![0i64; graph.edge_count()];
    let mut orbit_sum = vec![0i64; graph.edge_count()];
    for e in graph.edges() {
        let mut len = 1i64;
        let mut cur = sys.act_edge(&t, e).0;
        while cur != e {
            cur = sys.act_edge(&t, cur).0;
            len += 1;
        }
        orbit_len[e] = len;
        orbit_sum[e] = match sys.act_edge(&Elem::Int(len), e).1 {
            Elem::Int(s) => s,
            _ => return None,
        };
    }
    let contracting = |e: usize| {
        let (l, s) = (orbit_len[e], orbit_sum[e]);
        graph.source(e) == graph.range(e) && s != 0 && s.abs() < l
    };
    let live = graph.infinite_path_vertices();
    let mut covered = vec![false; graph.vertex_count()];
    let mut stack: Vec<VertexId> = graph.edges().filter(|&e| contracting(e)).map(|e| graph.range(e)).collect();
    for &v in &stack {
        covered[v] = true;
    }
    while let Some(v) = stack.pop() {
        for &e in graph.edges_out_of(v) {
            let w = graph.range(e);
            if orbit_sum[e] != 0 && !covered[w] {
                covered[w] = true;
                stack.push(w);
            }
        }
    }
    let loops = graph.edges().filter(|&e| contracting(e)).count();
    graph
        .vertices()
        .all(|v| covered[v] || !live[v])
        .then(|| format!("every circuit has an entry; {loops} contracting loops move every m ≠ 0 on every cylinder"))
}

/// Assembles the component checks into simplicity and pure infiniteness verdicts.
pub fn simplicity_report(sys: &System, amenable: bool, field_char: Option<u64>, budget: SearchBudget) -> PropertyReport {
    let (hausdorff, witness) = check_hausdorff(sys, budget);
    let minimal = check_minimal(sys);
    let effective = check_effective(sys, budget);
    let locally_contracting = check_locally_contracting(sys);
    assemble_report(sys, hausdorff, witness, minimal, effective, locally_contracting, amenable, field_char, budget)
}

#[allow(clippy::too_many_arguments)]
pub fn assemble_report(
    sys: &System,
    hausdorff: Verdict,
    hausdorff_witness: Option<Elem>,
    minimal: Verdict,
    effective: Verdict,
    locally_contracting: Verdict,
    amenable: bool,
    field_char: Option<u64>,
    budget: SearchBudget,
) -> PropertyReport {
    let assemble = |need_amenable: bool| -> Verdict {
        if hausdorff.is_no() {
            return Verdict::Unknown(
                "non-Hausdorff: minimality and effectiveness do not decide simplicity; a singular-function \
                 criterion would be needed"
                    .into(),
            );
        }
        if let Some(v) = [&minimal, &effective].into_iter().find(|v| v.is_no()) {
            return Verdict::No(format!("a necessary condition fails: {}", v.detail()));
        }
        if !hausdorff.is_yes() || !minimal.is_yes() || !effective.is_yes() {
            return Verdict::Unknown("some component check is undecided".into());
        }
        if need_amenable && !amenable {
            return Verdict::Unknown("Hausdorff, minimal and effective; amenability not asserted".into());
        }
        Verdict::Yes("Hausdorff, minimal and effective".to_string() + if need_amenable { ", amenable" } else { "" })
    };
    let simple_cstar = assemble(true);
    let simple_algebraic = assemble(false);
    let mut warnings = Vec::new();
    if hausdorff.is_no() {
        warnings.push(
            "non-Hausdorff groupoid: simplicity of the algebra over a field can depend on its characteristic \
             (characteristic 2 is a known failure case for contracting self-similar groups)"
                .to_string(),
        );
        if field_char == Some(2) {
            warnings.push("field characteristic 2 requested: algebraic simplicity is not predicted".to_string());
        }
    }
    let purely_infinite = match (&simple_cstar, &hausdorff) {
        (Verdict::Yes(_), Verdict::Yes(_)) => Verdict::Yes("simple with Hausdorff groupoid".into()),
        _ => Verdict::Unknown("follows only from simplicity with a Hausdorff groupoid".into()),
    };
    let (ball, complete) = element_ball(sys, budget);
    let coverage = format!(
        "max_states={} max_depth={} ball={}{}",
        budget.max_states,
        budget.max_depth,
        ball.len(),
        if complete { " (complete)" } else { " (partial)" }
    );
    PropertyReport {
        hausdorff,
        hausdorff_witness,
        minimal,
        effective,
        locally_contracting,
        simple_cstar,
        simple_algebraic,
        purely_infinite,
        amenable,
        field_char,
        warnings,
        coverage,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::group::FiniteGroup;

    #[test]
    fn grigorchuk() {
        let s = fixtures::grigorchuk();
        let r = simplicity_report(&s, true, None, SearchBudget::default());
        assert!(r.hausdorff.is_no());
        assert_eq!(r.hausdorff_witness, Some(s.parse_elem("b").unwrap()));
        assert!(r.minimal.is_yes());
        assert!(r.effective.is_yes());
        assert!(r.simple_cstar.is_unknown());
        assert!(!r.warnings.is_empty());
    }

    #[test]
    fn katsura() {
        let k = fixtures::katsura();
        let b = SearchBudget::default();
        assert!(check_hausdorff(&k, b).0.is_no());
        assert!(check_minimal(&k).is_yes());
        assert!(check_effective(&k, b).is_yes());
        assert!(check_locally_contracting(&k).is_yes());
    }

    #[test]
    fn cuntz_is_purely_infinite() {
        let s = fixtures::cuntz(2);
        let r = simplicity_report(&s, true, None, SearchBudget::default());
        assert!(r.hausdorff.is_yes());
        assert!(r.simple_cstar.is_yes());
        assert!(r.purely_infinite.is_yes());
    }

    #[test]
    fn single_loop_fails() {
        let s = fixtures::single_loop();
        assert!(check_locally_contracting(&s).is_no());
        assert!(check_effective(&s, SearchBudget::default()).is_no());
        assert!(check_minimal(&s).is_yes());
    }

    #[test]
    fn disjoint_loops_not_minimal() {
        let g = Graph::from_parts(
            ["x", "y"],
            [("a".to_string(), "x".to_string(), "x".to_string()), ("b".to_string(), "y".to_string(), "y".to_string())],
        )
        .unwrap();
        assert!(check_minimal(&System::trivial("two", g)).is_no());
    }

    #[test]
    fn crossed_product_is_not_effective() {
        // φ(g, e) = g: a nontrivial g fixes every path and is never slack.
        let s = fixtures::crossed_product(FiniteGroup::cyclic(2), 2);
        let b = SearchBudget::default();
        assert!(check_hausdorff(&s, b).0.is_yes());
        assert!(check_effective(&s, b).is_no());
        let r = simplicity_report(&s, true, None, b);
        assert!(r.simple_cstar.is_no());
    }
}
