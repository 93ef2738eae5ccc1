//! Condition (L), simple cycles and minimality on small graphs.

use selfsim::graph::simple_cycles;
use selfsim::props::check_minimal;
use selfsim::{Graph, System};

fn main() {
    let graphs = [
        ("loop", vec!["v"], vec![("e", "v", "v")]),
        ("two loops", vec!["v"], vec![("e", "v", "v"), ("f", "v", "v")]),
        ("cycle with entry", vec!["u", "v"], vec![("e", "u", "v"), ("f", "v", "u"), ("g", "u", "u")]),
        ("disjoint loops", vec!["u", "v"], vec![("e", "u", "u"), ("f", "v", "v")]),
    ];
    for (name, vertices, edges) in graphs {
        let edges = edges.into_iter().map(|(e, s, r)| (e.to_string(), s.to_string(), r.to_string()));
        let g = Graph::from_parts(vertices, edges).unwrap();
        let cycles: Vec<String> = simple_cycles(&g).iter().map(|c| c.display(&g)).collect();
        let sys = System::trivial(name, g);
        println!(
            "{name:<17} cycles {:<12} (L) {:<5} minimal {}",
            cycles.join(","),
            sys.graph().condition_l(),
            check_minimal(&sys)
        );
    }
}
