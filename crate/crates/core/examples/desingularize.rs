//! Attaches an infinite tail to a source and checks properties through the bridge.

use selfsim::desing::{countable_property_bridge, desingularize_all_sources};
use selfsim::format::parse_system;
use selfsim::SearchBudget;

const SYSTEM: &str = "system source
graph {
  vertices: v w
  edge l: v -> v
  edge m: v -> v
  edge a: w -> v
}
backend automaton {
  generators: x
}
";

fn main() {
    let sys = parse_system(SYSTEM).unwrap();
    let tails = desingularize_all_sources(&sys).unwrap();
    for level in [1, 3] {
        let m = tails.materialize(level).unwrap();
        let g = m.system.graph();
        let frontier: Vec<&str> = m.frontier.iter().map(|&v| g.vertex_name(v)).collect();
        println!("level {level}: {} vertices, {} edges, frontier {frontier:?}", g.vertex_count(), g.edge_count());
    }
    let report = countable_property_bridge(&tails, 4, true, Some(0), SearchBudget::default()).unwrap();
    println!("minimal             {}", report.minimal);
    println!("locally contracting {}", report.locally_contracting);
    for w in &report.warnings {
        println!("warning: {w}");
    }
}
