//! Minimal strongly fixed paths of the Grigorchuk generators.

use selfsim::sfp::{minimal_strongly_fixed, verify_report};
use selfsim::{fixtures, SearchBudget};

fn main() {
    let grig = fixtures::grigorchuk();
    let budget = SearchBudget::default().with_depth(8);
    for name in ["a", "b", "c", "d", "a b"] {
        let g = grig.parse_elem(name).unwrap();
        let report = minimal_strongly_fixed(&grig, &g, budget);
        let paths: Vec<String> = report.paths.iter().map(|p| grig.show_path(p)).collect();
        println!("{name:>4}: {:?} [{}]", report.verdict, paths.join(", "));
        verify_report(&grig, &report, budget).expect("report replays");
    }
}
