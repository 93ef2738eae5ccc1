//! Hausdorffness, minimality, effectiveness and simplicity for the bundled systems.

use selfsim::props::simplicity_report;
use selfsim::{fixtures, SearchBudget};

fn main() {
    let budget = SearchBudget::default();
    for sys in [fixtures::grigorchuk(), fixtures::katsura(), fixtures::cuntz(3), fixtures::single_loop()] {
        let r = simplicity_report(&sys, true, Some(0), budget);
        println!("{}", sys.name());
        println!("  hausdorff           {}", r.hausdorff);
        println!("  minimal             {}", r.minimal);
        println!("  effective           {}", r.effective);
        println!("  locally contracting {}", r.locally_contracting);
        println!("  simple C*           {}", r.simple_cstar);
        println!("  purely infinite     {}", r.purely_infinite);
    }
}
