//! Arithmetic in the inverse semigroup and on germs of its groupoid.

use selfsim::groupoid::{germ_compose, germ_equal, Germ};
use selfsim::semigroup::{eval_expression, leq_idempotent_under, parse_sge};
use selfsim::{fixtures, SearchBudget};

fn main() {
    let grig = fixtures::grigorchuk();
    let budget = SearchBudget::default();

    for expr in ["(0, b, 1)^* * (0, b, 1)", "(0, a, 1) * (0, a, 1)", "(01, c, 1) * (1, d, 0)"] {
        let s = eval_expression(&grig, expr).unwrap();
        println!("{expr} = {}", s.display(&grig));
    }

    let e = parse_sge(&grig, "(0111, e, 0111)").unwrap();
    let s = parse_sge(&grig, "(0, d, 0)").unwrap();
    println!("f_0111 <= (0, d, 0): {}", leq_idempotent_under(&grig, &e, &s, budget).unwrap());

    let u = Germ::parse(&grig, "[v; d; v] @ (0)^inf").unwrap();
    let unit = Germ::unit(&grig, u.base.clone());
    println!("{} is a unit: {}", u.display(&grig), germ_equal(&grig, &u, &unit, budget));

    let v = Germ::parse(&grig, "[v; b; v] @ (1)^inf").unwrap();
    let w = Germ::parse(&grig, "[v; c; v] @ (1)^inf").unwrap();
    let vw = germ_compose(&grig, &v, &w, 64).unwrap();
    println!("{} . {} = {}", v.display(&grig), w.display(&grig), vw.display(&grig));
}
