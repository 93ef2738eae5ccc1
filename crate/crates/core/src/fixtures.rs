//! Bundled example systems.

use crate::format::{parse_matrices, parse_system, MatrixPair};
use crate::graph::Graph;
use crate::group::{Elem, FiniteGroup, Group};
use crate::katsura::{build_katsura, KatsuraData};
use crate::system::{Assertions, GeneratorAction, System};

pub const GRIGORCHUK: &str = include_str!("../fixtures/grigorchuk.system");
pub const GRIGORCHUK_ERSCHLER: &str = include_str!("../fixtures/grigorchuk-erschler.system");
pub const KATSURA_NONCOMMUTATIVE: &str = include_str!("../fixtures/katsura-noncommutative.matrices");

pub fn grigorchuk() -> System {
    parse_system(GRIGORCHUK).expect("bundled fixture parses")
}

pub fn grigorchuk_erschler() -> System {
    parse_system(GRIGORCHUK_ERSCHLER).expect("bundled fixture parses")
}

pub fn katsura_matrices() -> MatrixPair {
    parse_matrices(KATSURA_NONCOMMUTATIVE).expect("bundled fixture parses")
}

pub fn katsura() -> System {
    build_katsura(&KatsuraData::from(katsura_matrices())).expect("bundled pair satisfies condition (0)")
}

/// One vertex with `n` loops named `0..n` and the trivial group.
pub fn cuntz(n: usize) -> System {
    let edges = (0..n).map(|i| (i.to_string(), "v".to_string(), "v".to_string()));
    let graph = Graph::from_parts(["v"], edges).expect("distinct names");
    System::trivial(format!("cuntz-{n}"), graph).with_assertions(Assertions { amenable: true, faithful: true })
}

/// A finite group `G` acting trivially on one vertex with `n` loops and
/// restriction `φ(g, e) = g`.
pub fn crossed_product(group: FiniteGroup, n: usize) -> System {
    let edges = (0..n).map(|i| (i.to_string(), "v".to_string(), "v".to_string()));
    let graph = Graph::from_parts(["v"], edges).expect("distinct names");
    let gens = group
        .generators()
        .iter()
        .map(|&g| GeneratorAction::constant(&graph, Elem::Fin(g)))
        .collect();
    System::new(format!("crossed-product-{n}"), graph, Group::Finite(group), gens)
        .expect("constant restrictions satisfy the standing hypothesis")
        .with_assertions(Assertions { amenable: true, faithful: false })
}

/// One vertex with a single loop and the trivial group.
pub fn single_loop() -> System {
    let graph = Graph::from_parts(["v"], [("l".to_string(), "v".to_string(), "v".to_string())]).expect("valid");
    System::trivial("single-loop", graph)
}
