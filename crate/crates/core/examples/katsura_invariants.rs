//! Builds a Katsura system from a matrix pair and computes its K-theory and homology.

use selfsim::format::write_system;
use selfsim::invariants::{katsura_homology, katsura_ktheory};
use selfsim::katsura::{build_katsura, noncommutative_example, KatsuraData};

fn main() {
    let data = noncommutative_example();
    let sys = build_katsura(&data).unwrap();
    print!("{}", write_system(&sys));

    let kt = katsura_ktheory(&data).unwrap();
    println!("K0 = {}, K1 = {}", kt.k0, kt.k1);

    let h = katsura_homology(&data).unwrap();
    println!("H0 = {}, H1 = {}, H2 = {}", h.h0, h.h1, h.h2);

    // Zero rows are dropped before computing homology.
    let sink = KatsuraData::new(vec![vec![1, 1], vec![0, 0]], vec![vec![1, 0], vec![0, 0]]);
    let h = katsura_homology(&sink).unwrap();
    println!("removed rows {:?}: H0 = {}, H1 = {}", h.removed_rows, h.h0, h.h1);
}
