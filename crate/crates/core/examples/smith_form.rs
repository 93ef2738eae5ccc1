//! Smith normal form and the abelian groups it reads off.

use selfsim::invariants::{coker, ker};
use selfsim::snf::{smith_normal_form, IntMatrix};

fn main() {
    let m = IntMatrix::from_rows(&[vec![2i64, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
    let snf = smith_normal_form(&m);
    print!("M =\n{m}U =\n{}D = U M V =\n{}V =\n{}", snf.u, snf.d, snf.v);
    assert_eq!(snf.u.mul(&m).mul(&snf.v), snf.d);
    println!("coker M = {}", coker(&m));
    println!("ker M   = {}", ker(&m));

    let cuntz = IntMatrix::from_rows(&[vec![1i64 - 4]]);
    println!("coker(1 - 4) = {}", coker(&cuntz));
}
