//! Katsura systems: `ℤ` acting on the graph of a nonnegative matrix `A` by
//! rotation through `B`, with the Euclidean-division cocycle.

use thiserror::Error;

use crate::format::MatrixPair;
use crate::graph::{EdgeId, Graph};
use crate::group::{Elem, Group};
use crate::system::{GeneratorAction, System};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KatsuraError {
    #[error("row {0} of A is zero")]
    EmptyRow(usize),
    #[error("B[{0}][{1}] is nonzero where A[{0}][{1}] is zero")]
    StrayB(usize, usize),
    #[error("A has a negative entry at ({0}, {1})")]
    Negative(usize, usize),
    #[error("A and B must be square of the same size")]
    Shape,
}

/// An `N×N` pair of integer matrices. Indices are 1-based in names and errors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KatsuraData {
    pub a: Vec<Vec<i64>>,
    pub b: Vec<Vec<i64>>,
}

impl From<MatrixPair> for KatsuraData {
    fn from(p: MatrixPair) -> Self {
        KatsuraData { a: p.a, b: p.b }
    }
}

impl KatsuraData {
    pub fn new(a: Vec<Vec<i64>>, b: Vec<Vec<i64>>) -> Self {
        KatsuraData { a, b }
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn check_shape(&self) -> Result<(), KatsuraError> {
        let n = self.n();
        if self.a.iter().chain(&self.b).any(|r| r.len() != n) || self.b.len() != n {
            return Err(KatsuraError::Shape);
        }
        for i in 0..n {
            for j in 0..n {
                if self.a[i][j] < 0 {
                    return Err(KatsuraError::Negative(i + 1, j + 1));
                }
            }
        }
        Ok(())
    }

    /// Every row of `A` is nonzero, and `B` vanishes wherever `A` does.
    pub fn check_condition_zero(&self) -> Result<(), KatsuraError> {
        self.check_shape()?;
        self.check_support()?;
        for i in 0..self.n() {
            if self.a[i].iter().all(|&x| x == 0) {
                return Err(KatsuraError::EmptyRow(i + 1));
            }
        }
        Ok(())
    }

    /// `B` vanishes wherever `A` does.
    pub fn check_support(&self) -> Result<(), KatsuraError> {
        self.check_shape()?;
        for i in 0..self.n() {
            for j in 0..self.n() {
                if self.a[i][j] == 0 && self.b[i][j] != 0 {
                    return Err(KatsuraError::StrayB(i + 1, j + 1));
                }
            }
        }
        Ok(())
    }
}

/// Name of the edge `e_{i,j,n}` (1-based `i`, `j`), with range `i` and source `j`.
pub fn edge_name(i: usize, j: usize, n: usize) -> String {
    format!("e_{i}_{j}_{n}")
}

/// Builds `(ℤ, E_A, φ)`: the generator `1` sends `e_{i,j,n}` to `e_{i,j,n̂}`
/// and restricts to `k̂`, where `B_{ij} + n = k̂·A_{ij} + n̂` with `0 ≤ n̂ < A_{ij}`.
pub fn build_katsura(data: &KatsuraData) -> Result<System, KatsuraError> {
    data.check_condition_zero()?;
    let n = data.n();
    let mut graph = Graph::new();
    for i in 1..=n {
        graph.add_vertex(i.to_string()).expect("fresh names");
    }
    let mut index: Vec<Vec<Vec<EdgeId>>> = vec![vec![Vec::new(); n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..data.a[i][j] as usize {
                index[i][j].push(graph.add_edge(edge_name(i + 1, j + 1, k), j, i).expect("fresh names"));
            }
        }
    }
    let mut edge = vec![0; graph.edge_count()];
    let mut cocycle = vec![Elem::Int(0); graph.edge_count()];
    for i in 0..n {
        for j in 0..n {
            let a = data.a[i][j];
            for (k, &e) in index[i][j].iter().enumerate() {
                let total = data.b[i][j] + k as i64;
                edge[e] = index[i][j][total.rem_euclid(a) as usize];
                cocycle[e] = Elem::Int(total.div_euclid(a));
            }
        }
    }
    let action = GeneratorAction { vertex: (0..n).collect(), edge, cocycle };
    let sys = System::new("katsura", graph, Group::integer(), vec![action]).expect("Katsura data always gives a valid system");
    Ok(sys.with_assertions(crate::system::Assertions { amenable: true, faithful: false }))
}

/// `A` irreducible, `A_{ii} ≥ 2` and `B_{ii} = 1` for all `i`.
pub fn kirchberg_precheck(data: &KatsuraData) -> bool {
    let n = data.n();
    if (0..n).any(|i| data.a[i][i] < 2 || data.b[i][i] != 1) {
        return false;
    }
    is_irreducible(&data.a)
}

/// Strong connectivity of the support of a square nonnegative matrix.
pub fn is_irreducible(a: &[Vec<i64>]) -> bool {
    let n = a.len();
    (0..n).all(|start| {
        let mut seen = vec![false; n];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if a[i][j] != 0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    })
}

/// The bundled 3×3 pair.
pub fn noncommutative_example() -> KatsuraData {
    KatsuraData::new(
        vec![vec![2, 1, 0], vec![1, 2, 1], vec![1, 1, 2]],
        vec![vec![1, 2, 0], vec![2, 1, 2], vec![0, 2, 1]],
    )
}
