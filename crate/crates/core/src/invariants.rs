//! Finitely generated abelian groups, Katsura K-theory and homology, and the
//! maps `Φ₀`, `Φ₁` of a self-similar system.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::group::{Elem, Group};
use crate::katsura::{KatsuraData, KatsuraError};
use crate::snf::{smith_normal_form, IntMatrix};
use crate::system::System;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error(transparent)]
    Katsura(#[from] KatsuraError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("abelianization inconsistent: {0}")]
    Abelianization(String),
    #[error("{0}")]
    Unsupported(String),
}

/// `ℤ^rank ⊕ ℤ/d₁ ⊕ … ⊕ ℤ/d_k` with `d₁ | d₂ | …` and every `dᵢ ≥ 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FgAbelianGroup {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

impl FgAbelianGroup {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        FgAbelianGroup { rank, torsion: Vec::new() }
    }

    /// Canonical form of `ℤ^rank ⊕ ⨁ ℤ/cᵢ` for arbitrary cyclic orders `cᵢ`
    /// (zero orders count as free summands).
    pub fn from_cyclic(rank: usize, orders: &[BigInt]) -> Self {
        let mut rank = rank;
        let mut nonzero = Vec::new();
        for c in orders {
            if c.is_zero() {
                rank += 1;
            } else if !c.abs().is_one() {
                nonzero.push(c.abs());
            }
        }
        let m = IntMatrix::from_columns(
            nonzero.len(),
            &(0..nonzero.len())
                .map(|j| (0..nonzero.len()).map(|i| if i == j { nonzero[i].clone() } else { BigInt::zero() }).collect())
                .collect::<Vec<_>>(),
        );
        let torsion =
            smith_normal_form(&m).diagonal().into_iter().filter(|d| !d.is_one() && !d.is_zero()).collect();
        FgAbelianGroup { rank, torsion }
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }

    pub fn direct_sum(&self, other: &FgAbelianGroup) -> FgAbelianGroup {
        let orders: Vec<BigInt> = self.torsion.iter().chain(&other.torsion).cloned().collect();
        FgAbelianGroup::from_cyclic(self.rank + other.rank, &orders)
    }

    /// `rank` and `torsion` as machine-readable strings.
    pub fn machine(&self) -> (String, String) {
        let t: Vec<String> = self.torsion.iter().map(ToString::to_string).collect();
        (self.rank.to_string(), t.join(","))
    }
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// `ℤ^rows / M·ℤ^cols`.
pub fn coker(m: &IntMatrix) -> FgAbelianGroup {
    let s = smith_normal_form(m);
    let diag = s.diagonal();
    let rank = diag.iter().filter(|d| !d.is_zero()).count();
    FgAbelianGroup { rank: m.rows() - rank, torsion: diag.into_iter().filter(|d| !d.is_zero() && !d.is_one()).collect() }
}

/// The kernel of `M: ℤ^cols → ℤ^rows` is free of this rank.
pub fn ker_rank(m: &IntMatrix) -> usize {
    m.cols() - smith_normal_form(m).rank()
}

pub fn ker(m: &IntMatrix) -> FgAbelianGroup {
    FgAbelianGroup::free(ker_rank(m))
}

/// An integer solution of `M·y = b`, if one exists.
pub fn solve(m: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let s = smith_normal_form(m);
    let col = IntMatrix::from_columns(m.rows(), &[b.to_vec()]);
    let c = s.u.mul(&col);
    let diag = s.diagonal();
    let mut z = vec![BigInt::zero(); m.cols()];
    for i in 0..m.rows() {
        let d = diag.get(i).cloned().unwrap_or_else(BigInt::zero);
        if d.is_zero() {
            if !c[(i, 0)].is_zero() {
                return None;
            }
        } else {
            let (q, r) = c[(i, 0)].div_rem(&d);
            if !r.is_zero() {
                return None;
            }
            z[i] = q;
        }
    }
    let zc = IntMatrix::from_columns(m.cols(), &[z]);
    Some(s.v.mul(&zc).column(0))
}

/// A basis of the integer kernel of `M`.
pub fn kernel_basis(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let s = smith_normal_form(m);
    (s.rank()..m.cols()).map(|j| s.v.column(j)).collect()
}

fn identity_minus(m: &[Vec<i64>]) -> IntMatrix {
    let n = m.len();
    let mut out = IntMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] -= BigInt::from(m[i][j]);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KTheory {
    pub k0: FgAbelianGroup,
    pub k1: FgAbelianGroup,
}

/// `K₀ = coker(I−A) ⊕ ker(I−B)`, `K₁ = coker(I−B) ⊕ ker(I−A)`.
pub fn katsura_ktheory(data: &KatsuraData) -> Result<KTheory, InvariantError> {
    data.check_condition_zero()?;
    let ia = identity_minus(&data.a);
    let ib = identity_minus(&data.b);
    Ok(KTheory { k0: coker(&ia).direct_sum(&ker(&ib)), k1: coker(&ib).direct_sum(&ker(&ia)) })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homology {
    pub h0: FgAbelianGroup,
    pub h1: FgAbelianGroup,
    pub h2: FgAbelianGroup,
    pub k0: FgAbelianGroup,
    pub k1: FgAbelianGroup,
    /// Indices of the zero rows of `A` that were removed.
    pub removed_rows: Vec<usize>,
}

/// `ι − Mᵀ` where `M` keeps the rows listed in `kept` and `ι` includes those
/// indices into all indices.
fn inclusion_minus_transpose(m: &[Vec<i64>], kept: &[usize]) -> IntMatrix {
    let n = m.len();
    let mut out = IntMatrix::zeros(n, kept.len());
    for (c, &k) in kept.iter().enumerate() {
        out[(k, c)] += BigInt::one();
        for i in 0..n {
            out[(i, c)] -= BigInt::from(m[k][i]);
        }
    }
    out
}

/// Homology of the Katsura groupoid after removing the zero rows of `A`.
///
/// `Hₙ = 0` for `n ≥ 3`.
pub fn katsura_homology(data: &KatsuraData) -> Result<Homology, InvariantError> {
    data.check_shape()?;
    data.check_support()?;
    let kept: Vec<usize> = (0..data.n()).filter(|&i| data.a[i].iter().any(|&x| x != 0)).collect();
    let removed_rows = (0..data.n()).filter(|i| !kept.contains(i)).collect();
    let ma = inclusion_minus_transpose(&data.a, &kept);
    let mb = inclusion_minus_transpose(&data.b, &kept);
    let h0 = coker(&ma);
    let h1 = ker(&ma).direct_sum(&coker(&mb));
    let h2 = ker(&mb);
    let k0 = h0.direct_sum(&h2);
    let k1 = h1.clone();
    Ok(Homology { h0, h1, h2, k0, k1, removed_rows })
}

/// `G^ab = ℤⁿ / M·ℤᵏ` together with the images of the declared generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abelianization {
    pub relations: IntMatrix,
    pub images: Vec<Vec<BigInt>>,
}

impl Abelianization {
    pub fn dim(&self) -> usize {
        self.relations.rows()
    }

    /// Generators map to distinct basis vectors, with the given relations.
    pub fn free_on_generators(count: usize, relations: IntMatrix) -> Self {
        let images =
            (0..count).map(|k| (0..count).map(|i| if i == k { BigInt::one() } else { BigInt::zero() }).collect()).collect();
        Abelianization { relations, images }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiMaps {
    /// Indexed by vertex orbit representatives.
    pub phi0: IntMatrix,
    pub representatives: Vec<usize>,
    /// `Φ₁` on `ℤⁿ`, when an abelianization was supplied.
    pub phi1: Option<IntMatrix>,
    pub h0: FgAbelianGroup,
    /// `coker(id − Φ₁)` on `G^ab`.
    pub h1: Option<FgAbelianGroup>,
}

fn abelian_image(grp: &Group, ab: &Abelianization, g: &Elem) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); ab.dim()];
    let mut add = |k: usize, sign: i64| {
        for (o, x) in out.iter_mut().zip(&ab.images[k]) {
            *o += x * sign;
        }
    };
    match (grp, g) {
        (Group::Automaton { .. }, Elem::Word(w)) => {
            for &l in w {
                add((l.unsigned_abs() - 1) as usize, l.signum() as i64);
            }
        }
        (Group::Integer { .. }, Elem::Int(m)) => {
            for (o, x) in out.iter_mut().zip(&ab.images[0]) {
                *o += x * m;
            }
        }
        (Group::Finite(f), Elem::Fin(i)) => {
            for &k in f.word(*i) {
                add(k, 1);
            }
        }
        _ => unreachable!("element belongs to the system's group"),
    }
    out
}

/// `(Φ₀)_{w,v} = |r⁻¹(v) ∩ d⁻¹(Gw)|` over orbit representatives, and, for a
/// single vertex, `Φ₁(g) = Σₑ g|ₑ` on the supplied abelianization.
pub fn phi_maps(sys: &System, ab: Option<&Abelianization>) -> Result<PhiMaps, InvariantError> {
    let graph = sys.graph();
    let orbit = sys.vertex_orbits();
    let mut representatives: Vec<usize> = orbit.clone();
    representatives.sort();
    representatives.dedup();
    let pos = |v: usize| representatives.binary_search(&orbit[v]).expect("representative");
    let n = representatives.len();
    let mut phi0 = IntMatrix::zeros(n, n);
    for (vi, &v) in representatives.iter().enumerate() {
        for &e in graph.edges_into(v) {
            phi0[(pos(graph.source(e)), vi)] += BigInt::one();
        }
    }
    let h0 = coker(&IntMatrix::identity(n).sub(&phi0));
    let (phi1, h1) = match ab {
        None => (None, None),
        Some(ab) => {
            if graph.vertex_count() != 1 {
                return Err(InvariantError::Unsupported("Φ₁ is computed for single-vertex systems only".into()));
            }
            let p = phi1_matrix(sys, ab)?;
            let h1 = coker(&IntMatrix::identity(ab.dim()).sub(&p).hconcat(&ab.relations));
            (Some(p), Some(h1))
        }
    };
    Ok(PhiMaps { phi0, representatives, phi1, h0, h1 })
}

fn phi1_matrix(sys: &System, ab: &Abelianization) -> Result<IntMatrix, InvariantError> {
    let grp = sys.group();
    let k = grp.generator_count();
    let n = ab.dim();
    if ab.images.len() != k || ab.images.iter().any(|v| v.len() != n) {
        return Err(InvariantError::Shape(format!("expected {k} generator images in Z^{n}")));
    }
    // Φ₁ on each generator, in ℤⁿ.
    let on_gens: Vec<Vec<BigInt>> = (0..k)
        .map(|j| {
            let g = grp.generator(j);
            let mut acc = vec![BigInt::zero(); n];
            for e in sys.graph().edges() {
                for (a, x) in acc.iter_mut().zip(abelian_image(grp, ab, &sys.act_edge(&g, e).1)) {
                    *a += x;
                }
            }
            acc
        })
        .collect();
    let img = IntMatrix::from_columns(n, &ab.images);
    let system = img.hconcat(&ab.relations);
    // Well defined: every relation among the images maps into the relations.
    for y in kernel_basis(&system) {
        let mut v = vec![BigInt::zero(); n];
        for (j, c) in y.iter().take(k).enumerate() {
            for (a, x) in v.iter_mut().zip(&on_gens[j]) {
                *a += x * c;
            }
        }
        if solve(&ab.relations, &v).is_none() && !v.iter().all(Zero::is_zero) {
            return Err(InvariantError::Abelianization("a relation among the images is not preserved".into()));
        }
    }
    // Lift each basis vector of ℤⁿ through the images.
    let mut cols = Vec::with_capacity(n);
    for i in 0..n {
        let e: Vec<BigInt> = (0..n).map(|r| if r == i { BigInt::one() } else { BigInt::zero() }).collect();
        let y = solve(&system, &e)
            .ok_or_else(|| InvariantError::Abelianization(format!("the images do not generate basis vector {i}")))?;
        let mut v = vec![BigInt::zero(); n];
        for (j, c) in y.iter().take(k).enumerate() {
            for (a, x) in v.iter_mut().zip(&on_gens[j]) {
                *a += x * c;
            }
        }
        cols.push(v);
    }
    Ok(IntMatrix::from_columns(n, &cols))
}

/// `K₀ = coker(1−Φ₀)`, `K₁ = ker(1−Φ₀)` when `K₁(C*(G)) = 0` and `K₀(C*(G))`
/// is free on the basis `Φ₀` is written in. Otherwise an explanation.
pub fn les_assemble(k0g: &FgAbelianGroup, k1g: &FgAbelianGroup, phi0: &IntMatrix) -> Result<KTheory, String> {
    if !k1g.is_trivial() {
        return Err(format!("K1(C*(G)) = {k1g} is nonzero: the six-term sequence leaves an extension problem"));
    }
    if !k0g.is_free() {
        return Err(format!("K0(C*(G)) = {k0g} has torsion: Φ0 must act on a free group here"));
    }
    if phi0.rows() != k0g.rank || phi0.cols() != k0g.rank {
        return Err(format!("Φ0 is {}×{} but K0(C*(G)) has rank {}", phi0.rows(), phi0.cols(), k0g.rank));
    }
    let m = IntMatrix::identity(k0g.rank).sub(phi0);
    Ok(KTheory { k0: coker(&m), k1: ker(&m) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn z(r: usize, t: &[i64]) -> FgAbelianGroup {
        FgAbelianGroup { rank: r, torsion: t.iter().map(|&x| BigInt::from(x)).collect() }
    }

    #[test]
    fn cokernels() {
        assert_eq!(coker(&IntMatrix::from_rows(&[vec![-1]])), z(0, &[]));
        assert_eq!(coker(&IntMatrix::from_rows(&[vec![-1, -1], vec![-1, -1]])), z(1, &[]));
        assert_eq!(ker(&IntMatrix::from_rows(&[vec![-1, -1], vec![-1, -1]])), z(1, &[]));
        assert_eq!(ker(&IntMatrix::from_rows(&[vec![0]])), z(1, &[]));
    }

    #[test]
    fn canonical_sums() {
        assert_eq!(z(0, &[2]).direct_sum(&z(0, &[3])), z(0, &[6]));
        assert_eq!(z(0, &[2]).direct_sum(&z(1, &[2])), z(1, &[2, 2]));
        assert_eq!(format!("{}", z(2, &[2, 4])), "Z^2 + Z/2 + Z/4");
        assert_eq!(format!("{}", z(0, &[])), "0");
    }

    #[test]
    fn ktheory_examples() {
        let k = katsura_ktheory(&KatsuraData::new(vec![vec![2]], vec![vec![1]])).unwrap();
        assert_eq!((k.k0, k.k1), (z(1, &[]), z(1, &[])));
        let k = katsura_ktheory(&KatsuraData::new(vec![vec![2, 1], vec![1, 2]], vec![vec![1, 1], vec![1, 1]])).unwrap();
        assert_eq!((k.k0, k.k1), (z(1, &[]), z(1, &[])));
        let k = katsura_ktheory(&KatsuraData::new(vec![vec![5]], vec![vec![0]])).unwrap();
        assert_eq!((k.k0, k.k1), (z(0, &[4]), z(0, &[])));
    }

    #[test]
    fn homology_examples() {
        let h = katsura_homology(&KatsuraData::new(vec![vec![2]], vec![vec![0]])).unwrap();
        assert!(h.h0.is_trivial() && h.h1.is_trivial() && h.h2.is_trivial());
        let h = katsura_homology(&KatsuraData::new(vec![vec![3]], vec![vec![0]])).unwrap();
        assert_eq!(h.h0, z(0, &[2]));
        let h = katsura_homology(&KatsuraData::new(vec![vec![1, 1], vec![0, 0]], vec![vec![0, 0], vec![0, 0]])).unwrap();
        assert_eq!(h.removed_rows, vec![1]);
    }

    #[test]
    fn grigorchuk_phi1() {
        let s = fixtures::grigorchuk();
        // (ℤ/2)³ on a, b, c with d = b + c.
        let mut rel = IntMatrix::zeros(3, 3);
        for i in 0..3 {
            rel[(i, i)] = BigInt::from(2);
        }
        let e = |v: [i64; 3]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        let ab = Abelianization { relations: rel, images: vec![e([1, 0, 0]), e([0, 1, 0]), e([0, 0, 1]), e([0, 1, 1])] };
        let p = phi_maps(&s, Some(&ab)).unwrap();
        let phi1 = p.phi1.unwrap();
        let col = |j: usize| phi1.column(j).iter().map(|x| x.mod_floor(&BigInt::from(2))).collect::<Vec<_>>();
        assert_eq!(col(0), e([0, 1, 0]).iter().map(|_| BigInt::zero()).collect::<Vec<_>>());
        assert_eq!(col(1), e([1, 0, 1]));
        assert_eq!(col(2), e([1, 1, 1]));
        assert_eq!(p.h0, z(0, &[]));
    }

    #[test]
    fn les_refuses_extension() {
        assert!(les_assemble(&z(1, &[]), &z(1, &[]), &IntMatrix::from_rows(&[vec![2]])).is_err());
        let k = les_assemble(&z(1, &[]), &z(0, &[]), &IntMatrix::from_rows(&[vec![2]])).unwrap();
        assert!(k.k0.is_trivial() && k.k1.is_trivial());
        let k = les_assemble(&z(1, &[]), &z(0, &[]), &IntMatrix::from_rows(&[vec![4]])).unwrap();
        assert_eq!((k.k0, k.k1), (z(0, &[3]), z(0, &[])));
    }
}
