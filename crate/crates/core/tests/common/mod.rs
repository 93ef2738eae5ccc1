#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use selfsim::group::FiniteGroup;
use selfsim::groupoid::{EpPath, Germ};
use selfsim::semigroup::Triple;
use selfsim::invariants::FgAbelianGroup;
use selfsim::system::GeneratorAction;
use selfsim::{Elem, Graph, Group, System};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Edges as `(source, range)` over vertices `0..n`.
#[derive(Debug, Clone)]
pub struct RawGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl RawGraph {
    pub fn graph(&self) -> Graph {
        let vertices: Vec<String> = (0..self.n).map(|v| format!("v{v}")).collect();
        let edges = self.edges.iter().enumerate().map(|(i, &(s, r))| (format!("e{i}"), format!("v{s}"), format!("v{r}")));
        Graph::from_parts(vertices, edges).unwrap()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(_, r)| r == v).count()
    }
}

pub fn random_graph(rng: &mut impl Rng, max_vertices: usize, max_edges: usize) -> RawGraph {
    let n = rng.gen_range(1..=max_vertices);
    let m = rng.gen_range(0..=max_edges);
    let edges = (0..m).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
    RawGraph { n, edges }
}

/// Exactly one source, the last vertex; every other vertex receives an edge.
pub fn random_one_source_graph(rng: &mut impl Rng) -> RawGraph {
    let n = rng.gen_range(2..=5);
    let s = n - 1;
    let mut edges = Vec::new();
    for r in 0..s {
        edges.push((rng.gen_range(0..n), r));
    }
    edges.push((s, rng.gen_range(0..s)));
    while edges.len() < 8 && rng.gen_bool(0.5) {
        edges.push((rng.gen_range(0..n), rng.gen_range(0..s)));
    }
    RawGraph { n, edges }
}

/// Every simple cycle as a vertex sequence, found by extending edge chains.
pub fn brute_simple_cycles(g: &RawGraph) -> Vec<Vec<usize>> {
    fn extend(g: &RawGraph, start: usize, chain: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        // chain holds vertices visited walking against the arrows from `start`
        let cur = *chain.last().unwrap();
        for &(s, r) in &g.edges {
            if r != cur {
                continue;
            }
            if s == start {
                out.push(chain.clone());
            } else if s > start && !chain.contains(&s) {
                chain.push(s);
                extend(g, start, chain, out);
                chain.pop();
            }
        }
    }
    let mut out = Vec::new();
    for start in 0..g.n {
        extend(g, start, &mut vec![start], &mut out);
    }
    out
}

pub fn oracle_condition_l(g: &RawGraph) -> bool {
    brute_simple_cycles(g).iter().all(|c| c.iter().any(|&v| g.in_degree(v) >= 2))
}

/// `reach[x][y]`: a path from `x` to `y` following edges from source to range.
pub fn oracle_reach(g: &RawGraph) -> Vec<Vec<bool>> {
    let n = g.n;
    let mut t = vec![vec![false; n]; n];
    for (v, row) in t.iter_mut().enumerate() {
        row[v] = true;
    }
    for &(s, r) in &g.edges {
        t[s][r] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if t[i][k] && t[k][j] {
                    t[i][j] = true;
                }
            }
        }
    }
    t
}

/// Trivial group: fails iff the vertices that cannot reach some `x` carry a cycle.
pub fn oracle_minimal(g: &RawGraph) -> bool {
    let reach = oracle_reach(g);
    let n = g.n;
    (0..n).all(|x| {
        let keep: Vec<bool> = (0..n).map(|v| !reach[v][x]).collect();
        let mut t = vec![vec![false; n]; n];
        for &(s, r) in &g.edges {
            if keep[s] && keep[r] {
                t[s][r] = true;
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if t[i][k] && t[k][j] {
                        t[i][j] = true;
                    }
                }
            }
        }
        (0..n).all(|v| !t[v][v])
    })
}

pub fn trivial_system(g: &RawGraph) -> System {
    System::trivial("random", g.graph())
}

/// `ℤ/2` fixing every vertex, swapping two parallel copies of one edge.
pub fn with_edge_pair_swap(rng: &mut impl Rng, g: &RawGraph) -> System {
    let mut raw = g.clone();
    let pick = rng.gen_range(0..raw.edges.len());
    raw.edges.push(raw.edges[pick]);
    let twin = raw.edges.len() - 1;
    let graph = raw.graph();
    let mut edge: Vec<usize> = (0..raw.edges.len()).collect();
    edge.swap(pick, twin);
    let mut cocycle: Vec<Elem> = (0..raw.edges.len()).map(|_| Elem::Fin(rng.gen_range(0..2))).collect();
    cocycle[twin] = cocycle[pick].clone();
    let action = GeneratorAction { vertex: (0..raw.n).collect(), edge, cocycle };
    System::new("swap", graph, Group::Finite(FiniteGroup::cyclic(2)), vec![action]).unwrap()
}

/// A pair satisfying condition (0): nonnegative `A` without zero rows, `B`
/// supported inside `A`.
pub fn random_katsura_pair(rng: &mut impl Rng, max_n: usize, max_entry: i64) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let n = rng.gen_range(1..=max_n);
    let mut a = vec![vec![0i64; n]; n];
    let mut b = vec![vec![0i64; n]; n];
    for i in 0..n {
        while a[i].iter().all(|&x| x == 0) {
            for j in 0..n {
                a[i][j] = if rng.gen_bool(0.5) { rng.gen_range(1..=max_entry) } else { 0 };
            }
        }
        for j in 0..n {
            if a[i][j] != 0 {
                b[i][j] = rng.gen_range(-max_entry..=max_entry);
            }
        }
    }
    (a, b)
}

/// Determinant by permutation expansion.
pub fn det_expand(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut total = 0i128;
    for j in 0..n {
        if m[0][j] == 0 {
            continue;
        }
        let minor: Vec<Vec<i128>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect()).collect();
        let sign = if j % 2 == 0 { 1 } else { -1 };
        total += sign * m[0][j] * det_expand(&minor);
    }
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// gcd of all `k×k` minors.
pub fn minor_gcd(m: &[Vec<i128>], k: usize) -> i128 {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut g = 0;
    for rs in subsets(rows, k) {
        for cs in subsets(cols, k) {
            let sub: Vec<Vec<i128>> = rs.iter().map(|&r| cs.iter().map(|&c| m[r][c]).collect()).collect();
            g = gcd(g, det_expand(&sub));
        }
    }
    g
}

/// A finitely generated abelian group as a free rank and sorted prime powers.
pub type Elementary = (usize, Vec<u64>);

fn prime_powers(mut d: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= d {
        let mut q = 1;
        while d % p == 0 {
            d /= p;
            q *= p;
        }
        if q > 1 {
            out.push(q);
        }
        p += 1;
    }
    if d > 1 {
        out.push(d);
    }
    out
}

/// Cokernel of `m : ℤ^cols → ℤ^rows` from determinantal divisors.
pub fn coker_oracle(m: &[Vec<i128>], rows: usize) -> Elementary {
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut rank = 0;
    let mut prev = 1i128;
    let mut torsion = Vec::new();
    for k in 1..=rows.min(cols) {
        let dk = minor_gcd(m, k);
        if dk == 0 {
            break;
        }
        rank = k;
        torsion.extend(prime_powers((dk / prev) as u64));
        prev = dk;
    }
    torsion.sort();
    (rows - rank, torsion)
}

pub fn ker_rank_oracle(m: &[Vec<i128>]) -> usize {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut rank = 0;
    for k in 1..=rows.min(cols) {
        if minor_gcd(m, k) == 0 {
            break;
        }
        rank = k;
    }
    cols - rank
}

pub fn sum(a: &Elementary, b: &Elementary) -> Elementary {
    let mut t: Vec<u64> = a.1.iter().chain(&b.1).copied().collect();
    t.sort();
    (a.0 + b.0, t)
}

pub fn elementary(g: &FgAbelianGroup) -> Elementary {
    let mut t: Vec<u64> = g.torsion.iter().flat_map(|d: &BigInt| prime_powers(d.to_u64().unwrap())).collect();
    t.sort();
    (g.rank, t)
}

pub fn identity_minus(m: &[Vec<i64>]) -> Vec<Vec<i128>> {
    let n = m.len();
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j) - m[i][j] as i128).collect()).collect()
}

/// `K₀ = coker(I−A) ⊕ ker(I−B)`, `K₁ = coker(I−B) ⊕ ker(I−A)`, by minors.
pub fn ktheory_oracle(a: &[Vec<i64>], b: &[Vec<i64>]) -> (Elementary, Elementary) {
    let n = a.len();
    let (ia, ib) = (identity_minus(a), identity_minus(b));
    let k0 = sum(&coker_oracle(&ia, n), &(ker_rank_oracle(&ib), Vec::new()));
    let k1 = sum(&coker_oracle(&ib, n), &(ker_rank_oracle(&ia), Vec::new()));
    (k0, k1)
}

/// `ℤ/2` fixing vertices and swapping some pairs of parallel edges, with a
/// restriction constant on each edge orbit.
pub fn random_z2_system(rng: &mut impl Rng, max_vertices: usize, max_edges: usize) -> System {
    let raw = loop {
        let g = random_graph(rng, max_vertices, max_edges);
        if !g.edges.is_empty() {
            break g;
        }
    };
    let m = raw.edges.len();
    let mut edge: Vec<usize> = (0..m).collect();
    for i in 0..m {
        for j in i + 1..m {
            if edge[i] == i && edge[j] == j && raw.edges[i] == raw.edges[j] && rng.gen_bool(0.7) {
                edge.swap(i, j);
            }
        }
    }
    let mut cocycle: Vec<Elem> = (0..m).map(|_| Elem::Fin(rng.gen_range(0..2))).collect();
    for i in 0..m {
        if edge[i] > i {
            cocycle[edge[i]] = cocycle[i].clone();
        }
    }
    let action = GeneratorAction { vertex: (0..raw.n).collect(), edge, cocycle };
    System::new("z2", raw.graph(), Group::Finite(FiniteGroup::cyclic(2)), vec![action]).unwrap()
}

/// Minimal strongly fixed paths of length at most `depth`, by enumeration.
pub fn brute_minimal_strongly_fixed(sys: &System, g: &Elem, depth: usize) -> Vec<selfsim::Path> {
    let b = selfsim::SearchBudget::default();
    let fixed = |p: &selfsim::Path| {
        let (img, r) = sys.act(g, p);
        img == *p && sys.is_identity(&r, b).is_yes()
    };
    let all = sys.graph().paths_up_to(depth);
    let mut out: Vec<selfsim::Path> =
        all.iter().filter(|p| fixed(p) && !(0..p.len()).any(|k| fixed(&p.prefix(k)))).cloned().collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

pub fn random_word(rng: &mut impl Rng, sys: &System, max_len: usize) -> Elem {
    let names = sys.group().generator_names();
    let len = rng.gen_range(0..=max_len);
    let text: Vec<String> = (0..len)
        .map(|_| {
            let g = names.choose(rng).unwrap().clone();
            if rng.gen_bool(0.3) {
                g + "^-1"
            } else {
                g
            }
        })
        .collect();
    sys.parse_elem(&text.join(" ")).unwrap()
}

pub fn random_elem(rng: &mut impl Rng, sys: &System) -> Elem {
    match sys.group() {
        selfsim::Group::Integer { .. } => Elem::Int(rng.gen_range(-5..=5)),
        _ => random_word(rng, sys, 4),
    }
}

pub fn random_ep_path(rng: &mut impl Rng, sys: &System) -> EpPath {
    let g = sys.graph();
    let e = |rng: &mut dyn rand::RngCore| rng.gen_range(0..g.edge_count());
    let prefix: Vec<usize> = (0..rng.gen_range(0..=3)).map(|_| e(rng)).collect();
    let cycle: Vec<usize> = (0..rng.gen_range(1..=3)).map(|_| e(rng)).collect();
    EpPath::new(g, 0, prefix, cycle)
}

pub fn random_germ(rng: &mut impl Rng, sys: &System, base: EpPath) -> Germ {
    let g = random_word(rng, sys, 3);
    let beta = base.truncate(rng.gen_range(0..=3));
    let alpha_len = rng.gen_range(0..=3);
    let alpha = sys.graph().path(&(0..alpha_len).map(|_| rng.gen_range(0..2)).collect::<Vec<_>>()).unwrap_or(sys.graph().vertex_path(0));
    Germ::new(Triple::new(sys, alpha, g, beta).unwrap(), base).unwrap()
}
