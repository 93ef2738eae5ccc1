mod common;

use proptest::prelude::*;
use rand::Rng;

use selfsim::graph::simple_cycles;
use selfsim::group::FiniteGroup;
use selfsim::groupoid::{g_act_infinite, germ_compose, germ_equal, Germ, InfiniteImage};
use selfsim::semigroup::{leq_idempotent_under, Sge, Triple};
use selfsim::sfp::{is_pseudo_free, minimal_strongly_fixed, verify_report};
use selfsim::{fixtures, Elem, Path, SearchBudget, System};

use common::*;

fn raw_graph(max_n: usize, max_m: usize) -> impl Strategy<Value = RawGraph> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec((0..n, 0..n), 0..=max_m).prop_map(move |edges| RawGraph { n, edges })
    })
}

fn random_path(rng: &mut impl Rng, sys: &System, max_len: usize) -> Path {
    let g = sys.graph();
    let mut p = g.vertex_path(rng.gen_range(0..g.vertex_count()));
    for _ in 0..rng.gen_range(0..=max_len) {
        let into = g.edges_into(p.source(g));
        if into.is_empty() {
            break;
        }
        p.edges.push(into[rng.gen_range(0..into.len())]);
    }
    p
}

fn agree_up_to(sys: &System, a: &Elem, b: &Elem, depth: usize) -> bool {
    sys.graph().paths_up_to(depth).iter().all(|p| sys.act_path(a, p) == sys.act_path(b, p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn composition_is_associative(raw in raw_graph(4, 8), seed in any::<u64>()) {
        let sys = trivial_system(&raw);
        let g = sys.graph();
        let mut rng = rng(seed);
        let p = random_path(&mut rng, &sys, 3);
        let mut q = g.vertex_path(p.source(g));
        for _ in 0..rng.gen_range(0..3) {
            let into = g.edges_into(q.source(g));
            if into.is_empty() { break; }
            q.edges.push(into[rng.gen_range(0..into.len())]);
        }
        let mut r = g.vertex_path(q.source(g));
        if let Some(&e) = g.edges_into(r.source(g)).first() {
            r.edges.push(e);
        }
        let pq = g.compose(&p, &q).unwrap();
        prop_assert_eq!(pq.range, p.range);
        prop_assert_eq!(pq.source(g), q.source(g));
        prop_assert_eq!(pq.len(), p.len() + q.len());
        let left = g.compose(&pq, &r).unwrap();
        let right = g.compose(&p, &g.compose(&q, &r).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(g.compose(&g.vertex_path(p.range), &p).unwrap(), p.clone());
    }

    #[test]
    fn reach_matches_closure(raw in raw_graph(5, 8)) {
        let g = raw.graph();
        let oracle = oracle_reach(&raw);
        for x in 0..raw.n {
            prop_assert!(g.reach(x, x));
            for y in 0..raw.n {
                prop_assert_eq!(g.reach(x, y), oracle[x][y]);
                for z in 0..raw.n {
                    if g.reach(x, y) && g.reach(y, z) {
                        prop_assert!(g.reach(x, z));
                    }
                }
            }
        }
    }

    #[test]
    fn condition_l_and_cycles(raw in raw_graph(4, 7)) {
        let g = raw.graph();
        prop_assert_eq!(g.condition_l(), oracle_condition_l(&raw));
        prop_assert_eq!(simple_cycles(&g).len(), brute_simple_cycles(&raw).len());
    }

    #[test]
    fn integer_equality_is_syntactic(a in -40i64..40, b in -40i64..40) {
        let k = fixtures::katsura();
        let v = k.equal(&Elem::Int(a), &Elem::Int(b), SearchBudget::default());
        prop_assert_eq!(v.is_yes(), a == b);
        prop_assert_eq!(v.is_no(), a != b);
    }

    #[test]
    fn automaton_equality_matches_action(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let b = SearchBudget::default();
        for sys in [fixtures::grigorchuk(), fixtures::grigorchuk_erschler()] {
            let x = random_word(&mut rng, &sys, 5);
            let y = random_word(&mut rng, &sys, 5);
            let v = sys.equal(&x, &y, b);
            if v.is_yes() {
                prop_assert!(agree_up_to(&sys, &x, &y, 6));
            }
            if !agree_up_to(&sys, &x, &y, 6) {
                prop_assert!(v.is_no(), "{} vs {}: {}", sys.show(&x), sys.show(&y), v);
            }
        }
    }

    #[test]
    fn grigorchuk_group_laws(seed in any::<u64>()) {
        let sys = fixtures::grigorchuk();
        let b = SearchBudget::default();
        let mut rng = rng(seed);
        let x = random_word(&mut rng, &sys, 4);
        let y = random_word(&mut rng, &sys, 4);
        let z = random_word(&mut rng, &sys, 4);
        let e = sys.identity();
        let xy_z = sys.mul(&sys.mul(&x, &y), &z);
        let x_yz = sys.mul(&x, &sys.mul(&y, &z));
        prop_assert!(sys.equal(&xy_z, &x_yz, b).is_yes());
        prop_assert!(sys.equal(&sys.mul(&x, &e), &x, b).is_yes());
        prop_assert!(sys.is_identity(&sys.mul(&x, &sys.inv(&x)), b).is_yes());
        for rel in ["a a", "b b", "b c d", "a d a d a d a d"] {
            let r = sys.parse_elem(rel).unwrap();
            prop_assert!(sys.equal(&sys.mul(&x, &r), &x, b).is_yes(), "{}", rel);
        }
    }

    #[test]
    fn cyclic_groups_are_groups(n in 1usize..12, a in 0usize..12, b in 0usize..12, c in 0usize..12) {
        let g = FiniteGroup::cyclic(n);
        let (a, b, c) = (a % n, b % n, c % n);
        prop_assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
        prop_assert_eq!(g.mul(a, g.inv(a)), 0);
        prop_assert_eq!(g.mul(0, a), a);
        prop_assert_eq!(g.order(), n);
    }

    #[test]
    fn strongly_fixed_paths_match_enumeration(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let sys = random_z2_system(&mut rng, 2, 3);
        let b = SearchBudget::default().with_depth(6);
        for g in [Elem::Fin(0), Elem::Fin(1)] {
            let report = minimal_strongly_fixed(&sys, &g, b);
            prop_assert!(verify_report(&sys, &report, b).is_ok());
            let depth = report.listing_depth.min(6);
            let listed: Vec<Path> = report.paths.iter().filter(|p| p.len() <= depth).cloned().collect();
            let mut listed = listed;
            listed.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
            prop_assert_eq!(listed, brute_minimal_strongly_fixed(&sys, &g, depth));
        }
    }

    #[test]
    fn grigorchuk_strongly_fixed_paths_match_enumeration(seed in any::<u64>()) {
        let sys = fixtures::grigorchuk();
        let mut rng = rng(seed);
        let g = random_word(&mut rng, &sys, 4);
        let b = SearchBudget::default().with_depth(6);
        let report = minimal_strongly_fixed(&sys, &g, b);
        prop_assert!(verify_report(&sys, &report, b).is_ok());
        let depth = report.listing_depth.min(6);
        let mut listed: Vec<Path> = report.paths.iter().filter(|p| p.len() <= depth).cloned().collect();
        listed.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        prop_assert_eq!(listed, brute_minimal_strongly_fixed(&sys, &g, depth));
    }

    #[test]
    fn pseudo_free_means_no_strongly_fixed_paths(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let sys = random_z2_system(&mut rng, 2, 4);
        let b = SearchBudget::default().with_depth(6);
        if is_pseudo_free(&sys, b).is_yes() {
            let report = minimal_strongly_fixed(&sys, &Elem::Fin(1), b);
            prop_assert!(report.paths.is_empty());
            prop_assert!(report.verdict.is_finite());
        }
    }

    #[test]
    fn idempotent_order_is_prefix_order(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let b = SearchBudget::default();
        for sys in [fixtures::grigorchuk(), fixtures::katsura()] {
            let p = random_path(&mut rng, &sys, 4);
            let q = random_path(&mut rng, &sys, 4);
            let (fp, fq) = (Sge::idempotent(&sys, p.clone()), Sge::idempotent(&sys, q.clone()));
            let v = leq_idempotent_under(&sys, &fp, &fq, b).unwrap();
            prop_assert_eq!(v.is_yes(), q.is_prefix_of(&p));
            prop_assert_eq!(v.is_no(), !q.is_prefix_of(&p));
        }
    }

    #[test]
    fn pseudo_free_systems_are_e_unitary(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let sys = random_z2_system(&mut rng, 2, 4);
        let b = SearchBudget::default();
        if !is_pseudo_free(&sys, b).is_yes() {
            return Ok(());
        }
        let alpha = random_path(&mut rng, &sys, 2);
        let mut gamma = alpha.clone();
        for _ in 0..rng.gen_range(0..3) {
            let into = sys.graph().edges_into(gamma.source(sys.graph()));
            if into.is_empty() { break; }
            gamma.edges.push(into[rng.gen_range(0..into.len())]);
        }
        let s = Sge::T(Triple::new(&sys, alpha.clone(), Elem::Fin(1), alpha).unwrap());
        let e = Sge::idempotent(&sys, gamma);
        prop_assert!(!leq_idempotent_under(&sys, &e, &s, b).unwrap().is_yes());
    }

    #[test]
    fn infinite_action_truncates_to_finite_action(seed in any::<u64>()) {
        let mut rng = rng(seed);
        for sys in [fixtures::grigorchuk(), fixtures::grigorchuk_erschler()] {
            let xi = random_ep_path(&mut rng, &sys);
            let g = random_word(&mut rng, &sys, 4);
            let n = 3 * (xi.prefix().len() + xi.cycle().len()) + 4;
            match g_act_infinite(&sys, &g, &xi, 64) {
                InfiniteImage::Periodic(img) => {
                    prop_assert_eq!(img.truncate(n), sys.act_path(&g, &xi.truncate(n)));
                }
                InfiniteImage::Prefix(p) => {
                    let m = p.len().min(n);
                    prop_assert_eq!(p.prefix(m), sys.act_path(&g, &xi.truncate(m)));
                }
            }
        }
    }

    #[test]
    fn units_are_neutral_and_equality_is_an_equivalence(seed in any::<u64>()) {
        let sys = fixtures::grigorchuk();
        let b = SearchBudget::default();
        let mut rng = rng(seed);
        let xi = random_ep_path(&mut rng, &sys);
        let u = random_germ(&mut rng, &sys, xi.clone());
        prop_assert!(germ_equal(&sys, &u, &u, b).is_yes());
        let right = germ_compose(&sys, &u, &Germ::unit(&sys, xi), 64).unwrap();
        prop_assert!(germ_equal(&sys, &right, &u, b).is_yes());
        if let Ok(t) = u.target(&sys, 64) {
            let left = germ_compose(&sys, &Germ::unit(&sys, t), &u, 64).unwrap();
            prop_assert!(germ_equal(&sys, &left, &u, b).is_yes());
            let inv = u.inverse(&sys, 64).unwrap();
            let loop_ = germ_compose(&sys, &inv, &u, 64).unwrap();
            prop_assert!(germ_equal(&sys, &loop_, &Germ::unit(&sys, u.base.clone()), b).is_yes());
        }
        let v = random_germ(&mut rng, &sys, u.base.clone());
        let (uv, vu) = (germ_equal(&sys, &u, &v, b), germ_equal(&sys, &v, &u, b));
        prop_assert_eq!(uv.word(), vu.word());
    }
}
