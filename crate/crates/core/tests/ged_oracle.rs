mod common;

use ged_exactgen::edit::{generate, reference_trace, Mode};
use ged_exactgen::ged::{
    apply_edit_path, certify_within, exact_ged, ged, validate_edit_path, Bound, CertifyMode,
    EditOp, Method,
};
use ged_exactgen::graph::edge_symmetric_difference;
use ged_exactgen::sampler::{sample, SamplerConfig};
use ged_exactgen::{Family, LabeledGraph, NetworkConfig};
use proptest::prelude::*;
use rand::Rng;

fn small_graph() -> impl Strategy<Value = LabeledGraph> {
    (0usize..=4, 1u32..=2, any::<u64>())
        .prop_map(|(n, m, seed)| common::random_graph(&mut common::rng(seed), n, m))
}

fn with_alphabet(g: &LabeledGraph, m: u32) -> LabeledGraph {
    g.with_alphabet(m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn matches_brute_force(g in small_graph(), h in small_graph()) {
        let (g, h) = (with_alphabet(&g, 2), with_alphabet(&h, 2));
        let want = common::brute_ged(&g, &h);
        let cert = exact_ged(&g, &h, 100).unwrap();
        prop_assert_eq!(cert.bound, Bound::Exact(want));
        prop_assert_eq!(cert.method, Method::ExactSearch);
        let path = cert.witness.unwrap();
        prop_assert_eq!(path.len(), want);
        // The path reaches h up to the order of its vertices.
        prop_assert_eq!(common::brute_ged(&apply_edit_path(&path, &g).unwrap(), &h), 0);
    }

    #[test]
    fn symmetric(g in small_graph(), h in small_graph()) {
        let (g, h) = (with_alphabet(&g, 2), with_alphabet(&h, 2));
        prop_assert_eq!(ged(&g, &h).unwrap(), ged(&h, &g).unwrap());
    }

    #[test]
    fn triangle_inequality(a in small_graph(), b in small_graph(), c in small_graph()) {
        let (a, b, c) = (with_alphabet(&a, 2), with_alphabet(&b, 2), with_alphabet(&c, 2));
        prop_assert!(ged(&a, &c).unwrap() <= ged(&a, &b).unwrap() + ged(&b, &c).unwrap());
    }

    #[test]
    fn cap_splits_exact_and_exceeds(g in small_graph(), h in small_graph(), cap in 0usize..6) {
        let (g, h) = (with_alphabet(&g, 2), with_alphabet(&h, 2));
        let dist = common::brute_ged(&g, &h);
        let cert = exact_ged(&g, &h, cap).unwrap();
        if dist <= cap {
            prop_assert_eq!(cert.bound, Bound::Exact(dist));
        } else {
            prop_assert_eq!(cert.bound, Bound::Exceeds(cap));
            prop_assert!(cert.witness.is_none());
        }
    }
}

/// One random unit edit that respects the ordering rules, or `None`.
fn random_edit(rng: &mut rand_chacha::ChaCha8Rng, g: &LabeledGraph) -> Option<EditOp> {
    let n = g.n();
    match rng.gen_range(0..5) {
        0 if n > 0 => Some(EditOp::Substitute {
            vertex: rng.gen_range(1..=n),
            label: rng.gen_range(1..=g.m()),
        }),
        1 if !g.edges().is_empty() => {
            let e = g.edges();
            let (a, b) = e[rng.gen_range(0..e.len())];
            Some(EditOp::DeleteEdge { a, b })
        }
        2 if n >= 2 => {
            let (a, b) = (rng.gen_range(1..=n), rng.gen_range(1..=n));
            (a != b && !g.has_edge(a, b)).then_some(EditOp::InsertEdge { a, b })
        }
        3 if n > 0 => {
            let v = rng.gen_range(1..=n);
            (g.degree(v) == 0).then_some(EditOp::DeleteVertex { vertex: v })
        }
        4 => Some(EditOp::InsertVertex {
            label: rng.gen_range(1..=g.m()),
        }),
        _ => None,
    }
}

#[test]
fn single_edit_costs_at_most_one() {
    let mut rng = common::rng(11);
    let mut seen = 0;
    while seen < 2000 {
        let n = rng.gen_range(0..=6);
        let g = common::random_graph(&mut rng, n, 3);
        let Some(op) = random_edit(&mut rng, &g) else {
            continue;
        };
        assert!(validate_edit_path(std::slice::from_ref(&op), &g));
        let h = apply_edit_path(std::slice::from_ref(&op), &g).unwrap();
        let d = ged(&g, &h).unwrap();
        assert!(d <= 1, "{op:?} on {g:?}");
        // Only a substitution to the same label is free.
        if d == 0 {
            assert!(matches!(op, EditOp::Substitute { .. }));
        }
        seen += 1;
    }
}

#[test]
fn sample_variants_are_at_distance_two() {
    let (g, variants) = common::sample_and_variants();
    for v in &variants {
        assert_eq!(exact_ged(&g, v, 10).unwrap().bound, Bound::Exact(2));
        assert_eq!(exact_ged(v, &g, 10).unwrap().bound, Bound::Exact(2));
    }
    assert_eq!(exact_ged(&g, &g, 0).unwrap().bound, Bound::Exact(0));
}

#[test]
fn empty_path_is_valid() {
    let (g, _) = common::sample_and_variants();
    assert!(validate_edit_path(&[], &g));
    assert!(!validate_edit_path(
        &[EditOp::InsertEdge { a: 1, b: 2 }],
        &g
    ));
    assert!(!validate_edit_path(
        &[EditOp::DeleteEdge { a: 1, b: 3 }],
        &g
    ));
    assert!(!validate_edit_path(
        &[EditOp::Substitute {
            vertex: 1,
            label: 6
        }],
        &g
    ));
}

#[test]
fn edge_changes_on_fixed_labels() {
    let mut rng = common::rng(12);
    for _ in 0..500 {
        let n = rng.gen_range(1..=5);
        let g = common::random_graph(&mut rng, n, 1);
        let h = common::random_graph(&mut rng, n, 1);
        let sym = edge_symmetric_difference(&g, &h).unwrap();
        let exact = ged(&g, &h).unwrap();
        assert!(exact <= sym);
        if sym <= 1 {
            assert_eq!(exact, sym);
        }
        let cert = certify_within(&g, &h, sym, CertifyMode::EdgeOnly).unwrap();
        assert_eq!(cert.bound, Bound::AtMost(sym));
        assert_eq!(cert.method, Method::SymmetricDifference);
    }
    // Relabeling a path can make the symmetric difference overstate the distance.
    let p = LabeledGraph::new(1, vec![1, 1, 1], &[(1, 2), (2, 3)]).unwrap();
    let q = LabeledGraph::new(1, vec![1, 1, 1], &[(1, 2), (1, 3)]).unwrap();
    assert_eq!(ged(&p, &q).unwrap(), 0);
    assert_eq!(edge_symmetric_difference(&p, &q).unwrap(), 2);
}

#[test]
fn certify_self_for_any_d() {
    let (g, _) = common::sample_and_variants();
    for d in 0..4 {
        assert!(certify_within(&g, &g, d, CertifyMode::Exact)
            .unwrap()
            .within(d));
        assert!(certify_within(&g, &g, d, CertifyMode::EdgeOnly)
            .unwrap()
            .within(d));
    }
}

#[test]
fn generated_graphs_are_within_d() {
    let mut rng = common::rng(13);
    for family in Family::ALL {
        for d in 1..=2 {
            for n in 2..=5 {
                let cfg = NetworkConfig::new(family, n, 3, d).unwrap();
                let scfg = SamplerConfig::new(&cfg, rng.gen());
                for x in sample(&scfg, 40) {
                    let g = common::random_graph(&mut rng, n, 3);
                    let out = generate(&g, &x, &cfg, Mode::Reference).unwrap();
                    let cert = certify_within(&g, &out, d, CertifyMode::Exact).unwrap();
                    assert!(cert.within(d), "{family} {g:?} -> {out:?}");
                }
            }
        }
    }
}

#[test]
fn reference_trace_bounds_distance_by_operation_count() {
    // The general family counts its surviving operations in t and t'.
    let mut rng = common::rng(14);
    let cfg = NetworkConfig::new(Family::Ge, 4, 2, 2).unwrap();
    for x in sample(&SamplerConfig::new(&cfg, 5), 200) {
        let g = common::random_graph(&mut rng, 4, 2);
        let (_, trace) = reference_trace(&cfg, &g, &x).unwrap();
        let t = trace.get("t").unwrap();
        let tp = trace.get("t'").unwrap();
        let ops = t
            .iter()
            .zip(tp)
            .filter(|(a, b)| **a == 1 && **b == 0)
            .count();
        assert!(ops <= 2);
        let out = generate(&g, &x, &cfg, Mode::Reference).unwrap();
        assert!(ged(&g, &out).unwrap() <= ops);
    }
}

#[test]
fn guard_rejects_large_inputs() {
    let g = LabeledGraph::empty(1, vec![1; 10]).unwrap();
    let h = LabeledGraph::empty(1, vec![1; 5]).unwrap();
    assert!(exact_ged(&g, &h, 3).is_err());
    assert!(certify_within(&g, &h, 3, CertifyMode::Exact).is_err());
}
