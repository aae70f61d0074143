mod common;

use ged_exactgen::edit::{generate, Mode};
use ged_exactgen::ged::{ged, validate_edit_path, EditOp};
use ged_exactgen::worked::{check, examples, Source};

#[test]
fn published_intermediates_match() {
    for ex in examples() {
        let report = check(&ex).unwrap();
        assert!(
            report.passed(),
            "{}: {}",
            report.name,
            report.first_mismatch.unwrap()
        );
        assert!(report.compared > 0);
    }
}

#[test]
fn final_graphs() {
    let exs = examples();
    let out = |i: usize, mode| generate(&exs[i].graph, &exs[i].input, &exs[i].cfg, mode).unwrap();

    for mode in [Mode::Network, Mode::Reference] {
        let g1 = out(0, mode);
        assert_eq!(g1.labels(), &[3, 5, 2, 2, 5]);
        assert_eq!(g1.edges(), exs[0].graph.edges());

        let g2 = out(1, mode);
        assert_eq!(g2.labels(), &[3, 5, 2, 4]);
        let rows: Vec<Vec<bool>> = (1..=4)
            .map(|i| (1..=4).map(|k| g2.has_edge(i, k)).collect())
            .collect();
        let expected = [[0, 1, 0, 1], [1, 0, 1, 1], [0, 1, 0, 1], [1, 1, 1, 0]];
        for (r, e) in rows.iter().zip(expected) {
            assert_eq!(r, &e.map(|v| v == 1));
        }

        let g3 = out(2, mode);
        assert_eq!(g3.labels(), &[3, 5, 4, 2, 4, 5]);
        assert!(g3.has_edge(4, 6));
        assert_eq!(g3.edge_count(), exs[2].graph.edge_count() + 1);
    }
}

#[test]
fn general_example_stays_within_distance() {
    let ex = &examples()[3];
    let a = generate(&ex.graph, &ex.input, &ex.cfg, Mode::Network).unwrap();
    let b = generate(&ex.graph, &ex.input, &ex.cfg, Mode::Reference).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, common::semantic(&ex.cfg, &ex.graph, &ex.input));
    assert!(ged(&ex.graph, &a).unwrap() <= 3);
}

#[test]
fn deletion_example_path_is_valid() {
    let (g, variants) = common::sample_and_variants();
    let path = [
        EditOp::DeleteEdge { a: 2, b: 3 },
        EditOp::DeleteVertex { vertex: 3 },
    ];
    assert!(validate_edit_path(&path, &g));
    assert!(!validate_edit_path(
        &[EditOp::DeleteVertex { vertex: 3 }],
        &g
    ));
    let out = ged_exactgen::ged::apply_edit_path(&path, &g).unwrap();
    assert_eq!(out, variants[0]);
}

#[test]
fn small_suppression_constant_breaks_deletion_example() {
    let mut exs = examples();
    for ex in &mut exs {
        ex.cfg = ex.cfg.with_constants_unchecked(ex.cfg.b, 4);
    }
    let report = check(&exs[1]).unwrap();
    let first = report
        .first_mismatch
        .expect("mutated constant must be detected");
    assert_eq!(first.symbol, "x'");
    assert_eq!(first.source, Source::Network);
    assert_eq!(first.index, Some(0));
}

#[test]
fn examples_are_stable_across_runs() {
    let a: Vec<String> = examples()
        .iter()
        .map(|e| format!("{:?}", check(e).unwrap()))
        .collect();
    let b: Vec<String> = examples()
        .iter()
        .map(|e| format!("{:?}", check(e).unwrap()))
        .collect();
    assert_eq!(a, b);
}
