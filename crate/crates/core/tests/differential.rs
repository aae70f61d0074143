mod common;

use ged_exactgen::edit::reference_trace;
use ged_exactgen::graph::strip;
use ged_exactgen::{EditNetwork, Family, NetworkConfig};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = Family> {
    prop::sample::select(Family::ALL.to_vec())
}

/// Network output, reference output and the plain-operation oracle agree.
fn agree(family: Family, n: usize, m: u32, d: usize, seed: u64, draws: usize) {
    let cfg = NetworkConfig::new(family, n, m, d).unwrap();
    let net = EditNetwork::build_probed(&cfg).unwrap();
    let mut rng = common::rng(seed);
    for _ in 0..draws {
        let g = common::random_graph(&mut rng, n, m);
        let x = common::random_input(&mut rng, &cfg);
        let (padded, trace) = net.apply_traced(&g, &x).unwrap();
        let (ref_padded, ref_trace) = reference_trace(&cfg, &g, &x).unwrap();
        assert_eq!(padded, ref_padded, "{cfg:?} {g:?} {x:?}");
        for (name, values) in trace.iter() {
            assert_eq!(
                Some(values),
                ref_trace.get(name),
                "{name} for {cfg:?} {x:?}"
            );
        }
        let out = strip(&padded).unwrap();
        assert_eq!(out, common::semantic(&cfg, &g, &x), "{cfg:?} {g:?} {x:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn network_reference_and_oracle_agree(
        family in family(),
        n in 1usize..=7,
        m in 1u32..=4,
        d in 1usize..=3,
        seed in any::<u64>(),
    ) {
        agree(family, n, m, d, seed, 25);
    }
}

#[test]
fn zero_length_sequences_are_identity() {
    let mut rng = common::rng(3);
    for family in Family::ALL {
        let cfg = NetworkConfig::new(family, 4, 3, 0).unwrap();
        let net = EditNetwork::build(&cfg).unwrap();
        let g = common::random_graph(&mut rng, 4, 3);
        let x = ged_exactgen::EditInput::no_op(&cfg);
        assert_eq!(strip(&net.apply(&g, &x).unwrap()).unwrap(), g);
    }
}

#[test]
fn no_op_sequences_are_identity() {
    let mut rng = common::rng(4);
    for family in Family::ALL {
        for d in 1..=3 {
            let cfg = NetworkConfig::new(family, 5, 3, d).unwrap();
            let net = EditNetwork::build(&cfg).unwrap();
            let g = common::random_graph(&mut rng, 5, 3);
            let x = ged_exactgen::EditInput::no_op(&cfg);
            assert_eq!(
                strip(&net.apply(&g, &x).unwrap()).unwrap(),
                g,
                "{family} d={d}"
            );
        }
    }
}

#[test]
fn wide_sweep() {
    let mut seed = 0;
    for family in Family::ALL {
        for n in [2, 6, 10] {
            for d in 1..=4 {
                seed += 1;
                agree(family, n, 4, d, seed, 10);
            }
        }
    }
}
