use ged_exactgen::relu::{
    gadget_and, gadget_delta, gadget_heaviside, gadget_interval, gadget_max2, Circuit, GadgetSpec,
    Lin, ReluNetwork,
};
use num_rational::Rational64;
use proptest::prelude::*;

const SPAN: i64 = 40;

fn eval1(net: &ReluNetwork, x: &[i64]) -> i64 {
    let out = net.evaluate_int(x).unwrap();
    assert_eq!(out.len(), 1);
    out[0]
}

#[test]
fn max_exhaustive() {
    let net = gadget_max2();
    for a in -SPAN..=SPAN {
        for b in -SPAN..=SPAN {
            assert_eq!(eval1(&net, &[a, b]), if a >= b { a } else { b });
        }
    }
}

#[test]
fn delta_exhaustive() {
    let net = gadget_delta();
    for a in -SPAN..=SPAN {
        for b in -SPAN..=SPAN {
            assert_eq!(eval1(&net, &[a, b]), i64::from(a == b), "δ({a},{b})");
        }
    }
}

#[test]
fn heaviside_exhaustive() {
    let net = gadget_heaviside();
    for a in -10 * SPAN..=10 * SPAN {
        assert_eq!(eval1(&net, &[a]), i64::from(a >= 0), "H({a})");
    }
}

#[test]
fn and_on_binary_inputs() {
    let net = gadget_and();
    for a in 0..=1 {
        for b in 0..=1 {
            assert_eq!(eval1(&net, &[a, b]), a * b);
        }
    }
}

#[test]
fn relu_clamp() {
    let net = GadgetSpec::ReluClamp.build().unwrap();
    for a in -SPAN..=SPAN {
        assert_eq!(eval1(&net, &[a]), a.max(0));
    }
}

#[test]
fn interval_exhaustive_on_grids() {
    for den in [2i64, 3, 5, 7, 10] {
        let spacing = Rational64::new(1, den);
        for lo in 0..den {
            for hi in lo..=den {
                for half_open in [false, true] {
                    let net = gadget_interval(
                        Rational64::new(lo, den),
                        Rational64::new(hi, den),
                        half_open,
                        spacing,
                    )
                    .unwrap();
                    for k in -2..=den + 2 {
                        let x = Rational64::new(k, den);
                        let inside = if half_open { k > lo } else { k >= lo } && k <= hi;
                        let got = net.evaluate(&[x]).unwrap()[0];
                        assert_eq!(
                            got,
                            Rational64::from_integer(i64::from(inside)),
                            "[{lo},{hi}]/{den} at {k}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn interval_rejects_off_grid() {
    let net = gadget_interval(
        Rational64::new(2, 5),
        Rational64::new(3, 5),
        true,
        Rational64::new(1, 5),
    )
    .unwrap();
    assert!(net.evaluate(&[Rational64::new(9, 20)]).is_err());
    let fine = gadget_interval(
        Rational64::new(2, 5),
        Rational64::new(3, 5),
        true,
        Rational64::new(1, 100),
    )
    .unwrap();
    assert_eq!(
        fine.evaluate(&[Rational64::new(9, 20)]).unwrap()[0],
        Rational64::from_integer(1)
    );
}

#[test]
fn sort_rank_is_a_stable_order() {
    let net = GadgetSpec::SortRank { width: 4 }.build().unwrap();
    let vals = [1i64, 2, 3, 9];
    for a in vals {
        for b in vals {
            for c in vals {
                for d in vals {
                    let x = [a, b, c, d];
                    let mut order: Vec<usize> = (0..4).collect();
                    order.sort_by_key(|&j| x[j]);
                    let mut want = [0i64; 4];
                    for (r, &j) in order.iter().enumerate() {
                        want[j] = r as i64;
                    }
                    assert_eq!(net.evaluate_int(&x).unwrap(), want.to_vec(), "{x:?}");
                }
            }
        }
    }
}

/// `relu(w·x + b)` over one input.
fn unit(w: i64, b: i64) -> ReluNetwork {
    let mut c = Circuit::new(1);
    let x = c.input(0);
    let y = c.relu(&x * w + b);
    c.finish(&[y], None, &[1]).unwrap()
}

proptest! {
    #[test]
    fn compose_matches_nested_evaluation(w1 in -5i64..=5, b1 in -5i64..=5, w2 in -5i64..=5, b2 in -5i64..=5, x in -50i64..=50) {
        let f = unit(w1, b1);
        let g = unit(w2, b2);
        let fg = ReluNetwork::compose(&f, &g).unwrap();
        let inner = f.evaluate_int(&[x]).unwrap();
        prop_assert_eq!(fg.evaluate_int(&[x]).unwrap(), g.evaluate_int(&inner).unwrap());
        prop_assert_eq!(fg.metrics().depth, f.metrics().depth + g.metrics().depth);
    }

    #[test]
    fn concat_evaluates_parts_independently(a in -30i64..=30, b in -30i64..=30, c in -30i64..=30) {
        let parts = [gadget_max2(), gadget_heaviside(), ReluNetwork::identity(1)];
        let net = ReluNetwork::concat(&parts).unwrap();
        prop_assert_eq!(net.input_arity(), 4);
        let out = net.evaluate_int(&[a, b, c, a]).unwrap();
        prop_assert_eq!(out, vec![a.max(b), i64::from(c >= 0), a]);
    }

    #[test]
    fn circuit_linear_algebra(xs in prop::collection::vec(-20i64..=20, 3)) {
        let mut c = Circuit::new(3);
        let v: Vec<Lin> = c.inputs(0..3);
        let sum = Lin::sum(&v);
        let r = c.relu(&v[0] - &v[1]);
        let m = c.max2(&r, &v[2]);
        let out = c.finish(&[sum, m], Some(4), &[1, 1, 1]).unwrap();
        prop_assert_eq!(out.metrics().depth, 4);
        let want = vec![xs.iter().sum(), (xs[0] - xs[1]).max(0).max(xs[2])];
        prop_assert_eq!(out.evaluate_int(&xs).unwrap(), want);
    }
}

#[test]
fn requested_depth_too_small_is_an_error() {
    let mut c = Circuit::new(2);
    let x = c.inputs(0..2);
    let y = c.delta(&x[0], &x[1]);
    assert!(c.finish(&[y], Some(1), &[1, 1]).is_err());
}
