//! Label substitution.

use super::{Consts, Probes, Trace};
use crate::relu::{Circuit, Lin};

/// `e_j`: `x_j`, or 0 when the index already occurred earlier in `x`.
pub(super) fn dedup(c: &mut Circuit, k: &Consts, x: &[Lin]) -> Vec<Lin> {
    (0..x.len())
        .map(|j| {
            let repeats: Vec<Lin> = (0..j).map(|l| c.delta(&x[j], &x[l])).collect();
            c.relu(&x[j] - &(Lin::sum(&repeats) * k.c))
        })
        .collect()
}

/// Writes `labels[j]` to vertex `e_j` for every nonzero `e_j <= n`. Entries of
/// `u` past `n` pass through.
pub(super) fn substitute(
    c: &mut Circuit,
    k: &Consts,
    u: &[Lin],
    n: usize,
    e: &[Lin],
    labels: &[Lin],
    probes: &mut Probes,
) -> Vec<Lin> {
    let mut f = Vec::with_capacity(n);
    let mut g = Vec::with_capacity(n);
    for i in 1..=n {
        let hits: Vec<Lin> = e.iter().map(|ej| c.delta_const(ej, i as i64)).collect();
        f.push(c.relu(&u[i - 1] - &(Lin::sum(&hits) * k.c)));
        let picked: Vec<Lin> = hits
            .iter()
            .zip(labels)
            .map(|(h, l)| c.relu(l - &((1 - h) * k.c)))
            .collect();
        g.push(Lin::sum(&picked));
    }
    probes.record("F", &f);
    probes.record("G", &g);
    let mut out: Vec<Lin> = f.iter().zip(&g).map(|(a, b)| a + b).collect();
    out.extend_from_slice(&u[n..]);
    out
}

pub(super) fn network(
    c: &mut Circuit,
    k: &Consts,
    u: &[Lin],
    x: &[Lin],
    probes: &mut Probes,
) -> Vec<Lin> {
    let d = x.len() / 2;
    let e = dedup(c, k, &x[..d]);
    probes.record("e", &e);
    let out = substitute(c, k, u, u.len(), &e, &x[d..], probes);
    probes.record("L'", &out);
    out
}

pub(super) fn reference_dedup(x: &[i64]) -> Vec<i64> {
    x.iter()
        .enumerate()
        .map(|(j, &v)| if x[..j].contains(&v) { 0 } else { v })
        .collect()
}

/// Returns the updated labels and records `F` and `G`.
pub(super) fn reference_substitute(
    u: &[i64],
    n: usize,
    e: &[i64],
    labels: &[i64],
    trace: &mut Trace,
) -> Vec<i64> {
    let mut f = u[..n].to_vec();
    let mut g = vec![0; n];
    for (&target, &label) in e.iter().zip(labels) {
        if (1..=n as i64).contains(&target) {
            let i = target as usize - 1;
            f[i] = 0;
            g[i] = label;
        }
    }
    trace.push("F", f.clone());
    trace.push("G", g.clone());
    let mut out: Vec<i64> = f.iter().zip(&g).map(|(a, b)| a + b).collect();
    out.extend_from_slice(&u[n..]);
    out
}

pub(super) fn reference(u: &[i64], x: &[i64], trace: &mut Trace) -> Vec<i64> {
    let d = x.len() / 2;
    let e = reference_dedup(&x[..d]);
    trace.push("e", e.clone());
    let out = reference_substitute(u, u.len(), &e, &x[d..], trace);
    trace.push("L'", out.clone());
    out
}
