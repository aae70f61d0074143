//! Edge and vertex insertion.
//!
//! The stage works on a padded graph of size `N >= n + d` with `n` real
//! vertices. Slots with `x_j = x_{j+d}` insert a vertex labeled `x_{j+2d}`;
//! other slots insert the edge `{x_j, x_{j+d}}` when both ends exist.

use super::{Consts, Probes, Trace};
use crate::relu::{Circuit, Lin};

#[allow(clippy::too_many_arguments)]
pub(super) fn network(
    c: &mut Circuit,
    k: &Consts,
    u: &[Lin],
    v: &[Lin],
    n: usize,
    x: &[Lin],
    dedup: bool,
    probes: &mut Probes,
) -> (Vec<Lin>, Vec<Lin>) {
    let size = u.len();
    let d = x.len() / 3;
    let (a, b, labels) = (&x[..d], &x[d..2 * d], &x[2 * d..]);
    let at = |i: usize, k: usize| (i - 1) * size + (k - 1);

    let same: Vec<Lin> = (0..d).map(|j| c.delta(&a[j], &b[j])).collect();
    let inserted = Lin::sum(&same);
    probes.record("d'", std::slice::from_ref(&inserted));
    let limit = &inserted + n as i64;

    // Refinement (i): repeated edge insertions.
    let e: Vec<Lin> = if dedup {
        (0..d)
            .map(|j| {
                let repeats: Vec<Lin> = (0..j)
                    .map(|l| {
                        let p = c.delta(&a[j], &a[l]);
                        let q = c.delta(&b[j], &b[l]);
                        c.and_all(&[1 - &same[j], p, q])
                    })
                    .collect();
                c.relu(&a[j] - &(Lin::sum(&repeats) * k.c))
            })
            .collect()
    } else {
        a.to_vec()
    };
    probes.record("e'", &e);

    // Refinements (ii) and (iii): endpoints beyond n + d'.
    let mut f = Vec::with_capacity(d);
    let mut x1 = Vec::with_capacity(d);
    let mut fp = Vec::with_capacity(d);
    let mut x2 = Vec::with_capacity(d);
    for j in 0..d {
        let differ = 1 - c.delta(&e[j], &b[j]);
        let beyond = c.heaviside(&(&e[j] - &limit - 1));
        let fj = c.and(&differ, &beyond);
        x1.push(c.relu(&e[j] - &(&fj * k.c)));
        f.push(fj);
        let beyond = c.heaviside(&(&b[j] - &limit - 1));
        let fj = c.and(&(1 - &same[j]), &beyond);
        x2.push(c.relu(&b[j] - &(&fj * k.c)));
        fp.push(fj);
    }
    probes.record("f", &f);
    probes.record("x1", &x1);
    probes.record("f'", &fp);
    probes.record("x2", &x2);

    // Labels of vertex insertions, sentinel otherwise, sorted ascending.
    let g: Vec<Lin> = (0..d)
        .map(|j| {
            let keep = c.relu(&labels[j] - &((1 - &same[j]) * k.c));
            let fill = c.relu(k.b - &(&same[j] * k.c));
            keep + fill
        })
        .collect();
    probes.record("g", &g);
    let rank = c.sort_rank(&g);
    probes.record("g'", &rank);
    let x3: Vec<Lin> = (0..d)
        .map(|j| {
            let parts: Vec<Lin> = (0..d)
                .map(|i| {
                    let here = c.delta_const(&rank[i], j as i64);
                    c.relu(&g[i] - &((1 - here) * k.c))
                })
                .collect();
            Lin::sum(&parts)
        })
        .collect();
    probes.record("x3", &x3);

    let mut u_out = u.to_vec();
    u_out[n..n + d].clone_from_slice(&x3);
    probes.record("U'", &u_out);

    // Rows and columns of inserted vertices become zero.
    let active: Vec<Lin> = (1..=size)
        .map(|i| {
            if i <= n {
                Lin::constant(1)
            } else {
                c.heaviside(&(&limit - i as i64))
            }
        })
        .collect();
    let mut r = v.to_vec();
    for i in n + 1..=(n + d).min(size) {
        for kk in 1..=(n + d).min(size) {
            let p = c.and(&active[i - 1], &active[kk - 1]);
            r[at(i, kk)] = &r[at(i, kk)] - &(&p * k.b);
            if kk <= n {
                r[at(kk, i)] = &r[at(kk, i)] - &(&active[i - 1] * k.b);
            }
        }
    }
    probes.record("R", &r);

    // Edge insertion among indices 1..n+d-1.
    let hi = (n + d).saturating_sub(1).min(size);
    let live: Vec<Lin> = (0..d).map(|j| 1 - c.delta(&x1[j], &x2[j])).collect();
    let one: Vec<Vec<Lin>> = (0..d)
        .map(|j| (1..=hi).map(|i| c.delta_const(&x1[j], i as i64)).collect())
        .collect();
    let two: Vec<Vec<Lin>> = (0..d)
        .map(|j| (1..=hi).map(|i| c.delta_const(&x2[j], i as i64)).collect())
        .collect();
    let mut v_out = r.clone();
    let mut s = vec![Lin::zero(); size * size];
    for i in 1..=hi {
        for kk in i + 1..=hi {
            let mut terms = Vec::with_capacity(2 * d);
            for j in 0..d {
                terms.push(c.and_all(&[
                    live[j].clone(),
                    one[j][i - 1].clone(),
                    two[j][kk - 1].clone(),
                ]));
                terms.push(c.and_all(&[
                    live[j].clone(),
                    one[j][kk - 1].clone(),
                    two[j][i - 1].clone(),
                ]));
            }
            let total = Lin::sum(&terms);
            // Mirrored duplicates can make the count 2; clamp to 1.
            let hit = 1 - c.relu(1 - total);
            let entry = &hit + &c.relu(&r[at(i, kk)] - &(&hit * k.c));
            s[at(i, kk)] = hit.clone();
            s[at(kk, i)] = hit;
            v_out[at(i, kk)] = entry.clone();
            v_out[at(kk, i)] = entry;
        }
    }
    probes.record("S'", &s);
    probes.record("V'", &v_out);
    (u_out, v_out)
}

pub(super) fn reference(
    k: &Consts,
    u: &[i64],
    v: &[i64],
    n: usize,
    x: &[i64],
    dedup: bool,
    trace: &mut Trace,
) -> (Vec<i64>, Vec<i64>) {
    let size = u.len();
    let d = x.len() / 3;
    let (a, b, labels) = (&x[..d], &x[d..2 * d], &x[2 * d..]);

    let inserted = (0..d).filter(|&j| a[j] == b[j]).count();
    trace.push("d'", vec![inserted as i64]);
    let limit = (n + inserted) as i64;

    let e: Vec<i64> = (0..d)
        .map(|j| {
            let repeated = dedup && a[j] != b[j] && (0..j).any(|l| a[l] == a[j] && b[l] == b[j]);
            if repeated {
                0
            } else {
                a[j]
            }
        })
        .collect();
    trace.push("e'", e.clone());

    let f: Vec<i64> = (0..d)
        .map(|j| (e[j] != b[j] && e[j] > limit) as i64)
        .collect();
    let x1: Vec<i64> = (0..d).map(|j| if f[j] == 1 { 0 } else { e[j] }).collect();
    let fp: Vec<i64> = (0..d)
        .map(|j| (a[j] != b[j] && b[j] > limit) as i64)
        .collect();
    let x2: Vec<i64> = (0..d).map(|j| if fp[j] == 1 { 0 } else { b[j] }).collect();
    trace.push("f", f);
    trace.push("x1", x1.clone());
    trace.push("f'", fp);
    trace.push("x2", x2.clone());

    let g: Vec<i64> = (0..d)
        .map(|j| if a[j] == b[j] { labels[j] } else { k.b })
        .collect();
    trace.push("g", g.clone());
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by_key(|&j| g[j]);
    let mut rank = vec![0i64; d];
    for (r, &j) in order.iter().enumerate() {
        rank[j] = r as i64;
    }
    trace.push("g'", rank);
    let x3: Vec<i64> = order.iter().map(|&j| g[j]).collect();
    trace.push("x3", x3.clone());

    let mut u_out = u.to_vec();
    u_out[n..n + d].copy_from_slice(&x3);
    trace.push("U'", u_out.clone());

    let mut r = v.to_vec();
    let new = n..(n + inserted);
    for i in new.clone() {
        for kk in 0..n + inserted {
            r[i * size + kk] = 0;
            r[kk * size + i] = 0;
        }
    }
    trace.push("R", r.clone());

    let mut s = vec![0i64; size * size];
    for j in 0..d {
        let (p, q) = (x1[j], x2[j]);
        if p != q && p >= 1 && q >= 1 {
            let (p, q) = (p as usize - 1, q as usize - 1);
            s[p * size + q] = 1;
            s[q * size + p] = 1;
        }
    }
    trace.push("S'", s.clone());
    let v_out: Vec<i64> = r
        .iter()
        .zip(&s)
        .map(|(&rv, &sv)| if sv == 1 { 1 } else { rv })
        .collect();
    trace.push("V'", v_out.clone());
    (u_out, v_out)
}
