//! Edge and vertex deletion.
//!
//! The stage works on a padded graph of size `N` whose first `n_t` vertices
//! may be targeted; the output drops `d` rows and columns (deleted vertices
//! first, then trailing ones).

use super::{Consts, Probes, Trace};
use crate::relu::{Circuit, Lin};

pub(super) fn network(
    c: &mut Circuit,
    k: &Consts,
    u: &[Lin],
    v: &[Lin],
    n_t: usize,
    x: &[Lin],
    probes: &mut Probes,
) -> (Vec<Lin>, Vec<Lin>) {
    let size = u.len();
    let d = x.len() / 2;
    let out = size - d;
    let at = |i: usize, k: usize| (i - 1) * size + (k - 1);

    let first: Vec<Vec<Lin>> = (0..d)
        .map(|j| (1..=n_t).map(|i| c.delta_const(&x[j], i as i64)).collect())
        .collect();
    let second: Vec<Vec<Lin>> = (0..d)
        .map(|j| {
            (1..=n_t)
                .map(|i| c.delta_const(&x[j + d], i as i64))
                .collect()
        })
        .collect();
    let same: Vec<Lin> = (0..d).map(|j| c.delta(&x[j], &x[j + d])).collect();

    // Edge deletion: t'_ik = ReLU(v_ik - t_ik).
    let mut tp = v.to_vec();
    for i in 1..=n_t {
        for kk in i + 1..=n_t {
            let mut t = Vec::with_capacity(2 * d);
            for j in 0..d {
                t.push(c.and_not(&first[j][i - 1], &second[j][kk - 1], &same[j]));
                t.push(c.and_not(&first[j][kk - 1], &second[j][i - 1], &same[j]));
            }
            let entry = c.relu(&v[at(i, kk)] - &Lin::sum(&t));
            tp[at(kk, i)] = entry.clone();
            tp[at(i, kk)] = entry;
        }
    }
    probes.record("T'", &tp);

    // Isolation test; entries past n_t may hold edges to vertices that
    // cannot be targeted, which are 0/1 as opposed to the sentinel.
    let mut t2 = Vec::with_capacity(n_t);
    let mut isolated = Vec::with_capacity(n_t);
    for i in 1..=n_t {
        let mut deg: Vec<Lin> = (1..=n_t)
            .filter(|&kk| kk != i)
            .map(|kk| tp[at(i, kk)].clone())
            .collect();
        for kk in n_t + 1..=size {
            deg.push(c.delta_const(&v[at(i, kk)], 1));
        }
        let total = Lin::sum(&deg);
        isolated.push(c.delta_const(&total, 0));
        t2.push(total);
    }
    probes.record("t''", &t2);

    let xp: Vec<Lin> = (0..d)
        .map(|j| {
            let ok: Vec<Lin> = (0..n_t)
                .map(|i| c.and(&first[j][i], &isolated[i]))
                .collect();
            c.relu(&x[j] - &((1 - Lin::sum(&ok)) * k.c))
        })
        .collect();
    probes.record("x'", &xp);

    // Rows to keep, and the rank of each kept row scaled by B.
    let marks: Vec<Lin> = (0..d).map(|j| c.delta(&xp[j], &x[j + d])).collect();
    let mut keep = Vec::with_capacity(size);
    for i in 1..=n_t {
        let hit: Vec<Lin> = (0..d)
            .map(|j| {
                let at_i = c.delta_const(&xp[j], i as i64);
                c.and(&marks[j], &at_i)
            })
            .collect();
        keep.push(c.relu(1 - Lin::sum(&hit)));
    }
    keep.extend((n_t..size).map(|_| Lin::constant(1)));
    probes.record("e'", &keep);

    let mut rank = Vec::with_capacity(size);
    let mut running = Lin::zero();
    for e in &keep {
        running = running + e;
        rank.push(c.relu(&running * k.b - &((1 - e) * k.c)));
    }
    probes.record("f'", &rank);

    // shift[i][j] = 1 iff output position i takes source row i + j.
    let shift: Vec<Vec<Lin>> = (1..=out)
        .map(|i| {
            let target = (i as i64) * k.b;
            (0..=d)
                .filter(|&j| i + j <= size)
                .map(|j| {
                    c.in_range(
                        &rank[i + j - 1],
                        &Lin::constant(target),
                        &Lin::constant(target + 1),
                    )
                })
                .collect()
        })
        .collect();

    let select = |c: &mut Circuit, sel: &[Lin], src: &dyn Fn(usize) -> Lin| -> Lin {
        let picked: Vec<Lin> = sel
            .iter()
            .enumerate()
            .map(|(j, g)| c.relu(src(j) - &((1 - g) * k.c)))
            .collect();
        Lin::sum(&picked)
    };

    let u_out: Vec<Lin> = (1..=out)
        .map(|i| select(c, &shift[i - 1], &|j| u[i + j - 1].clone()))
        .collect();
    let mut w = Vec::with_capacity(out * size);
    for i in 1..=out {
        for kk in 1..=size {
            w.push(select(c, &shift[i - 1], &|j| tp[at(i + j, kk)].clone()));
        }
    }
    probes.record("W", &w);
    let mut v_out = Vec::with_capacity(out * out);
    for i in 1..=out {
        for kk in 1..=out {
            v_out.push(select(c, &shift[kk - 1], &|j| {
                w[(i - 1) * size + (kk + j - 1)].clone()
            }));
        }
    }
    probes.record("U'", &u_out);
    probes.record("V'", &v_out);
    (u_out, v_out)
}

pub(super) fn reference(
    k: &Consts,
    u: &[i64],
    v: &[i64],
    n_t: usize,
    x: &[i64],
    trace: &mut Trace,
) -> (Vec<i64>, Vec<i64>) {
    let size = u.len();
    let d = x.len() / 2;
    let out = size - d;
    let target = |x: i64| (1..=n_t as i64).contains(&x).then(|| x as usize - 1);

    let mut tp = v.to_vec();
    for j in 0..d {
        if x[j] == x[j + d] {
            continue;
        }
        if let (Some(a), Some(b)) = (target(x[j]), target(x[j + d])) {
            tp[a * size + b] = 0;
            tp[b * size + a] = 0;
        }
    }
    trace.push("T'", tp.clone());

    let degree: Vec<i64> = (0..n_t)
        .map(|i| {
            let inner: i64 = (0..n_t).filter(|&k| k != i).map(|k| tp[i * size + k]).sum();
            let outer = (n_t..size).filter(|&k| v[i * size + k] == 1).count() as i64;
            inner + outer
        })
        .collect();
    trace.push("t''", degree.clone());

    let xp: Vec<i64> = x[..d]
        .iter()
        .map(|&xj| match target(xj) {
            Some(i) if degree[i] == 0 => xj,
            _ => 0,
        })
        .collect();
    trace.push("x'", xp.clone());

    let mut keep = vec![1i64; size];
    for j in 0..d {
        if xp[j] == x[j + d] {
            if let Some(i) = target(xp[j]) {
                keep[i] = 0;
            }
        }
    }
    trace.push("e'", keep.clone());
    let mut rank = Vec::with_capacity(size);
    let mut count = 0;
    for &e in &keep {
        count += e;
        rank.push(if e == 1 { count * k.b } else { 0 });
    }
    trace.push("f'", rank.clone());

    let rows: Vec<usize> = (0..size).filter(|&i| keep[i] == 1).take(out).collect();
    let u_out: Vec<i64> = rows.iter().map(|&i| u[i]).collect();
    let mut w = Vec::with_capacity(out * size);
    for &i in &rows {
        w.extend_from_slice(&tp[i * size..(i + 1) * size]);
    }
    trace.push("W", w.clone());
    let mut v_out = Vec::with_capacity(out * out);
    for r in 0..out {
        for &col in &rows {
            v_out.push(w[r * size + col]);
        }
    }
    trace.push("U'", u_out.clone());
    trace.push("V'", v_out.clone());
    (u_out, v_out)
}
