//! The general family: substitutions, insertions and deletions read from a
//! sequence of decimals in `[0, 1)`.
//!
//! Sequence layout (blocks of `d`): substitution indices, substitution
//! labels, insertion first indices, insertion second indices, insertion
//! labels, deletion first indices, deletion second indices. Decimals are
//! converted to integers by interval tests on the grid `1/Q`; at most `d`
//! operations survive, taken in the order substitution, insertion, deletion.

use num_rational::Rational64;

use super::{gd, gi, gs, Consts, NetworkConfig, Probes, Trace};
use crate::error::{Error, Result};
use crate::relu::{Circuit, Lin};

/// `ceil(z·D/Q)`: the index selected by the grid numerator `z`.
pub fn convert_index(z: i64, q: i64, divisor: i64) -> i64 {
    let num = z as i128 * divisor as i128;
    let q = q as i128;
    ((num + q - 1).div_euclid(q)) as i64
}

/// `max(1, ceil(z·m/Q))`: the label selected by the grid numerator `z`.
pub fn convert_label(z: i64, q: i64, m: i64) -> i64 {
    convert_index(z, q, m).max(1)
}

/// Parses a plain decimal such as `0.45`, `.5` or `1` exactly.
pub fn parse_decimal(s: &str) -> Result<Rational64> {
    let err = || Error::Parse {
        line: 0,
        msg: format!("not a decimal: {s:?}"),
    };
    let t = s.trim();
    let (neg, t) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = t.split_once('.').unwrap_or((t, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) || frac.len() > 18 {
        return Err(err());
    }
    let den = 10i64.pow(frac.len() as u32);
    let int_v: i64 = if int.is_empty() {
        0
    } else {
        int.parse().map_err(|_| err())?
    };
    let frac_v: i64 = if frac.is_empty() {
        0
    } else {
        frac.parse().map_err(|_| err())?
    };
    let num = int_v
        .checked_mul(den)
        .and_then(|v| v.checked_add(frac_v))
        .ok_or_else(err)?;
    let r = Rational64::new(num, den);
    Ok(if neg { -r } else { r })
}

struct Blocks {
    n: usize,
    d: usize,
    m: i64,
    q: i64,
}

impl Blocks {
    fn new(cfg: &NetworkConfig) -> Blocks {
        Blocks {
            n: cfg.n,
            d: cfg.d,
            m: i64::from(cfg.m),
            q: cfg.grid,
        }
    }

    /// Divisor of the index conversion for position `j`, or `None` for a
    /// label position.
    fn divisor(&self, j: usize) -> Option<i64> {
        match j / self.d {
            1 | 4 => None,
            2 | 3 => Some((self.n + self.d - 1) as i64),
            _ => Some(self.n as i64),
        }
    }
}

fn index_net(c: &mut Circuit, z: &Lin, q: i64, divisor: i64) -> Lin {
    let step = q / divisor;
    let mut terms = Vec::with_capacity(divisor as usize);
    for i in 1..=divisor {
        let lo = (i - 1) * step;
        let inside = c.in_range(z, &Lin::constant(lo), &Lin::constant(i * step));
        let at_lo = c.delta_const(z, lo);
        terms.push((inside - at_lo) * i);
    }
    Lin::sum(&terms)
}

fn label_net(c: &mut Circuit, z: &Lin, q: i64, m: i64) -> Lin {
    let step = q / m;
    let mut terms = Vec::with_capacity(m as usize);
    for i in 1..=m {
        let lo = (i - 1) * step;
        let mut r = c.in_range(z, &Lin::constant(lo), &Lin::constant(i * step));
        if i > 1 {
            r = r - c.delta_const(z, lo);
        }
        terms.push(r * i);
    }
    Lin::sum(&terms)
}

pub(super) fn network(
    c: &mut Circuit,
    k: &Consts,
    cfg: &NetworkConfig,
    u: &[Lin],
    v: &[Lin],
    x: &[Lin],
    probes: &mut Probes,
) -> (Vec<Lin>, Vec<Lin>) {
    let bl = Blocks::new(cfg);
    let (n, d) = (bl.n, bl.d);

    let xp: Vec<Lin> = (0..7 * d)
        .map(|j| match bl.divisor(j) {
            Some(div) => index_net(c, &x[j], bl.q, div),
            None => label_net(c, &x[j], bl.q, bl.m),
        })
        .collect();
    probes.record("x'", &xp);

    // Repeated operations are dropped.
    let mut xpp = xp.clone();
    let sub = gs::dedup(c, k, &xp[..d]);
    xpp[..d].clone_from_slice(&sub);
    for j in 0..d {
        let (a, b) = (2 * d, 3 * d);
        let same = c.delta(&xp[a + j], &xp[b + j]);
        let repeats: Vec<Lin> = (0..j)
            .map(|l| {
                let p = c.delta(&xp[a + j], &xp[a + l]);
                let q = c.delta(&xp[b + j], &xp[b + l]);
                c.and_all(&[1 - &same, p, q])
            })
            .collect();
        xpp[a + j] = c.relu(&xp[a + j] - &(Lin::sum(&repeats) * k.c));
    }
    for j in 0..d {
        let (a, b) = (5 * d, 6 * d);
        let repeats: Vec<Lin> = (0..j)
            .map(|l| {
                let p = c.delta(&xp[a + j], &xp[a + l]);
                let q = c.delta(&xp[b + j], &xp[b + l]);
                c.and(&p, &q)
            })
            .collect();
        xpp[a + j] = c.relu(&xp[a + j] - &(Lin::sum(&repeats) * k.c));
    }
    probes.record("x''", &xpp);

    // Operation flags in application order, and the suppression of all
    // operations past the first d.
    let heads: Vec<usize> = (0..d).chain(2 * d..3 * d).chain(5 * d..6 * d).collect();
    let mut t = Vec::with_capacity(3 * d);
    for &h in &heads {
        let z1 = c.delta_const(&xpp[h], 0);
        if h < d {
            t.push(1 - z1);
        } else {
            let z2 = c.delta_const(&xpp[h + d], 0);
            t.push(c.relu(1 - z1 - z2));
        }
    }
    probes.record("t", &t);
    let mut tp = Vec::with_capacity(3 * d);
    let mut running = Lin::zero();
    for tj in &t {
        running = running + tj;
        tp.push(c.heaviside(&(&running - (d as i64 + 1))));
    }
    probes.record("t'", &tp);

    let mut big_x = xpp.clone();
    for (&h, s) in heads.iter().zip(&tp) {
        let w = c.relu(&xpp[h] - &(s * k.c));
        big_x[h] = if (2 * d..3 * d).contains(&h) {
            // An empty first index must not read as a vertex insertion.
            let empty = c.delta_const(&w, 0);
            c.relu(&w - &(&empty * k.c)) + c.relu(k.b - &((1 - &empty) * k.c))
        } else {
            w
        };
    }
    probes.record("X", &big_x);

    let mut inner = Probes::new(probes.enabled);
    let u1 = gs::substitute(c, k, u, n, &big_x[..d], &big_x[d..2 * d], &mut inner);
    probes.absorb("sub.", inner);
    let mut inner = Probes::new(probes.enabled);
    let (u2, v2) = gi::network(c, k, &u1, v, n, &big_x[2 * d..5 * d], false, &mut inner);
    probes.absorb("ins.", inner);
    let mut inner = Probes::new(probes.enabled);
    let out = gd::network(c, k, &u2, &v2, n, &big_x[5 * d..], &mut inner);
    probes.absorb("del.", inner);
    out
}

pub(super) fn reference(
    k: &Consts,
    cfg: &NetworkConfig,
    u: &[i64],
    v: &[i64],
    x: &[i64],
    trace: &mut Trace,
) -> (Vec<i64>, Vec<i64>) {
    let bl = Blocks::new(cfg);
    let (n, d) = (bl.n, bl.d);

    let xp: Vec<i64> = (0..7 * d)
        .map(|j| match bl.divisor(j) {
            Some(div) => convert_index(x[j], bl.q, div),
            None => convert_label(x[j], bl.q, bl.m),
        })
        .collect();
    trace.push("x'", xp.clone());

    let mut xpp = xp.clone();
    xpp[..d].copy_from_slice(&gs::reference_dedup(&xp[..d]));
    for j in 0..d {
        let (a, b) = (xp[2 * d + j], xp[3 * d + j]);
        if a != b && (0..j).any(|l| xp[2 * d + l] == a && xp[3 * d + l] == b) {
            xpp[2 * d + j] = 0;
        }
        let (a, b) = (xp[5 * d + j], xp[6 * d + j]);
        if (0..j).any(|l| xp[5 * d + l] == a && xp[6 * d + l] == b) {
            xpp[5 * d + j] = 0;
        }
    }
    trace.push("x''", xpp.clone());

    let heads: Vec<usize> = (0..d).chain(2 * d..3 * d).chain(5 * d..6 * d).collect();
    let t: Vec<i64> = heads
        .iter()
        .map(|&h| {
            if h < d {
                (xpp[h] != 0) as i64
            } else {
                (xpp[h] != 0 && xpp[h + d] != 0) as i64
            }
        })
        .collect();
    trace.push("t", t.clone());
    let mut running = 0;
    let tp: Vec<i64> = t
        .iter()
        .map(|&tj| {
            running += tj;
            (running > d as i64) as i64
        })
        .collect();
    trace.push("t'", tp.clone());

    let mut big_x = xpp;
    for (&h, &s) in heads.iter().zip(&tp) {
        if s == 1 {
            big_x[h] = 0;
        }
        if (2 * d..3 * d).contains(&h) && big_x[h] == 0 {
            big_x[h] = k.b;
        }
    }
    trace.push("X", big_x.clone());

    let mut inner = Trace::default();
    let u1 = gs::reference_substitute(u, n, &big_x[..d], &big_x[d..2 * d], &mut inner);
    trace.absorb("sub.", inner);
    let mut inner = Trace::default();
    let (u2, v2) = gi::reference(k, &u1, v, n, &big_x[2 * d..5 * d], false, &mut inner);
    trace.absorb("ins.", inner);
    let mut inner = Trace::default();
    let out = gd::reference(k, &u2, &v2, n, &big_x[5 * d..], &mut inner);
    trace.absorb("del.", inner);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions() {
        assert_eq!(convert_index(0, 700, 5), 0);
        assert_eq!(convert_index(315, 700, 5), 3);
        assert_eq!(convert_index(140, 700, 5), 1);
        assert_eq!(convert_index(141, 700, 5), 2);
        assert_eq!(convert_label(0, 700, 10), 1);
        assert_eq!(convert_label(70, 700, 10), 1);
        assert_eq!(convert_label(71, 700, 10), 2);
    }

    #[test]
    fn decimals() {
        assert_eq!(parse_decimal("0.45").unwrap(), Rational64::new(9, 20));
        assert_eq!(parse_decimal(".5").unwrap(), Rational64::new(1, 2));
        assert_eq!(parse_decimal("0").unwrap(), Rational64::from_integer(0));
        assert!(parse_decimal("0.4.5").is_err());
        assert!(parse_decimal("").is_err());
        assert!(parse_decimal("1e3").is_err());
    }
}
