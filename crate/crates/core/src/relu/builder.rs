//! Expression-level construction of ReLU circuits and their lowering to a
//! layered network.
//!
//! Builders describe computations with [`Lin`] (affine forms over inputs and
//! previously created ReLU units) and [`Circuit::relu`]. Affine forms are free:
//! they are folded into the weights of whichever unit consumes them. Lowering
//! places every ReLU unit at its longest-path level and inserts pass-through
//! neurons to carry values between non-adjacent layers.

use std::ops::{Add, Mul, Neg, Sub};

use super::{Layer, ReluNetwork};
use crate::error::{Error, Result};

/// Affine form `constant + sum(coef * source)`.
///
/// Sources below the circuit's input count are network inputs; the rest are
/// ReLU units in creation order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Lin {
    terms: Vec<(u32, i64)>,
    constant: i64,
}

impl Lin {
    pub fn constant(c: i64) -> Lin {
        Lin {
            terms: Vec::new(),
            constant: c,
        }
    }

    pub fn zero() -> Lin {
        Lin::constant(0)
    }

    fn source(src: u32) -> Lin {
        Lin {
            terms: vec![(src, 1)],
            constant: 0,
        }
    }

    /// Sorts terms, merges duplicates and drops zero coefficients.
    fn normalize(&mut self) {
        if self.terms.len() > 1 {
            self.terms.sort_unstable_by_key(|t| t.0);
            let mut out: Vec<(u32, i64)> = Vec::with_capacity(self.terms.len());
            for &(s, c) in &self.terms {
                match out.last_mut() {
                    Some(last) if last.0 == s => last.1 += c,
                    _ => out.push((s, c)),
                }
            }
            self.terms = out;
        }
        self.terms.retain(|t| t.1 != 0);
    }

    /// The value of a source-free form.
    pub fn as_constant(&self) -> Option<i64> {
        let mut t = self.clone();
        t.normalize();
        t.terms.is_empty().then_some(t.constant)
    }

    pub fn sum<'a>(items: impl IntoIterator<Item = &'a Lin>) -> Lin {
        let mut acc = Lin::zero();
        for x in items {
            acc.terms.extend_from_slice(&x.terms);
            acc.constant += x.constant;
        }
        acc
    }

    fn scaled(&self, k: i64) -> Lin {
        if k == 0 {
            return Lin::zero();
        }
        Lin {
            terms: self.terms.iter().map(|&(s, c)| (s, c * k)).collect(),
            constant: self.constant * k,
        }
    }
}

impl Add<&Lin> for &Lin {
    type Output = Lin;
    fn add(self, rhs: &Lin) -> Lin {
        let mut terms = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        terms.extend_from_slice(&self.terms);
        terms.extend_from_slice(&rhs.terms);
        Lin {
            terms,
            constant: self.constant + rhs.constant,
        }
    }
}

impl Add<Lin> for Lin {
    type Output = Lin;
    fn add(mut self, rhs: Lin) -> Lin {
        self.terms.extend(rhs.terms);
        self.constant += rhs.constant;
        self
    }
}

impl Add<&Lin> for Lin {
    type Output = Lin;
    fn add(mut self, rhs: &Lin) -> Lin {
        self.terms.extend_from_slice(&rhs.terms);
        self.constant += rhs.constant;
        self
    }
}

impl Add<i64> for Lin {
    type Output = Lin;
    fn add(mut self, rhs: i64) -> Lin {
        self.constant += rhs;
        self
    }
}

impl Add<i64> for &Lin {
    type Output = Lin;
    fn add(self, rhs: i64) -> Lin {
        self.clone() + rhs
    }
}

impl Neg for &Lin {
    type Output = Lin;
    fn neg(self) -> Lin {
        self.scaled(-1)
    }
}

impl Neg for Lin {
    type Output = Lin;
    fn neg(self) -> Lin {
        self.scaled(-1)
    }
}

impl Sub<&Lin> for &Lin {
    type Output = Lin;
    fn sub(self, rhs: &Lin) -> Lin {
        self + &(-rhs)
    }
}

impl Sub<Lin> for Lin {
    type Output = Lin;
    fn sub(self, rhs: Lin) -> Lin {
        self + (-rhs)
    }
}

impl Sub<&Lin> for Lin {
    type Output = Lin;
    fn sub(self, rhs: &Lin) -> Lin {
        self + (-rhs)
    }
}

impl Sub<i64> for Lin {
    type Output = Lin;
    fn sub(self, rhs: i64) -> Lin {
        self + (-rhs)
    }
}

impl Sub<i64> for &Lin {
    type Output = Lin;
    fn sub(self, rhs: i64) -> Lin {
        self.clone() + (-rhs)
    }
}

impl Sub<Lin> for i64 {
    type Output = Lin;
    fn sub(self, rhs: Lin) -> Lin {
        -rhs + self
    }
}

impl Sub<&Lin> for i64 {
    type Output = Lin;
    fn sub(self, rhs: &Lin) -> Lin {
        -rhs + self
    }
}

impl Mul<i64> for &Lin {
    type Output = Lin;
    fn mul(self, k: i64) -> Lin {
        self.scaled(k)
    }
}

impl Mul<i64> for Lin {
    type Output = Lin;
    fn mul(self, k: i64) -> Lin {
        self.scaled(k)
    }
}

/// A DAG of ReLU units over a fixed number of inputs.
pub struct Circuit {
    n_inputs: u32,
    level: Vec<u16>,
    start: Vec<u32>,
    src: Vec<u32>,
    coef: Vec<i64>,
    bias: Vec<i64>,
}

impl Circuit {
    pub fn new(n_inputs: usize) -> Circuit {
        Circuit {
            n_inputs: u32::try_from(n_inputs).expect("input count fits in u32"),
            level: Vec::new(),
            start: vec![0],
            src: Vec::new(),
            coef: Vec::new(),
            bias: Vec::new(),
        }
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs as usize
    }

    pub fn input(&self, i: usize) -> Lin {
        assert!(i < self.n_inputs as usize, "input {i} out of range");
        Lin::source(i as u32)
    }

    pub fn inputs(&self, range: std::ops::Range<usize>) -> Vec<Lin> {
        range.map(|i| self.input(i)).collect()
    }

    /// Number of ReLU units created so far.
    pub fn unit_count(&self) -> usize {
        self.level.len()
    }

    fn source_level(&self, s: u32) -> u16 {
        if s < self.n_inputs {
            0
        } else {
            self.level[(s - self.n_inputs) as usize]
        }
    }

    /// Longest-path level of the deepest source in `x` (inputs are level 0).
    pub fn level_of(&self, x: &Lin) -> usize {
        x.terms
            .iter()
            .map(|&(s, _)| self.source_level(s))
            .max()
            .unwrap_or(0) as usize
    }

    /// `ReLU(x)`; source-free forms are folded at build time.
    pub fn relu(&mut self, x: Lin) -> Lin {
        let mut x = x;
        x.normalize();
        if x.terms.is_empty() {
            return Lin::constant(x.constant.max(0));
        }
        let level = self.level_of(&x) + 1;
        let id = self.level.len() as u32 + self.n_inputs;
        self.level
            .push(u16::try_from(level).expect("circuit depth fits in u16"));
        for &(s, c) in &x.terms {
            self.src.push(s);
            self.coef.push(c);
        }
        self.start
            .push(u32::try_from(self.src.len()).expect("term count fits in u32"));
        self.bias.push(x.constant);
        Lin::source(id)
    }

    /// Last layer whose output must still contain each source.
    fn last_needed(&self, levels: &[u16], live: &[bool], outputs: &[Lin], depth: u16) -> Vec<u16> {
        let mut need = vec![0u16; self.n_inputs as usize + levels.len()];
        for u in (0..levels.len()).filter(|&u| live[u]) {
            for t in self.start[u] as usize..self.start[u + 1] as usize {
                let s = self.src[t] as usize;
                need[s] = need[s].max(levels[u] - 1);
            }
        }
        for o in outputs {
            for &(s, _) in &o.terms {
                need[s as usize] = depth;
            }
        }
        need
    }

    /// As-late-as-possible levels: one below the earliest consumer, or the
    /// final layer for units feeding only the outputs.
    fn latest_levels(&self, live: &[bool], outputs: &[Lin], depth: u16) -> Vec<u16> {
        let n_in = self.n_inputs;
        let mut levels = vec![depth; self.level.len()];
        for o in outputs {
            for &(s, _) in &o.terms {
                if s >= n_in {
                    levels[(s - n_in) as usize] = depth;
                }
            }
        }
        for u in (0..levels.len()).rev() {
            if !live[u] {
                continue;
            }
            let below = levels[u] - 1;
            for t in self.start[u] as usize..self.start[u + 1] as usize {
                let s = self.src[t];
                if s >= n_in {
                    let l = &mut levels[(s - n_in) as usize];
                    *l = (*l).min(below);
                }
            }
        }
        levels
    }

    /// Lowers the circuit to a layered network computing `outputs`.
    ///
    /// With `depth = Some(D)` every output is presented after exactly `D`
    /// ReLU layers (values are carried through ReLU pass-throughs, which is
    /// exact because unit outputs are non-negative); it is an error for the
    /// circuit's longest path to exceed `D`. A final affine readout layer
    /// without activation evaluates the output forms. `input_scale` holds one
    /// scale per input, or a single scale shared by all inputs.
    pub fn finish(
        mut self,
        outputs: &[Lin],
        depth: Option<usize>,
        input_scale: &[i64],
    ) -> Result<ReluNetwork> {
        let n_in = self.n_inputs as usize;
        let input_scale = match input_scale {
            [s] => vec![*s; n_in],
            s if s.len() == n_in => s.to_vec(),
            s => {
                return Err(Error::Arity {
                    expected: n_in,
                    got: s.len(),
                })
            }
        };
        let n_units = self.level.len();
        let total = n_in + n_units;
        let outputs: Vec<Lin> = outputs
            .iter()
            .map(|o| {
                let mut o = o.clone();
                o.normalize();
                o
            })
            .collect();

        let natural = outputs.iter().map(|o| self.level_of(o)).max().unwrap_or(0);
        let d = match depth {
            Some(d) if d < natural => {
                return Err(Error::Config(format!(
                    "circuit needs depth {natural} but {d} was requested"
                )));
            }
            Some(d) => d,
            None => natural,
        };

        // Units reachable from the outputs.
        let mut live = vec![false; n_units];
        for o in &outputs {
            for &(s, _) in &o.terms {
                if s >= self.n_inputs {
                    live[(s - self.n_inputs) as usize] = true;
                }
            }
        }
        for u in (0..n_units).rev() {
            if !live[u] {
                continue;
            }
            for t in self.start[u] as usize..self.start[u + 1] as usize {
                let s = self.src[t];
                if s >= self.n_inputs {
                    live[(s - self.n_inputs) as usize] = true;
                }
            }
        }

        let d16 = u16::try_from(d).expect("depth fits in u16");
        // Place every unit either as early or as late as possible, whichever
        // needs fewer pass-through neurons.
        let early = self.last_needed(&self.level, &live, &outputs, d16);
        // Late placement is anchored at the natural depth so that every layer
        // keeps at least one ReLU; outputs are then carried up to `d`.
        let late_levels = self.latest_levels(&live, &outputs, natural as u16);
        let late = self.last_needed(&late_levels, &live, &outputs, d16);
        let carries = |levels: &[u16], need: &[u16]| -> u64 {
            (0..total)
                .filter(|&s| s < n_in || live[s - n_in])
                .map(|s| {
                    let at = if s < n_in { 0 } else { levels[s - n_in] };
                    u64::from(need[s].saturating_sub(at))
                })
                .sum()
        };
        let last_needed = if carries(&late_levels, &late) < carries(&self.level, &early) {
            self.level = late_levels;
            late
        } else {
            early
        };

        let mut by_level: Vec<Vec<u32>> = vec![Vec::new(); d + 1];
        for u in 0..n_units {
            if live[u] {
                by_level[self.level[u] as usize].push(u as u32);
            }
        }

        const ABSENT: u32 = u32::MAX;
        let mut pos = vec![ABSENT; total];
        for (i, p) in pos.iter_mut().enumerate().take(n_in) {
            *p = i as u32;
        }
        let mut carried: Vec<u32> = Vec::new();
        let mut layers = Vec::with_capacity(d + 1);
        let mut updates: Vec<(u32, u32)> = Vec::new();

        for l in 1..=d {
            let l16 = l as u16;
            let mut layer = Layer::default();
            updates.clear();
            for &u in &by_level[l] {
                let uu = u as usize;
                for t in self.start[uu] as usize..self.start[uu + 1] as usize {
                    let p = pos[self.src[t] as usize];
                    debug_assert_ne!(p, ABSENT, "source missing from previous layer");
                    layer.cols.push(p);
                    layer.weights.push(self.coef[t]);
                }
                layer.close_row(self.bias[uu], true);
                updates.push((u + self.n_inputs, layer.width() as u32 - 1));
            }
            // Sources produced one layer down that are still needed later.
            let fresh: Vec<u32> = if l == 1 {
                (0..self.n_inputs)
                    .filter(|&s| last_needed[s as usize] >= 1)
                    .collect()
            } else {
                by_level[l - 1]
                    .iter()
                    .map(|&u| u + self.n_inputs)
                    .filter(|&s| last_needed[s as usize] >= l16)
                    .collect()
            };
            carried.retain(|&s| last_needed[s as usize] >= l16);
            carried.extend(fresh);
            for &s in &carried {
                layer.cols.push(pos[s as usize]);
                layer.weights.push(1);
                // Unit outputs are non-negative, so a ReLU carry is exact.
                layer.close_row(0, s >= self.n_inputs);
                updates.push((s, layer.width() as u32 - 1));
            }
            for &(s, p) in &updates {
                pos[s as usize] = p;
            }
            layers.push(layer);
        }

        let mut readout = Layer::default();
        for o in &outputs {
            for &(s, c) in &o.terms {
                let p = pos[s as usize];
                debug_assert_ne!(p, ABSENT);
                readout.cols.push(p);
                readout.weights.push(c);
            }
            readout.close_row(o.constant, false);
        }
        layers.push(readout);

        Ok(ReluNetwork::from_layers(n_in, input_scale, layers))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_relu_folds() {
        let mut c = Circuit::new(1);
        assert_eq!(c.relu(Lin::constant(-3)).as_constant(), Some(0));
        assert_eq!(c.relu(Lin::constant(4)).as_constant(), Some(4));
        let x = c.input(0);
        assert_eq!((&x - &x).as_constant(), Some(0));
        assert_eq!(c.unit_count(), 0);
    }

    #[test]
    fn carries_bridge_levels() {
        let mut c = Circuit::new(2);
        let a = c.input(0);
        let b = c.input(1);
        let r1 = c.relu(&a - &b);
        let r2 = c.relu(r1.clone() - 1);
        let r3 = c.relu(r2 + &a);
        let net = c.finish(&[r3.clone() + &r1], None, &[1]).unwrap();
        assert_eq!(net.metrics().depth, 3);
        // (a-b)^+ = 5, then 4, then 4 + a = 11; output 11 + 5.
        assert_eq!(net.evaluate_scaled(&[7, 2]).unwrap(), vec![16]);
        assert_eq!(net.evaluate_scaled(&[1, 2]).unwrap(), vec![1]);
    }

    #[test]
    fn requested_depth_pads_with_carries() {
        let mut c = Circuit::new(1);
        let x = c.input(0);
        let r = c.relu(x);
        let net = c.finish(std::slice::from_ref(&r), Some(4), &[1]).unwrap();
        assert_eq!(net.metrics().depth, 4);
        assert_eq!(net.evaluate_scaled(&[-5]).unwrap(), vec![0]);
        assert_eq!(net.evaluate_scaled(&[5]).unwrap(), vec![5]);

        let mut c = Circuit::new(1);
        let x = c.input(0);
        let r = c.relu(x);
        let r = c.relu(r);
        assert!(c.finish(&[r], Some(1), &[1]).is_err());
    }

    #[test]
    fn dead_units_are_pruned() {
        let mut c = Circuit::new(1);
        let x = c.input(0);
        let _unused = c.relu(&x * 3);
        let used = c.relu(x);
        let net = c.finish(&[used], None, &[1]).unwrap();
        assert_eq!(net.metrics().neuron_count, 2);
    }
}
