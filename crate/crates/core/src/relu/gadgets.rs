//! Exact piecewise-linear building blocks.
//!
//! All gadgets are exact on integer inputs; on the interval gadget the input
//! grid is mapped to integers by the network's input scale.

use num_rational::Rational64;

use super::{Circuit, Lin, ReluNetwork};
use crate::error::{Error, Result};

impl Circuit {
    /// `max(a, b) = a + ReLU(b - a)`.
    pub fn max2(&mut self, a: &Lin, b: &Lin) -> Lin {
        a + &self.relu(b - a)
    }

    /// `min(a, b) = a - ReLU(a - b)`.
    pub fn min2(&mut self, a: &Lin, b: &Lin) -> Lin {
        a - &self.relu(a - b)
    }

    /// `δ(p, q) = ReLU(1 - ReLU(p - q) - ReLU(q - p))`: 1 iff `p = q`.
    pub fn delta(&mut self, p: &Lin, q: &Lin) -> Lin {
        let diff = p - q;
        if let Some(c) = diff.as_constant() {
            return Lin::constant((c == 0) as i64);
        }
        let up = self.relu(diff.clone());
        let down = self.relu(-diff);
        self.relu(1 - up - down)
    }

    /// `δ(p, k)` for a constant `k`.
    pub fn delta_const(&mut self, p: &Lin, k: i64) -> Lin {
        self.delta(p, &Lin::constant(k))
    }

    /// `H(p) = ReLU(p + 1) - ReLU(p)`: 1 iff `p >= 0`.
    pub fn heaviside(&mut self, p: &Lin) -> Lin {
        if let Some(c) = p.as_constant() {
            return Lin::constant((c >= 0) as i64);
        }
        self.relu(p + 1) - self.relu(p.clone())
    }

    /// `[p >= θ] = H(p - θ)`.
    pub fn at_least(&mut self, p: &Lin, theta: i64) -> Lin {
        self.heaviside(&(p - theta))
    }

    /// `a ∧ b = ReLU(a + b - 1)` on binary values.
    pub fn and(&mut self, a: &Lin, b: &Lin) -> Lin {
        self.and_all(&[a.clone(), b.clone()])
    }

    /// Conjunction of any number of binary values. Constant operands are
    /// folded away.
    pub fn and_all(&mut self, xs: &[Lin]) -> Lin {
        let mut live = Vec::with_capacity(xs.len());
        for x in xs {
            match x.as_constant() {
                Some(0) => return Lin::zero(),
                Some(_) => {}
                None => live.push(x),
            }
        }
        match live.len() {
            0 => Lin::constant(1),
            1 => live[0].clone(),
            k => self.relu(Lin::sum(live) - (k as i64 - 1)),
        }
    }

    /// `a ∧ b ∧ ¬c` on binary values, in a single unit.
    pub fn and_not(&mut self, a: &Lin, b: &Lin, c: &Lin) -> Lin {
        self.relu(a + b - 1 - c)
    }

    /// `[lo <= p <= hi]` for integer `p`.
    pub fn in_range(&mut self, p: &Lin, lo: &Lin, hi: &Lin) -> Lin {
        let above = self.heaviside(&(p - lo));
        let below = self.heaviside(&(hi - p));
        self.and(&above, &below)
    }

    /// Stable ascending rank (0-based) of each value:
    /// `Σ_k H(g_j - g_k) - Σ_{k >= j} δ(g_j, g_k)`.
    pub fn sort_rank(&mut self, g: &[Lin]) -> Vec<Lin> {
        let w = g.len();
        let mut rank = vec![Lin::zero(); w];
        for j in 0..w {
            let mut terms = Vec::with_capacity(2 * w);
            for k in 0..w {
                if k == j {
                    continue;
                }
                terms.push(self.heaviside(&(&g[j] - &g[k])));
                if k > j {
                    terms.push(-self.delta(&g[j], &g[k]));
                }
            }
            rank[j] = Lin::sum(&terms);
        }
        rank
    }
}

/// A catalogued gadget together with its parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GadgetSpec {
    Max2,
    ReluClamp,
    Delta,
    Heaviside,
    /// Indicator of `x ∈ [lo, hi]`, or `(lo, hi]` when `half_open_low`, for
    /// inputs on the grid with the given spacing.
    Interval {
        lo: Rational64,
        hi: Rational64,
        half_open_low: bool,
        spacing: Rational64,
    },
    And,
    SortRank {
        width: usize,
    },
}

impl GadgetSpec {
    pub fn arity(&self) -> usize {
        match self {
            GadgetSpec::Max2 | GadgetSpec::Delta | GadgetSpec::And => 2,
            GadgetSpec::ReluClamp | GadgetSpec::Heaviside | GadgetSpec::Interval { .. } => 1,
            GadgetSpec::SortRank { width } => *width,
        }
    }

    pub fn build(&self) -> Result<ReluNetwork> {
        let mut c = Circuit::new(self.arity());
        let x = c.inputs(0..self.arity());
        let (out, scale) = match self {
            GadgetSpec::Max2 => (vec![c.max2(&x[0], &x[1])], 1),
            GadgetSpec::ReluClamp => (vec![c.relu(x[0].clone())], 1),
            GadgetSpec::Delta => (vec![c.delta(&x[0], &x[1])], 1),
            GadgetSpec::Heaviside => (vec![c.heaviside(&x[0])], 1),
            GadgetSpec::And => (vec![c.and(&x[0], &x[1])], 1),
            GadgetSpec::SortRank { .. } => (c.sort_rank(&x), 1),
            GadgetSpec::Interval {
                lo,
                hi,
                half_open_low,
                spacing,
            } => {
                if *spacing <= Rational64::from_integer(0) {
                    return Err(Error::Config("grid spacing must be positive".into()));
                }
                let on_grid = |v: &Rational64| (v / spacing).is_integer();
                if !on_grid(lo) || !on_grid(hi) {
                    return Err(Error::Config(format!(
                        "interval endpoints {lo}, {hi} are not multiples of {spacing}"
                    )));
                }
                let scale = *spacing.denom();
                let lo_i = (lo * scale).to_integer();
                let hi_i = (hi * scale).to_integer();
                let mut ind = c.in_range(&x[0], &Lin::constant(lo_i), &Lin::constant(hi_i));
                if *half_open_low {
                    ind = ind - c.delta_const(&x[0], lo_i);
                }
                (vec![ind], scale)
            }
        };
        c.finish(&out, None, &[scale])
    }

    /// The defining function, evaluated directly.
    pub fn reference(&self, x: &[Rational64]) -> Vec<Rational64> {
        let one = Rational64::from_integer(1);
        let zero = Rational64::from_integer(0);
        let b = |v: bool| if v { one } else { zero };
        match self {
            GadgetSpec::Max2 => vec![x[0].max(x[1])],
            GadgetSpec::ReluClamp => vec![x[0].max(zero)],
            GadgetSpec::Delta => vec![b(x[0] == x[1])],
            GadgetSpec::Heaviside => vec![b(x[0] >= zero)],
            GadgetSpec::And => vec![b(x[0] == one && x[1] == one)],
            GadgetSpec::Interval {
                lo,
                hi,
                half_open_low,
                ..
            } => {
                let low_ok = if *half_open_low {
                    x[0] > *lo
                } else {
                    x[0] >= *lo
                };
                vec![b(low_ok && x[0] <= *hi)]
            }
            GadgetSpec::SortRank { .. } => (0..x.len())
                .map(|j| {
                    let less = x.iter().filter(|&&v| v < x[j]).count();
                    let tied_before = x[..j].iter().filter(|&&v| v == x[j]).count();
                    Rational64::from_integer((less + tied_before) as i64)
                })
                .collect(),
        }
    }
}

pub fn gadget_max2() -> ReluNetwork {
    GadgetSpec::Max2.build().expect("max2 builds")
}

pub fn gadget_delta() -> ReluNetwork {
    GadgetSpec::Delta.build().expect("delta builds")
}

pub fn gadget_heaviside() -> ReluNetwork {
    GadgetSpec::Heaviside.build().expect("heaviside builds")
}

pub fn gadget_and() -> ReluNetwork {
    GadgetSpec::And.build().expect("and builds")
}

pub fn gadget_interval(
    lo: Rational64,
    hi: Rational64,
    half_open_low: bool,
    spacing: Rational64,
) -> Result<ReluNetwork> {
    GadgetSpec::Interval {
        lo,
        hi,
        half_open_low,
        spacing,
    }
    .build()
}
