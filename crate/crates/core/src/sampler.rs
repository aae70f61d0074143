//! Seeded random and exhaustive edit sequences.
//!
//! Random draws use ChaCha8 (`rand_chacha`), seeded from a `u64` with an
//! optional stream id, so a `(seed, stream)` pair yields the same sequence on
//! every platform. Values are uniform over each slot's range:
//!
//! | family | indices | labels |
//! |--------|---------|--------|
//! | GS, GD | `1..=n` | `1..=m` |
//! | GI | `1..=n+d-1` | `1..=m` |
//! | GE | grid numerators `0..Q` (decimals in `[0, 1)`) | same |
//!
//! The nullified index 0 is never drawn for the integer families.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::edit::{EditInput, Family, NetworkConfig};
use crate::error::{Error, Result};

/// Largest input space [`enumerate_all`] will walk.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub family: Family,
    pub n: usize,
    pub m: u32,
    pub d: usize,
    pub seed: u64,
    /// Grid resolution `Q` (GE only; values are `k / Q`).
    pub grid: i64,
}

impl SamplerConfig {
    pub fn new(cfg: &NetworkConfig, seed: u64) -> SamplerConfig {
        SamplerConfig {
            family: cfg.family,
            n: cfg.n,
            m: cfg.m,
            d: cfg.d,
            seed,
            grid: cfg.grid,
        }
    }

    /// Inclusive range of slot `j`.
    pub fn slot_range(&self, j: usize) -> (i64, i64) {
        let (n, m, d) = (self.n as i64, i64::from(self.m), self.d);
        match (self.family, j / d) {
            (Family::Gs, 0) | (Family::Gd, _) => (1, n),
            (Family::Gs, _) | (Family::Gi, 2) => (1, m),
            (Family::Gi, _) => (1, n + d as i64 - 1),
            (Family::Ge, _) => (0, self.grid - 1),
        }
    }

    fn len(&self) -> usize {
        self.family.slots_per_op() * self.d
    }

    fn make(&self, values: Vec<i64>) -> EditInput {
        match self.family {
            Family::Ge => EditInput::grid(values, self.grid),
            f => EditInput::integers(f, values),
        }
    }
}

/// A deterministic stream of random edit sequences.
pub struct Sampler {
    cfg: SamplerConfig,
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(cfg: SamplerConfig) -> Sampler {
        Self::with_stream(cfg, 0)
    }

    /// An independent stream for parallel batches.
    pub fn with_stream(cfg: SamplerConfig, stream: u64) -> Sampler {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(stream);
        Sampler { cfg, rng }
    }

    pub fn next_input(&mut self) -> EditInput {
        let values = (0..self.cfg.len())
            .map(|j| {
                let (lo, hi) = self.cfg.slot_range(j);
                self.rng.gen_range(lo..=hi)
            })
            .collect();
        self.cfg.make(values)
    }
}

/// `count` draws from stream 0.
pub fn sample(cfg: &SamplerConfig, count: usize) -> Vec<EditInput> {
    let mut s = Sampler::new(*cfg);
    (0..count).map(|_| s.next_input()).collect()
}

/// Lexicographic odometer over per-slot value lists.
pub struct Enumeration {
    cfg: SamplerConfig,
    choices: Vec<Vec<i64>>,
    cursor: Option<Vec<usize>>,
}

impl Iterator for Enumeration {
    type Item = EditInput;

    fn next(&mut self) -> Option<EditInput> {
        let cur = self.cursor.as_mut()?;
        let out = self
            .cfg
            .make(cur.iter().zip(&self.choices).map(|(&i, c)| c[i]).collect());
        let mut j = cur.len();
        loop {
            if j == 0 {
                self.cursor = None;
                break;
            }
            j -= 1;
            cur[j] += 1;
            if cur[j] < self.choices[j].len() {
                break;
            }
            cur[j] = 0;
        }
        Some(out)
    }
}

fn enumeration(cfg: &SamplerConfig, choices: Vec<Vec<i64>>) -> Result<Enumeration> {
    let total = choices
        .iter()
        .try_fold(1u128, |acc, c| acc.checked_mul(c.len() as u128));
    match total {
        Some(t) if t <= ENUMERATION_LIMIT => {}
        _ => {
            return Err(Error::Guard(format!(
                "input space exceeds {ENUMERATION_LIMIT} sequences"
            )));
        }
    }
    let cursor = (!choices.is_empty() && choices.iter().all(|c| !c.is_empty()))
        .then(|| vec![0; choices.len()]);
    Ok(Enumeration {
        cfg: *cfg,
        choices,
        cursor,
    })
}

/// Every sequence over the declared slot ranges, in lexicographic order.
/// Empty when `d = 0`.
pub fn enumerate_all(cfg: &SamplerConfig) -> Result<Enumeration> {
    let choices = (0..cfg.len())
        .map(|j| {
            let (lo, hi) = cfg.slot_range(j);
            (lo..=hi).collect()
        })
        .collect();
    enumeration(cfg, choices)
}

/// GE sequences with one grid point per converted integer value of each
/// slot (index 0 included), so that every distinct converted sequence
/// occurs exactly once.
pub fn enumerate_converted(cfg: &SamplerConfig) -> Result<Enumeration> {
    if cfg.family != Family::Ge {
        return Err(Error::Config(
            "converted enumeration applies to GE only".into(),
        ));
    }
    let (n, d, q) = (cfg.n as i64, cfg.d, cfg.grid);
    let m = i64::from(cfg.m);
    let choices = (0..cfg.len())
        .map(|j| {
            let (divisor, first) = match j / d {
                1 | 4 => (m, 1),
                2 | 3 => (n + d as i64 - 1, 0),
                _ => (n, 0),
            };
            // Smallest numerator mapped to class i: 0 for the lowest class,
            // one past the previous interval's end otherwise. A class with no
            // point below 1 is unreachable and skipped.
            (first..=divisor)
                .map(|i| {
                    if i == first {
                        0
                    } else {
                        (i - 1) * q / divisor + 1
                    }
                })
                .filter(|&z| z < q)
                .collect()
        })
        .collect();
    enumeration(cfg, choices)
}
