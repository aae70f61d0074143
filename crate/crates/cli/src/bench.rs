//! Scalability benchmark: build and run one network per grid cell.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, Result};
use ged_exactgen::graph::random_graph;
use ged_exactgen::sampler::{Sampler, SamplerConfig};
use ged_exactgen::{EditNetwork, Family, NetworkConfig};
use serde::{Serialize, Serializer};

/// Cartesian grid of `n` and `d` values, written `n=100,200,400;d=10,20`.
/// Commas, semicolons and spaces all separate tokens; a `key=` token
/// switches the list the following numbers go to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub ns: Vec<usize>,
    pub ds: Vec<usize>,
}

impl FromStr for GridSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<GridSpec> {
        let mut ns = Vec::new();
        let mut ds = Vec::new();
        let mut key = None;
        for tok in s
            .split(|c: char| c == ',' || c == ';' || c.is_whitespace())
            .filter(|t| !t.is_empty())
        {
            let value = match tok.split_once('=') {
                Some((k, v)) => {
                    key = Some(k.trim().to_ascii_lowercase());
                    v
                }
                None => tok,
            };
            if value.is_empty() {
                continue;
            }
            let v: usize = value
                .parse()
                .map_err(|_| anyhow::anyhow!("bad grid value {value:?}"))?;
            match key.as_deref() {
                Some("n") => ns.push(v),
                Some("d") => ds.push(v),
                _ => bail!("grid values must follow n= or d=, got {tok:?}"),
            }
        }
        if ns.is_empty() || ds.is_empty() {
            bail!("grid needs at least one n and one d value");
        }
        ns.sort_unstable();
        ns.dedup();
        ds.sort_unstable();
        ds.dedup();
        Ok(GridSpec { ns, ds })
    }
}

/// Outcome of one cell: seconds, or why it has none.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CellTime {
    Seconds(f64),
    MemOut,
    Error,
}

impl fmt::Display for CellTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellTime::Seconds(s) => write!(f, "{s:.6}"),
            CellTime::MemOut => f.write_str("MEMOUT"),
            CellTime::Error => f.write_str("ERROR"),
        }
    }
}

impl Serialize for CellTime {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRecord {
    pub n: usize,
    pub d: usize,
    pub family: Family,
    pub wall_time_seconds: CellTime,
    pub neuron_count: Option<usize>,
    pub depth: Option<usize>,
    /// Estimated peak bytes while building, from the size model.
    pub peak_memory_estimate: u64,
}

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub family: Family,
    pub m: u32,
    pub grid: GridSpec,
    pub reps: usize,
    pub seed: u64,
    pub memory_budget: u64,
}

/// Neurons per `(n + 2d)^2 · d`, rounded up from measurements at
/// n in {100, 200}, d in {10, 20}.
fn neuron_factor(family: Family) -> f64 {
    match family {
        Family::Gs => 0.05,
        Family::Gd => 3.5,
        Family::Gi => 1.8,
        Family::Ge => 7.5,
    }
}

/// Peak bytes per neuron while building; measured peaks were 130-180.
const BYTES_PER_NEURON: f64 = 200.0;

/// Predicted neuron count and peak building memory for one cell.
pub fn estimate(family: Family, n: usize, d: usize) -> (u64, u64) {
    let span = (n + 2 * d) as f64;
    let neurons = neuron_factor(family) * span * span * d.max(1) as f64 + span * span;
    (neurons as u64, (neurons * BYTES_PER_NEURON) as u64)
}

fn run_cell(opts: &BenchOptions, n: usize, d: usize, rep: usize) -> BenchRecord {
    let (_, bytes) = estimate(opts.family, n, d);
    let mut rec = BenchRecord {
        n,
        d,
        family: opts.family,
        wall_time_seconds: CellTime::MemOut,
        neuron_count: None,
        depth: None,
        peak_memory_estimate: bytes,
    };
    if bytes > opts.memory_budget {
        return rec;
    }
    let seed = opts.seed ^ ((n as u64) << 32) ^ ((d as u64) << 16) ^ rep as u64;
    let start = Instant::now();
    let run = || -> ged_exactgen::Result<(usize, usize)> {
        let cfg = NetworkConfig::new(opts.family, n, opts.m, d)?;
        let net = EditNetwork::build(&cfg)?;
        let g = random_graph(n, n, opts.m, seed)?;
        let x = Sampler::new(SamplerConfig::new(&cfg, seed)).next_input();
        net.apply(&g, &x)?;
        let m = net.metrics();
        Ok((m.neuron_count, m.depth))
    };
    match run() {
        Ok((neurons, depth)) => {
            rec.wall_time_seconds = CellTime::Seconds(start.elapsed().as_secs_f64());
            rec.neuron_count = Some(neurons);
            rec.depth = Some(depth);
        }
        Err(_) => rec.wall_time_seconds = CellTime::Error,
    }
    rec
}

/// Runs every cell in `(n, d, repetition)` order, one at a time so that
/// timings do not compete for cores or memory.
pub fn run(opts: &BenchOptions) -> Vec<BenchRecord> {
    let mut out = Vec::new();
    for &n in &opts.grid.ns {
        for &d in &opts.grid.ds {
            for rep in 0..opts.reps.max(1) {
                out.push(run_cell(opts, n, d, rep));
            }
        }
    }
    out
}

/// Mean wall time per completed `(n, d)` cell.
pub fn mean_times(records: &[BenchRecord]) -> BTreeMap<(usize, usize), f64> {
    let mut acc: BTreeMap<(usize, usize), (f64, usize)> = BTreeMap::new();
    for r in records {
        if let CellTime::Seconds(s) = r.wall_time_seconds {
            let e = acc.entry((r.n, r.d)).or_default();
            e.0 += s;
            e.1 += 1;
        }
    }
    acc.into_iter()
        .map(|(k, (s, c))| (k, s / c as f64))
        .collect()
}

/// Pairs of completed cells where time decreases as `n` or `d` grows with
/// the other fixed.
pub fn monotonicity_violations(records: &[BenchRecord]) -> Vec<((usize, usize), (usize, usize))> {
    let t = mean_times(records);
    let mut bad = Vec::new();
    let keys: Vec<_> = t.keys().copied().collect();
    for &a in &keys {
        for &b in &keys {
            let grows = (a.0 == b.0 && a.1 < b.1) || (a.1 == b.1 && a.0 < b.0);
            if grows && t[&b] < t[&a] {
                bad.push((a, b));
            }
        }
    }
    bad
}
