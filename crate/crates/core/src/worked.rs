//! The four worked examples on a five-vertex sample graph, with their
//! published intermediate vectors, and a checker that replays them through
//! both the compiled network and the reference simulator.

use std::fmt;

use serde::Serialize;

use crate::edit::{reference_trace, EditInput, EditNetwork, Family, NetworkConfig, Trace};
use crate::error::Result;
use crate::graph::LabeledGraph;

/// One published entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Val {
    Int(i64),
    /// `k·B` for the configuration's sentinel `B`.
    Sentinel(i64),
    /// Not printed; not compared.
    Skip,
}

impl Val {
    fn resolve(self, b: i64) -> Option<i64> {
        match self {
            Val::Int(v) => Some(v),
            Val::Sentinel(k) => Some(k * b),
            Val::Skip => None,
        }
    }
}

/// Parses whitespace-separated entries: integers, `B`, `kB`, or `_`.
fn vals(spec: &str) -> Vec<Val> {
    spec.split_whitespace()
        .map(|t| match t {
            "_" => Val::Skip,
            "B" => Val::Sentinel(1),
            t if t.ends_with('B') => {
                Val::Sentinel(t[..t.len() - 1].parse().expect("multiple of B"))
            }
            t => Val::Int(t.parse().expect("integer entry")),
        })
        .collect()
}

/// The five-vertex sample graph over the alphabet `1..=m`.
pub fn sample_graph(m: u32) -> LabeledGraph {
    LabeledGraph::new(
        m,
        vec![3, 5, 4, 2, 4],
        &[(1, 2), (1, 5), (2, 3), (2, 4), (2, 5), (4, 5)],
    )
    .expect("sample graph is valid")
}

#[derive(Clone, Debug)]
pub struct WorkedExample {
    pub name: &'static str,
    pub cfg: NetworkConfig,
    pub input: EditInput,
    pub graph: LabeledGraph,
    pub expected: Vec<(&'static str, Vec<Val>)>,
}

/// Examples 1 to 4 in order: substitution, deletion, insertion, general.
pub fn examples() -> Vec<WorkedExample> {
    let cfg = |family, m| NetworkConfig::new(family, 5, m, 3).expect("example configuration");
    let sub = WorkedExample {
        name: "example 1 (GS)",
        cfg: cfg(Family::Gs, 5),
        input: EditInput::integers(Family::Gs, vec![5, 3, 3, 5, 2, 3]),
        graph: sample_graph(5),
        expected: vec![
            ("e", vals("5 3 0")),
            ("F", vals("3 5 0 2 0")),
            ("G", vals("0 0 2 0 5")),
            ("L'", vals("3 5 2 2 5")),
        ],
    };

    // Rows of T' and W are printed over the first seven columns only.
    let t_rows = [
        "0 1 0 0 1 B B _",
        "1 0 0 1 1 B B _",
        "_ _ _ _ _ _ _ _",
        "0 1 0 0 1 B B _",
        "1 1 0 1 0 B B _",
    ];
    let w_rows = [
        "0 1 0 0 1 B B _",
        "1 0 0 1 1 B B _",
        "0 1 0 0 1 B B _",
        "1 1 0 1 0 B B _",
        "_ _ _ _ _ _ _ _",
    ];
    let del = WorkedExample {
        name: "example 2 (GD)",
        cfg: cfg(Family::Gd, 5),
        input: EditInput::integers(Family::Gd, vec![5, 3, 3, 5, 2, 3]),
        graph: sample_graph(5),
        expected: vec![
            ("T'", vals(&t_rows.join(" "))),
            ("t''", vals("2 3 0 2 3")),
            ("x'", vals("0 _ _")),
            ("e'", vals("1 1 0 1 1 1 1")),
            ("f'", vals("B 2B 0 3B 4B 5B 6B")),
            ("W", vals(&w_rows.join(" "))),
            ("U'", vals("3 5 2 4 B")),
            (
                "V'",
                vals("0 1 0 1 B  1 0 1 1 B  0 1 0 1 B  1 1 1 0 B  B B B B B"),
            ),
        ],
    };

    let ins = WorkedExample {
        name: "example 3 (GI)",
        cfg: cfg(Family::Gi, 5),
        input: EditInput::integers(Family::Gi, vec![4, 3, 7, 6, 3, 2, 1, 5, 2]),
        graph: sample_graph(5),
        expected: vec![
            ("e'", vals("4 3 7")),
            ("f", vals("0 0 1")),
            ("x1", vals("4 3 0")),
            ("f'", vals("0 0 0")),
            ("x2", vals("6 3 2")),
            ("g", vals("B 5 B")),
            ("g'", vals("1 0 2")),
            ("x3", vals("5 B B")),
            ("U'", vals("3 5 4 2 4 5 B B")),
            (
                "S'",
                vals(
                    "0 0 0 0 0 0 0 0  0 0 0 0 0 0 0 0  0 0 0 0 0 0 0 0  0 0 0 0 0 1 0 0 \
                     0 0 0 0 0 0 0 0  0 0 0 1 0 0 0 0  0 0 0 0 0 0 0 0  0 0 0 0 0 0 0 0",
                ),
            ),
            (
                "V'",
                vals(
                    "0 1 0 0 1 0 B B  1 0 1 1 1 0 B B  0 1 0 0 0 0 B B  0 1 0 0 1 1 B B \
                     1 1 0 1 0 0 B B  0 0 0 1 0 0 B B  B B B B B B B B  B B B B B B B B",
                ),
            ),
        ],
    };

    let decimals = [
        "0.45", "0", "0.59", "0", "0.4", "0.15", "0.11", "0.05", "0.88", "0.55", "0.44", "0",
        "0.52", "0.87", "0.03", "0.33", "0.4", "0.93", "0.79", "0.65", "0.9",
    ];
    let general = WorkedExample {
        name: "example 4 (GE)",
        cfg: cfg(Family::Ge, 10)
            .with_grid(700)
            .expect("700 refines the minimal grid"),
        input: EditInput::from_decimals(&decimals, 700).expect("decimals lie on the grid"),
        graph: sample_graph(10),
        expected: vec![
            ("x'", vals("3 0 3 1 4 2 1 1 7 4 4 0 6 9 1 2 2 5 4 4 5")),
            ("x''", vals("3 0 0 1 4 2 1 0 7 4 4 0 6 9 1 2 0 5 4 4 5")),
            // Operation flags at positions 1-3, 7-9 and 16-18.
            ("t", vals("1 0 0 1 0 0 1 0 1")),
            ("t'", vals("0 0 0 0 0 0 0 0 1")),
            ("X", vals("3 0 0 1 4 2 1 B 7 4 4 0 6 9 1 2 0 0 4 4 5")),
        ],
    };
    vec![sub, del, ins, general]
}

/// Where a value came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Network,
    Reference,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Network => "network",
            Source::Reference => "reference",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub source: Source,
    pub symbol: String,
    /// 0-based position in the flattened vector; `None` when the symbol is
    /// missing or has the wrong length.
    pub index: Option<usize>,
    pub expected: Option<i64>,
    pub actual: Option<i64>,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(
                f,
                "{} {}[{}]: expected {}, got {}",
                self.source,
                self.symbol,
                i + 1,
                self.expected.unwrap_or_default(),
                self.actual.unwrap_or_default()
            ),
            None => write!(
                f,
                "{} {}: missing or wrong length",
                self.source, self.symbol
            ),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExampleReport {
    pub name: String,
    /// Number of published entries compared (per source).
    pub compared: usize,
    /// First differing symbol in publication order.
    pub first_mismatch: Option<Mismatch>,
}

impl ExampleReport {
    pub fn passed(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

fn compare(
    source: Source,
    symbol: &str,
    expected: &[Val],
    trace: &Trace,
    b: i64,
) -> Option<Mismatch> {
    let miss = |index, expected, actual| Mismatch {
        source,
        symbol: symbol.to_string(),
        index,
        expected,
        actual,
    };
    let Some(actual) = trace.get(symbol) else {
        return Some(miss(None, None, None));
    };
    if actual.len() < expected.len() {
        return Some(miss(None, None, None));
    }
    expected.iter().enumerate().find_map(|(i, e)| {
        let want = e.resolve(b)?;
        (actual[i] != want).then(|| miss(Some(i), Some(want), Some(actual[i])))
    })
}

/// Replays one example and compares every published vector, network first.
pub fn check(ex: &WorkedExample) -> Result<ExampleReport> {
    let net = EditNetwork::build_probed(&ex.cfg)?;
    let (_, net_trace) = net.apply_traced(&ex.graph, &ex.input)?;
    let (_, ref_trace) = reference_trace(&ex.cfg, &ex.graph, &ex.input)?;
    let b = ex.cfg.b;
    let mut compared = 0;
    let mut first_mismatch = None;
    for (symbol, expected) in &ex.expected {
        compared += expected.iter().filter(|v| **v != Val::Skip).count();
        if first_mismatch.is_none() {
            first_mismatch = compare(Source::Network, symbol, expected, &net_trace, b)
                .or_else(|| compare(Source::Reference, symbol, expected, &ref_trace, b));
        }
    }
    Ok(ExampleReport {
        name: ex.name.to_string(),
        compared,
        first_mismatch,
    })
}
