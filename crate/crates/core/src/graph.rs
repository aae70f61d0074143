//! Vertex-labeled simple graphs, sentinel padding, and the JSON exchange format.
//!
//! Vertices are 1-indexed at every public boundary (`labels[0]` is the label
//! of vertex 1). Index 0 is reserved for the "nullified" value produced by the
//! refinement stages of the edit networks.

use std::fmt;
use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A simple undirected vertex-labeled graph over the alphabet `{1..m}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LabeledGraph {
    m: u32,
    labels: Vec<u32>,
    adj: Vec<u8>,
}

impl LabeledGraph {
    /// Builds a graph from labels and a 1-indexed edge list.
    pub fn new(m: u32, labels: Vec<u32>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        let mut g = LabeledGraph {
            m,
            labels,
            adj: vec![0; n * n],
        };
        g.check_labels()?;
        for &(i, k) in edges {
            if i == 0 || k == 0 || i > n || k > n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i},{k}) out of range 1..={n}"
                )));
            }
            if i == k {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {i}")));
            }
            if g.has_edge(i, k) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({i},{k})")));
            }
            g.set_edge(i, k, true);
        }
        Ok(g)
    }

    /// Builds a graph from a full 0/1 adjacency matrix given row by row.
    pub fn from_adjacency(m: u32, labels: Vec<u32>, adjacency: &[Vec<u8>]) -> Result<Self> {
        let n = labels.len();
        if adjacency.len() != n || adjacency.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidGraph(format!("adjacency must be {n}x{n}")));
        }
        let adj: Vec<u8> = adjacency.iter().flatten().copied().collect();
        let g = LabeledGraph { m, labels, adj };
        g.check_labels()?;
        for i in 0..n {
            if g.adj[i * n + i] != 0 {
                return Err(Error::InvalidGraph(format!(
                    "nonzero diagonal at vertex {}",
                    i + 1
                )));
            }
            for k in 0..n {
                let a = g.adj[i * n + k];
                if a > 1 {
                    return Err(Error::InvalidGraph(format!(
                        "entry ({},{}) = {a} is not 0/1",
                        i + 1,
                        k + 1
                    )));
                }
                if a != g.adj[k * n + i] {
                    return Err(Error::InvalidGraph(format!(
                        "asymmetric entry ({},{})",
                        i + 1,
                        k + 1
                    )));
                }
            }
        }
        Ok(g)
    }

    /// Edgeless graph with the given labels.
    pub fn empty(m: u32, labels: Vec<u32>) -> Result<Self> {
        Self::new(m, labels, &[])
    }

    fn check_labels(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidGraph(
                "alphabet size m must be positive".into(),
            ));
        }
        for (i, &l) in self.labels.iter().enumerate() {
            if l == 0 || l > self.m {
                return Err(Error::InvalidGraph(format!(
                    "label {l} of vertex {} outside 1..={}",
                    i + 1,
                    self.m
                )));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Label of 1-indexed vertex `i`.
    pub fn label(&self, i: usize) -> u32 {
        self.labels[i - 1]
    }

    /// Adjacency test on 1-indexed vertices.
    pub fn has_edge(&self, i: usize, k: usize) -> bool {
        let n = self.n();
        self.adj[(i - 1) * n + (k - 1)] == 1
    }

    pub(crate) fn set_edge(&mut self, i: usize, k: usize, present: bool) {
        let n = self.n();
        let v = u8::from(present);
        self.adj[(i - 1) * n + (k - 1)] = v;
        self.adj[(k - 1) * n + (i - 1)] = v;
    }

    /// Row-major 0/1 adjacency matrix.
    pub fn adjacency(&self) -> &[u8] {
        &self.adj
    }

    /// Edges as sorted 1-indexed pairs `(i, k)` with `i < k`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 1..=n {
            for k in i + 1..=n {
                if self.has_edge(i, k) {
                    out.push((i, k));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|&&a| a == 1).count() / 2
    }

    pub fn degree(&self, i: usize) -> usize {
        let n = self.n();
        self.adj[(i - 1) * n..i * n]
            .iter()
            .filter(|&&a| a == 1)
            .count()
    }

    /// Same structure with every label replaced by 1 over the unary alphabet.
    pub fn unlabeled(&self) -> LabeledGraph {
        LabeledGraph {
            m: 1,
            labels: vec![1; self.n()],
            adj: self.adj.clone(),
        }
    }

    /// Same graph viewed over a (larger) alphabet.
    pub fn with_alphabet(&self, m: u32) -> Result<LabeledGraph> {
        let g = LabeledGraph {
            m,
            labels: self.labels.clone(),
            adj: self.adj.clone(),
        };
        g.check_labels()?;
        Ok(g)
    }
}

impl fmt::Debug for LabeledGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "LabeledGraph(m={}, labels={:?}, edges={:?})",
            self.m,
            self.labels,
            self.edges()
        )
    }
}

/// Label column and adjacency matrix extended with sentinel rows and columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaddedGraph {
    /// Label column `U` of length `size()`.
    pub u: Vec<i64>,
    /// Row-major `size() x size()` matrix `V`.
    pub v: Vec<i64>,
    pub pad_count: usize,
    pub sentinel: i64,
    pub m: u32,
}

impl PaddedGraph {
    pub fn size(&self) -> usize {
        self.u.len()
    }

    /// Entry `V[i][k]` for 1-indexed `i`, `k`.
    pub fn entry(&self, i: usize, k: usize) -> i64 {
        self.v[(i - 1) * self.size() + (k - 1)]
    }

    /// Wraps raw matrices (typically network outputs), counting sentinel labels.
    pub fn from_parts(u: Vec<i64>, v: Vec<i64>, sentinel: i64, m: u32) -> Result<Self> {
        let size = u.len();
        if v.len() != size * size {
            return Err(Error::Arity {
                expected: size * size,
                got: v.len(),
            });
        }
        let pad_count = u.iter().filter(|&&x| x == sentinel).count();
        Ok(PaddedGraph {
            u,
            v,
            pad_count,
            sentinel,
            m,
        })
    }

    /// Rows of `V`, convenient for comparisons in tests and reports.
    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.v
            .chunks(self.size().max(1))
            .map(<[i64]>::to_vec)
            .collect()
    }
}

/// Appends `pad_count` sentinel labels and all-sentinel rows/columns.
pub fn pad(g: &LabeledGraph, pad_count: usize, sentinel: i64) -> Result<PaddedGraph> {
    let n = g.n();
    let required = i64::from(g.m()).max((n + pad_count) as i64);
    if sentinel <= required {
        return Err(Error::SentinelTooSmall { sentinel, required });
    }
    let size = n + pad_count;
    let mut u: Vec<i64> = g.labels().iter().map(|&l| i64::from(l)).collect();
    u.resize(size, sentinel);
    let mut v = vec![sentinel; size * size];
    for i in 0..n {
        for k in 0..n {
            v[i * size + k] = i64::from(g.adj[i * n + k]);
        }
    }
    Ok(PaddedGraph {
        u,
        v,
        pad_count,
        sentinel,
        m: g.m(),
    })
}

/// Removes every sentinel index, checking the padded-graph invariants.
pub fn strip(pg: &PaddedGraph) -> Result<LabeledGraph> {
    let size = pg.size();
    let b = pg.sentinel;
    let mut keep = Vec::with_capacity(size);
    for i in 0..size {
        let row_all_b = (0..size).all(|k| pg.v[i * size + k] == b);
        let col_all_b = (0..size).all(|k| pg.v[k * size + i] == b);
        let label_b = pg.u[i] == b;
        if label_b != row_all_b || label_b != col_all_b {
            return Err(Error::Structure {
                index: i + 1,
                reason: format!(
                    "label is{} sentinel but row all-B = {row_all_b}, column all-B = {col_all_b}",
                    if label_b { "" } else { " not" }
                ),
            });
        }
        if !label_b {
            keep.push(i);
        }
    }
    let mut labels = Vec::with_capacity(keep.len());
    for &i in &keep {
        let l = pg.u[i];
        if l < 1 || l > i64::from(pg.m) {
            return Err(Error::Structure {
                index: i + 1,
                reason: format!("label {l} outside 1..={}", pg.m),
            });
        }
        labels.push(l as u32);
    }
    let mut rows = Vec::with_capacity(keep.len());
    for &i in &keep {
        let mut row = Vec::with_capacity(keep.len());
        for &k in &keep {
            let a = pg.v[i * size + k];
            if !(0..=1).contains(&a) {
                return Err(Error::Structure {
                    index: i + 1,
                    reason: format!("adjacency entry {a} at column {}", k + 1),
                });
            }
            row.push(a as u8);
        }
        rows.push(row);
    }
    LabeledGraph::from_adjacency(pg.m, labels, &rows).map_err(|e| Error::Structure {
        index: 0,
        reason: e.to_string(),
    })
}

/// Number of vertex pairs adjacent in exactly one of the two graphs.
pub fn edge_symmetric_difference(g: &LabeledGraph, h: &LabeledGraph) -> Result<usize> {
    if g.n() != h.n() {
        return Err(Error::VertexCountMismatch {
            left: g.n(),
            right: h.n(),
        });
    }
    let diff = g.adj.iter().zip(&h.adj).filter(|(a, b)| a != b).count();
    Ok(diff / 2)
}

/// Uniform simple graph with exactly `edge_count` edges and uniform labels.
pub fn random_graph(n: usize, edge_count: usize, m: u32, seed: u64) -> Result<LabeledGraph> {
    let max = n * n.saturating_sub(1) / 2;
    if edge_count > max {
        return Err(Error::InfeasibleEdgeCount {
            n,
            edges: edge_count,
            max,
        });
    }
    if m == 0 {
        return Err(Error::InvalidGraph(
            "alphabet size m must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=m)).collect();
    let pairs: Vec<(usize, usize)> = (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |k| (i, k)))
        .collect();
    let edges: Vec<(usize, usize)> = sample(&mut rng, max, edge_count)
        .into_iter()
        .map(|p| pairs[p])
        .collect();
    LabeledGraph::new(m, labels, &edges)
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    m: u32,
    labels: Vec<u32>,
    edges: Vec<[usize; 2]>,
}

/// Parses the JSON graph format `{"n", "m", "labels", "edges"}`.
pub fn parse_graph(text: &str) -> Result<LabeledGraph> {
    let file: GraphFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })?;
    let semantic = |msg: String| Error::Parse { line: 0, msg };
    if file.labels.len() != file.n {
        return Err(semantic(format!(
            "n = {} but {} labels given",
            file.n,
            file.labels.len()
        )));
    }
    let mut edges = Vec::with_capacity(file.edges.len());
    for [i, k] in file.edges {
        if i >= k {
            return Err(semantic(format!("edge [{i},{k}] must satisfy i < j")));
        }
        edges.push((i, k));
    }
    LabeledGraph::new(file.m, file.labels, &edges).map_err(|e| semantic(e.to_string()))
}

/// Canonical JSON text: edges sorted lexicographically, trailing newline.
pub fn format_graph(g: &LabeledGraph) -> String {
    let file = GraphFile {
        n: g.n(),
        m: g.m(),
        labels: g.labels().to_vec(),
        edges: g.edges().into_iter().map(|(i, k)| [i, k]).collect(),
    };
    let mut s = serde_json::to_string(&file).expect("graph serialization cannot fail");
    s.push('\n');
    s
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<LabeledGraph> {
    parse_graph(&std::fs::read_to_string(path)?)
}

pub fn write_graph(path: impl AsRef<Path>, g: &LabeledGraph) -> Result<()> {
    std::fs::write(path, format_graph(g))?;
    Ok(())
}
