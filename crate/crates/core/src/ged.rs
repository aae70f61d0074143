//! Exact graph edit distance for small graphs, and distance certificates.
//!
//! All five operations (vertex insertion and deletion, edge insertion and
//! deletion, label substitution) cost 1. The exact search is a depth-first
//! branch-and-bound over injective partial maps from the vertices of `g` to
//! those of `h`; vertices of `g` left unmapped are deleted and vertices of `h`
//! outside the image are inserted.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{edge_symmetric_difference, LabeledGraph};

/// Largest combined vertex count accepted by [`exact_ged`].
pub const MAX_EXACT_VERTICES: usize = 14;

/// One unit-cost edit operation. Vertex indices are 1-based and refer to the
/// graph as it stands when the operation is applied: deleting vertex `i`
/// shifts later vertices down by one, and an inserted vertex is appended.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum EditOp {
    Substitute { vertex: usize, label: u32 },
    DeleteEdge { a: usize, b: usize },
    InsertEdge { a: usize, b: usize },
    DeleteVertex { vertex: usize },
    InsertVertex { label: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ExactSearch,
    SymmetricDifference,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Bound {
    /// The distance is exactly this value.
    Exact(usize),
    /// The distance is at most this value.
    AtMost(usize),
    /// The distance is strictly greater than this value.
    Exceeds(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GedCertificate {
    pub bound: Bound,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<EditOp>>,
}

impl GedCertificate {
    /// Whether the certificate proves `GED <= d`.
    pub fn within(&self, d: usize) -> bool {
        match self.bound {
            Bound::Exact(v) | Bound::AtMost(v) => v <= d,
            Bound::Exceeds(_) => false,
        }
    }

    /// The exact distance, when known.
    pub fn distance(&self) -> Option<usize> {
        match self.bound {
            Bound::Exact(v) => Some(v),
            _ => None,
        }
    }
}

/// How [`certify_within`] bounds the distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertifyMode {
    Exact,
    EdgeOnly,
}

/// Applies an edit path, failing on the first operation that is not allowed
/// at that point.
pub fn apply_edit_path(path: &[EditOp], g: &LabeledGraph) -> Result<LabeledGraph> {
    let m = g.m();
    let mut labels = g.labels().to_vec();
    let mut adj: Vec<Vec<bool>> = (1..=g.n())
        .map(|i| (1..=g.n()).map(|k| g.has_edge(i, k)).collect())
        .collect();
    for (step, op) in path.iter().enumerate() {
        let n = labels.len();
        let fail = |msg: String| {
            Err(Error::Structure {
                index: step,
                reason: msg,
            })
        };
        let vertex_ok = |v: usize| (1..=n).contains(&v);
        match *op {
            EditOp::Substitute { vertex, label } => {
                if !vertex_ok(vertex) || label == 0 || label > m {
                    return fail(format!("cannot relabel vertex {vertex} to {label}"));
                }
                labels[vertex - 1] = label;
            }
            EditOp::DeleteEdge { a, b } | EditOp::InsertEdge { a, b } => {
                if !vertex_ok(a) || !vertex_ok(b) || a == b {
                    return fail(format!("bad edge ({a},{b})"));
                }
                let insert = matches!(op, EditOp::InsertEdge { .. });
                if adj[a - 1][b - 1] == insert {
                    return fail(format!(
                        "edge ({a},{b}) is {}",
                        if insert { "present" } else { "absent" }
                    ));
                }
                adj[a - 1][b - 1] = insert;
                adj[b - 1][a - 1] = insert;
            }
            EditOp::DeleteVertex { vertex } => {
                if !vertex_ok(vertex) {
                    return fail(format!("no vertex {vertex}"));
                }
                if adj[vertex - 1].iter().any(|&e| e) {
                    return fail(format!("vertex {vertex} still has incident edges"));
                }
                labels.remove(vertex - 1);
                adj.remove(vertex - 1);
                for row in &mut adj {
                    row.remove(vertex - 1);
                }
            }
            EditOp::InsertVertex { label } => {
                if label == 0 || label > m {
                    return fail(format!("label {label} outside 1..={m}"));
                }
                labels.push(label);
                for row in &mut adj {
                    row.push(false);
                }
                adj.push(vec![false; n + 1]);
            }
        }
    }
    let rows: Vec<Vec<u8>> = adj
        .iter()
        .map(|r| r.iter().map(|&e| u8::from(e)).collect())
        .collect();
    LabeledGraph::from_adjacency(m, labels, &rows)
}

/// Whether `path` can be replayed on `g` under the ordering rules (a vertex
/// is deleted only once isolated; an edge is inserted only between existing
/// vertices).
pub fn validate_edit_path(path: &[EditOp], g: &LabeledGraph) -> bool {
    apply_edit_path(path, g).is_ok()
}

struct Search<'a> {
    g: &'a LabeledGraph,
    h: &'a LabeledGraph,
    map: Vec<Option<usize>>,
    used: Vec<bool>,
    best: usize,
    best_map: Option<Vec<Option<usize>>>,
    /// Edges of `g` with an unassigned endpoint, per prefix length.
    g_open: Vec<usize>,
    h_edges: usize,
}

impl Search<'_> {
    /// Cost of assigning vertex `i` (0-based) to `t`, given the prefix.
    fn step_cost(&self, i: usize, t: Option<usize>) -> usize {
        let (g, h) = (self.g, self.h);
        let mut cost = match t {
            Some(t) => usize::from(g.label(i + 1) != h.label(t + 1)),
            None => 1,
        };
        for k in 0..i {
            let ge = g.has_edge(i + 1, k + 1);
            let he = match (t, self.map[k]) {
                (Some(a), Some(b)) => h.has_edge(a + 1, b + 1),
                _ => false,
            };
            cost += usize::from(ge != he);
        }
        cost
    }

    /// Cost of inserting every unused vertex of `h` and its incident edges.
    fn completion_cost(&self) -> usize {
        let h = self.h;
        let free: Vec<usize> = (0..h.n()).filter(|&t| !self.used[t]).collect();
        let mut cost = free.len();
        for (a, b) in h.edges() {
            if !self.used[a - 1] || !self.used[b - 1] {
                cost += 1;
            }
        }
        cost
    }

    fn lower_bound(&self, next: usize) -> usize {
        let (g, h) = (self.g, self.h);
        let rest_g = g.n() - next;
        let mut counts = vec![0i64; g.m().max(h.m()) as usize + 1];
        for i in next..g.n() {
            counts[g.label(i + 1) as usize] += 1;
        }
        let mut common = 0;
        let mut rest_h = 0;
        for t in (0..h.n()).filter(|&t| !self.used[t]) {
            rest_h += 1;
            let c = &mut counts[h.label(t + 1) as usize];
            if *c > 0 {
                *c -= 1;
                common += 1;
            }
        }
        let vertices = rest_g.max(rest_h) - common;
        // Edges still to be matched on either side.
        let h_done = self.h_done_edges();
        let edges = self.g_open[next].abs_diff(self.h_edges - h_done);
        vertices + edges
    }

    /// Edges of `h` between two vertices already in the image.
    fn h_done_edges(&self) -> usize {
        let used: Vec<usize> = (0..self.h.n()).filter(|&t| self.used[t]).collect();
        let mut count = 0;
        for (x, &a) in used.iter().enumerate() {
            for &b in &used[x + 1..] {
                count += usize::from(self.h.has_edge(a + 1, b + 1));
            }
        }
        count
    }

    fn run(&mut self, i: usize, cost: usize) {
        if i == self.g.n() {
            let total = cost + self.completion_cost();
            if total < self.best {
                self.best = total;
                self.best_map = Some(self.map.clone());
            }
            return;
        }
        if cost + self.lower_bound(i) >= self.best {
            return;
        }
        // Same-label targets first, deletion last.
        let label = self.g.label(i + 1);
        let mut options: Vec<Option<usize>> = (0..self.h.n())
            .filter(|&t| !self.used[t])
            .map(Some)
            .collect();
        options.sort_by_key(|t| usize::from(self.h.label(t.unwrap() + 1) != label));
        options.push(None);
        for t in options {
            let c = cost + self.step_cost(i, t);
            if c >= self.best {
                continue;
            }
            self.map[i] = t;
            if let Some(t) = t {
                self.used[t] = true;
            }
            self.run(i + 1, c);
            if let Some(t) = t {
                self.used[t] = false;
            }
            self.map[i] = None;
        }
    }
}

/// Turns a complete vertex map into an ordered edit path: substitutions,
/// edge deletions, vertex deletions, vertex insertions, edge insertions.
fn path_from_map(g: &LabeledGraph, h: &LabeledGraph, map: &[Option<usize>]) -> Vec<EditOp> {
    let mut path = Vec::new();
    for (i, t) in map.iter().enumerate() {
        if let Some(t) = *t {
            if g.label(i + 1) != h.label(t + 1) {
                path.push(EditOp::Substitute {
                    vertex: i + 1,
                    label: h.label(t + 1),
                });
            }
        }
    }
    for (a, b) in g.edges() {
        let kept =
            matches!((map[a - 1], map[b - 1]), (Some(x), Some(y)) if h.has_edge(x + 1, y + 1));
        if !kept {
            path.push(EditOp::DeleteEdge { a, b });
        }
    }
    for i in (0..g.n()).rev().filter(|&i| map[i].is_none()) {
        path.push(EditOp::DeleteVertex { vertex: i + 1 });
    }
    // Position of every vertex of `h` in the edited graph; surviving
    // vertices keep their relative order.
    let mut position = vec![0usize; h.n()];
    let mut next = 0;
    for t in map.iter().flatten() {
        next += 1;
        position[*t] = next;
    }
    let mut image = vec![false; h.n()];
    for t in map.iter().flatten() {
        image[*t] = true;
    }
    for t in 0..h.n() {
        if !image[t] {
            next += 1;
            position[t] = next;
            path.push(EditOp::InsertVertex {
                label: h.label(t + 1),
            });
        }
    }
    for (a, b) in h.edges() {
        let existed = image[a - 1] && image[b - 1] && {
            let pre = |t: usize| map.iter().position(|&x| x == Some(t)).unwrap();
            g.has_edge(pre(a - 1) + 1, pre(b - 1) + 1)
        };
        if !existed {
            path.push(EditOp::InsertEdge {
                a: position[a - 1],
                b: position[b - 1],
            });
        }
    }
    path
}

/// Exact GED when it is at most `max_cost`, with a witness path; otherwise
/// a certificate that the distance exceeds `max_cost`.
pub fn exact_ged(g: &LabeledGraph, h: &LabeledGraph, max_cost: usize) -> Result<GedCertificate> {
    if g.n() + h.n() > MAX_EXACT_VERTICES {
        return Err(Error::Guard(format!(
            "exact search limited to {MAX_EXACT_VERTICES} vertices in total, got {} + {}",
            g.n(),
            h.n()
        )));
    }
    let g_open: Vec<usize> = (0..=g.n())
        .map(|p| g.edges().iter().filter(|&&(a, b)| a > p || b > p).count())
        .collect();
    let mut s = Search {
        g,
        h,
        map: vec![None; g.n()],
        used: vec![false; h.n()],
        best: max_cost + 1,
        best_map: None,
        g_open,
        h_edges: h.edge_count(),
    };
    s.run(0, 0);
    Ok(match s.best_map {
        Some(map) => {
            let path = path_from_map(g, h, &map);
            debug_assert_eq!(path.len(), s.best);
            GedCertificate {
                bound: Bound::Exact(s.best),
                method: Method::ExactSearch,
                witness: Some(path),
            }
        }
        None => GedCertificate {
            bound: Bound::Exceeds(max_cost),
            method: Method::ExactSearch,
            witness: None,
        },
    })
}

/// Exact GED without a cost cap.
pub fn ged(g: &LabeledGraph, h: &LabeledGraph) -> Result<usize> {
    let cap = g.n() + h.n() + g.edge_count() + h.edge_count();
    let cert = exact_ged(g, h, cap)?;
    Ok(cert.distance().expect("the cap bounds every distance"))
}

/// Bounds `GED(g, g_prime)` to decide whether it is at most `d`.
///
/// `Exact` runs the exact search with cap `d`. `EdgeOnly` requires equal
/// vertex counts and bounds the distance by the number of differing labels
/// plus the edge symmetric difference.
pub fn certify_within(
    g: &LabeledGraph,
    g_prime: &LabeledGraph,
    d: usize,
    mode: CertifyMode,
) -> Result<GedCertificate> {
    match mode {
        CertifyMode::Exact => exact_ged(g, g_prime, d),
        CertifyMode::EdgeOnly => {
            let edges = edge_symmetric_difference(g, g_prime)?;
            let labels = g
                .labels()
                .iter()
                .zip(g_prime.labels())
                .filter(|(a, b)| a != b)
                .count();
            Ok(GedCertificate {
                bound: Bound::AtMost(edges + labels),
                method: Method::SymmetricDifference,
                witness: None,
            })
        }
    }
}
