//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use ged_exactgen::edit::{convert_index, convert_label};
use ged_exactgen::{EditInput, Family, LabeledGraph, NetworkConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Mutable graph with 1-indexed helpers.
#[derive(Clone, Debug)]
pub struct Work {
    pub labels: Vec<u32>,
    pub adj: Vec<Vec<bool>>,
}

impl Work {
    pub fn from(g: &LabeledGraph) -> Work {
        let n = g.n();
        Work {
            labels: g.labels().to_vec(),
            adj: (1..=n)
                .map(|i| (1..=n).map(|k| g.has_edge(i, k)).collect())
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    fn valid(&self, v: i64) -> bool {
        v >= 1 && v as usize <= self.n()
    }

    pub fn set_edge(&mut self, a: i64, b: i64, on: bool) {
        if a != b && self.valid(a) && self.valid(b) {
            self.adj[a as usize - 1][b as usize - 1] = on;
            self.adj[b as usize - 1][a as usize - 1] = on;
        }
    }

    pub fn isolated(&self, v: i64) -> bool {
        self.valid(v) && !self.adj[v as usize - 1].iter().any(|&e| e)
    }

    pub fn add_vertex(&mut self, label: u32) {
        for row in &mut self.adj {
            row.push(false);
        }
        self.labels.push(label);
        self.adj.push(vec![false; self.labels.len()]);
    }

    pub fn remove_vertices(&mut self, gone: &BTreeSet<i64>) {
        let keep: Vec<usize> = (0..self.n())
            .filter(|i| !gone.contains(&(*i as i64 + 1)))
            .collect();
        self.labels = keep.iter().map(|&i| self.labels[i]).collect();
        self.adj = keep
            .iter()
            .map(|&i| keep.iter().map(|&k| self.adj[i][k]).collect())
            .collect();
    }

    pub fn graph(&self, m: u32) -> LabeledGraph {
        let rows: Vec<Vec<u8>> = self
            .adj
            .iter()
            .map(|r| r.iter().map(|&e| u8::from(e)).collect())
            .collect();
        LabeledGraph::from_adjacency(m, self.labels.clone(), &rows).unwrap()
    }
}

fn substitute(w: &mut Work, idx: &[i64], labels: &[i64]) {
    let mut seen = BTreeSet::new();
    for (&i, &l) in idx.iter().zip(labels) {
        if i != 0 && seen.insert(i) && w.valid(i) {
            w.labels[i as usize - 1] = l as u32;
        }
    }
}

/// Vertex insertions first (labels ascending), then edges among existing
/// vertices. With `dedup`, a repeated ordered pair is ignored.
fn insert(w: &mut Work, a: &[i64], b: &[i64], labels: &[i64], dedup: bool) {
    let mut new: Vec<i64> = (0..a.len())
        .filter(|&j| a[j] == b[j])
        .map(|j| labels[j])
        .collect();
    new.sort_unstable();
    for l in new {
        w.add_vertex(l as u32);
    }
    for j in 0..a.len() {
        let repeated = dedup && (0..j).any(|l| a[l] == a[j] && b[l] == b[j]);
        if a[j] != b[j] && !repeated {
            w.set_edge(a[j], b[j], true);
        }
    }
}

/// Edge deletions, then deletion of requested vertices that are isolated
/// once every edge deletion has been applied. Only vertices `1..=limit` can
/// be deleted.
fn delete(w: &mut Work, a: &[i64], b: &[i64], limit: usize) {
    for j in 0..a.len() {
        if a[j] != b[j] && a[j] as usize <= limit && b[j] as usize <= limit {
            w.set_edge(a[j], b[j], false);
        }
    }
    let gone: BTreeSet<i64> = (0..a.len())
        .filter(|&j| a[j] == b[j] && a[j] as usize <= limit && w.isolated(a[j]))
        .map(|j| a[j])
        .collect();
    w.remove_vertices(&gone);
}

/// What each family does to `g`, stated as plain operations on a graph.
pub fn semantic(cfg: &NetworkConfig, g: &LabeledGraph, input: &EditInput) -> LabeledGraph {
    let x = input.normalized(cfg).unwrap().values;
    let d = cfg.d;
    let n = cfg.n;
    let mut w = Work::from(g);
    match cfg.family {
        Family::Gs => substitute(&mut w, &x[..d], &x[d..]),
        Family::Gd => delete(&mut w, &x[..d], &x[d..], n),
        Family::Gi => insert(&mut w, &x[..d], &x[d..2 * d], &x[2 * d..], true),
        Family::Ge => {
            let q = cfg.grid;
            let (m, ni, nd) = (i64::from(cfg.m), n as i64, (n + d - 1) as i64);
            let conv: Vec<i64> = (0..7 * d)
                .map(|j| match j / d {
                    1 | 4 => convert_label(x[j], q, m),
                    2 | 3 => convert_index(x[j], q, nd),
                    _ => convert_index(x[j], q, ni),
                })
                .collect();
            let block = |k: usize| &conv[k * d..(k + 1) * d];
            // Surviving operations, in the order substitution, insertion, deletion.
            let mut budget = d;
            let mut take = |active: bool| {
                let ok = active && budget > 0;
                if ok {
                    budget -= 1;
                }
                ok
            };
            let mut sub_idx = vec![0; d];
            for j in 0..d {
                let first = !block(0)[..j].contains(&block(0)[j]);
                if take(block(0)[j] != 0 && first) {
                    sub_idx[j] = block(0)[j];
                }
            }
            let (ia, ib) = (block(2), block(3));
            let mut ins = Vec::new();
            for j in 0..d {
                let repeated = ia[j] != ib[j] && (0..j).any(|l| ia[l] == ia[j] && ib[l] == ib[j]);
                if take(ia[j] != 0 && ib[j] != 0 && !repeated) {
                    ins.push(j);
                }
            }
            let (da, db) = (block(5), block(6));
            let mut del = Vec::new();
            for j in 0..d {
                let repeated = (0..j).any(|l| da[l] == da[j] && db[l] == db[j]);
                if take(da[j] != 0 && db[j] != 0 && !repeated) {
                    del.push(j);
                }
            }
            substitute(&mut w, &sub_idx, block(1));
            let pick = |v: &[i64], js: &[usize]| js.iter().map(|&j| v[j]).collect::<Vec<_>>();
            insert(
                &mut w,
                &pick(ia, &ins),
                &pick(ib, &ins),
                &pick(block(4), &ins),
                false,
            );
            delete(&mut w, &pick(da, &del), &pick(db, &del), n);
        }
    }
    w.graph(cfg.m)
}

/// Graph edit distance by enumerating every injective partial vertex map.
pub fn brute_ged(g: &LabeledGraph, h: &LabeledGraph) -> usize {
    fn cost(g: &LabeledGraph, h: &LabeledGraph, map: &[Option<usize>]) -> usize {
        let mut c = 0;
        let mut image = vec![None; h.n()];
        for (i, t) in map.iter().enumerate() {
            match t {
                None => c += 1,
                Some(t) => {
                    image[*t] = Some(i);
                    c += usize::from(g.label(i + 1) != h.label(t + 1));
                }
            }
        }
        c += image.iter().filter(|p| p.is_none()).count();
        for (a, b) in g.edges() {
            let kept =
                matches!((map[a - 1], map[b - 1]), (Some(s), Some(t)) if h.has_edge(s + 1, t + 1));
            c += usize::from(!kept);
        }
        for (a, b) in h.edges() {
            let kept = matches!((image[a - 1], image[b - 1]), (Some(s), Some(t)) if g.has_edge(s + 1, t + 1));
            c += usize::from(!kept);
        }
        c
    }
    fn walk(
        g: &LabeledGraph,
        h: &LabeledGraph,
        map: &mut Vec<Option<usize>>,
        used: &mut [bool],
    ) -> usize {
        let i = map.len();
        if i == g.n() {
            return cost(g, h, map);
        }
        map.push(None);
        let mut best = walk(g, h, map, used);
        for t in 0..h.n() {
            if !used[t] {
                used[t] = true;
                map[i] = Some(t);
                best = best.min(walk(g, h, map, used));
                used[t] = false;
            }
        }
        map.pop();
        best
    }
    walk(g, h, &mut Vec::new(), &mut vec![false; h.n()])
}

/// Random graph with `n` vertices, labels in `1..=m` and edge probability 1/2.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, m: u32) -> LabeledGraph {
    let labels = (0..n).map(|_| rng.gen_range(1..=m)).collect();
    let mut edges = Vec::new();
    for i in 1..=n {
        for k in i + 1..=n {
            if rng.gen_bool(0.5) {
                edges.push((i, k));
            }
        }
    }
    LabeledGraph::new(m, labels, &edges).unwrap()
}

/// Random sequence over each slot's full contract range, index 0 included.
pub fn random_input(rng: &mut ChaCha8Rng, cfg: &NetworkConfig) -> EditInput {
    let (n, m, d) = (cfg.n as i64, i64::from(cfg.m), cfg.d);
    let values = (0..cfg.sequence_len())
        .map(|j| {
            let (lo, hi) = match (cfg.family, j / d) {
                (Family::Ge, _) => (0, cfg.grid - 1),
                (Family::Gs, 0) | (Family::Gd, _) => (0, n),
                (Family::Gs, _) | (Family::Gi, 2) => (1, m),
                (Family::Gi, _) => (0, n + d as i64 - 1),
            };
            rng.gen_range(lo..=hi)
        })
        .collect();
    match cfg.family {
        Family::Ge => EditInput::grid(values, cfg.grid),
        f => EditInput::integers(f, values),
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The five-vertex sample graph and its three edited variants.
pub fn sample_and_variants() -> (LabeledGraph, [LabeledGraph; 3]) {
    let edges = [(1, 2), (1, 5), (2, 3), (2, 4), (2, 5), (4, 5)];
    let g = LabeledGraph::new(5, vec![3, 5, 4, 2, 4], &edges).unwrap();
    // Edge {2,3} and then vertex 3 deleted.
    let g1 = LabeledGraph::new(
        5,
        vec![3, 5, 2, 4],
        &[(1, 2), (1, 4), (2, 3), (2, 4), (3, 4)],
    )
    .unwrap();
    // Vertex 3 relabeled 2, vertex 5 relabeled 5.
    let g2 = LabeledGraph::new(5, vec![3, 5, 2, 2, 5], &edges).unwrap();
    // Vertex with label 5 inserted and joined to vertex 4.
    let mut e3 = edges.to_vec();
    e3.push((4, 6));
    let g3 = LabeledGraph::new(5, vec![3, 5, 4, 2, 4, 5], &e3).unwrap();
    (g, [g1, g2, g3])
}
