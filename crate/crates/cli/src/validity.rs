//! Validity counts for edge-only generation from an unlabeled graph.

use anyhow::Result;
use ged_exactgen::edit::restrict_edge_only;
use ged_exactgen::graph::{edge_symmetric_difference, strip};
use ged_exactgen::sampler::{Sampler, SamplerConfig};
use ged_exactgen::{EditInput, EditNetwork, Family, LabeledGraph, NetworkConfig};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidityRecord {
    pub n: usize,
    #[serde(rename = "|E|")]
    pub edges: usize,
    pub d: usize,
    /// Outputs with exactly `n` vertices.
    #[serde(rename = "N_n")]
    pub n_n: usize,
    /// Outputs with an edge count in `[|E| - d, |E| + d]`.
    #[serde(rename = "N_|E|")]
    pub n_edges: usize,
    /// Outputs whose edge symmetric difference to the input is at most `d`.
    #[serde(rename = "N_d")]
    pub n_d: usize,
    pub sample_count: usize,
}

/// Counts the three validity conditions over `outputs`.
pub fn tally(g: &LabeledGraph, d: usize, outputs: &[LabeledGraph]) -> ValidityRecord {
    let (n, e) = (g.n(), g.edge_count());
    let lo = e.saturating_sub(d);
    ValidityRecord {
        n,
        edges: e,
        d,
        n_n: outputs.iter().filter(|h| h.n() == n).count(),
        n_edges: outputs
            .iter()
            .filter(|h| (lo..=e + d).contains(&h.edge_count()))
            .count(),
        n_d: outputs
            .iter()
            .filter(|h| edge_symmetric_difference(g, h).is_ok_and(|s| s <= d))
            .count(),
        sample_count: outputs.len(),
    }
}

/// Network and configuration for edge-only generation from `g` with all
/// labels collapsed to 1.
pub fn edge_only_network(g: &LabeledGraph, d: usize) -> Result<(LabeledGraph, EditNetwork)> {
    let g = g.unlabeled();
    let cfg = NetworkConfig::new(Family::Ge, g.n(), 1, d)?;
    Ok((g, EditNetwork::build(&cfg)?))
}

/// Runs the edge-only network on the given sequences.
pub fn generate_edge_only(
    g: &LabeledGraph,
    net: &EditNetwork,
    inputs: &[EditInput],
) -> Result<Vec<LabeledGraph>> {
    inputs
        .par_iter()
        .map(|x| {
            let x = restrict_edge_only(x, net.config())?;
            Ok(strip(&net.apply(g, &x)?)?)
        })
        .collect()
}

/// `count` seeded samples; sample `i` comes from stream `i`, so results do
/// not depend on the thread count.
pub fn run(g: &LabeledGraph, d: usize, count: usize, seed: u64) -> Result<ValidityRecord> {
    let (g, net) = edge_only_network(g, d)?;
    let scfg = SamplerConfig::new(net.config(), seed);
    let inputs: Vec<EditInput> = (0..count)
        .map(|i| Sampler::with_stream(scfg, i as u64).next_input())
        .collect();
    let outputs = generate_edge_only(&g, &net, &inputs)?;
    Ok(tally(&g, d, &outputs))
}
