//! Networks realizing bounded sequences of graph edit operations.
//!
//! Each family reads a padded graph plus an edit sequence `x` and emits a
//! padded graph:
//!
//! | family | operations | `x` length | input size | output size |
//! |--------|------------|------------|------------|-------------|
//! | GS | label substitution | `2d` | `n` labels | `n` labels |
//! | GD | edge/vertex deletion | `2d` | `n + d` | `n` |
//! | GI | edge/vertex insertion | `3d` | `n + d` | `n + d` |
//! | GE | all of the above | `7d` (grid decimals) | `n + 2d` | `n + d` |
//!
//! Every builder has a plain-arithmetic reference simulator producing the
//! same padded output and a trace of named intermediate vectors.

mod gd;
mod ge;
mod gi;
mod gs;

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{pad, strip, LabeledGraph, PaddedGraph};
use crate::relu::{Circuit, Lin, Metrics, ReluNetwork};

pub use ge::{convert_index, convert_label, parse_decimal};

/// The four network families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Gs,
    Gd,
    Gi,
    Ge,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Gs, Family::Gd, Family::Gi, Family::Ge];

    /// Length of the edit sequence as a multiple of `d`.
    pub fn slots_per_op(self) -> usize {
        match self {
            Family::Gs | Family::Gd => 2,
            Family::Gi => 3,
            Family::Ge => 7,
        }
    }

    /// Depth every network of this family is aligned to.
    pub fn depth(self) -> usize {
        match self {
            Family::Gs => 6,
            Family::Gd => 17,
            Family::Gi => 13,
            Family::Ge => 39,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Gs => "gs",
            Family::Gd => "gd",
            Family::Gi => "gi",
            Family::Ge => "ge",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        match s.to_ascii_lowercase().as_str() {
            "gs" => Ok(Family::Gs),
            "gd" => Ok(Family::Gd),
            "gi" => Ok(Family::Gi),
            "ge" => Ok(Family::Ge),
            other => Err(Error::Config(format!("unknown family {other:?}"))),
        }
    }
}

/// Size parameters and constants of one network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub family: Family,
    pub n: usize,
    pub m: u32,
    pub d: usize,
    /// Sentinel for padded entries.
    pub b: i64,
    /// Suppression constant.
    pub c: i64,
    /// Grid resolution `1/Δ` for GE inputs; 1 for the integer families.
    pub grid: i64,
}

impl NetworkConfig {
    /// Default constants: `B = 8·max(m, n+2d)`, `C = 64·B·(n+2d)` and, for GE,
    /// `1/Δ = 2·lcm(n, n+d-1, m)`. The factor 2 puts a grid point strictly
    /// inside every top interval `((D-1)/D, 1)`, so each index and label is
    /// reachable from `[0, 1)`.
    pub fn new(family: Family, n: usize, m: u32, d: usize) -> Result<NetworkConfig> {
        if n == 0 || m == 0 {
            return Err(Error::Config("n and m must be positive".into()));
        }
        let span = (n + 2 * d) as i64;
        let b = 8 * span.max(i64::from(m));
        let c = 64 * b * span;
        let grid = if family == Family::Ge {
            2 * Self::min_grid(n, m, d)
        } else {
            1
        };
        let cfg = NetworkConfig {
            family,
            n,
            m,
            d,
            b,
            c,
            grid,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// The coarsest grid on which every conversion interval endpoint lies.
    pub fn min_grid(n: usize, m: u32, d: usize) -> i64 {
        let ins = (n + d).saturating_sub(1).max(1) as i64;
        (n as i64).lcm(&ins).lcm(&i64::from(m))
    }

    /// Replaces `B` and `C`, checking the suppression inequalities.
    pub fn with_constants(self, b: i64, c: i64) -> Result<NetworkConfig> {
        let cfg = NetworkConfig { b, c, ..self };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Replaces `B` and `C` without any check. Networks built from such a
    /// configuration may compute wrong results; useful for fault injection.
    pub fn with_constants_unchecked(self, b: i64, c: i64) -> NetworkConfig {
        NetworkConfig { b, c, ..self }
    }

    /// Uses a finer GE grid; `q` must be a multiple of [`Self::min_grid`].
    pub fn with_grid(self, q: i64) -> Result<NetworkConfig> {
        let cfg = NetworkConfig { grid: q, ..self };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let span = (self.n + 2 * self.d) as i64;
        let floor_b = span.max(i64::from(self.m));
        if self.b <= floor_b {
            return Err(Error::Config(format!(
                "B = {} must exceed max(m, n + 2d) = {floor_b}",
                self.b
            )));
        }
        let floor_c = self
            .b
            .checked_mul(span + 1)
            .ok_or_else(|| Error::Config("C bound overflows".into()))?;
        if self.c <= floor_c {
            return Err(Error::Config(format!(
                "C = {} must exceed B(n + 2d + 1) = {floor_c}",
                self.c
            )));
        }
        if self.family == Family::Ge {
            let g = Self::min_grid(self.n, self.m, self.d);
            if self.grid <= 0 || self.grid % g != 0 {
                return Err(Error::Config(format!(
                    "grid {} is not a positive multiple of {g}",
                    self.grid
                )));
            }
        } else if self.grid != 1 {
            return Err(Error::Config("only GE inputs use a decimal grid".into()));
        }
        self.check_magnitude()
    }

    /// Rejects constants whose worst-case intermediate values could leave
    /// the 64-bit range.
    fn check_magnitude(&self) -> Result<()> {
        let size = self.padded_size() as i128;
        let slots = (self.family.slots_per_op() * self.d) as i128;
        let bound = self.c as i128 * (size + slots + 4)
            + self.b as i128 * size * size
            + self.grid as i128 * (size + 1);
        if bound > (i64::MAX / 4) as i128 {
            return Err(Error::Config(format!(
                "value bound {bound} exceeds the 64-bit working range"
            )));
        }
        Ok(())
    }

    /// Sentinel rows appended to the source graph.
    pub fn pad_count(&self) -> usize {
        match self.family {
            Family::Gs => 0,
            Family::Gd | Family::Gi => self.d,
            Family::Ge => 2 * self.d,
        }
    }

    pub fn padded_size(&self) -> usize {
        self.n + self.pad_count()
    }

    pub fn output_size(&self) -> usize {
        match self.family {
            Family::Gs | Family::Gd => self.n,
            Family::Gi | Family::Ge => self.n + self.d,
        }
    }

    pub fn sequence_len(&self) -> usize {
        self.family.slots_per_op() * self.d
    }

    fn graph_inputs(&self) -> usize {
        let s = self.padded_size();
        match self.family {
            Family::Gs => s,
            _ => s + s * s,
        }
    }

    fn input_arity(&self) -> usize {
        self.graph_inputs() + self.sequence_len()
    }

    fn output_arity(&self) -> usize {
        let s = self.output_size();
        match self.family {
            Family::Gs => s,
            _ => s + s * s,
        }
    }
}

/// An edit sequence; entry `j` denotes `values[j] / scale`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EditInput {
    pub family: Family,
    pub values: Vec<i64>,
    pub scale: i64,
}

impl EditInput {
    /// Integer sequence for GS, GD or GI.
    pub fn integers(family: Family, values: Vec<i64>) -> EditInput {
        EditInput {
            family,
            values,
            scale: 1,
        }
    }

    /// GE sequence of grid numerators over `scale`.
    pub fn grid(values: Vec<i64>, scale: i64) -> EditInput {
        EditInput {
            family: Family::Ge,
            values,
            scale,
        }
    }

    /// GE sequence from exact decimals such as `"0.45"`.
    pub fn from_decimals<S: AsRef<str>>(decimals: &[S], scale: i64) -> Result<EditInput> {
        let values = decimals
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let r = parse_decimal(s.as_ref())?;
                let num = *r.numer() as i128 * scale as i128;
                let den = *r.denom() as i128;
                if num % den != 0 {
                    return Err(Error::OffGrid { index: i, scale });
                }
                Ok((num / den) as i64)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EditInput::grid(values, scale))
    }

    pub fn as_rationals(&self) -> Vec<Rational64> {
        self.values
            .iter()
            .map(|&v| Rational64::new(v, self.scale))
            .collect()
    }

    /// A valid sequence with every operation disabled: index 0 everywhere,
    /// except that GI pairs read `(0, 1)` (equal indices would insert a
    /// vertex) and integer label slots hold 1.
    pub fn no_op(cfg: &NetworkConfig) -> EditInput {
        let d = cfg.d;
        let mut values = vec![0; cfg.sequence_len()];
        match cfg.family {
            Family::Gs | Family::Gi => values[d..].fill(1),
            Family::Gd | Family::Ge => {}
        }
        EditInput {
            family: cfg.family,
            values,
            scale: cfg.grid,
        }
    }

    /// Checks family, length and value ranges against `cfg` and re-expresses
    /// GE values on the configuration's grid.
    pub fn normalized(&self, cfg: &NetworkConfig) -> Result<EditInput> {
        if self.family != cfg.family {
            return Err(Error::Contract(format!(
                "{} input for a {} network",
                self.family, cfg.family
            )));
        }
        if self.values.len() != cfg.sequence_len() {
            return Err(Error::Arity {
                expected: cfg.sequence_len(),
                got: self.values.len(),
            });
        }
        let (n, m, d) = (cfg.n as i64, i64::from(cfg.m), cfg.d);
        let range_err = |j: usize, lo: i64, hi: i64, v: i64| {
            Err(Error::Contract(format!(
                "x_{} = {v} outside [{lo}, {hi}]",
                j + 1
            )))
        };
        match cfg.family {
            Family::Ge => {
                if self.scale <= 0 || cfg.grid % self.scale != 0 {
                    return Err(Error::Contract(format!(
                        "grid 1/{} is not a refinement of 1/{}",
                        cfg.grid, self.scale
                    )));
                }
                let k = cfg.grid / self.scale;
                let mut values = Vec::with_capacity(self.values.len());
                for (j, &v) in self.values.iter().enumerate() {
                    if v < 0 || v >= self.scale {
                        return Err(Error::Contract(format!(
                            "x_{} = {v}/{} outside [0, 1)",
                            j + 1,
                            self.scale
                        )));
                    }
                    values.push(v * k);
                }
                Ok(EditInput::grid(values, cfg.grid))
            }
            family => {
                if self.scale != 1 {
                    return Err(Error::Contract(
                        "integer families take integer inputs".into(),
                    ));
                }
                for (j, &v) in self.values.iter().enumerate() {
                    let (lo, hi) = match (family, j / d) {
                        (Family::Gs, 0) | (Family::Gd, _) => (0, n),
                        (Family::Gs, _) | (Family::Gi, 2) => (1, m),
                        (Family::Gi, _) => (0, n + d as i64 - 1),
                        (Family::Ge, _) => unreachable!(),
                    };
                    if v < lo || v > hi {
                        return range_err(j, lo, hi, v);
                    }
                }
                Ok(self.clone())
            }
        }
    }
}

/// Named intermediate vectors of one evaluation, in computation order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    entries: Vec<(String, Vec<i64>)>,
}

impl Trace {
    pub(crate) fn push(&mut self, name: &str, values: Vec<i64>) {
        self.entries.push((name.to_string(), values));
    }

    pub fn get(&self, name: &str) -> Option<&[i64]> {
        self.entries
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[i64])> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    fn absorb(&mut self, prefix: &str, other: Trace) {
        self.entries.extend(
            other
                .entries
                .into_iter()
                .map(|(k, v)| (format!("{prefix}{k}"), v)),
        );
    }
}

/// Collects named intermediate forms while a circuit is built.
pub(crate) struct Probes {
    enabled: bool,
    items: Vec<(String, Vec<Lin>)>,
}

impl Probes {
    fn new(enabled: bool) -> Probes {
        Probes {
            enabled,
            items: Vec::new(),
        }
    }

    pub(crate) fn record(&mut self, name: &str, values: &[Lin]) {
        if self.enabled {
            self.items.push((name.to_string(), values.to_vec()));
        }
    }

    fn absorb(&mut self, prefix: &str, other: Probes) {
        self.items.extend(
            other
                .items
                .into_iter()
                .map(|(k, v)| (format!("{prefix}{k}"), v)),
        );
    }
}

/// The constants shared by all stages of one build.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Consts {
    pub b: i64,
    pub c: i64,
}

/// A built network together with its configuration and probe layout.
#[derive(Clone, Debug)]
pub struct EditNetwork {
    cfg: NetworkConfig,
    net: ReluNetwork,
    probes: Vec<(String, usize)>,
}

impl EditNetwork {
    pub fn build(cfg: &NetworkConfig) -> Result<EditNetwork> {
        Self::build_inner(cfg, false)
    }

    /// Builds a network that additionally exposes named intermediates.
    pub fn build_probed(cfg: &NetworkConfig) -> Result<EditNetwork> {
        Self::build_inner(cfg, true)
    }

    fn build_inner(cfg: &NetworkConfig, probed: bool) -> Result<EditNetwork> {
        cfg.check_magnitude()?;
        let k = Consts { b: cfg.b, c: cfg.c };
        let mut c = Circuit::new(cfg.input_arity());
        let mut probes = Probes::new(probed);
        let s = cfg.padded_size();
        let g_in = cfg.graph_inputs();
        let x = c.inputs(g_in..g_in + cfg.sequence_len());
        let (u_out, v_out) = match cfg.family {
            Family::Gs => {
                let u = c.inputs(0..s);
                (gs::network(&mut c, &k, &u, &x, &mut probes), Vec::new())
            }
            family => {
                let u = c.inputs(0..s);
                let v = c.inputs(s..s + s * s);
                match family {
                    Family::Gd => gd::network(&mut c, &k, &u, &v, cfg.n, &x, &mut probes),
                    Family::Gi => gi::network(&mut c, &k, &u, &v, cfg.n, &x, true, &mut probes),
                    _ => ge::network(&mut c, &k, cfg, &u, &v, &x, &mut probes),
                }
            }
        };
        let mut outputs = u_out;
        outputs.extend(v_out);
        let mut layout = Vec::new();
        for (name, vals) in &probes.items {
            layout.push((name.clone(), vals.len()));
            outputs.extend(vals.iter().cloned());
        }
        let mut scale = vec![1; g_in];
        scale.extend(std::iter::repeat_n(cfg.grid, cfg.sequence_len()));
        let net = c.finish(&outputs, Some(cfg.family.depth()), &scale)?;
        Ok(EditNetwork {
            cfg: *cfg,
            net,
            probes: layout,
        })
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.cfg
    }

    pub fn network(&self) -> &ReluNetwork {
        &self.net
    }

    pub fn into_network(self) -> ReluNetwork {
        self.net
    }

    pub fn metrics(&self) -> Metrics {
        self.net.metrics()
    }

    /// Network input vector for a graph and an edit sequence (GE values as
    /// grid numerators).
    pub fn encode(&self, g: &LabeledGraph, input: &EditInput) -> Result<Vec<i64>> {
        encode(&self.cfg, g, input)
    }

    /// Runs the network on a graph and edit sequence.
    pub fn apply(&self, g: &LabeledGraph, input: &EditInput) -> Result<PaddedGraph> {
        Ok(self.apply_traced(g, input)?.0)
    }

    /// Runs the network and also returns the probed intermediates.
    pub fn apply_traced(
        &self,
        g: &LabeledGraph,
        input: &EditInput,
    ) -> Result<(PaddedGraph, Trace)> {
        let x = self.encode(g, input)?;
        let out = self.net.evaluate_scaled(&x)?;
        let main = self.cfg.output_arity();
        let s = self.cfg.output_size();
        let padded = if self.cfg.family == Family::Gs {
            gs_output(g, &out[..s], self.cfg.b)?
        } else {
            PaddedGraph::from_parts(
                out[..s].to_vec(),
                out[s..main].to_vec(),
                self.cfg.b,
                self.cfg.m,
            )?
        };
        let mut trace = Trace::default();
        let mut at = main;
        for (name, len) in &self.probes {
            trace.push(name, out[at..at + len].to_vec());
            at += len;
        }
        Ok((padded, trace))
    }
}

fn check_graph(cfg: &NetworkConfig, g: &LabeledGraph) -> Result<()> {
    if g.n() != cfg.n {
        return Err(Error::VertexCountMismatch {
            left: g.n(),
            right: cfg.n,
        });
    }
    if g.labels().iter().any(|&l| l > cfg.m) {
        return Err(Error::Contract(format!(
            "graph labels exceed the network alphabet 1..={}",
            cfg.m
        )));
    }
    Ok(())
}

fn encode(cfg: &NetworkConfig, g: &LabeledGraph, input: &EditInput) -> Result<Vec<i64>> {
    check_graph(cfg, g)?;
    let input = input.normalized(cfg)?;
    let p = pad(g, cfg.pad_count(), cfg.b)?;
    let mut x = p.u;
    if cfg.family != Family::Gs {
        x.extend(p.v);
    }
    x.extend(input.values);
    Ok(x)
}

/// GS keeps the adjacency matrix; only the labels pass through the network.
fn gs_output(g: &LabeledGraph, labels: &[i64], b: i64) -> Result<PaddedGraph> {
    let v = g.adjacency().iter().map(|&a| i64::from(a)).collect();
    PaddedGraph::from_parts(labels.to_vec(), v, b, g.m())
}

/// Builds the network for `cfg` (any family).
pub fn build(cfg: &NetworkConfig) -> Result<ReluNetwork> {
    Ok(EditNetwork::build(cfg)?.into_network())
}

fn build_family(cfg: &NetworkConfig, family: Family) -> Result<ReluNetwork> {
    if cfg.family != family {
        return Err(Error::Config(format!(
            "configuration is for {}, not {family}",
            cfg.family
        )));
    }
    build(cfg)
}

pub fn build_gs(cfg: &NetworkConfig) -> Result<ReluNetwork> {
    build_family(cfg, Family::Gs)
}

pub fn build_gd(cfg: &NetworkConfig) -> Result<ReluNetwork> {
    build_family(cfg, Family::Gd)
}

pub fn build_gi(cfg: &NetworkConfig) -> Result<ReluNetwork> {
    build_family(cfg, Family::Gi)
}

pub fn build_ge(cfg: &NetworkConfig) -> Result<ReluNetwork> {
    build_family(cfg, Family::Ge)
}

/// Direct simulation of the family's equations: padded output and trace.
pub fn reference_trace(
    cfg: &NetworkConfig,
    g: &LabeledGraph,
    input: &EditInput,
) -> Result<(PaddedGraph, Trace)> {
    check_graph(cfg, g)?;
    let input = input.normalized(cfg)?;
    let p = pad(g, cfg.pad_count(), cfg.b)?;
    let x = &input.values;
    let mut trace = Trace::default();
    let k = Consts { b: cfg.b, c: cfg.c };
    let padded = match cfg.family {
        Family::Gs => {
            let labels = gs::reference(&p.u, x, &mut trace);
            gs_output(g, &labels, cfg.b)?
        }
        Family::Gd => {
            let (u, v) = gd::reference(&k, &p.u, &p.v, cfg.n, x, &mut trace);
            PaddedGraph::from_parts(u, v, cfg.b, cfg.m)?
        }
        Family::Gi => {
            let (u, v) = gi::reference(&k, &p.u, &p.v, cfg.n, x, true, &mut trace);
            PaddedGraph::from_parts(u, v, cfg.b, cfg.m)?
        }
        Family::Ge => {
            let (u, v) = ge::reference(&k, cfg, &p.u, &p.v, x, &mut trace);
            PaddedGraph::from_parts(u, v, cfg.b, cfg.m)?
        }
    };
    Ok((padded, trace))
}

fn reference_family(
    family: Family,
    cfg: &NetworkConfig,
    g: &LabeledGraph,
    x: &EditInput,
) -> Result<LabeledGraph> {
    if cfg.family != family {
        return Err(Error::Config(format!(
            "configuration is for {}, not {family}",
            cfg.family
        )));
    }
    strip(&reference_trace(cfg, g, x)?.0)
}

pub fn reference_gs(cfg: &NetworkConfig, g: &LabeledGraph, x: &EditInput) -> Result<LabeledGraph> {
    reference_family(Family::Gs, cfg, g, x)
}

pub fn reference_gd(cfg: &NetworkConfig, g: &LabeledGraph, x: &EditInput) -> Result<LabeledGraph> {
    reference_family(Family::Gd, cfg, g, x)
}

pub fn reference_gi(cfg: &NetworkConfig, g: &LabeledGraph, x: &EditInput) -> Result<LabeledGraph> {
    reference_family(Family::Gi, cfg, g, x)
}

pub fn reference_ge(cfg: &NetworkConfig, g: &LabeledGraph, x: &EditInput) -> Result<LabeledGraph> {
    reference_family(Family::Ge, cfg, g, x)
}

/// How [`generate`] computes its result.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Network,
    Reference,
}

/// Applies one edit sequence to `g`: pad, evaluate (network or reference),
/// strip.
pub fn generate(
    g: &LabeledGraph,
    input: &EditInput,
    cfg: &NetworkConfig,
    mode: Mode,
) -> Result<LabeledGraph> {
    let padded = match mode {
        Mode::Network => EditNetwork::build(cfg)?.apply(g, input)?,
        Mode::Reference => reference_trace(cfg, g, input)?.0,
    };
    strip(&padded)
}

/// Rewrites a GE sequence so that it only inserts and deletes edges:
/// substitutions are disabled and index pairs that would insert or delete a
/// vertex are nullified.
pub fn restrict_edge_only(input: &EditInput, cfg: &NetworkConfig) -> Result<EditInput> {
    if cfg.family != Family::Ge {
        return Err(Error::Config(
            "edge-only mode needs a GE configuration".into(),
        ));
    }
    let mut x = input.normalized(cfg)?;
    let d = cfg.d;
    let (n, ins) = (cfg.n as i64, (cfg.n + d) as i64 - 1);
    let q = cfg.grid;
    for j in 0..d {
        x.values[j] = 0;
        let (a, b) = (2 * d + j, 3 * d + j);
        let ia = convert_index(x.values[a], q, ins);
        if ia != 0 && ia == convert_index(x.values[b], q, ins) {
            x.values[a] = 0;
        }
        let (a, b) = (5 * d + j, 6 * d + j);
        let ia = convert_index(x.values[a], q, n);
        if ia != 0 && ia == convert_index(x.values[b], q, n) {
            x.values[a] = 0;
        }
    }
    Ok(x)
}

/// GE restricted to edge insertions and deletions, as used for unlabeled
/// graphs: the vertex count is preserved and at most `d` edges change.
pub fn edge_only_ge(
    g: &LabeledGraph,
    input: &EditInput,
    cfg: &NetworkConfig,
) -> Result<LabeledGraph> {
    let x = restrict_edge_only(input, cfg)?;
    generate(g, &x, cfg, Mode::Network)
}
