//! Layered affine + ReLU networks with exact integer evaluation.

mod builder;
pub mod gadgets;

pub use builder::{Circuit, Lin};
pub use gadgets::{
    gadget_and, gadget_delta, gadget_heaviside, gadget_interval, gadget_max2, GadgetSpec,
};

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One affine map followed by a per-neuron activation mask, stored as sparse rows.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layer {
    row_ptr: Vec<u32>,
    cols: Vec<u32>,
    weights: Vec<i64>,
    bias: Vec<i64>,
    relu: Vec<bool>,
}

impl Layer {
    pub(crate) fn close_row(&mut self, bias: i64, relu: bool) {
        if self.row_ptr.is_empty() {
            self.row_ptr.push(0);
        }
        self.row_ptr
            .push(u32::try_from(self.cols.len()).expect("row storage fits in u32"));
        self.bias.push(bias);
        self.relu.push(relu);
    }

    fn identity(width: usize) -> Layer {
        let mut l = Layer::default();
        for i in 0..width {
            l.cols.push(i as u32);
            l.weights.push(1);
            l.close_row(0, false);
        }
        l
    }

    pub fn width(&self) -> usize {
        self.bias.len()
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn has_relu(&self) -> bool {
        self.relu.iter().any(|&r| r)
    }

    fn row(&self, i: usize) -> std::ops::Range<usize> {
        self.row_ptr[i] as usize..self.row_ptr[i + 1] as usize
    }

    /// Row `i` as `(column, weight)` pairs.
    pub fn row_entries(&self, i: usize) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.row(i)
            .map(move |t| (self.cols[t] as usize, self.weights[t]))
    }

    pub fn bias(&self, i: usize) -> i64 {
        self.bias[i]
    }

    pub fn is_relu(&self, i: usize) -> bool {
        self.relu[i]
    }

    fn apply(&self, index: usize, x: &[i64]) -> Result<Vec<i64>> {
        let mut out = Vec::with_capacity(self.width());
        for i in 0..self.width() {
            let mut acc = self.bias[i] as i128;
            for t in self.row(i) {
                let p = self.weights[t] as i128 * x[self.cols[t] as usize] as i128;
                acc = acc.checked_add(p).ok_or(Error::Overflow {
                    layer: index,
                    neuron: i,
                })?;
            }
            let v = i64::try_from(acc).map_err(|_| Error::Overflow {
                layer: index,
                neuron: i,
            })?;
            out.push(if self.relu[i] { v.max(0) } else { v });
        }
        Ok(out)
    }

    fn shifted(&self, col_offset: u32) -> impl Iterator<Item = (Vec<(u32, i64)>, i64, bool)> + '_ {
        (0..self.width()).map(move |i| {
            let row = self
                .row(i)
                .map(|t| (self.cols[t] + col_offset, self.weights[t]))
                .collect();
            (row, self.bias[i], self.relu[i])
        })
    }

    fn push_row(&mut self, row: &[(u32, i64)], bias: i64, relu: bool) {
        for &(c, w) in row {
            self.cols.push(c);
            self.weights.push(w);
        }
        self.close_row(bias, relu);
    }
}

/// Exact size and depth figures of a network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    /// Layers containing at least one ReLU neuron.
    pub depth: usize,
    /// All neurons, pass-throughs and readout included.
    pub neuron_count: usize,
    /// Neurons with ReLU activation.
    pub relu_count: usize,
    /// Stored non-zero weights.
    pub weight_count: usize,
    /// Largest absolute weight or bias.
    pub weight_magnitude_max: i64,
}

/// A feed-forward network of integer affine layers with optional ReLU.
///
/// Each input is multiplied by its entry of `input_scale` before the first
/// layer, so inputs on a rational grid with spacing `1/scale` are handled
/// entirely in integer arithmetic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReluNetwork {
    input_arity: usize,
    input_scale: Vec<i64>,
    layers: Vec<Layer>,
}

impl ReluNetwork {
    pub(crate) fn from_layers(
        input_arity: usize,
        input_scale: Vec<i64>,
        layers: Vec<Layer>,
    ) -> ReluNetwork {
        assert_eq!(input_scale.len(), input_arity);
        assert!(input_scale.iter().all(|&s| s > 0));
        let mut layers = layers;
        for l in &mut layers {
            if l.row_ptr.is_empty() {
                l.row_ptr.push(0);
            }
        }
        ReluNetwork {
            input_arity,
            input_scale,
            layers,
        }
    }

    /// The identity map on `arity` values.
    pub fn identity(arity: usize) -> ReluNetwork {
        ReluNetwork::from_layers(arity, vec![1; arity], vec![Layer::identity(arity)])
    }

    pub fn input_arity(&self) -> usize {
        self.input_arity
    }

    pub fn output_arity(&self) -> usize {
        self.layers.last().map_or(self.input_arity, Layer::width)
    }

    pub fn input_scale(&self) -> &[i64] {
        &self.input_scale
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn metrics(&self) -> Metrics {
        let mut m = Metrics {
            depth: 0,
            neuron_count: 0,
            relu_count: 0,
            weight_count: 0,
            weight_magnitude_max: 0,
        };
        for l in &self.layers {
            m.depth += l.has_relu() as usize;
            m.neuron_count += l.width();
            m.relu_count += l.relu.iter().filter(|&&r| r).count();
            m.weight_count += l.nnz();
            let wmax = l
                .weights
                .iter()
                .chain(&l.bias)
                .map(|w| w.unsigned_abs())
                .max()
                .unwrap_or(0);
            m.weight_magnitude_max = m.weight_magnitude_max.max(wmax as i64);
        }
        m
    }

    /// Evaluates on inputs already multiplied by their scales.
    pub fn evaluate_scaled(&self, input: &[i64]) -> Result<Vec<i64>> {
        if input.len() != self.input_arity {
            return Err(Error::Arity {
                expected: self.input_arity,
                got: input.len(),
            });
        }
        let mut cur = input.to_vec();
        for (i, layer) in self.layers.iter().enumerate() {
            cur = layer.apply(i, &cur)?;
        }
        Ok(cur)
    }

    /// Evaluates on exact rationals. Every input times its scale must be an
    /// integer.
    pub fn evaluate(&self, input: &[Rational64]) -> Result<Vec<Rational64>> {
        if input.len() != self.input_arity {
            return Err(Error::Arity {
                expected: self.input_arity,
                got: input.len(),
            });
        }
        let scaled = input
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let num = *x.numer() as i128 * self.input_scale[i] as i128;
                let den = *x.denom() as i128;
                if num % den != 0 {
                    return Err(Error::OffGrid {
                        index: i,
                        scale: self.input_scale[i],
                    });
                }
                i64::try_from(num / den).map_err(|_| Error::Overflow {
                    layer: 0,
                    neuron: i,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self
            .evaluate_scaled(&scaled)?
            .into_iter()
            .map(Rational64::from_integer)
            .collect())
    }

    /// Evaluates on integer inputs.
    pub fn evaluate_int(&self, input: &[i64]) -> Result<Vec<i64>> {
        if input.len() != self.input_arity {
            return Err(Error::Arity {
                expected: self.input_arity,
                got: input.len(),
            });
        }
        let scaled = input
            .iter()
            .zip(&self.input_scale)
            .enumerate()
            .map(|(i, (&x, &s))| {
                x.checked_mul(s).ok_or(Error::Overflow {
                    layer: 0,
                    neuron: i,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        self.evaluate_scaled(&scaled)
    }

    /// The network computing `second(first(x))`.
    pub fn compose(first: &ReluNetwork, second: &ReluNetwork) -> Result<ReluNetwork> {
        if first.output_arity() != second.input_arity {
            return Err(Error::Arity {
                expected: second.input_arity,
                got: first.output_arity(),
            });
        }
        let mut layers = first.layers.clone();
        let mut rest = second.layers.iter();
        if let Some(head) = rest.next() {
            let mut head = head.clone();
            for (t, w) in head.weights.iter_mut().enumerate() {
                let s = second.input_scale[head.cols[t] as usize];
                *w = w.checked_mul(s).ok_or(Error::Overflow {
                    layer: first.layers.len(),
                    neuron: 0,
                })?;
            }
            layers.push(head);
        }
        layers.extend(rest.cloned());
        Ok(ReluNetwork::from_layers(
            first.input_arity,
            first.input_scale.clone(),
            layers,
        ))
    }

    /// The network evaluating each part on its own slice of the inputs and
    /// returning the concatenated outputs. Shorter parts are extended with
    /// identity layers.
    pub fn concat(parts: &[ReluNetwork]) -> Result<ReluNetwork> {
        let n_layers = parts.iter().map(|p| p.layers.len()).max().unwrap_or(0);
        let pad: Vec<Layer> = parts
            .iter()
            .map(|p| Layer::identity(p.output_arity()))
            .collect();
        let layer_of = |k: usize, l: usize| -> &Layer { parts[k].layers.get(l).unwrap_or(&pad[k]) };

        let mut layers = Vec::with_capacity(n_layers);
        for l in 0..n_layers {
            let mut out = Layer::default();
            let mut offset = 0u32;
            for k in 0..parts.len() {
                let layer = layer_of(k, l);
                for (row, b, r) in layer.shifted(offset) {
                    out.push_row(&row, b, r);
                }
                offset += if l == 0 {
                    parts[k].input_arity
                } else {
                    layer_of(k, l - 1).width()
                } as u32;
            }
            layers.push(out);
        }
        let arity = parts.iter().map(|p| p.input_arity).sum();
        let scale = parts
            .iter()
            .flat_map(|p| p.input_scale.iter().copied())
            .collect();
        Ok(ReluNetwork::from_layers(arity, scale, layers))
    }

    /// Debug dump as JSON; the layout is not a stable format.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("network serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn affine_relu(w: i64, b: i64) -> ReluNetwork {
        let mut c = Circuit::new(1);
        let x = c.input(0);
        let r = c.relu(&x * w + b);
        c.finish(&[r], None, &[1]).unwrap()
    }

    #[test]
    fn single_relu() {
        let net = affine_relu(1, 0);
        assert_eq!(net.evaluate_int(&[-2]).unwrap(), vec![0]);
        assert_eq!(net.evaluate_int(&[3]).unwrap(), vec![3]);
        assert_eq!(
            net.evaluate_int(&[1, 2]),
            Err(Error::Arity {
                expected: 1,
                got: 2
            })
        );
    }

    #[test]
    fn overflow_is_reported() {
        let net = affine_relu(i64::MAX / 2, 0);
        assert!(matches!(
            net.evaluate_int(&[4]),
            Err(Error::Overflow { .. })
        ));
    }

    #[test]
    fn rational_inputs_respect_scale() {
        let mut c = Circuit::new(1);
        let x = c.input(0);
        let r = c.relu(x - 3);
        let net = c.finish(&[r], None, &[10]).unwrap();
        let half = Rational64::new(1, 2);
        assert_eq!(
            net.evaluate(&[half]).unwrap(),
            vec![Rational64::from_integer(2)]
        );
        assert_eq!(
            net.evaluate(&[Rational64::new(1, 3)]),
            Err(Error::OffGrid {
                index: 0,
                scale: 10
            })
        );
    }

    #[test]
    fn compose_and_concat() {
        let f = affine_relu(2, -1);
        let g = affine_relu(-1, 5);
        let fg = ReluNetwork::compose(&f, &g).unwrap();
        assert_eq!(fg.metrics().depth, f.metrics().depth + g.metrics().depth);
        for x in -5..5 {
            let inner = f.evaluate_int(&[x]).unwrap();
            assert_eq!(
                fg.evaluate_int(&[x]).unwrap(),
                g.evaluate_int(&inner).unwrap()
            );
        }
        let id = ReluNetwork::identity(1);
        let idf = ReluNetwork::compose(&id, &f).unwrap();
        for x in -5..5 {
            assert_eq!(
                idf.evaluate_int(&[x]).unwrap(),
                f.evaluate_int(&[x]).unwrap()
            );
        }
        let both = ReluNetwork::concat(&[fg.clone(), f.clone()]).unwrap();
        assert_eq!(both.input_arity(), 2);
        assert_eq!(both.metrics().depth, 2);
        for x in -5..5 {
            let y = both.evaluate_int(&[x, x + 1]).unwrap();
            assert_eq!(y[0], fg.evaluate_int(&[x]).unwrap()[0]);
            assert_eq!(y[1], f.evaluate_int(&[x + 1]).unwrap()[0]);
        }
    }

    #[test]
    fn dump_round_trips() {
        let net = affine_relu(3, 1);
        let back: ReluNetwork = serde_json::from_str(&net.to_json()).unwrap();
        assert_eq!(back, net);
    }
}
