//! Exact generative ReLU networks producing graphs within a bounded graph
//! edit distance of a source graph.

pub mod edit;
pub mod error;
pub mod ged;
pub mod graph;
pub mod relu;
pub mod sampler;
pub mod worked;

pub use edit::{EditInput, EditNetwork, Family, Mode, NetworkConfig};
pub use error::{Error, Result};
pub use graph::{LabeledGraph, PaddedGraph};
pub use relu::{Circuit, Lin, ReluNetwork};
