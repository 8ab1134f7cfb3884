//! Top-k sequential pattern mining in database graphs.
//!
//! A database graph is a directed graph whose vertices each carry a
//! transaction database. Every length-l simple path induces one transaction
//! sequence per combination of transaction choices along it, and the induced
//! sequences of all length-l paths form a (huge) sequence database D_l. This
//! crate finds the k most frequent positional patterns of D_l two ways:
//!
//! * [`baseline`] enumerates paths and induces D_l exactly;
//! * [`sampler`] + [`miner`] draw uniform paths, then uniform transaction
//!   sequences, and rank patterns by an M^i-weighted support whose normalized
//!   form is an unbiased estimator of the exact frequency.
//!
//! [`eval`] provides ranking-quality metrics and sample-size bounds, and
//! [`gen`] produces synthetic database graphs for experiments.

pub mod baseline;
pub mod error;
pub mod eval;
pub mod gen;
pub mod graph;
pub mod miner;
pub mod sampler;

pub use error::{Error, Result};
pub use graph::{load_graph, write_graph, DatabaseGraph, Path, WeightMode};
pub use miner::{Pattern, RankedPatterns};
pub use sampler::{sample_batch, SampleBatch};
