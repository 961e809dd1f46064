//! Graph-error models for adjacency matrices and the graph signal processing
//! tools used to study their effect: GMA signals and graph autocorrelation,
//! polynomial and GARMA graph filters, and GraDe blind source separation.
//!
//! Adjacency convention: `adj[(i, j)]` is the weight of the edge from node
//! `j` to node `i`, so `W x` moves signal values along edges.

// `!(x > 0.0)` style checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod error_models;
pub mod filters;
pub mod experiments;
pub mod graph;
pub mod ica;
pub mod models;
pub mod output;
pub mod rng;
pub(crate) mod sampling;
pub mod signals;

pub use error::{Error, Result};
pub use graph::{Edge, Graph, GraphMeta};
