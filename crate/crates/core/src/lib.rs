//! Random hypergraph 2-coloring at positive temperature.
//!
//! The crate bundles exact brute-force oracles for small instances, closed
//! forms for the first and second moments of the partition function, the
//! analytic phase-diagram functions, the planted model and the
//! core/backbone/rest/free decomposition used to estimate cluster sizes.

pub mod calibration;
pub mod decomposition;
pub mod enumeration;
pub mod error;
pub mod experiments;
pub mod hypergraph;
pub mod logspace;
pub mod moments;
pub mod phase;
pub mod planted;
pub mod rng;

pub use error::{Error, Result};
pub use hypergraph::{Coloring, Hypergraph, ModelKind, ModelParams};
