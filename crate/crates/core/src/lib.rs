//! Statistical tests for the small-world property of networks.
//!
//! A network is declared small-world when its global clustering coefficient
//! is significantly higher than a null model predicts *and* its average path
//! length is not significantly higher. Both halves are tested against one of
//! four fitted null families (Erdős–Rényi, Chung–Lu, SBM, DCSBM), either by
//! parametric bootstrap or, for the Erdős–Rényi null, with closed-form
//! asymptotic cutoffs.
//!
//! Module map:
//!
//! * [`graph`]: simple undirected graphs, edge-list I/O, BFS, components.
//! * [`netstats`]: triad census, clustering coefficient, average path length.
//! * [`models`]: null-model and Newman–Watts style generators.
//! * [`fitting`]: parameter estimation (density, Louvain, spectral clustering).
//! * [`swtest`]: bootstrap, asymptotic and weak intersection tests.
//! * [`sim`]: Monte Carlo harness for level/power/quantile studies.
//! * [`cli`]: the `swtest` command-line front end.

pub mod cli;
pub mod error;
pub mod fitting;
pub mod format;
pub mod graph;
pub mod models;
pub mod netstats;
pub mod rng;
pub mod sim;
pub mod swtest;

pub use error::{Error, Result};
pub use graph::Graph;
