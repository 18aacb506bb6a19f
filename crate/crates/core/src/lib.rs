//! z2sync: synchronization over the two-element group on signed networks.
//!
//! Recovers hidden ±1 node labels from noisy pairwise sign measurements.
//! The crate bundles the full solver family: spectral (raw, normalized,
//! Laplacian), semidefinite relaxations with a built-in low-rank first-order
//! solver, anchored QCQP solvers, and belief-style message passing, together
//! with seeded instance generators, partition-constrained (k-SYNC) variants,
//! multiplex signed-network assembly, and random-matrix noise-threshold
//! analysis.
//!
//! Entry points:
//! - [`graph::SignedGraph`] is the universal solver input.
//! - [`spectral::eig_sync`], [`sdp::sdp_sync`], [`anchored`], [`mps::mps_sync`]
//!   and [`ksync`] are the solvers.
//! - [`generators`] builds the random instances used in experiments.
//! - [`io`] defines the on-disk CSV/JSON formats shared with the CLI.

pub mod anchored;
pub mod error;
pub mod generators;
pub mod graph;
pub mod io;
pub mod ksync;
pub mod linalg;
pub mod mps;
pub mod multiplex;
pub mod rmt;
pub mod sdp;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{
    align_global_sign, error_rate, error_rate_masked, objective_value, sign_of, AnchorSet,
    GroundTruth, Method, Partition, SignedGraph, SyncSolution,
};
