//! Partition-constrained synchronization (k-SYNC): the five algorithms plus
//! the quotient partition-graph construction.
//!
//! EIG ignores the constraints, MVEIG majority-votes each block afterwards,
//! PART synchronizes the k-node quotient graph, and the SDP and MPS
//! variants live in [`crate::sdp::sdp_ksync`] and [`crate::mps::mps_sync`]
//! (with a partition in the options); [`run_ksync_suite`] orchestrates all
//! five into one results table.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::graph::{
    error_rate, GroundTruth, Method, Partition, SignedGraph, SyncSolution,
};
use crate::mps::{mps_sync, MpsOptions};
use crate::sdp::{sdp_ksync, SdpOptions};
use crate::spectral::eig_sync;

/// How inter-block measurements aggregate into one quotient weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionWeighting {
    /// ±(majority count)/(total count), the confidence-weighted quotient.
    Weighted,
    /// ±1 by majority, magnitude discarded.
    SignOnly,
}

/// What counts toward the majority: edge counts, or absolute weight mass
/// (relevant only for weighted input graphs).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TallyRule {
    CountEdges,
    WeightMass,
}

/// The k-node quotient of a partitioned measurement graph.
#[derive(Debug, Clone)]
pub struct PartitionGraph {
    pub k: usize,
    /// Quotient measurement graph; ties and non-adjacent pairs carry no edge.
    pub graph: SignedGraph,
    /// (E⁺, E⁻) tallies per stored quotient edge, aligned with
    /// `graph.edges()`.
    pub counts: Vec<(f64, f64)>,
}

/// Tallies signed inter-block edges into the quotient weight
/// ±(majority)/(total); intra-block edges carry no inter-block information
/// and are excluded.
pub fn build_partition_graph(g: &SignedGraph, partition: &Partition) -> Result<PartitionGraph> {
    build_partition_graph_with(g, partition, PartitionWeighting::Weighted, TallyRule::CountEdges)
}

pub fn build_partition_graph_with(
    g: &SignedGraph,
    partition: &Partition,
    weighting: PartitionWeighting,
    tally: TallyRule,
) -> Result<PartitionGraph> {
    if partition.len() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), got: partition.len() });
    }
    let k = partition.k();
    let mut tallies: std::collections::BTreeMap<(u32, u32), (f64, f64)> =
        std::collections::BTreeMap::new();
    for &(i, j, w) in g.edges() {
        let u = partition.block_of(i as usize) as u32;
        let v = partition.block_of(j as usize) as u32;
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        let entry = tallies.entry(key).or_insert((0.0, 0.0));
        let mass = match tally {
            TallyRule::CountEdges => 1.0,
            TallyRule::WeightMass => w.abs(),
        };
        if w > 0.0 {
            entry.0 += mass;
        } else {
            entry.1 += mass;
        }
    }
    let mut edges = Vec::new();
    let mut counts = Vec::new();
    for (&(u, v), &(plus, minus)) in &tallies {
        let total = plus + minus;
        if plus == minus {
            continue; // tied pair carries no information
        }
        let weight = match weighting {
            PartitionWeighting::Weighted => {
                if plus > minus {
                    plus / total
                } else {
                    -minus / total
                }
            }
            PartitionWeighting::SignOnly => {
                if plus > minus {
                    1.0
                } else {
                    -1.0
                }
            }
        };
        edges.push((u as usize, v as usize, weight));
        counts.push((plus, minus));
    }
    Ok(PartitionGraph { k, graph: SignedGraph::from_edges(k, edges)?, counts })
}

/// EIG-k-SYNC: plain normalized eigenvector synchronization, constraints
/// ignored; the partition is only recorded in the diagnostics.
pub fn eig_ksync(g: &SignedGraph, partition: &Partition) -> Result<SyncSolution> {
    if partition.len() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), got: partition.len() });
    }
    let mut sol = eig_sync(g, true)?;
    sol.method = Method::EigK;
    sol.set_diagnostic("k", partition.k() as f64);
    Ok(sol)
}

/// MVEIG-k-SYNC: EIG followed by a per-block majority vote; a tie votes +1.
/// Scores become the blockwise ±1 votes so the sign invariant holds.
pub fn mveig_ksync(g: &SignedGraph, partition: &Partition) -> Result<SyncSolution> {
    let base = eig_ksync(g, partition)?;
    let mut scores = vec![0.0; g.n()];
    for b in 0..partition.k() {
        let members = partition.members(b);
        let plus = members
            .iter()
            .filter(|&&m| base.estimates[m as usize] == 1)
            .count();
        let vote = if 2 * plus >= members.len() { 1.0 } else { -1.0 };
        for &m in members {
            scores[m as usize] = vote;
        }
    }
    let mut sol = SyncSolution::from_scores(Method::MveigK, scores);
    sol.diagnostics = base.diagnostics.clone();
    sol.set_diagnostic("k", partition.k() as f64);
    Ok(sol)
}

/// PART-k-SYNC: synchronizes the weighted quotient graph and hands each
/// block's sign to all of its members.
pub fn part_ksync(g: &SignedGraph, partition: &Partition) -> Result<SyncSolution> {
    let quotient = build_partition_graph(g, partition)?;
    let block_sol = eig_sync(&quotient.graph, true)?;
    let scores: Vec<f64> = (0..g.n())
        .map(|i| block_sol.scores[partition.block_of(i)])
        .collect();
    let mut sol = SyncSolution::from_scores(Method::PartK, scores);
    sol.diagnostics = block_sol.diagnostics.clone();
    sol.set_diagnostic("k", partition.k() as f64);
    sol.set_diagnostic(
        "quotient_edges",
        quotient.graph.num_edges() as f64,
    );
    Ok(sol)
}

/// One row of the k-SYNC comparison table.
#[derive(Debug, Clone)]
pub struct KsyncRow {
    pub method: Method,
    pub eta: f64,
    pub seed: u64,
    pub tau: f64,
    pub iterations: f64,
    pub wall_ms: f64,
}

/// Runs the requested k-SYNC methods against a known truth and tabulates
/// τ, iteration counts and wall time. The seed feeds the stochastic parts
/// (SDP restarts); spectral and MPS runs are deterministic per instance.
pub fn run_ksync_suite(
    g: &SignedGraph,
    partition: &Partition,
    truth: &GroundTruth,
    methods: &[Method],
    seeds: &[u64],
    eta: f64,
) -> Result<Vec<KsyncRow>> {
    let mut rows = Vec::with_capacity(methods.len() * seeds.len());
    for &seed in seeds {
        for &method in methods {
            let start = Instant::now();
            let sol = match method {
                Method::EigK => eig_ksync(g, partition)?,
                Method::MveigK => mveig_ksync(g, partition)?,
                Method::PartK => part_ksync(g, partition)?,
                Method::SdpK => {
                    let opts = SdpOptions { seed, ..Default::default() };
                    sdp_ksync(g, partition, &opts)?.rounded
                }
                Method::MpsK => {
                    let opts = MpsOptions {
                        partition: Some(partition.clone()),
                        ..Default::default()
                    };
                    mps_sync(g, &crate::graph::AnchorSet::empty(), &opts)?
                }
                other => {
                    return Err(Error::Parameter(format!(
                        "{other} is not a k-SYNC method"
                    )))
                }
            };
            let wall_ms = start.elapsed().as_secs_f64() * 1e3;
            rows.push(KsyncRow {
                method,
                eta,
                seed,
                tau: error_rate(&sol, truth)?,
                iterations: sol.diagnostics.get("iterations").copied().unwrap_or(0.0),
                wall_ms,
            });
        }
    }
    Ok(rows)
}

/// The five k-SYNC methods in the canonical comparison order.
pub const KSYNC_METHODS: [Method; 5] = [
    Method::EigK,
    Method::MveigK,
    Method::PartK,
    Method::SdpK,
    Method::MpsK,
];
