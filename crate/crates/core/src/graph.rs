//! Core domain types: signed measurement graphs, ground truth, partitions,
//! anchors, and solver outputs.
//!
//! A [`SignedGraph`] stores the symmetric matrix Z of pairwise measurements as
//! an upper-triangular edge list; every solver in this crate consumes it. All
//! types here are immutable after construction and safe to share across
//! threads.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Sign convention used everywhere in the crate: `sign(0) = +1`.
#[inline]
pub fn sign_of(x: f64) -> i8 {
    if x >= 0.0 {
        1
    } else {
        -1
    }
}

/// Sparse symmetric weighted measurement graph with entries in [-1, 1].
///
/// Edges are stored once with `i < j`; symmetry is implied. Weights are
/// finite, nonzero and within [-1, 1]. The diagonal is never stored;
/// solvers decide how to treat it.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedGraph {
    n: usize,
    edges: Vec<(u32, u32, f64)>,
    adj: Vec<Vec<(u32, f64)>>,
    abs_degree: Vec<f64>,
}

impl SignedGraph {
    /// Builds a graph from an edge list, validating every invariant.
    ///
    /// Accepts edges in either orientation and normalizes to `i < j`.
    pub fn from_edges(n: usize, raw: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("node count must be positive".into()));
        }
        let mut edges: Vec<(u32, u32, f64)> = Vec::new();
        for (a, b, w) in raw {
            if a == b {
                return Err(Error::Parameter(format!("self-loop at node {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::Parameter(format!(
                    "edge ({a},{b}) out of range for n={n}"
                )));
            }
            if !w.is_finite() || w == 0.0 || !(-1.0..=1.0).contains(&w) {
                return Err(Error::Parameter(format!(
                    "edge ({a},{b}) weight {w} not in [-1,1]\\{{0}}"
                )));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            edges.push((i as u32, j as u32, w));
        }
        edges.sort_unstable_by_key(|&(i, j, _)| (i, j));
        for pair in edges.windows(2) {
            if pair[0].0 == pair[1].0 && pair[0].1 == pair[1].1 {
                return Err(Error::Parameter(format!(
                    "duplicate edge ({},{})",
                    pair[0].0, pair[0].1
                )));
            }
        }
        let mut adj = vec![Vec::new(); n];
        let mut abs_degree = vec![0.0; n];
        for &(i, j, w) in &edges {
            adj[i as usize].push((j, w));
            adj[j as usize].push((i, w));
            abs_degree[i as usize] += w.abs();
            abs_degree[j as usize] += w.abs();
        }
        Ok(Self {
            n,
            edges,
            adj,
            abs_degree,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Upper-triangular edge list, sorted by (i, j).
    pub fn edges(&self) -> &[(u32, u32, f64)] {
        &self.edges
    }

    /// Neighbors of `i` with their signed weights.
    pub fn neighbors(&self, i: usize) -> &[(u32, f64)] {
        &self.adj[i]
    }

    /// Absolute degree D_ii = Σ_j |Z_ij|.
    pub fn abs_degree(&self, i: usize) -> f64 {
        self.abs_degree[i]
    }

    /// Sum over all edges of |w|.
    pub fn total_abs_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.2.abs()).sum()
    }

    /// Connected components, each a sorted list of node ids.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut comps = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for &(v, _) in &self.adj[u] {
                    let v = v as usize;
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        stack.push(v);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// Induced subgraph on `nodes` (must be sorted, distinct, in range).
    /// Returns the subgraph with nodes renumbered 0..len in the given order.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<Self> {
        let mut local = vec![u32::MAX; self.n];
        for (li, &g) in nodes.iter().enumerate() {
            if g >= self.n {
                return Err(Error::Parameter(format!("node {g} out of range")));
            }
            local[g] = li as u32;
        }
        let mut edges = Vec::new();
        for &(i, j, w) in &self.edges {
            let (li, lj) = (local[i as usize], local[j as usize]);
            if li != u32::MAX && lj != u32::MAX {
                edges.push((li as usize, lj as usize, w));
            }
        }
        Self::from_edges(nodes.len(), edges)
    }
}

/// Hidden ±1 assignment used by generators and the error metric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    z: Vec<i8>,
}

impl GroundTruth {
    pub fn new(z: Vec<i8>) -> Result<Self> {
        if z.iter().any(|&v| v != 1 && v != -1) {
            return Err(Error::Parameter("ground truth entries must be ±1".into()));
        }
        Ok(Self { z })
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn values(&self) -> &[i8] {
        &self.z
    }

    /// Global sign flip.
    pub fn flipped(&self) -> Self {
        Self {
            z: self.z.iter().map(|&v| -v).collect(),
        }
    }
}

/// Disjoint cover of nodes into k non-empty blocks sharing one group element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    block_of: Vec<u32>,
    k: usize,
    members: Vec<Vec<u32>>,
}

impl Partition {
    /// Builds a partition from a per-node block id map. Every block id in
    /// 0..k must be used.
    pub fn new(block_of: Vec<u32>, k: usize) -> Result<Self> {
        if k == 0 || k > block_of.len() {
            return Err(Error::Parameter(format!(
                "block count {k} invalid for {} nodes",
                block_of.len()
            )));
        }
        let mut members = vec![Vec::new(); k];
        for (i, &b) in block_of.iter().enumerate() {
            if b as usize >= k {
                return Err(Error::Parameter(format!(
                    "node {i} maps to block {b}, but k={k}"
                )));
            }
            members[b as usize].push(i as u32);
        }
        if let Some(empty) = members.iter().position(|m| m.is_empty()) {
            return Err(Error::Parameter(format!("block {empty} is empty")));
        }
        Ok(Self { block_of, k, members })
    }

    /// The all-singletons partition (k = n).
    pub fn singletons(n: usize) -> Self {
        Self::new((0..n as u32).collect(), n).expect("singleton partition is always valid")
    }

    pub fn len(&self) -> usize {
        self.block_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block_of.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn block_of(&self, node: usize) -> usize {
        self.block_of[node] as usize
    }

    pub fn block_ids(&self) -> &[u32] {
        &self.block_of
    }

    pub fn members(&self, block: usize) -> &[u32] {
        &self.members[block]
    }
}

/// Nodes with a-priori known ±1 values. May be empty.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnchorSet {
    anchors: BTreeMap<u32, i8>,
}

impl AnchorSet {
    pub fn new(pairs: impl IntoIterator<Item = (usize, i8)>) -> Result<Self> {
        let mut anchors = BTreeMap::new();
        for (i, a) in pairs {
            if a != 1 && a != -1 {
                return Err(Error::Parameter(format!("anchor value {a} must be ±1")));
            }
            if anchors.insert(i as u32, a).is_some() {
                return Err(Error::Parameter(format!("duplicate anchor index {i}")));
            }
        }
        Ok(Self { anchors })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    pub fn value(&self, node: usize) -> Option<i8> {
        self.anchors.get(&(node as u32)).copied()
    }

    /// Anchors in ascending node order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i8)> + '_ {
        self.anchors.iter().map(|(&i, &a)| (i as usize, a))
    }

    /// Validates that all anchor indices are below `n`.
    pub fn check_range(&self, n: usize) -> Result<()> {
        if let Some((&i, _)) = self.anchors.iter().next_back() {
            if i as usize >= n {
                return Err(Error::Parameter(format!(
                    "anchor index {i} out of range for n={n}"
                )));
            }
        }
        Ok(())
    }

    /// Negates every anchor value.
    pub fn negated(&self) -> Self {
        Self {
            anchors: self.anchors.iter().map(|(&i, &a)| (i, -a)).collect(),
        }
    }
}

/// Identifier tag for every solver in the crate. `Display` matches the CLI
/// method names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Eig,
    EigRaw,
    Laplacian,
    Sdp,
    SdpY,
    SdpXy,
    QcqpIdentity,
    QcqpDegree,
    Mps,
    EigK,
    MveigK,
    PartK,
    SdpK,
    MpsK,
}

impl Method {
    pub const ALL: [Method; 14] = [
        Method::Eig,
        Method::EigRaw,
        Method::Laplacian,
        Method::Sdp,
        Method::SdpY,
        Method::SdpXy,
        Method::QcqpIdentity,
        Method::QcqpDegree,
        Method::Mps,
        Method::EigK,
        Method::MveigK,
        Method::PartK,
        Method::SdpK,
        Method::MpsK,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Eig => "eig",
            Method::EigRaw => "eig-raw",
            Method::Laplacian => "laplacian",
            Method::Sdp => "sdp",
            Method::SdpY => "sdp-y",
            Method::SdpXy => "sdp-xy",
            Method::QcqpIdentity => "qcqp-i",
            Method::QcqpDegree => "qcqp-d",
            Method::Mps => "mps",
            Method::EigK => "eig-k",
            Method::MveigK => "mveig-k",
            Method::PartK => "part-k",
            Method::SdpK => "sdp-k",
            Method::MpsK => "mps-k",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        Method::ALL.iter().copied().find(|m| m.as_str() == s)
    }

    /// Methods that require an anchor file.
    pub fn needs_anchors(&self) -> bool {
        matches!(
            self,
            Method::SdpY | Method::SdpXy | Method::QcqpIdentity | Method::QcqpDegree
        )
    }

    /// Methods that require a partition file.
    pub fn needs_partition(&self) -> bool {
        matches!(
            self,
            Method::EigK | Method::MveigK | Method::PartK | Method::SdpK | Method::MpsK
        )
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// ±1 estimates plus the raw pre-rounding scores and solver diagnostics.
///
/// Invariant: `estimates[i] = sign_of(scores[i])`, with sign(0) = +1.
#[derive(Debug, Clone)]
pub struct SyncSolution {
    pub method: Method,
    pub estimates: Vec<i8>,
    pub scores: Vec<f64>,
    pub diagnostics: BTreeMap<String, f64>,
}

impl SyncSolution {
    /// Builds a solution from raw scores; estimates are the score signs.
    pub fn from_scores(method: Method, scores: Vec<f64>) -> Self {
        let estimates = scores.iter().map(|&s| sign_of(s)).collect();
        Self {
            method,
            estimates,
            scores,
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn with_diagnostic(mut self, key: &str, value: f64) -> Self {
        self.diagnostics.insert(key.into(), value);
        self
    }

    pub fn set_diagnostic(&mut self, key: &str, value: f64) {
        self.diagnostics.insert(key.into(), value);
    }

    pub fn len(&self) -> usize {
        self.estimates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.estimates.is_empty()
    }

    /// Global sign flip of both estimates and scores; diagnostics unchanged.
    pub fn flipped(&self) -> Self {
        Self {
            method: self.method,
            estimates: self.estimates.iter().map(|&e| -e).collect(),
            scores: self.scores.iter().map(|&s| -s).collect(),
            diagnostics: self.diagnostics.clone(),
        }
    }
}

fn check_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, got: b });
    }
    Ok(())
}

/// Fraction of misclassified nodes, minimized over the global sign flip.
///
/// Returns min(h, n−h)/n where h is the Hamming distance between estimates
/// and truth, so the result lies in [0, 0.5].
pub fn error_rate(sol: &SyncSolution, truth: &GroundTruth) -> Result<f64> {
    check_len(sol.len(), truth.len())?;
    let h = sol
        .estimates
        .iter()
        .zip(truth.values())
        .filter(|(e, t)| e != t)
        .count();
    let n = truth.len();
    Ok(h.min(n - h) as f64 / n as f64)
}

/// Error rate over the nodes where `mask` is true; masked-out nodes are
/// excluded from both the Hamming count and the global-sign minimization.
pub fn error_rate_masked(sol: &SyncSolution, truth: &GroundTruth, mask: &[bool]) -> Result<f64> {
    check_len(sol.len(), truth.len())?;
    check_len(sol.len(), mask.len())?;
    let mut h = 0usize;
    let mut total = 0usize;
    for ((e, t), &m) in sol.estimates.iter().zip(truth.values()).zip(mask) {
        if m {
            total += 1;
            if e != t {
                h += 1;
            }
        }
    }
    if total == 0 {
        return Err(Error::Parameter("mask excludes every node".into()));
    }
    Ok(h.min(total - h) as f64 / total as f64)
}

/// Returns `sol` or its global flip, whichever is closer to `truth` in
/// Hamming distance; ties keep `sol` unchanged.
pub fn align_global_sign(sol: &SyncSolution, truth: &GroundTruth) -> Result<SyncSolution> {
    check_len(sol.len(), truth.len())?;
    let h = sol
        .estimates
        .iter()
        .zip(truth.values())
        .filter(|(e, t)| e != t)
        .count();
    if 2 * h > truth.len() {
        Ok(sol.flipped())
    } else {
        Ok(sol.clone())
    }
}

/// Quadratic-form objective x^T Z x = Σ_{(i,j)∈E} 2·w_ij·x_i·x_j.
///
/// Both triangle halves are counted and the diagonal is excluded; for a
/// noiseless ±1 graph evaluated at the ground truth this equals 2m.
pub fn objective_value(g: &SignedGraph, x: &[i8]) -> Result<f64> {
    check_len(g.n(), x.len())?;
    if x.iter().any(|&v| v != 1 && v != -1) {
        return Err(Error::Parameter("assignment entries must be ±1".into()));
    }
    let mut total = 0.0;
    for &(i, j, w) in g.edges() {
        total += 2.0 * w * f64::from(x[i as usize]) * f64::from(x[j as usize]);
    }
    Ok(total)
}
