//! Assembly and transformation of multiplex signed voting networks built
//! from per-layer similarity matrices.
//!
//! Each layer is a dense symmetric matrix of agreement fractions in [0, 1];
//! an identity map ties local indices to global entities across layers. The
//! supra-adjacency form is W = H + εΩ with block-diagonal H and categorical
//! coupling Ω (every pair of occurrences of an entity, not just adjacent
//! layers). The sign transform maps intra-layer entries through
//! sign(2W−1), or linearly through 2W−1, turning the assembly into a
//! synchronization instance whose entity fibers double as a k-SYNC
//! partition.

use crate::error::{Error, Result};
use crate::graph::{sign_of, GroundTruth, Partition, SignedGraph, SyncSolution};

/// How occurrences of one entity couple across layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Coupling {
    /// Every pair of occurrences: q occurrences give C(q,2) links.
    #[default]
    Categorical,
    /// Only occurrences in adjacent layers: q occurrences give q−1 links.
    Ordinal,
}

/// Intra-layer entry transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    /// sign(2W−1) with exact-0.5 entries dropped as carrying no information.
    HardSign,
    /// 2W−1, keeping fractional magnitudes as confidence weights.
    Linear,
}

/// A multiplex voting network: per-layer similarity matrices plus the
/// entity identity map, coupling strength, and optional ±1 labels.
#[derive(Debug, Clone)]
pub struct MultiplexVoting {
    layers: Vec<Vec<f64>>,
    layer_sizes: Vec<usize>,
    /// Entity id per (layer, local index).
    identity: Vec<Vec<u32>>,
    epsilon: f64,
    coupling: Coupling,
    /// +1 / −1 per (layer, local index); 0 = unlabeled.
    labels: Option<Vec<Vec<i8>>>,
}

impl MultiplexVoting {
    pub fn new(
        layers: Vec<Vec<f64>>,
        identity: Vec<Vec<u32>>,
        epsilon: f64,
        labels: Option<Vec<Vec<i8>>>,
    ) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Parameter("need at least one layer".into()));
        }
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::Parameter(format!("epsilon {epsilon} not in [0,1]")));
        }
        if identity.len() != layers.len() {
            return Err(Error::DimensionMismatch {
                expected: layers.len(),
                got: identity.len(),
            });
        }
        let mut layer_sizes = Vec::with_capacity(layers.len());
        for (t, layer) in layers.iter().enumerate() {
            let s = (layer.len() as f64).sqrt() as usize;
            if s * s != layer.len() {
                return Err(Error::Parameter(format!("layer {t} is not square")));
            }
            if identity[t].len() != s {
                return Err(Error::DimensionMismatch { expected: s, got: identity[t].len() });
            }
            for i in 0..s {
                for j in 0..s {
                    let v = layer[i * s + j];
                    if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                        return Err(Error::Parameter(format!(
                            "layer {t} entry ({i},{j}) = {v} not in [0,1]"
                        )));
                    }
                    if (v - layer[j * s + i]).abs() > 1e-12 {
                        return Err(Error::Parameter(format!("layer {t} is not symmetric")));
                    }
                }
            }
            let mut seen = std::collections::HashSet::new();
            for &e in &identity[t] {
                if !seen.insert(e) {
                    return Err(Error::Parameter(format!(
                        "entity {e} appears twice in layer {t}"
                    )));
                }
            }
            layer_sizes.push(s);
        }
        if let Some(l) = &labels {
            if l.len() != layers.len() {
                return Err(Error::DimensionMismatch { expected: layers.len(), got: l.len() });
            }
            for (t, row) in l.iter().enumerate() {
                if row.len() != layer_sizes[t] {
                    return Err(Error::DimensionMismatch {
                        expected: layer_sizes[t],
                        got: row.len(),
                    });
                }
                if row.iter().any(|&v| v != 1 && v != -1 && v != 0) {
                    return Err(Error::Parameter("labels must be ±1 or 0".into()));
                }
            }
        }
        Ok(Self { layers, layer_sizes, identity, epsilon, coupling: Coupling::Categorical, labels })
    }

    /// Switches to ordinal (adjacent-layer-only) coupling.
    pub fn with_coupling(mut self, coupling: Coupling) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    /// Total node count Σ layer sizes.
    pub fn n(&self) -> usize {
        self.layer_sizes.iter().sum()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn has_labels(&self) -> bool {
        self.labels.is_some()
    }

    pub fn global_index(&self, layer: usize, local: usize) -> usize {
        self.layer_sizes[..layer].iter().sum::<usize>() + local
    }

    /// (layer, local) of a global node index.
    pub fn locate(&self, mut global: usize) -> (usize, usize) {
        for (t, &s) in self.layer_sizes.iter().enumerate() {
            if global < s {
                return (t, global);
            }
            global -= s;
        }
        panic!("global index out of range");
    }

    pub fn entry(&self, layer: usize, i: usize, j: usize) -> f64 {
        self.layers[layer][i * self.layer_sizes[layer] + j]
    }

    pub fn label(&self, layer: usize, local: usize) -> i8 {
        self.labels.as_ref().map(|l| l[layer][local]).unwrap_or(0)
    }

    /// Occurrences (layer, local) per entity, entities renumbered by first
    /// appearance.
    fn entity_fibers(&self) -> (Vec<Vec<(usize, usize)>>, Vec<u32>) {
        let mut renumber: std::collections::HashMap<u32, u32> = std::collections::HashMap::new();
        let mut fibers: Vec<Vec<(usize, usize)>> = Vec::new();
        let mut block_of = vec![0u32; self.n()];
        for t in 0..self.num_layers() {
            for i in 0..self.layer_sizes[t] {
                let raw = self.identity[t][i];
                let next_id = renumber.len() as u32;
                let id = *renumber.entry(raw).or_insert(next_id);
                if id as usize == fibers.len() {
                    fibers.push(Vec::new());
                }
                fibers[id as usize].push((t, i));
                block_of[self.global_index(t, i)] = id;
            }
        }
        (fibers, block_of)
    }

    /// Entity partition: one block per unique entity.
    pub fn entity_partition(&self) -> Partition {
        let (fibers, block_of) = self.entity_fibers();
        Partition::new(block_of, fibers.len()).expect("fibers cover all nodes")
    }

    /// Ground truth from the labels, if every node is labeled.
    pub fn labels_as_truth(&self) -> Option<GroundTruth> {
        let labels = self.labels.as_ref()?;
        let mut z = Vec::with_capacity(self.n());
        for row in labels {
            for &v in row {
                if v == 0 {
                    return None;
                }
                z.push(v);
            }
        }
        GroundTruth::new(z).ok()
    }

    /// Mask of labeled nodes in global order.
    pub fn labeled_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.n()];
        if let Some(labels) = &self.labels {
            for (t, row) in labels.iter().enumerate() {
                for (i, &v) in row.iter().enumerate() {
                    mask[self.global_index(t, i)] = v != 0;
                }
            }
        }
        mask
    }

    /// Coupled occurrence pairs of each entity under the configured rule.
    fn coupling_pairs(&self) -> Vec<(usize, usize)> {
        let (fibers, _) = self.entity_fibers();
        let mut out = Vec::new();
        for occ in &fibers {
            match self.coupling {
                Coupling::Categorical => {
                    for a in 0..occ.len() {
                        for b in (a + 1)..occ.len() {
                            let (ta, ia) = occ[a];
                            let (tb, ib) = occ[b];
                            out.push((self.global_index(ta, ia), self.global_index(tb, ib)));
                        }
                    }
                }
                Coupling::Ordinal => {
                    let mut sorted = occ.clone();
                    sorted.sort_unstable();
                    for pair in sorted.windows(2) {
                        let (ta, ia) = pair[0];
                        let (tb, ib) = pair[1];
                        out.push((self.global_index(ta, ia), self.global_index(tb, ib)));
                    }
                }
            }
        }
        out
    }

    /// Supra-adjacency W = H + εΩ: block-diagonal similarity layers plus ε
    /// on every pair of occurrences of the same entity (categorical
    /// coupling by default). Zero similarities are dropped from the sparse
    /// form.
    pub fn assemble_supra(&self) -> Result<SignedGraph> {
        let mut edges = Vec::new();
        for t in 0..self.num_layers() {
            let s = self.layer_sizes[t];
            for i in 0..s {
                for j in (i + 1)..s {
                    let w = self.entry(t, i, j);
                    if w != 0.0 {
                        edges.push((self.global_index(t, i), self.global_index(t, j), w));
                    }
                }
            }
        }
        if self.epsilon > 0.0 {
            for (a, b) in self.coupling_pairs() {
                edges.push((a, b, self.epsilon));
            }
        }
        SignedGraph::from_edges(self.n(), edges)
    }

    /// Signed measurement assembly Z = H̄ + εΩ with the chosen intra-layer
    /// transform. Returns the graph, the entity partition, and the number
    /// of dropped no-information entries (exact 0.5 under the hard sign,
    /// exact 0 under the linear map).
    pub fn sign_transform(&self, transform: Transform) -> Result<(SignedGraph, Partition, usize)> {
        let mut edges = Vec::new();
        let mut dropped = 0usize;
        for t in 0..self.num_layers() {
            let s = self.layer_sizes[t];
            for i in 0..s {
                for j in (i + 1)..s {
                    let v = 2.0 * self.entry(t, i, j) - 1.0;
                    let w = match transform {
                        Transform::HardSign => {
                            if v == 0.0 {
                                dropped += 1;
                                continue;
                            }
                            f64::from(sign_of(v))
                        }
                        Transform::Linear => {
                            if v == 0.0 {
                                dropped += 1;
                                continue;
                            }
                            v
                        }
                    };
                    edges.push((self.global_index(t, i), self.global_index(t, j), w));
                }
            }
        }
        if self.epsilon > 0.0 {
            for (a, b) in self.coupling_pairs() {
                edges.push((a, b, self.epsilon));
            }
        }
        let g = SignedGraph::from_edges(self.n(), edges)?;
        Ok((g, self.entity_partition(), dropped))
    }
}

/// Zeroes out entries with |w| < θ. Meant for the linear-transform
/// assembly, whose fractional weights the threshold filters. Returns the
/// filtered graph plus a warning flag set when thresholding disconnected
/// the graph (more components than before).
pub fn threshold_entries(g: &SignedGraph, theta: f64) -> Result<(SignedGraph, bool)> {
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::Parameter(format!("theta {theta} not in [0,1)")));
    }
    let before = g.components().len();
    let edges: Vec<(usize, usize, f64)> = g
        .edges()
        .iter()
        .filter(|&&(_, _, w)| w.abs() >= theta)
        .map(|&(i, j, w)| (i as usize, j as usize, w))
        .collect();
    let filtered = SignedGraph::from_edges(g.n(), edges)?;
    let disconnected = filtered.components().len() > before;
    Ok((filtered, disconnected))
}

/// Per-layer misclassification counts for the two label classes, computed
/// after aligning the solution's global sign to the labels. Unlabeled
/// nodes are excluded everywhere.
#[derive(Debug, Clone)]
pub struct MisclassReport {
    /// Nodes labeled +1 but estimated −1, per layer.
    pub missed_plus: Vec<usize>,
    /// Nodes labeled −1 but estimated +1, per layer.
    pub missed_minus: Vec<usize>,
    pub total_plus: usize,
    pub total_minus: usize,
    pub ignored: usize,
    /// Fraction of +1-labeled nodes classified correctly.
    pub accuracy_plus: f64,
    pub accuracy_minus: f64,
}

pub fn misclassification_report(
    sol: &SyncSolution,
    m: &MultiplexVoting,
) -> Result<MisclassReport> {
    if !m.has_labels() {
        return Err(Error::Parameter("misclassification report needs labels".into()));
    }
    if sol.len() != m.n() {
        return Err(Error::DimensionMismatch { expected: m.n(), got: sol.len() });
    }
    // Align the global sign on labeled nodes only.
    let mut agree = 0usize;
    let mut labeled = 0usize;
    for t in 0..m.num_layers() {
        for i in 0..m.layer_sizes()[t] {
            let lab = m.label(t, i);
            if lab == 0 {
                continue;
            }
            labeled += 1;
            if sol.estimates[m.global_index(t, i)] == lab {
                agree += 1;
            }
        }
    }
    if labeled == 0 {
        return Err(Error::Parameter("every node is unlabeled".into()));
    }
    let flip = 2 * agree < labeled;

    let layers = m.num_layers();
    let mut report = MisclassReport {
        missed_plus: vec![0; layers],
        missed_minus: vec![0; layers],
        total_plus: 0,
        total_minus: 0,
        ignored: m.n() - labeled,
        accuracy_plus: 1.0,
        accuracy_minus: 1.0,
    };
    for t in 0..layers {
        for i in 0..m.layer_sizes()[t] {
            let lab = m.label(t, i);
            if lab == 0 {
                continue;
            }
            let mut est = sol.estimates[m.global_index(t, i)];
            if flip {
                est = -est;
            }
            if lab == 1 {
                report.total_plus += 1;
                if est != 1 {
                    report.missed_plus[t] += 1;
                }
            } else {
                report.total_minus += 1;
                if est != -1 {
                    report.missed_minus[t] += 1;
                }
            }
        }
    }
    let missed_p: usize = report.missed_plus.iter().sum();
    let missed_m: usize = report.missed_minus.iter().sum();
    if report.total_plus > 0 {
        report.accuracy_plus = 1.0 - missed_p as f64 / report.total_plus as f64;
    }
    if report.total_minus > 0 {
        report.accuracy_minus = 1.0 - missed_m as f64 / report.total_minus as f64;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::error_rate;
    use crate::spectral::eig_sync;

    /// Dense layer from an upper-triangular entry function.
    fn layer_from(s: usize, f: impl Fn(usize, usize) -> f64) -> Vec<f64> {
        let mut m = vec![0.0; s * s];
        for i in 0..s {
            for j in 0..s {
                let v = if i == j { 1.0 } else { f(i.min(j), i.max(j)) };
                m[i * s + j] = v;
            }
        }
        m
    }

    /// Two layers of 3 nodes; entity 0 appears in both layers.
    fn toy() -> MultiplexVoting {
        let l0 = layer_from(3, |i, j| if (i, j) == (0, 1) { 0.9 } else { 0.2 });
        let l1 = layer_from(3, |i, j| if (i, j) == (1, 2) { 0.8 } else { 0.3 });
        MultiplexVoting::new(
            vec![l0, l1],
            vec![vec![0, 1, 2], vec![0, 3, 4]],
            1.0,
            None,
        )
        .unwrap()
    }

    #[test]
    fn single_layer_supra_is_the_layer() {
        let l0 = layer_from(2, |_, _| 0.7);
        let m = MultiplexVoting::new(vec![l0], vec![vec![0, 1]], 1.0, None).unwrap();
        let w = m.assemble_supra().unwrap();
        assert_eq!(w.num_edges(), 1);
        assert_eq!(w.edges()[0], (0, 1, 0.7));
    }

    #[test]
    fn categorical_coupling_counts() {
        // one entity in q=4 layers: C(4,2) = 6 coupling pairs
        let layers: Vec<Vec<f64>> = (0..4).map(|_| layer_from(2, |_, _| 0.6)).collect();
        let identity = vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![0, 4]];
        let m = MultiplexVoting::new(layers, identity, 1.0, None).unwrap();
        let w = m.assemble_supra().unwrap();
        let cross = w
            .edges()
            .iter()
            .filter(|&&(i, j, _)| m.locate(i as usize).0 != m.locate(j as usize).0)
            .count();
        assert_eq!(cross, 6);
    }

    #[test]
    fn epsilon_zero_is_block_diagonal() {
        let layers: Vec<Vec<f64>> = (0..3).map(|_| layer_from(2, |_, _| 0.6)).collect();
        let identity = vec![vec![0, 1], vec![0, 2], vec![0, 3]];
        let m = MultiplexVoting::new(layers, identity, 0.0, None).unwrap();
        let w = m.assemble_supra().unwrap();
        assert!(w
            .edges()
            .iter()
            .all(|&(i, j, _)| m.locate(i as usize).0 == m.locate(j as usize).0));
    }

    #[test]
    fn sign_transform_values() {
        let m = toy();
        let (z, partition, dropped) = m.sign_transform(Transform::HardSign).unwrap();
        assert_eq!(dropped, 0);
        // 0.9 → +1, 0.2 → −1
        let w01 = z
            .edges()
            .iter()
            .find(|&&(i, j, _)| (i, j) == (0, 1))
            .unwrap()
            .2;
        assert_eq!(w01, 1.0);
        let w02 = z
            .edges()
            .iter()
            .find(|&&(i, j, _)| (i, j) == (0, 2))
            .unwrap()
            .2;
        assert_eq!(w02, -1.0);
        // shared entity: exactly one coupling pair (0 ↔ 3)
        let coupling: Vec<_> = z
            .edges()
            .iter()
            .filter(|&&(i, j, _)| m.locate(i as usize).0 != m.locate(j as usize).0)
            .collect();
        assert_eq!(coupling.len(), 1);
        assert_eq!(*coupling[0], (0, 3, 1.0));
        // partition: 5 unique entities over 6 nodes
        assert_eq!(partition.k(), 5);
        assert_eq!(partition.block_of(0), partition.block_of(3));
    }

    #[test]
    fn half_entries_dropped() {
        let l0 = layer_from(3, |i, j| if (i, j) == (0, 1) { 0.5 } else { 0.9 });
        let m = MultiplexVoting::new(vec![l0], vec![vec![0, 1, 2]], 1.0, None).unwrap();
        let (z, _, dropped) = m.sign_transform(Transform::HardSign).unwrap();
        assert_eq!(dropped, 1);
        assert_eq!(z.num_edges(), 2);
    }

    #[test]
    fn linear_transform_keeps_magnitudes() {
        let m = toy();
        let (z, _, _) = m.sign_transform(Transform::Linear).unwrap();
        let w01 = z
            .edges()
            .iter()
            .find(|&&(i, j, _)| (i, j) == (0, 1))
            .unwrap()
            .2;
        assert!((w01 - 0.8).abs() < 1e-12); // 2·0.9 − 1
    }

    #[test]
    fn threshold_drops_weak_entries_and_warns() {
        let m = toy();
        let (z, _, _) = m.sign_transform(Transform::Linear).unwrap();
        let (kept, _) = threshold_entries(&z, 0.0).unwrap();
        assert_eq!(kept.num_edges(), z.num_edges());
        // |2·0.8−1| = 0.6 survives θ=0.45; |2·0.2−1|=0.6 survives as well;
        // push θ high enough to cut everything but couplings
        let (kept, warn) = threshold_entries(&z, 0.7).unwrap();
        assert!(kept.num_edges() < z.num_edges());
        assert!(warn, "dropping all intra-layer edges disconnects");
    }

    #[test]
    fn misclassification_zero_for_perfect_and_flipped() {
        let l0 = layer_from(4, |i, j| {
            // nodes {0,1} agree, {2,3} agree, across disagree
            if (i < 2) == (j < 2) {
                0.9
            } else {
                0.1
            }
        });
        let labels = vec![vec![1, 1, -1, -1]];
        let m = MultiplexVoting::new(
            vec![l0],
            vec![vec![0, 1, 2, 3]],
            1.0,
            Some(labels),
        )
        .unwrap();
        let (z, _, _) = m.sign_transform(Transform::HardSign).unwrap();
        let sol = eig_sync(&z, true).unwrap();
        let truth = m.labels_as_truth().unwrap();
        assert_eq!(error_rate(&sol, &truth).unwrap(), 0.0);

        let report = misclassification_report(&sol, &m).unwrap();
        assert_eq!(report.missed_plus, vec![0]);
        assert_eq!(report.missed_minus, vec![0]);
        let flipped = sol.flipped();
        let report = misclassification_report(&flipped, &m).unwrap();
        assert_eq!(report.missed_plus, vec![0]);
        assert_eq!(report.missed_minus, vec![0]);
        assert_eq!(report.accuracy_plus, 1.0);
    }

    #[test]
    fn unlabeled_nodes_are_ignored() {
        let l0 = layer_from(3, |_, _| 0.9);
        let labels = vec![vec![1, 1, 0]];
        let m = MultiplexVoting::new(vec![l0], vec![vec![0, 1, 2]], 1.0, Some(labels)).unwrap();
        let (z, _, _) = m.sign_transform(Transform::HardSign).unwrap();
        let sol = eig_sync(&z, true).unwrap();
        let report = misclassification_report(&sol, &m).unwrap();
        assert_eq!(report.ignored, 1);
        assert_eq!(report.total_plus, 2);
        assert_eq!(report.total_minus, 0);
    }

    #[test]
    fn validation_rejects_bad_input() {
        // asymmetric layer
        let mut l0 = layer_from(2, |_, _| 0.5);
        l0[1] = 0.9;
        assert!(MultiplexVoting::new(vec![l0], vec![vec![0, 1]], 1.0, None).is_err());
        // duplicate entity within a layer
        let l0 = layer_from(2, |_, _| 0.5);
        assert!(MultiplexVoting::new(vec![l0.clone()], vec![vec![0, 0]], 1.0, None).is_err());
        // entry out of range
        let mut l1 = layer_from(2, |_, _| 0.5);
        l1[1] = 1.5;
        l1[2] = 1.5;
        assert!(MultiplexVoting::new(vec![l1], vec![vec![0, 1]], 1.0, None).is_err());
    }
}
