//! On-disk formats shared by the CLI, fuzz targets, and downstream tools.
//!
//! Everything is plain CSV or JSON, documented bit-exactly in the README:
//!
//! - `graph.csv`: optional `# n=<count>` comment, header `i,j,w`, then one
//!   upper-triangular edge per row (0-based, i < j, w ∈ [−1,1]\{0}).
//! - `truth.csv`: header `i,z`, one row per node, z ∈ {−1, 1}.
//! - `partition.csv`: header `i,block`, one row per node, contiguous block
//!   ids starting at 0.
//! - `anchors.csv`: header `i,a`, any subset of nodes, a ∈ {−1, 1}.
//! - layer CSV: header of local ids `0,1,…,S−1`, then S rows of S
//!   similarities in [0, 1].
//! - `identity.csv`: header `layer,local_id,entity_id,label`, label is
//!   `1`, `-1`, `0`, or empty for unlabeled.
//! - multiplex manifest JSON: see [`MultiplexManifest`].
//!
//! Parsers reject anything outside the documented grammar; they are fuzzed
//! in `fuzz/` and replayed over the seed corpus in this crate's tests.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{AnchorSet, GroundTruth, Partition, SignedGraph};
use crate::multiplex::{MultiplexVoting, Transform};
use crate::spectral::{HistogramBin, SpectrumReport};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

impl From<crate::error::Error> for FormatError {
    fn from(e: crate::error::Error) -> Self {
        FormatError::Invalid(e.to_string())
    }
}

pub type FormatResult<T> = std::result::Result<T, FormatError>;

fn parse_err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse { line, msg: msg.into() }
}

/// Lines with content, skipping blank lines and `#` comments, with their
/// 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(idx, l)| (idx + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_usize(line: usize, field: &str, s: &str) -> FormatResult<usize> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| parse_err(line, format!("{field} `{s}` is not a non-negative integer")))
}

fn parse_f64(line: usize, field: &str, s: &str) -> FormatResult<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("{field} `{s}` is not a number")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("{field} `{s}` is not finite")));
    }
    Ok(v)
}

fn parse_sign(line: usize, field: &str, s: &str) -> FormatResult<i8> {
    match s.trim() {
        "1" | "+1" => Ok(1),
        "-1" => Ok(-1),
        other => Err(parse_err(line, format!("{field} `{other}` must be 1 or -1"))),
    }
}

/// `# n=` header if present, otherwise the node count is inferred from the
/// maximum index.
fn scan_node_count(text: &str) -> FormatResult<Option<usize>> {
    for (idx, line) in text.lines().enumerate() {
        let t = line.trim();
        if let Some(rest) = t.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(v) = rest.strip_prefix("n=") {
                return Ok(Some(parse_usize(idx + 1, "n", v)?));
            }
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// graph.csv

pub fn parse_graph_csv(text: &str) -> FormatResult<SignedGraph> {
    let declared_n = scan_node_count(text)?;
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, "i,j,w")) => {}
        Some((ln, other)) => return Err(parse_err(ln, format!("expected header `i,j,w`, got `{other}`"))),
        None => return Err(FormatError::Invalid("empty graph file".into())),
    }
    let mut edges = Vec::new();
    let mut max_index = 0usize;
    for (ln, line) in lines {
        let mut parts = line.split(',');
        let (i, j, w) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), Some(c), None) => (
                parse_usize(ln, "i", a)?,
                parse_usize(ln, "j", b)?,
                parse_f64(ln, "w", c)?,
            ),
            _ => return Err(parse_err(ln, "expected exactly 3 fields `i,j,w`")),
        };
        if i >= j {
            return Err(parse_err(ln, format!("need i < j, got ({i},{j})")));
        }
        max_index = max_index.max(j);
        edges.push((i, j, w));
    }
    let n = match declared_n {
        Some(n) => n,
        None => {
            if edges.is_empty() {
                return Err(FormatError::Invalid(
                    "cannot infer node count from an edgeless file without `# n=`".into(),
                ));
            }
            max_index + 1
        }
    };
    Ok(SignedGraph::from_edges(n, edges)?)
}

pub fn write_graph_csv(g: &SignedGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# n={}", g.n());
    out.push_str("i,j,w\n");
    for &(i, j, w) in g.edges() {
        let _ = writeln!(out, "{i},{j},{w}");
    }
    out
}

// ---------------------------------------------------------------------------
// truth.csv

pub fn parse_truth_csv(text: &str) -> FormatResult<GroundTruth> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, "i,z")) => {}
        Some((ln, other)) => return Err(parse_err(ln, format!("expected header `i,z`, got `{other}`"))),
        None => return Err(FormatError::Invalid("empty truth file".into())),
    }
    let mut entries = Vec::new();
    for (ln, line) in lines {
        let mut parts = line.split(',');
        match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => {
                entries.push((parse_usize(ln, "i", a)?, parse_sign(ln, "z", b)?, ln))
            }
            _ => return Err(parse_err(ln, "expected exactly 2 fields `i,z`")),
        }
    }
    if entries.is_empty() {
        return Err(FormatError::Invalid("truth file has no rows".into()));
    }
    let n = entries.len();
    let mut z = vec![0i8; n];
    for (i, v, ln) in entries {
        if i >= n {
            return Err(parse_err(ln, format!("index {i} out of range for {n} rows")));
        }
        if z[i] != 0 {
            return Err(parse_err(ln, format!("duplicate index {i}")));
        }
        z[i] = v;
    }
    Ok(GroundTruth::new(z)?)
}

pub fn write_truth_csv(truth: &GroundTruth) -> String {
    let mut out = String::from("i,z\n");
    for (i, z) in truth.values().iter().enumerate() {
        let _ = writeln!(out, "{i},{z}");
    }
    out
}

// ---------------------------------------------------------------------------
// partition.csv

pub fn parse_partition_csv(text: &str) -> FormatResult<Partition> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, "i,block")) => {}
        Some((ln, other)) => {
            return Err(parse_err(ln, format!("expected header `i,block`, got `{other}`")))
        }
        None => return Err(FormatError::Invalid("empty partition file".into())),
    }
    let mut entries = Vec::new();
    let mut max_block = 0usize;
    for (ln, line) in lines {
        let mut parts = line.split(',');
        match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => {
                let i = parse_usize(ln, "i", a)?;
                let b = parse_usize(ln, "block", b)?;
                max_block = max_block.max(b);
                entries.push((i, b, ln));
            }
            _ => return Err(parse_err(ln, "expected exactly 2 fields `i,block`")),
        }
    }
    if entries.is_empty() {
        return Err(FormatError::Invalid("partition file has no rows".into()));
    }
    let n = entries.len();
    let mut block_of = vec![u32::MAX; n];
    for (i, b, ln) in entries {
        if i >= n {
            return Err(parse_err(ln, format!("index {i} out of range for {n} rows")));
        }
        if block_of[i] != u32::MAX {
            return Err(parse_err(ln, format!("duplicate index {i}")));
        }
        block_of[i] = b as u32;
    }
    Ok(Partition::new(block_of, max_block + 1)?)
}

pub fn write_partition_csv(p: &Partition) -> String {
    let mut out = String::from("i,block\n");
    for (i, b) in p.block_ids().iter().enumerate() {
        let _ = writeln!(out, "{i},{b}");
    }
    out
}

// ---------------------------------------------------------------------------
// anchors.csv

pub fn parse_anchors_csv(text: &str) -> FormatResult<AnchorSet> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, "i,a")) => {}
        Some((ln, other)) => return Err(parse_err(ln, format!("expected header `i,a`, got `{other}`"))),
        None => return Err(FormatError::Invalid("empty anchors file".into())),
    }
    let mut pairs = Vec::new();
    for (ln, line) in lines {
        let mut parts = line.split(',');
        match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => {
                pairs.push((parse_usize(ln, "i", a)?, parse_sign(ln, "a", b)?))
            }
            _ => return Err(parse_err(ln, "expected exactly 2 fields `i,a`")),
        }
    }
    Ok(AnchorSet::new(pairs)?)
}

pub fn write_anchors_csv(anchors: &AnchorSet) -> String {
    let mut out = String::from("i,a\n");
    for (i, a) in anchors.iter() {
        let _ = writeln!(out, "{i},{a}");
    }
    out
}

// ---------------------------------------------------------------------------
// solution.csv

pub fn write_solution_csv(sol: &crate::graph::SyncSolution) -> String {
    let mut out = String::from("node,estimate,score\n");
    for i in 0..sol.len() {
        let _ = writeln!(out, "{i},{},{}", sol.estimates[i], sol.scores[i]);
    }
    out
}

// ---------------------------------------------------------------------------
// spectrum / histogram CSV

pub fn write_spectrum_csv(report: &SpectrumReport) -> String {
    let mut out = String::from("rank,eigenvalue\n");
    for (k, v) in report.eigenvalues.iter().enumerate() {
        let _ = writeln!(out, "{},{v}", k + 1);
    }
    out
}

pub fn write_histogram_csv(bins: &[HistogramBin]) -> String {
    let mut out = String::from("bin_left,bin_right,count\n");
    for b in bins {
        let _ = writeln!(out, "{},{},{}", b.left, b.right, b.count);
    }
    out
}

// ---------------------------------------------------------------------------
// multiplex inputs

/// Manifest describing a multiplex data set on disk. Paths are relative to
/// the manifest's directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultiplexManifest {
    /// Interslice coupling weight ε ∈ [0, 1].
    pub epsilon: f64,
    /// `"sign"` or `"linear"`.
    pub transform: String,
    /// Optional hard threshold applied after the linear transform.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// `"categorical"` (default) or `"ordinal"` interslice coupling.
    #[serde(default = "default_coupling")]
    pub coupling: String,
    /// One CSV per layer, in order.
    pub layers: Vec<String>,
    /// The identity/label CSV.
    pub identity: String,
}

fn default_coupling() -> String {
    "categorical".into()
}

impl MultiplexManifest {
    pub fn coupling_kind(&self) -> FormatResult<crate::multiplex::Coupling> {
        match self.coupling.as_str() {
            "categorical" => Ok(crate::multiplex::Coupling::Categorical),
            "ordinal" => Ok(crate::multiplex::Coupling::Ordinal),
            other => Err(FormatError::Invalid(format!(
                "coupling `{other}` must be `categorical` or `ordinal`"
            ))),
        }
    }

    pub fn transform_kind(&self) -> FormatResult<Transform> {
        match self.transform.as_str() {
            "sign" => Ok(Transform::HardSign),
            "linear" => Ok(Transform::Linear),
            other => Err(FormatError::Invalid(format!(
                "transform `{other}` must be `sign` or `linear`"
            ))),
        }
    }
}

pub fn parse_multiplex_manifest(text: &str) -> FormatResult<MultiplexManifest> {
    let manifest: MultiplexManifest =
        serde_json::from_str(text).map_err(|e| FormatError::Invalid(format!("manifest: {e}")))?;
    if !(0.0..=1.0).contains(&manifest.epsilon) {
        return Err(FormatError::Invalid(format!(
            "epsilon {} not in [0,1]",
            manifest.epsilon
        )));
    }
    manifest.transform_kind()?;
    manifest.coupling_kind()?;
    if manifest.layers.is_empty() {
        return Err(FormatError::Invalid("manifest lists no layers".into()));
    }
    if let Some(t) = manifest.theta {
        if !(0.0..1.0).contains(&t) {
            return Err(FormatError::Invalid(format!("theta {t} not in [0,1)")));
        }
    }
    Ok(manifest)
}

/// Dense layer matrix: header of local ids, then S rows of S values.
pub fn parse_layer_csv(text: &str) -> FormatResult<Vec<f64>> {
    let mut lines = content_lines(text);
    let (header_ln, header) = lines
        .next()
        .ok_or_else(|| FormatError::Invalid("empty layer file".into()))?;
    let s = header.split(',').count();
    for (idx, field) in header.split(',').enumerate() {
        let v = parse_usize(header_ln, "header id", field)?;
        if v != idx {
            return Err(parse_err(
                header_ln,
                format!("header must list local ids 0..{}, found {v} at position {idx}", s - 1),
            ));
        }
    }
    let mut matrix = Vec::with_capacity(s * s);
    let mut rows = 0usize;
    for (ln, line) in lines {
        let mut count = 0usize;
        for field in line.split(',') {
            let v = parse_f64(ln, "entry", field)?;
            if !(0.0..=1.0).contains(&v) {
                return Err(parse_err(ln, format!("similarity {v} not in [0,1]")));
            }
            matrix.push(v);
            count += 1;
        }
        if count != s {
            return Err(parse_err(ln, format!("expected {s} fields, got {count}")));
        }
        rows += 1;
    }
    if rows != s {
        return Err(FormatError::Invalid(format!(
            "layer has {rows} rows but header lists {s} columns"
        )));
    }
    Ok(matrix)
}

/// One identity row: (layer, local index, entity id, label).
pub type IdentityRow = (usize, usize, u32, i8);

pub fn parse_identity_csv(text: &str) -> FormatResult<Vec<IdentityRow>> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, "layer,local_id,entity_id,label")) => {}
        Some((ln, other)) => {
            return Err(parse_err(
                ln,
                format!("expected header `layer,local_id,entity_id,label`, got `{other}`"),
            ))
        }
        None => return Err(FormatError::Invalid("empty identity file".into())),
    }
    let mut rows = Vec::new();
    for (ln, line) in lines {
        let mut parts = line.split(',');
        match (parts.next(), parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), Some(c), label, None) => {
                let label = match label.map(str::trim) {
                    None | Some("") | Some("0") => 0,
                    Some(v) => parse_sign(ln, "label", v)?,
                };
                rows.push((
                    parse_usize(ln, "layer", a)?,
                    parse_usize(ln, "local_id", b)?,
                    parse_usize(ln, "entity_id", c)? as u32,
                    label,
                ));
            }
            _ => return Err(parse_err(ln, "expected 3 or 4 fields")),
        }
    }
    if rows.is_empty() {
        return Err(FormatError::Invalid("identity file has no rows".into()));
    }
    Ok(rows)
}

/// Loads a full multiplex data set from a manifest path.
pub fn load_multiplex(manifest_path: &Path) -> FormatResult<(MultiplexVoting, MultiplexManifest)> {
    let text = std::fs::read_to_string(manifest_path)?;
    let manifest = parse_multiplex_manifest(&text)?;
    let dir = manifest_path.parent().unwrap_or_else(|| Path::new("."));

    let mut layers = Vec::with_capacity(manifest.layers.len());
    for rel in &manifest.layers {
        let text = std::fs::read_to_string(dir.join(rel))?;
        layers.push(parse_layer_csv(&text)?);
    }
    let identity_rows = parse_identity_csv(&std::fs::read_to_string(dir.join(&manifest.identity))?)?;

    let sizes: Vec<usize> = layers.iter().map(|l| (l.len() as f64).sqrt() as usize).collect();
    let mut identity: Vec<Vec<u32>> = sizes.iter().map(|&s| vec![u32::MAX; s]).collect();
    let mut labels: Vec<Vec<i8>> = sizes.iter().map(|&s| vec![0i8; s]).collect();
    let mut any_label = false;
    for (layer, local, entity, label) in identity_rows {
        if layer >= sizes.len() {
            return Err(FormatError::Invalid(format!(
                "identity row references layer {layer}, but only {} layers exist",
                sizes.len()
            )));
        }
        if local >= sizes[layer] {
            return Err(FormatError::Invalid(format!(
                "identity row references local id {local} in layer {layer} of size {}",
                sizes[layer]
            )));
        }
        if identity[layer][local] != u32::MAX {
            return Err(FormatError::Invalid(format!(
                "duplicate identity row for layer {layer}, local {local}"
            )));
        }
        identity[layer][local] = entity;
        labels[layer][local] = label;
        any_label |= label != 0;
    }
    for (t, row) in identity.iter().enumerate() {
        if let Some(missing) = row.iter().position(|&e| e == u32::MAX) {
            return Err(FormatError::Invalid(format!(
                "layer {t} local {missing} has no identity row"
            )));
        }
    }
    let voting = MultiplexVoting::new(
        layers,
        identity,
        manifest.epsilon,
        if any_label { Some(labels) } else { None },
    )?
    .with_coupling(manifest.coupling_kind()?);
    Ok((voting, manifest))
}

// ---------------------------------------------------------------------------
// file helpers

pub fn read_graph(path: &Path) -> FormatResult<SignedGraph> {
    parse_graph_csv(&std::fs::read_to_string(path)?)
}

pub fn read_truth(path: &Path) -> FormatResult<GroundTruth> {
    parse_truth_csv(&std::fs::read_to_string(path)?)
}

pub fn read_partition(path: &Path) -> FormatResult<Partition> {
    parse_partition_csv(&std::fs::read_to_string(path)?)
}

pub fn read_anchors(path: &Path) -> FormatResult<AnchorSet> {
    parse_anchors_csv(&std::fs::read_to_string(path)?)
}
