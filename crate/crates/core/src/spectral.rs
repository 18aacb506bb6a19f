//! Eigenvector synchronization: top-eigenvector methods on the raw and
//! degree-normalized measurement matrix, the Laplacian least-squares
//! variant, and spectrum/histogram utilities.

use crate::error::{Error, Result};
use crate::graph::{Method, SignedGraph, SyncSolution};
use crate::linalg::{self, DenseSym, SymSparse};

/// Convergence tolerance for eigenpair residuals.
pub const EIG_TOL: f64 = 1e-8;

/// Matvec budget: 10·n·log n, floored to keep small problems unconstrained.
fn matvec_budget(n: usize) -> usize {
    ((10.0 * n as f64 * (n.max(2) as f64).ln()) as usize).max(4000)
}

/// The degree-normalized measurement operator v ↦ D⁻¹(Zv), where
/// D_ii = Σ_j |Z_ij|. It is similar to the symmetric D^{-1/2} Z D^{-1/2},
/// hence has a real spectrum; solvers iterate on the symmetric form and map
/// eigenvectors back through D^{-1/2}.
pub struct NormalizedOperator<'a> {
    graph: &'a SignedGraph,
    inv_deg: Vec<f64>,
    inv_sqrt_deg: Vec<f64>,
}

impl<'a> NormalizedOperator<'a> {
    pub fn inv_sqrt_deg(&self) -> &[f64] {
        &self.inv_sqrt_deg
    }

    /// Applies v ↦ D⁻¹(Zv).
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.graph.n();
        let mut y = vec![0.0; n];
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for &(j, w) in self.graph.neighbors(i) {
                acc += w * v[j as usize];
            }
            *yi = acc * self.inv_deg[i];
        }
        y
    }

    /// The similar symmetric matrix D^{-1/2} Z D^{-1/2}.
    pub fn symmetric_form(&self) -> SymSparse {
        SymSparse::normalized_from_graph(self.graph, &self.inv_sqrt_deg)
    }
}

/// Builds the normalized operator, failing on any isolated node.
pub fn normalize(g: &SignedGraph) -> Result<NormalizedOperator<'_>> {
    let n = g.n();
    let mut inv_deg = vec![0.0; n];
    let mut inv_sqrt_deg = vec![0.0; n];
    for i in 0..n {
        let d = g.abs_degree(i);
        if d <= 0.0 {
            return Err(Error::DegenerateDegree { node: i });
        }
        inv_deg[i] = 1.0 / d;
        inv_sqrt_deg[i] = 1.0 / d.sqrt();
    }
    Ok(NormalizedOperator { graph: g, inv_deg, inv_sqrt_deg })
}

struct ComponentEig {
    values: Vec<f64>,
    vector: Vec<f64>,
    matvecs: usize,
    residual: f64,
}

/// Top eigenpair (plus λ₂ when available) of one connected component,
/// already mapped back to measurement coordinates and unit-normalized.
fn component_top(g: &SignedGraph, comp: &[usize], normalized: bool, top: usize) -> Result<ComponentEig> {
    let sub = g.induced_subgraph(comp)?;
    let n = sub.n();
    let r = top.min(n);
    let (op, inv_sqrt): (SymSparse, Option<Vec<f64>>) = if normalized {
        let norm_op = normalize(&sub)?;
        let m = norm_op.symmetric_form();
        (m, Some(norm_op.inv_sqrt_deg().to_vec()))
    } else {
        (SymSparse::from_graph(&sub), None)
    };
    let out = linalg::lanczos_top(&op, r, EIG_TOL, matvec_budget(n), 2)?;
    if !out.converged {
        return Err(Error::Convergence {
            residual: out.max_residual,
            iterations: out.matvecs,
        });
    }
    let mut vector = out.vectors[0].clone();
    if let Some(ds) = inv_sqrt {
        for (v, d) in vector.iter_mut().zip(&ds) {
            *v *= d;
        }
        let nrm = linalg::norm(&vector);
        for v in vector.iter_mut() {
            *v /= nrm;
        }
        linalg::fix_orientation(&mut vector);
    }
    Ok(ComponentEig {
        values: out.values,
        vector,
        matvecs: out.matvecs,
        residual: out.max_residual,
    })
}

/// Eigenvector synchronization: estimates are the signs of the top
/// eigenvector of the normalized operator 𝒵 (or of raw Z when
/// `normalized` is false).
///
/// Disconnected graphs are solved per component, each component's sign
/// being independent; the component count lands in the diagnostics.
/// Scores are stored with unit norm per component.
pub fn eig_sync(g: &SignedGraph, normalized: bool) -> Result<SyncSolution> {
    let comps = g.components();
    let mut scores = vec![0.0; g.n()];
    let mut matvecs = 0usize;
    let mut residual = 0.0_f64;
    let mut singletons = 0usize;
    let mut lead: Option<ComponentEig> = None;

    for comp in &comps {
        if comp.len() == 1 {
            singletons += 1;
            continue; // score 0 → estimate +1 by the sign convention
        }
        let eig = component_top(g, comp, normalized, 2)?;
        for (local, &node) in comp.iter().enumerate() {
            scores[node] = eig.vector[local];
        }
        matvecs += eig.matvecs;
        residual = residual.max(eig.residual);
        let replace = match &lead {
            Some(cur) => comp.len() > cur.vector.len(),
            None => true,
        };
        if replace {
            lead = Some(eig);
        }
    }

    let method = if normalized { Method::Eig } else { Method::EigRaw };
    let mut sol = SyncSolution::from_scores(method, scores);
    sol.set_diagnostic("components", comps.len() as f64);
    sol.set_diagnostic("singletons", singletons as f64);
    sol.set_diagnostic("iterations", matvecs as f64);
    sol.set_diagnostic("residual", residual);
    if let Some(eig) = lead {
        sol.set_diagnostic("lambda1", eig.values[0]);
        if eig.values.len() > 1 {
            sol.set_diagnostic("lambda2", eig.values[1]);
            sol.set_diagnostic("gap_12", eig.values[0] - eig.values[1]);
        }
    }
    Ok(sol)
}

/// Least-squares synchronization: the eigenvector of the smallest eigenvalue
/// of the combinatorial Laplacian D − Z, found by iterating on the shifted
/// operator cI − (D − Z) with c = 2·max_i D_ii. Scores are normalized to
/// ‖x‖² = n.
pub fn laplacian_sync(g: &SignedGraph) -> Result<SyncSolution> {
    let comps = g.components();
    let mut scores = vec![0.0; g.n()];
    let mut matvecs = 0usize;
    let mut residual = 0.0_f64;
    let mut singletons = 0usize;
    let mut lead: Option<(usize, Vec<f64>)> = None;

    for comp in &comps {
        if comp.len() == 1 {
            singletons += 1;
            continue;
        }
        let sub = g.induced_subgraph(comp)?;
        let n = sub.n();
        let c = 2.0 * (0..n).map(|i| sub.abs_degree(i)).fold(0.0, f64::max);
        let mut op = SymSparse::zeros(n);
        for &(i, j, w) in sub.edges() {
            op.add_sym(i as usize, j as usize, w);
        }
        for i in 0..n {
            op.set_diag(i, c - sub.abs_degree(i));
        }
        let out = linalg::lanczos_top(&op, 2.min(n), EIG_TOL, matvec_budget(n), 2)?;
        if !out.converged {
            return Err(Error::Convergence {
                residual: out.max_residual,
                iterations: out.matvecs,
            });
        }
        let scale = (n as f64).sqrt(); // unit vector → ‖x‖² = n
        for (local, &node) in comp.iter().enumerate() {
            scores[node] = out.vectors[0][local] * scale;
        }
        matvecs += out.matvecs;
        residual = residual.max(out.max_residual);
        // smallest eigenvalues of D - Z, recovered from the shift
        let lams: Vec<f64> = out.values.iter().map(|&v| c - v).collect();
        let replace = match &lead {
            Some((len, _)) => comp.len() > *len,
            None => true,
        };
        if replace {
            lead = Some((comp.len(), lams));
        }
    }

    let mut sol = SyncSolution::from_scores(Method::Laplacian, scores);
    sol.set_diagnostic("components", comps.len() as f64);
    sol.set_diagnostic("singletons", singletons as f64);
    sol.set_diagnostic("iterations", matvecs as f64);
    sol.set_diagnostic("residual", residual);
    if let Some((_, lams)) = lead {
        sol.set_diagnostic("laplacian_min", lams[0]);
        if lams.len() > 1 {
            sol.set_diagnostic("laplacian_second", lams[1]);
        }
    }
    Ok(sol)
}

/// One histogram bucket of a full spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramBin {
    pub left: f64,
    pub right: f64,
    pub count: usize,
}

/// Top-r eigenvalues with the gap diagnostics used for bipolarity checks,
/// plus an optional full-spectrum histogram.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    /// Top-r eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// λ₁ − λ₂ (when r ≥ 2).
    pub gap_12: Option<f64>,
    /// λ₂ − λ₃ (when r ≥ 3).
    pub gap_23: Option<f64>,
    /// λ₃ / λ₂ (when r ≥ 3 and λ₂ ≠ 0).
    pub ratio_32: Option<f64>,
    pub histogram: Option<Vec<HistogramBin>>,
}

/// Maximum size for dense full-spectrum solves.
pub const DENSE_SPECTRUM_LIMIT: usize = 2000;

/// Top-r eigenvalues of Z (or of 𝒵's symmetric form when `normalized`),
/// optionally with a full-spectrum histogram (dense solve, n ≤ 2000).
pub fn spectrum(
    g: &SignedGraph,
    r: usize,
    normalized: bool,
    histogram_bins: Option<usize>,
) -> Result<SpectrumReport> {
    let n = g.n();
    if r > n {
        return Err(Error::Parameter(format!("r = {r} exceeds n = {n}")));
    }
    if histogram_bins == Some(0) {
        return Err(Error::Parameter("histogram needs at least one bin".into()));
    }
    if histogram_bins.is_some() && n > DENSE_SPECTRUM_LIMIT {
        return Err(Error::SizeLimit(format!(
            "full-spectrum histogram limited to n ≤ {DENSE_SPECTRUM_LIMIT}, got {n}"
        )));
    }

    let sym: SymSparse = if normalized {
        normalize(g)?.symmetric_form()
    } else {
        SymSparse::from_graph(g)
    };

    let mut full: Option<Vec<f64>> = None;
    let eigenvalues: Vec<f64> = if histogram_bins.is_some() || r * 3 > n {
        // dense path: also reused for the histogram
        if n > DENSE_SPECTRUM_LIMIT {
            return Err(Error::SizeLimit(format!(
                "dense solve for r = {r} of n = {n} exceeds the limit"
            )));
        }
        let dense = if normalized {
            let inv = normalize(g)?;
            let ds = inv.inv_sqrt_deg().to_vec();
            let mut m = DenseSym::zeros(n);
            for &(i, j, w) in g.edges() {
                let (i, j) = (i as usize, j as usize);
                m.set_sym(i, j, w * ds[i] * ds[j]);
            }
            m
        } else {
            DenseSym::from_graph(g, 0.0)
        };
        let (vals, _) = linalg::dense_sym_eigen(&dense, false);
        let top: Vec<f64> = vals.iter().rev().take(r).copied().collect();
        full = Some(vals);
        top
    } else {
        let out = linalg::lanczos_top(&sym, r, EIG_TOL, matvec_budget(n), 2)?;
        if !out.converged {
            return Err(Error::Convergence {
                residual: out.max_residual,
                iterations: out.matvecs,
            });
        }
        out.values
    };

    let histogram = match (histogram_bins, full) {
        (Some(bins), Some(vals)) => Some(build_histogram(&vals, bins)),
        _ => None,
    };

    let gap_12 = (eigenvalues.len() >= 2).then(|| eigenvalues[0] - eigenvalues[1]);
    let gap_23 = (eigenvalues.len() >= 3).then(|| eigenvalues[1] - eigenvalues[2]);
    let ratio_32 = if eigenvalues.len() >= 3 && eigenvalues[1] != 0.0 {
        Some(eigenvalues[2] / eigenvalues[1])
    } else {
        None
    };
    Ok(SpectrumReport { eigenvalues, gap_12, gap_23, ratio_32, histogram })
}

fn build_histogram(sorted_vals: &[f64], bins: usize) -> Vec<HistogramBin> {
    let lo = *sorted_vals.first().unwrap();
    let hi = *sorted_vals.last().unwrap();
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut out: Vec<HistogramBin> = (0..bins)
        .map(|b| HistogramBin {
            left: lo + b as f64 * width,
            right: lo + (b + 1) as f64 * width,
            count: 0,
        })
        .collect();
    for &v in sorted_vals {
        let mut idx = ((v - lo) / width) as usize;
        if idx >= bins {
            idx = bins - 1; // right edge lands in the last bin
        }
        out[idx].count += 1;
    }
    out
}
