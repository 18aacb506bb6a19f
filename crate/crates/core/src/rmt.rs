//! Random-matrix noise-sensitivity analysis for the eigenvector method on
//! Erdős–Rényi measurement graphs.
//!
//! The measurement matrix decomposes as Z = nα(2p−1)·ttᵀ + R with t = z/√n
//! and R a zero-mean random matrix whose off-diagonal variance is
//! α(1−α+4pα−4p²α). With θ = n(2p−1)α and σ² = nα(1−α+4pα−4p²α), the top
//! eigenvalue escapes the semicircle bulk [−2σ, 2σ] as soon as θ > σ,
//! which happens for p above p* ≈ ½ + 1/(2√(αn)). Inside this module the
//! diagonal convention Z_ii = (2p−1)α applies.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generators::{derive_seed, erdos_renyi_instance, NoiseSpec};
use crate::graph::{error_rate, GroundTruth, SignedGraph};
use crate::linalg::{self, DenseSym};
use crate::spectral::eig_sync;

/// Detectability numbers for one (n, α, p) point.
#[derive(Debug, Clone, Copy)]
pub struct NoiseAnalysis {
    pub n: usize,
    pub alpha: f64,
    pub p: f64,
    /// θ = n(2p−1)α, the planted eigenvalue scale.
    pub theta: f64,
    /// σ = √(nα(1−α+4pα−4p²α)), the semicircle radius scale.
    pub sigma: f64,
    /// p* = ½ + 1/(2√(αn)).
    pub p_star: f64,
    /// θ > σ: the top eigenvalue separates from the bulk.
    pub detectable: bool,
    /// p* < 1: detection is possible at some legal p at all.
    pub achievable: bool,
}

impl NoiseAnalysis {
    pub fn new(n: usize, alpha: f64, p: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("n must be ≥ 1".into()));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Parameter(format!("alpha {alpha} not in (0,1]")));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Parameter(format!("p {p} not in [0,1]")));
        }
        let nf = n as f64;
        let theta = nf * (2.0 * p - 1.0) * alpha;
        let sigma = (nf * alpha * (1.0 - alpha + 4.0 * p * alpha - 4.0 * p * p * alpha)).sqrt();
        let p_star = threshold(n, alpha)?;
        Ok(Self {
            n,
            alpha,
            p,
            theta,
            sigma,
            p_star,
            detectable: theta > sigma,
            achievable: p_star < 1.0,
        })
    }
}

/// The detection threshold p* = ½ + 1/(2√(αn)). Values ≥ 1 mean no legal
/// correctness probability reaches detectability.
pub fn threshold(n: usize, alpha: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Parameter("n must be ≥ 1".into()));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Parameter(format!("alpha {alpha} not in (0,1]")));
    }
    Ok(0.5 + 0.5 / (alpha * n as f64).sqrt())
}

/// Dense copy of the instance with the Z_ii = (2p−1)α convention.
fn dense_with_convention(g: &SignedGraph, alpha: f64, p: f64) -> DenseSym {
    DenseSym::from_graph(g, (2.0 * p - 1.0) * alpha)
}

/// Empirical statistics of the off-diagonal residual entries against the
/// analytic variance.
#[derive(Debug, Clone, Copy)]
pub struct ResidualStats {
    pub empirical_mean: f64,
    pub empirical_variance: f64,
    pub analytic_variance: f64,
    /// Number of unique off-diagonal entries sampled.
    pub entries: usize,
}

/// Forms R = Z − nα(2p−1)·ttᵀ for an instance with known truth and noise
/// parameters and reports the mean and variance of its off-diagonal
/// entries. The diagonal is zero by the Z_ii convention.
pub fn rank_one_decomposition_check(
    g: &SignedGraph,
    truth: &GroundTruth,
    alpha: f64,
    p: f64,
) -> Result<ResidualStats> {
    let n = g.n();
    if truth.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: truth.len() });
    }
    let z = truth.values();
    let dense = dense_with_convention(g, alpha, p);
    let expected = alpha * (2.0 * p - 1.0);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let entries = n * (n - 1) / 2;
    for i in 0..n {
        for j in (i + 1)..n {
            let r = dense.get(i, j) - expected * f64::from(z[i] * z[j]);
            sum += r;
            sum_sq += r * r;
        }
    }
    let mean = sum / entries as f64;
    let variance = sum_sq / entries as f64 - mean * mean;
    let analytic = alpha * (1.0 - alpha + 4.0 * p * alpha - 4.0 * p * p * alpha);
    Ok(ResidualStats {
        empirical_mean: mean,
        empirical_variance: variance,
        analytic_variance: analytic,
        entries,
    })
}

/// The eigenvector-correlation lower bound and its measured value.
#[derive(Debug, Clone, Copy)]
pub struct CorrelationBound {
    /// (λ₁(Z) − λ₁(R)) / (nα(2p−1)); NaN when not applicable.
    pub bound: f64,
    /// ⟨v₁, t⟩² for the top eigenvector v₁ of Z.
    pub measured: f64,
    pub lambda1_z: f64,
    pub lambda1_r: f64,
    /// The semicircle edge 2σ, the analytic stand-in for λ₁(R).
    pub two_sigma: f64,
    /// False at p = 0.5, where the planted scale vanishes.
    pub applicable: bool,
}

/// Computes ⟨v₁,t⟩² ≥ (λ₁(Z) − λ₁(R))/(nα(2p−1)) on a synthetic instance
/// with known truth: both sides are measured on the realized matrices.
pub fn correlation_bound(
    g: &SignedGraph,
    truth: &GroundTruth,
    alpha: f64,
    p: f64,
) -> Result<CorrelationBound> {
    let n = g.n();
    if truth.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: truth.len() });
    }
    let z = truth.values();
    let dense_z = dense_with_convention(g, alpha, p);
    let planted = n as f64 * alpha * (2.0 * p - 1.0);
    let t: Vec<f64> = z.iter().map(|&v| f64::from(v) / (n as f64).sqrt()).collect();

    let budget = (40 * n).max(4000);
    let top_z = linalg::lanczos_top(&dense_z, 1, 1e-8, budget, 11)?;
    let lambda1_z = top_z.values[0];
    let v1 = &top_z.vectors[0];
    let measured = linalg::dot(v1, &t).powi(2);
    let analysis = NoiseAnalysis::new(n, alpha, p)?;
    let two_sigma = 2.0 * analysis.sigma;

    if p == 0.5 {
        return Ok(CorrelationBound {
            bound: f64::NAN,
            measured,
            lambda1_z,
            lambda1_r: f64::NAN,
            two_sigma,
            applicable: false,
        });
    }

    let mut dense_r = dense_z;
    for i in 0..n {
        for j in (i + 1)..n {
            let r = dense_r.get(i, j) - planted * t[i] * t[j];
            dense_r.set_sym(i, j, r);
        }
        dense_r.set_sym(i, i, 0.0);
    }
    let top_r = linalg::lanczos_top(&dense_r, 1, 1e-8, budget, 13)?;
    let lambda1_r = top_r.values[0];
    Ok(CorrelationBound {
        bound: (lambda1_z - lambda1_r) / planted,
        measured,
        lambda1_z,
        lambda1_r,
        two_sigma,
        applicable: true,
    })
}

/// One cell of the (α, η) recovery heatmap.
#[derive(Debug, Clone, Copy)]
pub struct HeatCell {
    pub alpha: f64,
    pub eta: f64,
    pub tau_median: f64,
    pub gap_median: f64,
    pub p_star: f64,
    pub detectable: bool,
    /// True when every trial in the cell failed to solve.
    pub failed: bool,
}

fn median_of(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Sweeps the (α, η) grid with `trials` seeded instances per cell and
/// records the median error rate and median spectral gap λ₁−λ₂ of the
/// chosen operator. Cells fail soft: a solver error marks the trial, and
/// the cell is flagged once every trial failed. Deterministic for a given
/// base seed regardless of thread count.
pub fn heatmap_sweep(
    n: usize,
    alpha_grid: &[f64],
    eta_grid: &[f64],
    trials: usize,
    normalized: bool,
    base_seed: u64,
) -> Result<Vec<HeatCell>> {
    if alpha_grid.is_empty() || eta_grid.is_empty() || trials == 0 {
        return Err(Error::Parameter("grids and trials must be non-empty".into()));
    }
    let cells: Vec<(usize, usize)> = (0..alpha_grid.len())
        .flat_map(|a| (0..eta_grid.len()).map(move |e| (a, e)))
        .collect();
    let out: Vec<HeatCell> = cells
        .par_iter()
        .map(|&(ai, ei)| {
            let alpha = alpha_grid[ai];
            let eta = eta_grid[ei];
            let mut taus = Vec::with_capacity(trials);
            let mut gaps = Vec::with_capacity(trials);
            for trial in 0..trials {
                let seed = derive_seed(base_seed, &[ai as u64, ei as u64, trial as u64]);
                let spec = match NoiseSpec::new(alpha, eta, seed) {
                    Ok(s) => s,
                    Err(_) => continue,
                };
                let Ok((g, truth)) = erdos_renyi_instance(n, &spec, None) else {
                    continue;
                };
                let Ok(sol) = eig_sync(&g, normalized) else {
                    continue;
                };
                if let Ok(tau) = error_rate(&sol, &truth) {
                    taus.push(tau);
                }
                if let Some(&gap) = sol.diagnostics.get("gap_12") {
                    gaps.push(gap);
                }
            }
            let analysis = NoiseAnalysis::new(n, alpha, 1.0 - eta).expect("validated grid");
            HeatCell {
                alpha,
                eta,
                tau_median: median_of(taus.clone()),
                gap_median: median_of(gaps),
                p_star: analysis.p_star,
                detectable: analysis.detectable,
                failed: taus.is_empty(),
            }
        })
        .collect();
    Ok(out)
}
