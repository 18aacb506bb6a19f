//! Anchored synchronization by quadratically-constrained quadratic programs.
//!
//! With anchors a and sensors s, minimizing the least-squares form splits
//! into blocks: sᵀ(D_S − S)s − 2sᵀUa plus a constant. Relaxing s ∈ {±1}ˡ to
//! a single norm constraint gives a trust-region-style subproblem whose
//! stationary points satisfy (D_S − S + λI)z = Ua; the multiplier λ solves
//! the secular equation ‖(D_S − S + λI)⁻¹Ua‖² = target. Two constraints are
//! offered: ‖z‖² = l, and the degree-weighted zᵀD_S z = Δ solved in the
//! D_S^{1/2}-transformed variables.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{AnchorSet, Method, SignedGraph, SyncSolution};
use crate::linalg::{self, ShiftedOp, SymOp, SymSparse};

/// Block decomposition of a measurement graph into sensor and anchor parts.
#[derive(Debug, Clone)]
pub struct AnchoredSystem {
    /// Original node id of each solver coordinate (ascending).
    pub sensor_ids: Vec<usize>,
    pub anchor_ids: Vec<usize>,
    /// Anchor values aligned with `anchor_ids`.
    pub anchor_values: Vec<i8>,
    /// Sensor-sensor block S (off-diagonal, l×l in solver coordinates).
    s_block: SymSparse,
    /// Sensor-anchor entries (sensor_local, anchor_local, weight).
    u_entries: Vec<(u32, u32, f64)>,
    /// Sensor degrees D_S from the full graph (anchor edges included).
    pub degrees: Vec<f64>,
    /// U·a, the anchor contribution per sensor.
    pub ua: Vec<f64>,
    n: usize,
}

impl AnchoredSystem {
    pub fn num_sensors(&self) -> usize {
        self.sensor_ids.len()
    }

    pub fn num_anchors(&self) -> usize {
        self.anchor_ids.len()
    }

    /// Entry of the sensor-sensor block in solver coordinates.
    pub fn s_entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        self.s_block
            .neighbors(i)
            .iter()
            .find(|(c, _)| *c as usize == j)
            .map(|&(_, w)| w)
            .unwrap_or(0.0)
    }

    /// Entry of the sensor-anchor block in solver coordinates.
    pub fn u_entry(&self, sensor: usize, anchor: usize) -> f64 {
        self.u_entries
            .iter()
            .find(|&&(s, a, _)| s as usize == sensor && a as usize == anchor)
            .map(|&(_, _, w)| w)
            .unwrap_or(0.0)
    }

    /// D_S − S as an operator.
    fn laplacian_block(&self) -> SymSparse {
        let l = self.num_sensors();
        let mut m = SymSparse::zeros(l);
        for i in 0..l {
            m.set_diag(i, self.degrees[i]);
        }
        for i in 0..l {
            for &(j, w) in self.s_block.neighbors(i) {
                if (j as usize) > i {
                    m.add_sym(i, j as usize, -w);
                }
            }
        }
        m
    }
}

/// Extracts the sensor/anchor block structure. The constant anchor-anchor
/// term of the least-squares form is discarded. Degrees come from the full
/// graph, so anchor-incident edges count toward D_S.
pub fn build_anchored_system(g: &SignedGraph, anchors: &AnchorSet) -> Result<AnchoredSystem> {
    anchors.check_range(g.n())?;
    let h = anchors.len();
    let n = g.n();
    if h == 0 || h >= n {
        return Err(Error::Parameter(format!(
            "anchored system needs 1 ≤ h < n, got h = {h}, n = {n}"
        )));
    }
    let mut sensor_local = vec![usize::MAX; n];
    let mut anchor_local = vec![usize::MAX; n];
    let mut sensor_ids = Vec::new();
    let mut anchor_ids = Vec::new();
    let mut anchor_values = Vec::new();
    for i in 0..n {
        match anchors.value(i) {
            Some(a) => {
                anchor_local[i] = anchor_ids.len();
                anchor_ids.push(i);
                anchor_values.push(a);
            }
            None => {
                sensor_local[i] = sensor_ids.len();
                sensor_ids.push(i);
            }
        }
    }
    let l = sensor_ids.len();
    let mut s_block = SymSparse::zeros(l);
    let mut u_entries = Vec::new();
    let mut degrees = vec![0.0; l];
    let mut ua = vec![0.0; l];
    for &(i, j, w) in g.edges() {
        let (i, j) = (i as usize, j as usize);
        match (anchors.value(i), anchors.value(j)) {
            (None, None) => {
                s_block.add_sym(sensor_local[i], sensor_local[j], w);
                degrees[sensor_local[i]] += w.abs();
                degrees[sensor_local[j]] += w.abs();
            }
            (Some(a), None) => {
                let s = sensor_local[j];
                u_entries.push((s as u32, anchor_local[i] as u32, w));
                degrees[s] += w.abs();
                ua[s] += w * f64::from(a);
            }
            (None, Some(a)) => {
                let s = sensor_local[i];
                u_entries.push((s as u32, anchor_local[j] as u32, w));
                degrees[s] += w.abs();
                ua[s] += w * f64::from(a);
            }
            (Some(_), Some(_)) => {} // anchor-anchor: constant term, dropped
        }
    }
    Ok(AnchoredSystem {
        sensor_ids,
        anchor_ids,
        anchor_values,
        s_block,
        u_entries,
        degrees,
        ua,
        n,
    })
}

const CG_TOL: f64 = 1e-12;
const BISECT_REL_TOL: f64 = 1e-10;
/// Absolute tolerance on the secular value φ(λ) − target, relative to the
/// target scale; keeps the reported constraint residual at or below 1e−8.
const VALUE_TOL: f64 = 1e-9;

struct SecularOutcome {
    solution: Vec<f64>,
    lambda: f64,
    hard_case: bool,
    solves: usize,
}

fn shifted_solve(m: &SymSparse, lambda: f64, rhs: &[f64]) -> Vec<f64> {
    let op = ShiftedOp { inner: m, alpha: 1.0, beta: lambda };
    let (x, _, _) = linalg::cg_solve(&op, rhs, CG_TOL, 40 * rhs.len().max(32));
    x
}

/// Smallest eigenvalue of an SPD-or-PSD matrix by inverse power iteration
/// with a small safeguard shift. Returns (λ_min, eigenvector).
fn lambda_min_inverse_power(m: &SymSparse, seed: u64) -> (f64, Vec<f64>) {
    let l = m.dim();
    let scale = m.norm_bound().max(1e-12);
    let margin = 1e-6 * scale;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..l).map(|_| rng.gen::<f64>() - 0.5).collect();
    let nrm = linalg::norm(&x);
    for v in x.iter_mut() {
        *v /= nrm;
    }
    let mut lambda = f64::INFINITY;
    let mut y = vec![0.0; l];
    for _ in 0..100 {
        let solved = shifted_solve(m, margin, &x);
        let nrm = linalg::norm(&solved);
        if nrm == 0.0 {
            break;
        }
        x = solved.iter().map(|v| v / nrm).collect();
        m.apply(&x, &mut y);
        let new_lambda = linalg::dot(&x, &y);
        if (new_lambda - lambda).abs() <= 1e-9 * scale {
            lambda = new_lambda;
            break;
        }
        lambda = new_lambda;
    }
    (lambda.max(0.0), x)
}

/// Solves ‖(M + λI)⁻¹ rhs‖² = target for the multiplier λ on the interval
/// where M + λI is positive definite, falling back to the boundary
/// eigen-direction when the secular function never reaches the target.
fn solve_secular(m: &SymSparse, rhs: &[f64], target: f64, seed: u64) -> Result<SecularOutcome> {
    let scale = m.norm_bound().max(1.0);
    let mut solves = 0usize;
    let mut phi = |lambda: f64| -> (Vec<f64>, f64) {
        solves += 1;
        let x = shifted_solve(m, lambda, rhs);
        let sq = linalg::dot(&x, &x);
        (x, sq)
    };

    // The matrix is PSD here (degree dominance), so λ = 0 is at or right of
    // the pole; decide the bracketing side from φ(0).
    let (x0, phi0) = phi(0.0);
    if (phi0 - target).abs() <= 1e-12 * target.max(1.0) {
        return Ok(SecularOutcome { solution: x0, lambda: 0.0, hard_case: false, solves });
    }

    let (mut lo, mut hi) = if phi0 > target {
        // root to the right of 0
        let mut hi = scale.max(1.0) * 1e-3;
        loop {
            let (_, val) = phi(hi);
            if val < target {
                break;
            }
            hi *= 2.0;
            if hi > 1e12 * scale {
                return Err(Error::Convergence { residual: val - target, iterations: solves });
            }
        }
        (0.0, hi)
    } else {
        // root between the pole and 0, or the hard case
        let (lambda_min, v_min) = lambda_min_inverse_power(m, seed);
        let lo = -lambda_min + 1e-9 * scale;
        let (x_lo, phi_lo) = phi(lo);
        if phi_lo < target {
            // rhs carries (almost) no weight on the bottom eigen-direction:
            // extend along it, solving ‖x + t·v‖² = target exactly for t
            let beta = linalg::dot(&x_lo, &v_min);
            let t = -beta + (beta * beta + target - phi_lo).max(0.0).sqrt();
            let mut solution = x_lo;
            for (s, v) in solution.iter_mut().zip(&v_min) {
                *s += t * v;
            }
            return Ok(SecularOutcome { solution, lambda: lo, hard_case: true, solves });
        }
        (lo, 0.0)
    };

    let mut x_mid = Vec::new();
    let mut lambda = 0.5 * (lo + hi);
    let value_tol = VALUE_TOL * target.max(1.0);
    for iter in 0..300 {
        lambda = 0.5 * (lo + hi);
        let (x, val) = phi(lambda);
        x_mid = x;
        if (val - target).abs() <= value_tol {
            break;
        }
        if val > target {
            lo = lambda;
        } else {
            hi = lambda;
        }
        // interval floor: past ~1e-10 relative width keep halving only
        // while the value error still moves; bottom out at fp resolution
        let width = hi - lo;
        if width <= BISECT_REL_TOL * hi.abs().max(lo.abs()).max(1.0) && iter > 60 {
            break;
        }
        if width <= f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
    }
    Ok(SecularOutcome { solution: x_mid, lambda, hard_case: false, solves })
}

fn check_connected_to_anchor(sys: &AnchoredSystem) -> Result<()> {
    if sys.ua.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateAnchors(
            "no sensor-anchor edge carries information (U·a = 0)".into(),
        ));
    }
    Ok(())
}

fn finish_solution(
    sys: &AnchoredSystem,
    method: Method,
    sensor_scores: Vec<f64>,
    outcome: &SecularOutcome,
    constraint_residual: f64,
) -> SyncSolution {
    let mut scores = vec![0.0; sys.n];
    for (local, &node) in sys.sensor_ids.iter().enumerate() {
        scores[node] = sensor_scores[local];
    }
    for (&node, &a) in sys.anchor_ids.iter().zip(&sys.anchor_values) {
        scores[node] = f64::from(a);
    }
    let mut sol = SyncSolution::from_scores(method, scores);
    sol.set_diagnostic("lambda", outcome.lambda);
    sol.set_diagnostic("constraint_residual", constraint_residual);
    sol.set_diagnostic("hard_case", if outcome.hard_case { 1.0 } else { 0.0 });
    sol.set_diagnostic("linear_solves", outcome.solves as f64);
    sol
}

/// QCQP with the plain norm constraint ‖z‖² = l: solves
/// z* = (D_S − S + λI)⁻¹(Ua) at the secular-equation multiplier.
pub fn qcqp_sync_identity(sys: &AnchoredSystem) -> Result<SyncSolution> {
    check_connected_to_anchor(sys)?;
    let l = sys.num_sensors();
    let m = sys.laplacian_block();
    let outcome = solve_secular(&m, &sys.ua, l as f64, 0x71)?;
    let constraint_residual = (linalg::dot(&outcome.solution, &outcome.solution) - l as f64).abs();
    Ok(finish_solution(
        sys,
        Method::QcqpIdentity,
        outcome.solution.clone(),
        &outcome,
        constraint_residual,
    ))
}

/// QCQP with the degree-weighted constraint zᵀD_S z = Δ, solved in the
/// transformed variables z̄ = D_S^{1/2} z on D_S^{-1/2}(D_S − S)D_S^{-1/2}
/// and mapped back through D_S^{-1/2}.
pub fn qcqp_sync_degree(sys: &AnchoredSystem) -> Result<SyncSolution> {
    check_connected_to_anchor(sys)?;
    let l = sys.num_sensors();
    if let Some(zero) = sys.degrees.iter().position(|&d| d <= 0.0) {
        return Err(Error::DegenerateDegree { node: sys.sensor_ids[zero] });
    }
    let inv_sqrt: Vec<f64> = sys.degrees.iter().map(|d| 1.0 / d.sqrt()).collect();
    let mut t = SymSparse::zeros(l);
    for i in 0..l {
        t.set_diag(i, 1.0);
    }
    for i in 0..l {
        for &(j, w) in sys.s_block.neighbors(i) {
            if (j as usize) > i {
                t.add_sym(i, j as usize, -w * inv_sqrt[i] * inv_sqrt[j as usize]);
            }
        }
    }
    let rhs: Vec<f64> = sys.ua.iter().zip(&inv_sqrt).map(|(u, s)| u * s).collect();
    let delta: f64 = sys.degrees.iter().sum();
    let outcome = solve_secular(&t, &rhs, delta, 0x72)?;
    let constraint_residual = (linalg::dot(&outcome.solution, &outcome.solution) - delta).abs();
    let z: Vec<f64> = outcome
        .solution
        .iter()
        .zip(&inv_sqrt)
        .map(|(zb, s)| zb * s)
        .collect();
    Ok(finish_solution(
        sys,
        Method::QcqpDegree,
        z,
        &outcome,
        constraint_residual,
    ))
}
