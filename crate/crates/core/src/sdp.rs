//! Semidefinite relaxations of the synchronization problem, solved by a
//! built-in low-rank (Burer–Monteiro) first-order method.
//!
//! Four program shapes are supported: the plain relaxation over all unit-
//! diagonal PSD matrices, the two anchored variants, and the partition-
//! constrained program. The latter collapses exactly to a k×k relaxation on
//! block-summed weights: PSD plus Υ_ii = Υ_jj = Υ_ij = 1 forces identical
//! rows, so each block acts as a single node.
//!
//! The solver maximizes ⟨C, V·Vᵀ⟩ over factors V with unit rows by projected
//! gradient ascent with row renormalization, Barzilai–Borwein steps and a
//! non-monotone safeguard; the factor rank ⌈√(2n)⌉+1 keeps the landscape
//! free of spurious local maxima for generic instances.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{AnchorSet, Method, Partition, SignedGraph, SyncSolution};
use crate::linalg::{self, GramOp, SymOp, SymSparse};

/// Knobs for the low-rank solver.
#[derive(Debug, Clone, Copy)]
pub struct SdpOptions {
    /// Factor rank; `None` means ⌈√(2n)⌉ + 1.
    pub rank: Option<usize>,
    /// Independent random initializations; the best objective wins.
    pub attempts: usize,
    pub max_iters: usize,
    /// Stop when the relative objective change over `patience` iterations
    /// falls below this.
    pub rel_tol: f64,
    pub patience: usize,
    pub seed: u64,
    /// Hard limit on problem size.
    pub size_limit: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            rank: None,
            attempts: 3,
            max_iters: 20_000,
            rel_tol: 1e-7,
            patience: 50,
            seed: 0,
            size_limit: 5000,
        }
    }
}

/// Outcome of one SDP solve: the Gram factor, objective, feasibility
/// numbers, and the rounded ±1 solution.
#[derive(Debug, Clone)]
pub struct SdpResult {
    /// Row-major factor V (gram = V·Vᵀ) of the solved program.
    pub gram_factor: Vec<f64>,
    /// Side length of the solved Gram matrix (n, l+1, or k).
    pub gram_dim: usize,
    pub rank: usize,
    /// Objective in the original n×n convention, Trace(Z·Υ).
    pub objective: f64,
    pub rounded: SyncSolution,
    /// max |Υ_ii − 1| over constrained diagonal entries.
    pub max_diag_violation: f64,
    /// max violation of the extra equality constraints (anchors/partition);
    /// zero by construction for the substitution-based formulations.
    pub max_constraint_violation: f64,
    pub solver_iterations: usize,
}

impl SdpResult {
    /// Entry (i, j) of the Gram matrix.
    pub fn gram_entry(&self, i: usize, j: usize) -> f64 {
        let r = self.rank;
        linalg::dot(
            &self.gram_factor[i * r..(i + 1) * r],
            &self.gram_factor[j * r..(j + 1) * r],
        )
    }
}

fn default_rank(n: usize) -> usize {
    (((2 * n) as f64).sqrt().ceil() as usize + 1).min(n.max(1))
}

/// out = C·V for a row-major n×r factor.
fn mat_mul(c: &SymSparse, v: &[f64], n: usize, r: usize, out: &mut [f64]) {
    out.fill(0.0);
    for i in 0..n {
        let d = c.diag(i);
        if d != 0.0 {
            let row = &v[i * r..(i + 1) * r];
            for (o, x) in out[i * r..(i + 1) * r].iter_mut().zip(row) {
                *o += d * x;
            }
        }
    }
    for i in 0..n {
        let mut acc = vec![0.0; r];
        for &(j, w) in c.neighbors(i) {
            let src = &v[j as usize * r..(j as usize + 1) * r];
            for (a, x) in acc.iter_mut().zip(src) {
                *a += w * x;
            }
        }
        for (o, a) in out[i * r..(i + 1) * r].iter_mut().zip(&acc) {
            *o += a;
        }
    }
}

fn renormalize_rows(v: &mut [f64], n: usize, r: usize) {
    for i in 0..n {
        let row = &mut v[i * r..(i + 1) * r];
        let nrm = linalg::norm(row);
        if nrm > 0.0 {
            for x in row.iter_mut() {
                *x /= nrm;
            }
        } else {
            row[0] = 1.0;
        }
    }
}

struct BmSolve {
    v: Vec<f64>,
    objective: f64,
    iterations: usize,
}

/// Projected gradient ascent with row renormalization and BB steps.
fn bm_maximize(c: &SymSparse, n: usize, rank: usize, opts: &SdpOptions) -> BmSolve {
    let mut best: Option<BmSolve> = None;
    let step_floor = 1e-14;
    let lipschitz = 2.0 * c.norm_bound().max(1e-12);

    for attempt in 0..opts.attempts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(attempt as u64));
        let mut v: Vec<f64> = (0..n * rank).map(|_| rng.gen::<f64>() - 0.5).collect();
        renormalize_rows(&mut v, n, rank);

        let mut cv = vec![0.0; n * rank];
        mat_mul(c, &v, n, rank, &mut cv);
        let mut obj = linalg::dot(&cv, &v);

        let mut gamma = 1.0 / lipschitz;
        let mut prev_v = v.clone();
        let mut prev_cv = cv.clone();
        let mut recent: Vec<f64> = vec![obj];
        let mut history: Vec<f64> = vec![obj];
        let mut iterations = 0;
        let mut cand = vec![0.0; n * rank];
        let mut cv_cand = vec![0.0; n * rank];

        for it in 0..opts.max_iters {
            iterations = it + 1;
            let f_ref = recent.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut accepted = false;
            for _ in 0..40 {
                cand.copy_from_slice(&v);
                for (x, g) in cand.iter_mut().zip(&cv) {
                    *x += 2.0 * gamma * *g;
                }
                renormalize_rows(&mut cand, n, rank);
                mat_mul(c, &cand, n, rank, &mut cv_cand);
                let obj_cand = linalg::dot(&cv_cand, &cand);
                if obj_cand >= f_ref - 1e-9 * f_ref.abs().max(1.0) {
                    std::mem::swap(&mut prev_v, &mut v);
                    std::mem::swap(&mut prev_cv, &mut cv);
                    v.copy_from_slice(&cand);
                    cv.copy_from_slice(&cv_cand);
                    obj = obj_cand;
                    accepted = true;
                    break;
                }
                gamma *= 0.5;
                if gamma < step_floor {
                    break;
                }
            }
            if !accepted {
                break;
            }
            recent.push(obj);
            if recent.len() > 10 {
                recent.remove(0);
            }
            history.push(obj);
            if history.len() > opts.patience {
                let past = history[history.len() - 1 - opts.patience];
                if (obj - past).abs() <= opts.rel_tol * obj.abs().max(1.0) {
                    break;
                }
            }
            // BB step from the accepted move
            let mut sy = 0.0;
            let mut ss = 0.0;
            for idx in 0..v.len() {
                let s = v[idx] - prev_v[idx];
                let y = 2.0 * (cv[idx] - prev_cv[idx]);
                sy += s * y;
                ss += s * s;
            }
            gamma = if sy.abs() > 1e-300 {
                (ss / sy.abs()).clamp(step_floor, 1e3 / lipschitz)
            } else {
                1.0 / lipschitz
            };
        }

        let better = match &best {
            Some(b) => obj > b.objective,
            None => true,
        };
        if better {
            best = Some(BmSolve { v: v.clone(), objective: obj, iterations });
        }
    }
    best.expect("at least one attempt runs")
}

/// First-order certificate at the factor point: λ_min(Diag(μ) − C) is ≥ 0
/// at a global maximizer. Returns max(0, −λ_min); 0 means certified.
fn dual_residual(c: &SymSparse, v: &[f64], n: usize, r: usize) -> f64 {
    let mut cv = vec![0.0; n * r];
    mat_mul(c, v, n, r, &mut cv);
    let mu: Vec<f64> = (0..n)
        .map(|i| linalg::dot(&cv[i * r..(i + 1) * r], &v[i * r..(i + 1) * r]))
        .collect();
    struct DualOp<'a> {
        c: &'a SymSparse,
        mu: &'a [f64],
    }
    impl SymOp for DualOp<'_> {
        fn dim(&self) -> usize {
            self.mu.len()
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            self.c.apply(x, y);
            for i in 0..x.len() {
                y[i] = self.mu[i] * x[i] - y[i];
            }
        }
    }
    let op = DualOp { c, mu: &mu };
    // λ_min(M) = bound − λ_max(bound·I − M)
    let bound = c.norm_bound() + mu.iter().fold(0.0_f64, |a, &b| a.max(b.abs())) + 1.0;
    let neg = linalg::ShiftedOp { inner: &op, alpha: -1.0, beta: bound };
    match linalg::lanczos_top(&neg, 1, 1e-6, 2000, 5) {
        Ok(out) => (out.values[0] - bound).max(0.0),
        Err(_) => f64::NAN,
    }
}

/// Rounds a Gram factor through the top eigenvector of V·Vᵀ.
fn round_factor(v: &[f64], n: usize, r: usize, seed: u64) -> Result<(Vec<f64>, f64)> {
    let gram = GramOp { factor: v, n, r };
    let out = linalg::lanczos_top(&gram, 1, 1e-9, (20 * n).max(400), seed)?;
    Ok((out.vectors[0].clone(), out.values[0]))
}

fn check_size(n: usize, opts: &SdpOptions) -> Result<()> {
    if n > opts.size_limit {
        return Err(Error::SizeLimit(format!(
            "SDP solver limited to n ≤ {}, got {n}",
            opts.size_limit
        )));
    }
    Ok(())
}

fn max_diag_violation(v: &[f64], n: usize, r: usize) -> f64 {
    (0..n)
        .map(|i| (linalg::dot(&v[i * r..(i + 1) * r], &v[i * r..(i + 1) * r]) - 1.0).abs())
        .fold(0.0, f64::max)
}

/// Plain relaxation: maximize Trace(ZΥ) over unit-diagonal PSD Υ, rounded
/// through the top eigenvector of Υ. The objective upper-bounds the
/// combinatorial optimum.
pub fn sdp_sync(g: &SignedGraph, opts: &SdpOptions) -> Result<SdpResult> {
    let n = g.n();
    check_size(n, opts)?;
    let c = SymSparse::from_graph(g);
    let rank = opts.rank.unwrap_or_else(|| default_rank(n));
    let solve = bm_maximize(&c, n, rank, opts);
    let diag_violation = max_diag_violation(&solve.v, n, rank);
    let (scores, lambda1) = round_factor(&solve.v, n, rank, opts.seed ^ 0x5d)?;

    let mut rounded = SyncSolution::from_scores(Method::Sdp, scores);
    rounded.set_diagnostic("iterations", solve.iterations as f64);
    rounded.set_diagnostic("objective", solve.objective);
    rounded.set_diagnostic("gram_lambda1", lambda1);
    rounded.set_diagnostic("dual_residual", dual_residual(&c, &solve.v, n, rank));
    Ok(SdpResult {
        gram_factor: solve.v,
        gram_dim: n,
        rank,
        objective: solve.objective,
        rounded,
        max_diag_violation: diag_violation,
        max_constraint_violation: 0.0,
        solver_iterations: solve.iterations,
    })
}

/// Sensor ordering plus the augmented (l+1)-node matrix shared by both
/// anchored relaxations: sensor-sensor weights plus one gauge node whose
/// edges carry the aggregated anchor contribution (U·a)_i per sensor.
/// Anchor equalities hold by substitution, hence exactly.
struct AnchoredProgram {
    sensors: Vec<usize>,
    c: SymSparse,
    aug_n: usize,
    /// Σ_{i≠j∈A} Z_ij a_i a_j, the anchor-anchor constant.
    anchor_constant: f64,
}

fn build_anchored_program(g: &SignedGraph, anchors: &AnchorSet) -> Result<AnchoredProgram> {
    anchors.check_range(g.n())?;
    if anchors.is_empty() {
        return Err(Error::Parameter("anchored SDP needs at least one anchor".into()));
    }
    let n = g.n();
    let mut sensor_local = vec![usize::MAX; n];
    let mut sensors = Vec::new();
    for i in 0..n {
        if anchors.value(i).is_none() {
            sensor_local[i] = sensors.len();
            sensors.push(i);
        }
    }
    let l = sensors.len();
    let aug_n = l + 1;
    let mut c = SymSparse::zeros(aug_n);
    let mut ua = vec![0.0; l];
    let mut anchor_constant = 0.0;
    for &(i, j, w) in g.edges() {
        let (i, j) = (i as usize, j as usize);
        match (anchors.value(i), anchors.value(j)) {
            (None, None) => c.add_sym(sensor_local[i], sensor_local[j], w),
            (Some(a), None) => ua[sensor_local[j]] += w * f64::from(a),
            (None, Some(a)) => ua[sensor_local[i]] += w * f64::from(a),
            (Some(ai), Some(aj)) => anchor_constant += 2.0 * w * f64::from(ai) * f64::from(aj),
        }
    }
    for (s, &v) in ua.iter().enumerate() {
        if v != 0.0 {
            c.add_sym(s, l, v);
        }
    }
    Ok(AnchoredProgram { sensors, c, aug_n, anchor_constant })
}

/// Full-length scores from sensor scores plus exact anchor values.
fn expand_with_anchors(
    n: usize,
    sensors: &[usize],
    sensor_scores: &[f64],
    anchors: &AnchorSet,
) -> Vec<f64> {
    let mut scores = vec![0.0; n];
    for (local, &node) in sensors.iter().enumerate() {
        scores[node] = sensor_scores[local];
    }
    for (node, a) in anchors.iter() {
        scores[node] = f64::from(a);
    }
    scores
}

/// Anchored relaxation with Υ_ij = a_i·a_j equalities, realized by
/// substituting all anchor rows with a shared gauge vector. Rounded through
/// the top eigenvector of the sensor-sensor block; the global sign is then
/// fixed by majority agreement with the anchor-implied signs from the
/// sensor-anchor block.
pub fn sdp_sync_anchored_y(
    g: &SignedGraph,
    anchors: &AnchorSet,
    opts: &SdpOptions,
) -> Result<SdpResult> {
    let prog = build_anchored_program(g, anchors)?;
    check_size(prog.aug_n, opts)?;
    let rank = opts.rank.unwrap_or_else(|| default_rank(prog.aug_n));
    let solve = bm_maximize(&prog.c, prog.aug_n, rank, opts);
    let l = prog.sensors.len();
    let diag_violation = max_diag_violation(&solve.v, prog.aug_n, rank);

    let (sensor_scores, lambda1) = if l > 0 {
        let (mut eigvec, lam) = round_factor(&solve.v[..l * rank], l, rank, opts.seed ^ 0xa7)?;
        let gauge = &solve.v[l * rank..(l + 1) * rank];
        let mut agree = 0usize;
        for (i, s) in eigvec.iter().enumerate() {
            let x = linalg::dot(&solve.v[i * rank..(i + 1) * rank], gauge);
            if crate::graph::sign_of(*s) == crate::graph::sign_of(x) {
                agree += 1;
            }
        }
        if 2 * agree < l {
            for s in eigvec.iter_mut() {
                *s = -*s;
            }
        }
        (eigvec, lam)
    } else {
        (Vec::new(), 1.0)
    };

    let scores = expand_with_anchors(g.n(), &prog.sensors, &sensor_scores, anchors);
    let objective = solve.objective + prog.anchor_constant;
    let mut rounded = SyncSolution::from_scores(Method::SdpY, scores);
    rounded.set_diagnostic("iterations", solve.iterations as f64);
    rounded.set_diagnostic("objective", objective);
    rounded.set_diagnostic("gram_lambda1", lambda1);
    Ok(SdpResult {
        gram_factor: solve.v,
        gram_dim: prog.aug_n,
        rank,
        objective,
        rounded,
        max_diag_violation: diag_violation,
        max_constraint_violation: 0.0,
        solver_iterations: solve.iterations,
    })
}

/// Reduced anchored relaxation over the (l+1)×(l+1) block matrix
/// [[Υ, x], [xᵀ, 1]] ⪰ 0 with unit diagonal: maximizes
/// Trace(SΥ) + 2xᵀUa and reads estimates directly from sign(x).
pub fn sdp_sync_anchored_xy(
    g: &SignedGraph,
    anchors: &AnchorSet,
    opts: &SdpOptions,
) -> Result<SdpResult> {
    let prog = build_anchored_program(g, anchors)?;
    if prog.sensors.is_empty() {
        return Err(Error::Parameter("anchored-XY needs at least one sensor".into()));
    }
    check_size(prog.aug_n, opts)?;
    let rank = opts.rank.unwrap_or_else(|| default_rank(prog.aug_n));
    let solve = bm_maximize(&prog.c, prog.aug_n, rank, opts);
    let l = prog.sensors.len();
    let diag_violation = max_diag_violation(&solve.v, prog.aug_n, rank);

    let gauge = &solve.v[l * rank..(l + 1) * rank];
    let x: Vec<f64> = (0..l)
        .map(|i| linalg::dot(&solve.v[i * rank..(i + 1) * rank], gauge))
        .collect();
    let scores = expand_with_anchors(g.n(), &prog.sensors, &x, anchors);
    let mut rounded = SyncSolution::from_scores(Method::SdpXy, scores);
    rounded.set_diagnostic("iterations", solve.iterations as f64);
    rounded.set_diagnostic("objective", solve.objective);
    Ok(SdpResult {
        gram_factor: solve.v,
        gram_dim: prog.aug_n,
        rank,
        objective: solve.objective,
        rounded,
        max_diag_violation: diag_violation,
        max_constraint_violation: 0.0,
        solver_iterations: solve.iterations,
    })
}

/// Partition-constrained relaxation via the exact k×k collapse on
/// block-summed weights Z′_uv = Σ_{i∈A_u, j∈A_v} Z_ij; the block solution
/// is expanded back to all n nodes.
pub fn sdp_ksync(g: &SignedGraph, partition: &Partition, opts: &SdpOptions) -> Result<SdpResult> {
    let n = g.n();
    if partition.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: partition.len() });
    }
    let k = partition.k();
    check_size(k, opts)?;

    let mut inter: std::collections::BTreeMap<(u32, u32), f64> = std::collections::BTreeMap::new();
    let mut intra_sum = 0.0;
    for &(i, j, w) in g.edges() {
        let u = partition.block_of(i as usize) as u32;
        let v = partition.block_of(j as usize) as u32;
        if u == v {
            intra_sum += w;
        } else {
            *inter.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
        }
    }
    let mut c = SymSparse::zeros(k);
    for (&(u, v), &w) in &inter {
        if w != 0.0 {
            c.add_sym(u as usize, v as usize, w);
        }
    }

    let rank = if k == 1 { 1 } else { opts.rank.unwrap_or_else(|| default_rank(k)) };
    let (factor, block_scores, bm_obj, iterations, diag_violation, lambda1) = if k == 1 {
        (vec![1.0], vec![1.0], 0.0, 0, 0.0, 1.0)
    } else {
        let solve = bm_maximize(&c, k, rank, opts);
        let dv = max_diag_violation(&solve.v, k, rank);
        let (scores, lam) = round_factor(&solve.v, k, rank, opts.seed ^ 0x9d)?;
        (solve.v, scores, solve.objective, solve.iterations, dv, lam)
    };

    // Intra-block edges are pinned to Υ=1 and contribute a constant.
    let full_objective = bm_obj + 2.0 * intra_sum;
    let scores: Vec<f64> = (0..n).map(|i| block_scores[partition.block_of(i)]).collect();
    let mut rounded = SyncSolution::from_scores(Method::SdpK, scores);
    rounded.set_diagnostic("iterations", iterations as f64);
    rounded.set_diagnostic("objective", full_objective);
    rounded.set_diagnostic("gram_lambda1", lambda1);
    rounded.set_diagnostic("k", k as f64);
    Ok(SdpResult {
        gram_factor: factor,
        gram_dim: k,
        rank,
        objective: full_objective,
        rounded,
        max_diag_violation: diag_violation,
        max_constraint_violation: 0.0,
        solver_iterations: iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{equal_partition_benchmark_ii, erdos_renyi_instance, NoiseSpec};
    use crate::graph::{error_rate, objective_value, GroundTruth};

    fn opts(seed: u64) -> SdpOptions {
        SdpOptions { seed, ..Default::default() }
    }

    fn brute_force_max(g: &SignedGraph) -> f64 {
        let n = g.n();
        assert!(n <= 16);
        let mut best = f64::NEG_INFINITY;
        for mask in 0..(1u32 << n) {
            let x: Vec<i8> = (0..n).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect();
            best = best.max(objective_value(g, &x).unwrap());
        }
        best
    }

    #[test]
    fn noiseless_sdp_is_tight_and_exact() {
        let spec = NoiseSpec::new(1.0, 0.0, 3).unwrap();
        let (g, truth) = erdos_renyi_instance(12, &spec, None).unwrap();
        let res = sdp_sync(&g, &opts(1)).unwrap();
        let m = g.num_edges() as f64;
        assert!((res.objective - 2.0 * m).abs() < 1e-3 * m, "objective {}", res.objective);
        assert_eq!(error_rate(&res.rounded, &truth).unwrap(), 0.0);
        assert!(res.max_diag_violation < 1e-9);
    }

    #[test]
    fn relaxation_bound_sandwich() {
        for seed in 0..12u64 {
            let spec = NoiseSpec::new(0.7, 0.3, seed).unwrap();
            let (g, _) = erdos_renyi_instance(9, &spec, None).unwrap();
            let res = sdp_sync(&g, &opts(seed)).unwrap();
            let brute = brute_force_max(&g);
            let rounded_obj = objective_value(&g, &res.rounded.estimates).unwrap();
            let tol = 1e-5 * brute.abs().max(1.0);
            assert!(
                res.objective >= brute - tol,
                "seed {seed}: sdp {} < brute {brute}",
                res.objective
            );
            assert!(
                rounded_obj <= brute + tol,
                "seed {seed}: rounded {rounded_obj} > brute {brute}"
            );
        }
    }

    #[test]
    fn anchored_y_fixes_global_sign() {
        let spec = NoiseSpec::new(1.0, 0.0, 5).unwrap();
        let (g, truth) = erdos_renyi_instance(12, &spec, None).unwrap();
        let anchors = AnchorSet::new(vec![(0, truth.values()[0])]).unwrap();
        let res = sdp_sync_anchored_y(&g, &anchors, &opts(2)).unwrap();
        // exact recovery with the correct global sign, not just up to sign
        assert_eq!(res.rounded.estimates, truth.values());
    }

    #[test]
    fn anchored_all_nodes_is_forced() {
        let spec = NoiseSpec::new(1.0, 0.2, 6).unwrap();
        let (g, truth) = erdos_renyi_instance(8, &spec, None).unwrap();
        let anchors =
            AnchorSet::new(truth.values().iter().enumerate().map(|(i, &z)| (i, z))).unwrap();
        let res = sdp_sync_anchored_y(&g, &anchors, &opts(3)).unwrap();
        assert_eq!(res.rounded.estimates, truth.values());
        assert!(sdp_sync_anchored_xy(&g, &anchors, &opts(3)).is_err());
    }

    #[test]
    fn anchored_xy_recovers_noiseless() {
        let spec = NoiseSpec::new(1.0, 0.0, 8).unwrap();
        let (g, truth) = erdos_renyi_instance(10, &spec, None).unwrap();
        let anchors = AnchorSet::new(vec![(3, truth.values()[3])]).unwrap();
        let res = sdp_sync_anchored_xy(&g, &anchors, &opts(4)).unwrap();
        assert_eq!(res.rounded.estimates, truth.values());
    }

    #[test]
    fn anchored_xy_single_sensor() {
        // h = n−1: one sensor with clean anchor edges recovers exactly.
        let g =
            SignedGraph::from_edges(3, vec![(0, 1, 1.0), (0, 2, -1.0), (1, 2, -1.0)]).unwrap();
        let anchors = AnchorSet::new(vec![(0, 1), (1, 1)]).unwrap();
        let res = sdp_sync_anchored_xy(&g, &anchors, &opts(5)).unwrap();
        assert_eq!(res.rounded.estimates, vec![1, 1, -1]);
    }

    #[test]
    fn ksync_single_block_is_constant() {
        let (g, truth, p) = equal_partition_benchmark_ii(24, 1, 0.5, 0.4, 3).unwrap();
        let res = sdp_ksync(&g, &p, &opts(6)).unwrap();
        assert_eq!(error_rate(&res.rounded, &truth).unwrap(), 0.0);
        assert!(res.rounded.estimates.iter().all(|&e| e == res.rounded.estimates[0]));
    }

    #[test]
    fn ksync_singletons_match_plain_sdp() {
        let spec = NoiseSpec::new(0.8, 0.2, 9).unwrap();
        let (g, _) = erdos_renyi_instance(10, &spec, None).unwrap();
        let singles = Partition::singletons(10);
        let plain = sdp_sync(&g, &opts(7)).unwrap();
        let collapsed = sdp_ksync(&g, &singles, &opts(7)).unwrap();
        assert!(
            (plain.objective - collapsed.objective).abs()
                < 1e-4 * plain.objective.abs().max(1.0)
        );
        assert_eq!(plain.rounded.estimates, collapsed.rounded.estimates);
    }

    #[test]
    fn ksync_blockwise_constant_and_noiseless_exact() {
        let (g, truth, p) = equal_partition_benchmark_ii(40, 8, 0.3, 0.0, 4).unwrap();
        let res = sdp_ksync(&g, &p, &opts(8)).unwrap();
        assert_eq!(error_rate(&res.rounded, &truth).unwrap(), 0.0);
        for b in 0..p.k() {
            let members = p.members(b);
            let first = res.rounded.estimates[members[0] as usize];
            assert!(members.iter().all(|&m| res.rounded.estimates[m as usize] == first));
        }
    }

    // Conjugating Z by diag(s) maps Υ* to diag(s)·Υ*·diag(s): the optimal
    // objective and the error rate are unchanged.
    #[test]
    fn gauge_invariance_of_objective_and_tau() {
        let spec = NoiseSpec::new(0.8, 0.2, 21).unwrap();
        let (g, truth) = erdos_renyi_instance(14, &spec, None).unwrap();
        let res = sdp_sync(&g, &opts(3)).unwrap();
        let tau = error_rate(&res.rounded, &truth).unwrap();

        let s: Vec<i8> = (0..14).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
        let edges: Vec<(usize, usize, f64)> = g
            .edges()
            .iter()
            .map(|&(i, j, w)| {
                (i as usize, j as usize, w * f64::from(s[i as usize] * s[j as usize]))
            })
            .collect();
        let g2 = SignedGraph::from_edges(14, edges).unwrap();
        let z2: Vec<i8> = truth.values().iter().zip(&s).map(|(&z, &si)| z * si).collect();
        let t2 = GroundTruth::new(z2).unwrap();
        let res2 = sdp_sync(&g2, &opts(3)).unwrap();
        assert!(
            (res.objective - res2.objective).abs() < 1e-5 * res.objective.abs().max(1.0),
            "objective moved under conjugation: {} vs {}",
            res.objective,
            res2.objective
        );
        assert_eq!(tau, error_rate(&res2.rounded, &t2).unwrap());
    }

    #[test]
    fn size_limit_enforced() {
        let spec = NoiseSpec::new(1.0, 0.0, 1).unwrap();
        let (g, _) = erdos_renyi_instance(12, &spec, None).unwrap();
        let small = SdpOptions { size_limit: 5, ..Default::default() };
        assert!(matches!(sdp_sync(&g, &small), Err(Error::SizeLimit(_))));
    }
}
