//! Acceptance suite: the ten release criteria, one test per criterion,
//! each printing a PASS line with its measured numbers. Run with
//! `cargo test -p z2sync-cli --test acceptance -- --nocapture`.

use std::path::Path;
use std::process::Command;

use z2sync::anchored::{build_anchored_system, qcqp_sync_degree, qcqp_sync_identity};
use z2sync::generators::{
    complete_with_regular_bad, congress_model_i, derive_seed, equal_partition_benchmark_ii,
    erdos_renyi_instance, preferential_attachment_instance, CongressModelSpec, NoiseSpec,
};
use z2sync::ksync::{run_ksync_suite, KSYNC_METHODS};
use z2sync::mps::{mps_sync, MpsOptions};
use z2sync::multiplex::{misclassification_report, MultiplexVoting};
use z2sync::rmt::{correlation_bound, heatmap_sweep, rank_one_decomposition_check, threshold};
use z2sync::sdp::{sdp_ksync, sdp_sync, sdp_sync_anchored_xy, sdp_sync_anchored_y, SdpOptions};
use z2sync::spectral::{eig_sync, laplacian_sync};
use z2sync::{
    error_rate, objective_value, AnchorSet, GroundTruth, Method, Partition, SignedGraph,
    SyncSolution,
};

fn median(mut v: Vec<f64>) -> f64 {
    assert!(!v.is_empty());
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn sdp_opts(seed: u64) -> SdpOptions {
    SdpOptions { seed, ..Default::default() }
}

fn anchors_from_truth(truth: &GroundTruth, idx: impl IntoIterator<Item = usize>) -> AnchorSet {
    AnchorSet::new(idx.into_iter().map(|i| (i, truth.values()[i]))).unwrap()
}

/// Deterministic anchor pick for experiment-style sweeps.
fn shuffled_anchors(truth: &GroundTruth, h: usize, seed: u64) -> AnchorSet {
    use rand::seq::SliceRandom;
    use rand_chacha::rand_core::SeedableRng;
    let mut order: Vec<usize> = (0..truth.len()).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    anchors_from_truth(truth, order.into_iter().take(h))
}

fn run_anchored(method: Method, g: &SignedGraph, anchors: &AnchorSet, seed: u64) -> SyncSolution {
    match method {
        Method::QcqpIdentity => {
            qcqp_sync_identity(&build_anchored_system(g, anchors).unwrap()).unwrap()
        }
        Method::QcqpDegree => {
            qcqp_sync_degree(&build_anchored_system(g, anchors).unwrap()).unwrap()
        }
        Method::SdpY => sdp_sync_anchored_y(g, anchors, &sdp_opts(seed)).unwrap().rounded,
        Method::SdpXy => sdp_sync_anchored_xy(g, anchors, &sdp_opts(seed)).unwrap().rounded,
        Method::Mps => mps_sync(g, anchors, &MpsOptions::default()).unwrap(),
        other => panic!("{other} is not anchored"),
    }
}

// -------------------------------------------------------------------------
// 1. Exact noiseless recovery across every generator and method.

#[test]
fn criterion_01_noiseless_recovery() {
    let mut checked = 0usize;
    for idx in 0..50u64 {
        // round-robin over the five generators, connected instances only
        let family = idx % 5;
        let mut seed = derive_seed(1000, &[idx]);
        let (g, truth, partition) = loop {
            let out = match family {
                0 => {
                    let spec = NoiseSpec::new(0.6, 0.0, seed).unwrap();
                    let (g, t) = erdos_renyi_instance(30, &spec, None).unwrap();
                    (g, t, None)
                }
                1 => {
                    let (g, t) = complete_with_regular_bad(24, 0, seed).unwrap();
                    (g, t, None)
                }
                2 => {
                    let (g, t) = preferential_attachment_instance(40, 4, 0.0, seed).unwrap();
                    (g, t, None)
                }
                3 => {
                    let spec = CongressModelSpec {
                        congresses: 4,
                        senators: 8,
                        gamma: 0.7,
                        alpha: 0.6,
                        eta: 0.0,
                        seed,
                    };
                    let (g, t, p) = congress_model_i(&spec).unwrap();
                    (g, t, Some(p))
                }
                _ => {
                    let (g, t, p) = equal_partition_benchmark_ii(40, 8, 0.3, 0.0, seed).unwrap();
                    (g, t, Some(p))
                }
            };
            if out.0.components().len() == 1 {
                break out;
            }
            seed = seed.wrapping_add(1);
        };

        let mut taus: Vec<(String, f64)> = Vec::new();
        taus.push(("eig".into(), error_rate(&eig_sync(&g, true).unwrap(), &truth).unwrap()));
        taus.push((
            "eig-raw".into(),
            error_rate(&eig_sync(&g, false).unwrap(), &truth).unwrap(),
        ));
        taus.push((
            "laplacian".into(),
            error_rate(&laplacian_sync(&g).unwrap(), &truth).unwrap(),
        ));
        taus.push((
            "sdp".into(),
            error_rate(&sdp_sync(&g, &sdp_opts(seed)).unwrap().rounded, &truth).unwrap(),
        ));
        taus.push((
            "mps".into(),
            error_rate(
                &mps_sync(&g, &AnchorSet::empty(), &MpsOptions::default()).unwrap(),
                &truth,
            )
            .unwrap(),
        ));
        let anchors = anchors_from_truth(&truth, [0]);
        for m in [Method::QcqpIdentity, Method::QcqpDegree, Method::SdpY, Method::SdpXy] {
            taus.push((
                m.to_string(),
                error_rate(&run_anchored(m, &g, &anchors, seed), &truth).unwrap(),
            ));
        }
        if let Some(p) = &partition {
            for row in run_ksync_suite(&g, p, &truth, &KSYNC_METHODS, &[seed], 0.0).unwrap() {
                taus.push((row.method.to_string(), row.tau));
            }
        }
        for (name, tau) in taus {
            assert_eq!(tau, 0.0, "instance {idx} ({family}): {name} tau = {tau}");
            checked += 1;
        }
    }
    println!("criterion 1 PASS: tau = 0 on {checked} (instance, method) pairs over 50 noiseless instances");
}

// -------------------------------------------------------------------------
// 2. Brute-force oracle equivalence on n ≤ 12.

fn brute_force_constrained(
    g: &SignedGraph,
    fixed: &AnchorSet,
) -> (f64, f64) {
    // (max over all x, max over x respecting the fixed values)
    let n = g.n();
    let mut best_all = f64::NEG_INFINITY;
    let mut best_fixed = f64::NEG_INFINITY;
    for mask in 0..(1u32 << n) {
        let x: Vec<i8> = (0..n).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect();
        let obj = objective_value(g, &x).unwrap();
        best_all = best_all.max(obj);
        if fixed.iter().all(|(i, a)| x[i] == a) {
            best_fixed = best_fixed.max(obj);
        }
    }
    (best_all, best_fixed)
}

#[test]
fn criterion_02_brute_force_oracles() {
    let mut max_constraint_residual = 0.0_f64;
    for trial in 0..200u64 {
        let seed = derive_seed(2000, &[trial]);
        let n = 6 + (trial % 7) as usize; // 6..12
        let alpha = 0.5 + 0.5 * ((trial % 4) as f64 / 3.0);
        let eta = 0.1 + 0.2 * ((trial % 5) as f64 / 4.0);
        let spec = NoiseSpec::new(alpha, eta, seed).unwrap();
        let (g, truth) = erdos_renyi_instance(n, &spec, None).unwrap();
        let tol = |b: f64| 1e-5 * b.abs().max(1.0);

        // (a) plain SDP sandwich
        let res = sdp_sync(&g, &sdp_opts(seed)).unwrap();
        let (brute, _) = brute_force_constrained(&g, &AnchorSet::empty());
        let rounded = objective_value(&g, &res.rounded.estimates).unwrap();
        assert!(res.objective >= brute - tol(brute), "trial {trial}: plain sdp");
        assert!(rounded <= brute + tol(brute), "trial {trial}: plain rounding");

        // anchored variants
        let h = 1 + (trial % 3) as usize;
        let anchors = anchors_from_truth(&truth, 0..h);
        if g.components().len() == 1 {
            let (_, brute_anch) = brute_force_constrained(&g, &anchors);
            let res_y = sdp_sync_anchored_y(&g, &anchors, &sdp_opts(seed)).unwrap();
            let rounded_y = objective_value(&g, &res_y.rounded.estimates).unwrap();
            assert!(
                res_y.objective >= brute_anch - tol(brute_anch),
                "trial {trial}: sdp-y {} < {brute_anch}",
                res_y.objective
            );
            assert!(rounded_y <= brute_anch + tol(brute_anch), "trial {trial}: sdp-y rounding");

            // XY objective excludes the anchor-anchor constant
            let mut anchor_const = 0.0;
            for &(i, j, w) in g.edges() {
                if let (Some(ai), Some(aj)) =
                    (anchors.value(i as usize), anchors.value(j as usize))
                {
                    anchor_const += 2.0 * w * f64::from(ai) * f64::from(aj);
                }
            }
            let res_xy = sdp_sync_anchored_xy(&g, &anchors, &sdp_opts(seed)).unwrap();
            let target = brute_anch - anchor_const;
            let rounded_xy =
                objective_value(&g, &res_xy.rounded.estimates).unwrap() - anchor_const;
            assert!(
                res_xy.objective >= target - tol(target),
                "trial {trial}: sdp-xy {} < {target}",
                res_xy.objective
            );
            assert!(rounded_xy <= target + tol(target), "trial {trial}: sdp-xy rounding");

            // (b) QCQP constraint residuals
            let sys = build_anchored_system(&g, &anchors).unwrap();
            if sys.ua.iter().any(|&v| v != 0.0) {
                let qi = qcqp_sync_identity(&sys).unwrap();
                let qd = qcqp_sync_degree(&sys).unwrap();
                for q in [&qi, &qd] {
                    let r = q.diagnostics["constraint_residual"];
                    max_constraint_residual = max_constraint_residual.max(r);
                    assert!(r < 1e-6, "trial {trial}: residual {r}");
                }
            }
        }

        // k-SYNC SDP sandwich over blockwise-constant assignments
        let k = 2 + (trial % 3) as usize;
        let block_of: Vec<u32> = (0..n).map(|i| (i % k) as u32).collect();
        let partition = Partition::new(block_of, k).unwrap();
        let res_k = sdp_ksync(&g, &partition, &sdp_opts(seed)).unwrap();
        let mut brute_k = f64::NEG_INFINITY;
        for mask in 0..(1u32 << k) {
            let x: Vec<i8> = (0..n)
                .map(|i| if mask >> partition.block_of(i) & 1 == 1 { 1 } else { -1 })
                .collect();
            brute_k = brute_k.max(objective_value(&g, &x).unwrap());
        }
        let rounded_k = objective_value(&g, &res_k.rounded.estimates).unwrap();
        assert!(res_k.objective >= brute_k - tol(brute_k), "trial {trial}: sdp-k");
        assert!(rounded_k <= brute_k + tol(brute_k), "trial {trial}: sdp-k rounding");
    }

    // (c) K4 with one flipped edge: unique optimum, recovered exactly.
    let z = [1i8, 1, -1, 1];
    let truth = GroundTruth::new(z.to_vec()).unwrap();
    for flip in 0..6usize {
        let mut idx = 0;
        let mut edges = Vec::new();
        for i in 0..4usize {
            for j in (i + 1)..4 {
                let mut w = f64::from(z[i] * z[j]);
                if idx == flip {
                    w = -w;
                }
                idx += 1;
                edges.push((i, j, w));
            }
        }
        let g = SignedGraph::from_edges(4, edges).unwrap();
        let anchors = anchors_from_truth(&truth, [0]);
        let sys = build_anchored_system(&g, &anchors).unwrap();
        let all: Vec<(String, SyncSolution)> = vec![
            ("eig".into(), eig_sync(&g, true).unwrap()),
            ("eig-raw".into(), eig_sync(&g, false).unwrap()),
            ("laplacian".into(), laplacian_sync(&g).unwrap()),
            ("sdp".into(), sdp_sync(&g, &sdp_opts(flip as u64)).unwrap().rounded),
            (
                "mps".into(),
                mps_sync(&g, &AnchorSet::empty(), &MpsOptions::default()).unwrap(),
            ),
            ("qcqp-i".into(), qcqp_sync_identity(&sys).unwrap()),
            ("qcqp-d".into(), qcqp_sync_degree(&sys).unwrap()),
            (
                "sdp-y".into(),
                sdp_sync_anchored_y(&g, &anchors, &sdp_opts(9)).unwrap().rounded,
            ),
            (
                "sdp-xy".into(),
                sdp_sync_anchored_xy(&g, &anchors, &sdp_opts(9)).unwrap().rounded,
            ),
        ];
        for (name, sol) in all {
            assert_eq!(
                error_rate(&sol, &truth).unwrap(),
                0.0,
                "{name} missed the K4 flip {flip}"
            );
        }
    }
    println!(
        "criterion 2 PASS: 200 sandwiches held; max QCQP constraint residual {max_constraint_residual:.2e}; K4 exact for all methods"
    );
}

// -------------------------------------------------------------------------
// 3. Complete-graph noise curve at n = 1000.

#[test]
fn criterion_03_complete_graph_noise_curve() {
    // The reference targets pair each p with a published error level. The
    // first two pairings are not attainable by any correct eigenvector
    // implementation (verified against a dense eigensolve and the
    // rank-one-perturbation overlap law): at p = 0.55, n = 1000, α = 1 the
    // planted eigenvalue sits 3.2σ above the bulk and τ ≈ 0.002. The
    // measured curve matches the reference τ sequence shifted by one
    // position, i.e. the reference pairing itself is internally
    // inconsistent. This test asserts the stated pairing and reports the
    // honest per-point verdicts plus the re-aligned match.
    let targets = [(0.55, 0.12), (0.525, 0.44), (0.514, 0.44), (0.50, 0.49)];
    let mut medians = Vec::new();
    for (pi, &(p, _)) in targets.iter().enumerate() {
        let taus: Vec<f64> = (0..10u64)
            .map(|trial| {
                let seed = derive_seed(3000, &[pi as u64, trial]);
                let spec = NoiseSpec::new(1.0, 1.0 - p, seed).unwrap();
                let (g, truth) = erdos_renyi_instance(1000, &spec, None).unwrap();
                let sol = eig_sync(&g, true).unwrap();
                error_rate(&sol, &truth).unwrap()
            })
            .collect();
        medians.push(median(taus));
    }

    let mut failures = Vec::new();
    for (&(p, expected), &med) in targets.iter().zip(&medians) {
        println!(
            "criterion 3 point: p = {p}: median tau {med:.3}, stated target {expected} ± 0.08 → {}",
            if (med - expected).abs() <= 0.08 { "ok" } else { "FAIL" }
        );
        if (med - expected).abs() > 0.08 {
            failures.push(format!("p={p}: {med:.3} vs {expected}"));
        }
    }
    // Off-by-one realignment: τ targets {0.12, 0.44, 0.49} land on
    // p = {0.525, 0.514, 0.50}.
    let shifted = [(1usize, 0.12), (2, 0.44), (3, 0.49)];
    let aligned = shifted
        .iter()
        .all(|&(idx, t)| (medians[idx] - t).abs() <= 0.08);
    println!(
        "criterion 3 note: reference values re-aligned one step match: {} (medians {:?})",
        if aligned { "yes" } else { "no" },
        medians.iter().map(|m| (m * 1e3).round() / 1e3).collect::<Vec<_>>()
    );

    assert!(
        failures.is_empty(),
        "criterion 3 FAIL (the stated pairing is unattainable; see the printed analysis): {}",
        failures.join("; ")
    );
    println!("criterion 3 PASS: all four stated points within ±0.08");
}

// -------------------------------------------------------------------------
// 4. Threshold curve on the (α, η) heatmap, raw vs normalized.

#[test]
fn criterion_04_threshold_heatmap() {
    let n = 200;
    let trials = 20;
    let alpha_grid: Vec<f64> = (1..=20).map(|i| i as f64 / 20.0).collect();
    let eta_grid: Vec<f64> = (0..20).map(|i| 0.5 * i as f64 / 19.0).collect();
    let norm = heatmap_sweep(n, &alpha_grid, &eta_grid, trials, true, 4000).unwrap();
    let raw = heatmap_sweep(n, &alpha_grid, &eta_grid, trials, false, 4000).unwrap();

    let mut above = 0usize;
    let mut below = 0usize;
    for cell in &norm {
        assert!(!cell.failed, "cell α={} η={} failed", cell.alpha, cell.eta);
        let p = 1.0 - cell.eta;
        let p_star = threshold(n, cell.alpha).unwrap();
        if p >= p_star + 0.05 {
            above += 1;
            assert!(
                cell.tau_median < 0.25,
                "recoverable cell α={} η={} has tau {}",
                cell.alpha,
                cell.eta,
                cell.tau_median
            );
        }
        if p <= 0.5 + 0.2 * (p_star - 0.5) {
            below += 1;
            assert!(
                cell.tau_median > 0.4,
                "noise-dominated cell α={} η={} has tau {}",
                cell.alpha,
                cell.eta,
                cell.tau_median
            );
        }
    }
    assert!(above > 50 && below > 20, "grid coverage: {above} above, {below} below");

    // same instances, two operators: recovery agrees, gaps do not
    let mut max_tau_gap = 0.0_f64;
    for (a, b) in norm.iter().zip(&raw) {
        max_tau_gap = max_tau_gap.max((a.tau_median - b.tau_median).abs());
    }
    assert!(max_tau_gap <= 0.05, "tau grids diverge by {max_tau_gap}");

    let gx: Vec<f64> = norm.iter().map(|c| c.gap_median).collect();
    let gy: Vec<f64> = raw.iter().map(|c| c.gap_median).collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mx, my) = (mean(&gx), mean(&gy));
    let cov: f64 = gx.iter().zip(&gy).map(|(x, y)| (x - mx) * (y - my)).sum();
    let vx: f64 = gx.iter().map(|x| (x - mx).powi(2)).sum();
    let vy: f64 = gy.iter().map(|y| (y - my).powi(2)).sum();
    let corr = cov / (vx * vy).sqrt();
    assert!(corr < 0.9, "gap grids too similar: correlation {corr}");

    println!(
        "criterion 4 PASS: {above} cells above threshold all recovered, {below} below all failed; max tau gap {max_tau_gap:.3}; gap-grid correlation {corr:.3}"
    );
}

// -------------------------------------------------------------------------
// 5. Residual variance formula and the correlation bound.

#[test]
fn criterion_05_variance_and_correlation() {
    let n = 1000;
    let mut summary = String::new();
    for (idx, &alpha) in [0.3, 1.0].iter().enumerate() {
        for (jdx, &p) in [0.0, 0.75, 1.0].iter().enumerate() {
            let seed = derive_seed(5000, &[idx as u64, jdx as u64]);
            let spec = NoiseSpec::new(alpha, 1.0 - p, seed).unwrap();
            let (g, truth) = erdos_renyi_instance(n, &spec, None).unwrap();
            let stats = rank_one_decomposition_check(&g, &truth, alpha, p).unwrap();
            if alpha == 1.0 && (p == 0.0 || p == 1.0) {
                assert_eq!(stats.empirical_variance, 0.0, "α=1, p={p} must vanish");
                assert_eq!(stats.analytic_variance, 0.0);
            } else {
                let rel =
                    (stats.empirical_variance - stats.analytic_variance).abs()
                        / stats.analytic_variance;
                assert!(
                    rel < 0.05,
                    "α={alpha} p={p}: empirical {} vs analytic {} ({rel:.3})",
                    stats.empirical_variance,
                    stats.analytic_variance
                );
                if p == 0.0 || p == 1.0 {
                    assert!(
                        (stats.analytic_variance - alpha * (1.0 - alpha)).abs() < 1e-12,
                        "extreme p variance must be α(1−α)"
                    );
                }
            }
            if p > 0.5 {
                let cb = correlation_bound(&g, &truth, alpha, p).unwrap();
                assert!(cb.applicable);
                assert!(
                    cb.measured >= cb.bound - 1e-6,
                    "α={alpha} p={p}: correlation {} < bound {}",
                    cb.measured,
                    cb.bound
                );
                summary.push_str(&format!(
                    " α={alpha},p={p}: corr {:.3} ≥ bound {:.3};",
                    cb.measured, cb.bound
                ));
            }
        }
    }
    println!("criterion 5 PASS: variance formula within 5% on all six points;{summary}");
}

// -------------------------------------------------------------------------
// 6. MPS vs eigenvector orderings on K100.

#[test]
fn criterion_06_mps_orderings() {
    // (a) regular bad subgraph at d = 50, as stated. With realized flips
    // ≈ nd/2 and per-node bad degree ≈ d, the belief fixed point follows
    // each node's anchor edge, so MPS lands at exactly d/n = 0.500 while
    // the eigenvector method sits at chance (≈ 0.48). The stated
    // inequality is unattainable at this point; the message-passing
    // advantage the comparison is after appears clearly at d = 45, which
    // is printed as context.
    let mut mps_by_d = std::collections::BTreeMap::new();
    let mut eig_by_d = std::collections::BTreeMap::new();
    for d in [45usize, 50] {
        let mut mps_taus = Vec::new();
        let mut eig_taus = Vec::new();
        for trial in 0..100u64 {
            let seed = derive_seed(6000, &[trial]).wrapping_add(d as u64 * 0x1000);
            let (g, truth) = complete_with_regular_bad(100, d, seed).unwrap();
            let anchors = shuffled_anchors(&truth, 1, derive_seed(seed, &[7]));
            let mps = mps_sync(&g, &anchors, &MpsOptions::default()).unwrap();
            mps_taus.push(error_rate(&mps, &truth).unwrap());
            eig_taus.push(error_rate(&eig_sync(&g, true).unwrap(), &truth).unwrap());
        }
        mps_by_d.insert(d, median(mps_taus));
        eig_by_d.insert(d, median(eig_taus));
    }
    println!(
        "criterion 6 context: d=45 medians MPS {:.3} vs EIG {:.3} (message passing ahead in the high-noise regime)",
        mps_by_d[&45], eig_by_d[&45]
    );
    let stated_holds = mps_by_d[&50] <= eig_by_d[&50];
    println!(
        "criterion 6 point: d=50 medians MPS {:.3} vs EIG {:.3} → {}",
        mps_by_d[&50],
        eig_by_d[&50],
        if stated_holds { "ok" } else { "FAIL (see the context line)" }
    );

    // (b) Erdős–Rényi bad subgraph: MPS never meaningfully better.
    let mut worst_margin = f64::NEG_INFINITY;
    for (di, d) in (3..=10).map(|x| x * 5).enumerate() {
        let mut mps_taus = Vec::new();
        let mut eig_taus = Vec::new();
        for trial in 0..100u64 {
            let seed = derive_seed(6100, &[di as u64, trial]);
            let eta = d as f64 / 99.0;
            let spec = NoiseSpec::new(1.0, eta, seed).unwrap();
            let (g, truth) = erdos_renyi_instance(100, &spec, None).unwrap();
            let anchors = shuffled_anchors(&truth, 1, derive_seed(seed, &[7]));
            let mps = mps_sync(&g, &anchors, &MpsOptions::default()).unwrap();
            mps_taus.push(error_rate(&mps, &truth).unwrap());
            eig_taus.push(error_rate(&eig_sync(&g, true).unwrap(), &truth).unwrap());
        }
        let margin = median(eig_taus) - median(mps_taus);
        worst_margin = worst_margin.max(margin);
        assert!(
            margin <= 0.02,
            "ER bad d={d}: MPS beats EIG by {margin}, contradicting the expected ordering"
        );
    }
    println!(
        "criterion 6 part (b) ok: ER-bad max MPS advantage {worst_margin:+.3} ≤ 0.02 at every d"
    );
    assert!(
        stated_holds,
        "criterion 6 FAIL: part (a) as stated, d=50 medians MPS {:.3} > EIG {:.3}; the context line shows the high-noise advantage at d=45",
        mps_by_d[&50], eig_by_d[&50]
    );
    println!("criterion 6 PASS: both orderings hold");
}

// -------------------------------------------------------------------------
// 7. Anchored five-method parity.

#[test]
fn criterion_07_anchored_parity() {
    let methods = [
        Method::QcqpIdentity,
        Method::QcqpDegree,
        Method::SdpY,
        Method::SdpXy,
        Method::Mps,
    ];
    let eta_grid: Vec<f64> = (0..=7).map(|i| 0.05 * i as f64).collect();
    let mut worst = 0.0_f64;
    for (hi, &h) in [15usize, 30, 50].iter().enumerate() {
        for (ei, &eta) in eta_grid.iter().enumerate() {
            let mut taus: Vec<Vec<f64>> = vec![Vec::new(); methods.len()];
            for trial in 0..50u64 {
                let seed = derive_seed(7000, &[hi as u64, ei as u64, trial]);
                let spec = NoiseSpec::new(0.2, eta, seed).unwrap();
                let (g, truth) = erdos_renyi_instance(75, &spec, None).unwrap();
                let anchors = shuffled_anchors(&truth, h, derive_seed(seed, &[7]));
                for (mi, &method) in methods.iter().enumerate() {
                    let sol = run_anchored(method, &g, &anchors, seed);
                    taus[mi].push(error_rate(&sol, &truth).unwrap());
                }
            }
            let medians: Vec<f64> = taus.into_iter().map(median).collect();
            for a in 0..methods.len() {
                for b in (a + 1)..methods.len() {
                    let gap = (medians[a] - medians[b]).abs();
                    worst = worst.max(gap);
                    assert!(
                        gap <= 0.08,
                        "h={h} η={eta}: {} vs {} medians differ by {gap:.3}",
                        methods[a],
                        methods[b]
                    );
                }
            }
        }
    }
    println!("criterion 7 PASS: max pairwise median-tau gap {worst:.3} ≤ 0.08 over h ∈ {{15,30,50}}, η ≤ 0.35");
}

// -------------------------------------------------------------------------
// 8. k-SYNC orderings.

#[test]
fn criterion_08_ksync_orderings() {
    // benchmark II, k = 5: everything is easy below η = 0.3
    let eta_small: Vec<f64> = (1..=6).map(|i| 0.05 * i as f64).collect();
    for (ei, &eta) in eta_small.iter().enumerate() {
        let mut taus: std::collections::BTreeMap<Method, Vec<f64>> = Default::default();
        for trial in 0..25u64 {
            let seed = derive_seed(8000, &[ei as u64, trial]);
            let (g, truth, p) = equal_partition_benchmark_ii(200, 5, 0.1, eta, seed).unwrap();
            for row in run_ksync_suite(&g, &p, &truth, &KSYNC_METHODS, &[seed], eta).unwrap() {
                taus.entry(row.method).or_default().push(row.tau);
            }
        }
        for (method, t) in taus {
            let med = median(t);
            assert!(med < 0.05, "k=5 η={eta}: {method} median tau {med}");
        }
    }

    // benchmark II, k = 100, η = 0.4: SDP best, MPS worst
    let mut taus: std::collections::BTreeMap<Method, Vec<f64>> = Default::default();
    for trial in 0..25u64 {
        let seed = derive_seed(8100, &[trial]);
        let (g, truth, p) = equal_partition_benchmark_ii(200, 100, 0.1, 0.4, seed).unwrap();
        for row in run_ksync_suite(&g, &p, &truth, &KSYNC_METHODS, &[seed], 0.4).unwrap() {
            taus.entry(row.method).or_default().push(row.tau);
        }
    }
    let med: std::collections::BTreeMap<Method, f64> =
        taus.into_iter().map(|(m, t)| (m, median(t))).collect();
    for (&m, &tau) in &med {
        if m != Method::SdpK {
            assert!(
                med[&Method::SdpK] <= tau,
                "SDP-k median {} not lowest vs {m} {tau}",
                med[&Method::SdpK]
            );
        }
        if m != Method::MpsK {
            assert!(
                med[&Method::MpsK] >= tau,
                "MPS-k median {} not highest vs {m} {tau}",
                med[&Method::MpsK]
            );
        }
    }
    let k100 = format!(
        "k=100 η=0.4 medians: eig {:.3}, mveig {:.3}, part {:.3}, sdp {:.3}, mps {:.3}",
        med[&Method::EigK], med[&Method::MveigK], med[&Method::PartK], med[&Method::SdpK],
        med[&Method::MpsK]
    );

    // rolling-membership model: SDP-k within 0.02 of best at every point
    let eta_grid: Vec<f64> = (0..=5).map(|i| 0.1 * i as f64).collect();
    for (gi, &gamma) in [0.5, 0.75, 0.95].iter().enumerate() {
        for (ei, &eta) in eta_grid.iter().enumerate() {
            let mut taus: std::collections::BTreeMap<Method, Vec<f64>> = Default::default();
            for trial in 0..25u64 {
                let seed = derive_seed(8200, &[gi as u64, ei as u64, trial]);
                let spec = CongressModelSpec {
                    congresses: 10,
                    senators: 20,
                    gamma,
                    alpha: 0.5,
                    eta,
                    seed,
                };
                let (g, truth, p) = congress_model_i(&spec).unwrap();
                for row in run_ksync_suite(&g, &p, &truth, &KSYNC_METHODS, &[seed], eta).unwrap()
                {
                    taus.entry(row.method).or_default().push(row.tau);
                }
            }
            let sdp_med = median(taus[&Method::SdpK].clone());
            for (m, t) in taus {
                let other = median(t);
                assert!(
                    sdp_med <= other + 0.02,
                    "γ={gamma} η={eta}: SDP-k median {sdp_med:.3} vs {m} {other:.3}"
                );
            }
        }
    }
    println!("criterion 8 PASS: k=5 easy regime clean; {k100}; SDP-k never beaten by more than 0.02 on the rolling model");
}

// -------------------------------------------------------------------------
// 9. Multiplex pipeline on the toy fixture.

#[test]
fn criterion_09_multiplex_fixture() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures/toy_congress/multiplex.json");
    let (voting, manifest) = z2sync::io::load_multiplex(&manifest).unwrap();
    assert_eq!(voting.num_layers(), 3);
    assert_eq!(voting.entity_partition().k(), 12);

    let (graph, partition, dropped) =
        voting.sign_transform(manifest.transform_kind().unwrap()).unwrap();
    assert_eq!(dropped, 0);
    assert_eq!(partition.k(), 12);
    let sol = eig_sync(&graph, true).unwrap();
    let truth = voting.labels_as_truth().unwrap();
    assert_eq!(error_rate(&sol, &truth).unwrap(), 0.0, "fixture must recover all labels");

    // hand count: the two planted wrong measurements do not flip anyone
    let report = misclassification_report(&sol, &voting).unwrap();
    assert_eq!(report.missed_plus, vec![0, 0, 0]);
    assert_eq!(report.missed_minus, vec![0, 0, 0]);
    assert_eq!(report.ignored, 0);
    assert_eq!(report.accuracy_plus, 1.0);
    assert_eq!(report.accuracy_minus, 1.0);

    // the weaker coupling weight also recovers everything on this fixture
    let weak = {
        let mut layers = Vec::new();
        let mut identity = Vec::new();
        let mut labels = Vec::new();
        for t in 0..voting.num_layers() {
            let s = voting.layer_sizes()[t];
            let mut m = vec![0.0; s * s];
            for i in 0..s {
                for j in 0..s {
                    m[i * s + j] = voting.entry(t, i, j);
                }
            }
            layers.push(m);
            identity.push(
                (0..s)
                    .map(|i| {
                        let p = voting.entity_partition();
                        p.block_of(voting.global_index(t, i)) as u32
                    })
                    .collect::<Vec<u32>>(),
            );
            labels.push((0..s).map(|i| voting.label(t, i)).collect::<Vec<i8>>());
        }
        MultiplexVoting::new(layers, identity, 0.1, Some(labels)).unwrap()
    };
    let (weak_graph, _, _) = weak.sign_transform(manifest.transform_kind().unwrap()).unwrap();
    let weak_sol = eig_sync(&weak_graph, true).unwrap();
    assert_eq!(
        error_rate(&weak_sol, &truth).unwrap(),
        0.0,
        "epsilon = 0.1 coupling must still recover the fixture"
    );

    // categorical coupling: an entity on q = 4 layers gets C(4,2) = 6 pairs
    let layer = vec![1.0, 0.8, 0.8, 1.0];
    let layers = vec![layer.clone(), layer.clone(), layer.clone(), layer];
    let identity = vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![0, 4]];
    let m4 = MultiplexVoting::new(layers, identity, 1.0, None).unwrap();
    let w = m4.assemble_supra().unwrap();
    let cross = w
        .edges()
        .iter()
        .filter(|&&(i, j, _)| m4.locate(i as usize).0 != m4.locate(j as usize).0)
        .count();
    assert_eq!(cross, 6);

    println!("criterion 9 PASS: toy fixture fully recovered at epsilon 1.0 and 0.1, per-layer misclassifications all zero, q=4 coupling has 6 pairs");
}

// -------------------------------------------------------------------------
// 10. Manifest replay determinism through the real binary.

#[test]
fn criterion_10_replay_determinism() {
    let bin = env!("CARGO_BIN_EXE_z2sync");
    let tmp = tempfile::tempdir().unwrap();
    let run = |args: &[&str]| {
        let out = Command::new(bin).args(args).output().expect("binary runs");
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    };
    let read = |p: &Path, f: &str| std::fs::read(p.join(f)).unwrap();

    // generate → replay
    let gen = tmp.path().join("gen");
    run(&[
        "generate", "benchmark-2", "--n", "60", "--k", "12", "--alpha", "0.2", "--eta", "0.3",
        "--seed", "11", "--out", gen.to_str().unwrap(),
    ]);
    let gen2 = tmp.path().join("gen2");
    run(&["replay", "--manifest", gen.join("manifest.json").to_str().unwrap(), "--out",
        gen2.to_str().unwrap()]);
    for f in ["graph.csv", "truth.csv", "partition.csv"] {
        assert_eq!(read(&gen, f), read(&gen2, f), "{f} differs after replay");
    }

    // solve → replay
    let sol = tmp.path().join("sol");
    run(&[
        "solve", "--method", "sdp-k",
        "--graph", gen.join("graph.csv").to_str().unwrap(),
        "--partition", gen.join("partition.csv").to_str().unwrap(),
        "--truth", gen.join("truth.csv").to_str().unwrap(),
        "--seed", "5",
        "--out", sol.to_str().unwrap(),
    ]);
    let sol2 = tmp.path().join("sol2");
    run(&["replay", "--manifest", sol.join("manifest.json").to_str().unwrap(), "--out",
        sol2.to_str().unwrap()]);
    for f in ["solution.csv", "diagnostics.json"] {
        assert_eq!(read(&sol, f), read(&sol2, f), "{f} differs after replay");
    }

    // small experiment → replay
    let exp = tmp.path().join("exp");
    run(&[
        "experiment", "--preset", "noise-curve", "--n", "80", "--trials", "2", "--seed", "3",
        "--out", exp.to_str().unwrap(),
    ]);
    let exp2 = tmp.path().join("exp2");
    run(&["replay", "--manifest", exp.join("manifest.json").to_str().unwrap(), "--out",
        exp2.to_str().unwrap()]);
    assert_eq!(read(&exp, "results.csv"), read(&exp2, "results.csv"));

    println!("criterion 10 PASS: generate, solve and experiment replays are byte-identical");
}
