//! `z2sync experiment --preset <name> …`: the experiment sweeps behind the
//! figures: noise curves, recovery heatmaps, anchored-method comparisons,
//! and the k-SYNC benchmarks. Emits tidy CSV plus a replay manifest.
//!
//! Jobs parallelize over (cell, seed) with per-job derived seeds, so the
//! output is byte-identical regardless of worker count.

use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use z2sync::anchored::{build_anchored_system, qcqp_sync_degree, qcqp_sync_identity};
use z2sync::generators::{
    complete_with_regular_bad, congress_model_i, derive_seed, equal_partition_benchmark_ii,
    erdos_renyi_instance, preferential_attachment_instance, CongressModelSpec, NoiseSpec,
};
use z2sync::ksync::{run_ksync_suite, KSYNC_METHODS};
use z2sync::mps::{mps_sync, MpsOptions};
use z2sync::rmt::heatmap_sweep;
use z2sync::sdp::{sdp_sync_anchored_xy, sdp_sync_anchored_y, SdpOptions};
use z2sync::spectral::eig_sync;
use z2sync::{error_rate, AnchorSet, GroundTruth, Method, SignedGraph};

use crate::manifest::{write_output, RunManifest};
use crate::{CliError, CliResult};

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Preset name; see `--preset help` for the list.
    #[arg(long, default_value = "")]
    pub preset: String,
    /// JSON file holding an [`ExperimentSpec`]; overrides --preset.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Node count override.
    #[arg(long)]
    pub n: Option<usize>,
    /// Trials/seeds override.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Base seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Edge probability override.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Anchor count override (replaces the preset's list).
    #[arg(long)]
    pub h: Option<usize>,
    /// Block count override (replaces the preset's list).
    #[arg(long)]
    pub k: Option<usize>,
    /// Persistence probability override (replaces the preset's list).
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long)]
    pub out: PathBuf,
}

/// The same knobs as the command line, loadable from a JSON spec file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub preset: String,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub trials: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub h: Option<usize>,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub gamma: Option<f64>,
}

pub const PRESETS: [&str; 10] = [
    "noise-curve",
    "heatmap",
    "anchors",
    "mps-regular",
    "mps-er",
    "mps-pa",
    "mps-sensitivity",
    "ksync-congress",
    "ksync-benchmark",
    "incremental-congress",
];

pub fn run(mut args: ExperimentArgs, argv: &[String]) -> CliResult<()> {
    if let Some(path) = &args.spec {
        let spec: ExperimentSpec = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        args.preset = spec.preset;
        args.n = spec.n.or(args.n);
        args.trials = spec.trials.or(args.trials);
        args.seed = spec.seed.unwrap_or(args.seed);
        args.alpha = spec.alpha.or(args.alpha);
        args.h = spec.h.or(args.h);
        args.k = spec.k.or(args.k);
        args.gamma = spec.gamma.or(args.gamma);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let csv = pool.install(|| -> CliResult<String> {
        match args.preset.as_str() {
            "noise-curve" => noise_curve(&args),
            "heatmap" => heatmap(&args),
            "anchors" => anchors_comparison(&args),
            "mps-regular" => mps_comparison(&args, BadModel::Regular),
            "mps-er" => mps_comparison(&args, BadModel::ErdosRenyi),
            "mps-pa" => mps_preferential(&args),
            "mps-sensitivity" => mps_sensitivity(&args),
            "ksync-congress" => ksync_congress(&args),
            "ksync-benchmark" => ksync_benchmark(&args),
            "incremental-congress" => incremental_congress(&args),
            other => Err(CliError::Usage(format!(
                "unknown preset `{other}`; available: {}",
                PRESETS.join(", ")
            ))),
        }
    })?;

    write_output(&args.out, "results.csv", &csv)?;
    RunManifest::new(argv, &["results.csv", "manifest.json"]).write(&args.out)?;
    println!("wrote {}", args.out.join("results.csv").display());
    Ok(())
}

/// Complete-graph noise curve at the four reference correctness levels.
fn noise_curve(args: &ExperimentArgs) -> CliResult<String> {
    let n = args.n.unwrap_or(1000);
    let trials = args.trials.unwrap_or(10);
    let ps = [0.55, 0.525, 0.514, 0.50];
    let jobs: Vec<(usize, usize)> = (0..ps.len())
        .flat_map(|p| (0..trials).map(move |t| (p, t)))
        .collect();
    let rows: Vec<String> = jobs
        .par_iter()
        .map(|&(pi, trial)| {
            let p = ps[pi];
            let eta = 1.0 - p;
            let seed = derive_seed(args.seed, &[pi as u64, trial as u64]);
            let spec = NoiseSpec::new(1.0, eta, seed)?;
            let (g, truth) = erdos_renyi_instance(n, &spec, None)?;
            let sol = eig_sync(&g, true)?;
            let tau = error_rate(&sol, &truth)?;
            Ok(format!(
                "eig,{p},{eta},{seed},{tau},{},{},{}",
                sol.diagnostics.get("lambda1").unwrap_or(&f64::NAN),
                sol.diagnostics.get("lambda2").unwrap_or(&f64::NAN),
                sol.diagnostics.get("gap_12").unwrap_or(&f64::NAN),
            ))
        })
        .collect::<CliResult<Vec<String>>>()?;
    Ok(assemble_csv("method,p,eta,seed,tau,lambda1,lambda2,gap", rows))
}

/// (α, η) recovery/gap heatmap on the chosen operator.
fn heatmap(args: &ExperimentArgs) -> CliResult<String> {
    let n = args.n.unwrap_or(200);
    let trials = args.trials.unwrap_or(20);
    let alpha_grid: Vec<f64> = (1..=20).map(|i| i as f64 / 20.0).collect();
    let eta_grid: Vec<f64> = (0..20).map(|i| 0.5 * i as f64 / 19.0).collect();
    let mut rows = Vec::new();
    for (name, normalized) in [("normalized", true), ("raw", false)] {
        let cells = heatmap_sweep(n, &alpha_grid, &eta_grid, trials, normalized, args.seed)?;
        for c in cells {
            rows.push(format!(
                "{name},{},{},{},{},{},{}",
                c.alpha, c.eta, c.tau_median, c.gap_median, c.p_star, c.detectable as u8
            ));
        }
    }
    Ok(assemble_csv(
        "operator,alpha,eta,tau_median,gap_median,p_star,detectable",
        rows,
    ))
}

/// Deterministic anchor pick: the first h of a seed-shuffled node ordering,
/// valued at the truth.
fn anchors_for(truth: &GroundTruth, h: usize, seed: u64) -> AnchorSet {
    use rand::seq::SliceRandom;
    use rand_chacha::rand_core::SeedableRng;
    let mut order: Vec<usize> = (0..truth.len()).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    AnchorSet::new(order.into_iter().take(h).map(|i| (i, truth.values()[i])))
        .expect("valid anchors")
}

const ANCHOR_METHODS: [Method; 5] = [
    Method::QcqpIdentity,
    Method::QcqpDegree,
    Method::SdpY,
    Method::SdpXy,
    Method::Mps,
];

fn run_anchored(
    method: Method,
    g: &SignedGraph,
    anchors: &AnchorSet,
    seed: u64,
) -> CliResult<z2sync::SyncSolution> {
    let sdp_opts = SdpOptions { seed, ..Default::default() };
    Ok(match method {
        Method::QcqpIdentity => qcqp_sync_identity(&build_anchored_system(g, anchors)?)?,
        Method::QcqpDegree => qcqp_sync_degree(&build_anchored_system(g, anchors)?)?,
        Method::SdpY => sdp_sync_anchored_y(g, anchors, &sdp_opts)?.rounded,
        Method::SdpXy => sdp_sync_anchored_xy(g, anchors, &sdp_opts)?.rounded,
        Method::Mps => mps_sync(g, anchors, &MpsOptions::default())?,
        Method::Eig => eig_sync(g, true)?,
        other => return Err(CliError::Usage(format!("{other} is not an anchored method"))),
    })
}

/// Five anchored methods on G(n, α) across the noise grid.
fn anchors_comparison(args: &ExperimentArgs) -> CliResult<String> {
    let n = args.n.unwrap_or(75);
    let alpha = args.alpha.unwrap_or(0.2);
    let trials = args.trials.unwrap_or(50);
    let h_list: Vec<usize> = match args.h {
        Some(h) => vec![h],
        None => vec![5, 15, 30, 50],
    };
    let eta_grid: Vec<f64> = (0..=10).map(|i| 0.05 * i as f64).collect();
    let mut jobs = Vec::new();
    for (hi, &h) in h_list.iter().enumerate() {
        for (ei, &eta) in eta_grid.iter().enumerate() {
            for trial in 0..trials {
                jobs.push((hi, h, ei, eta, trial));
            }
        }
    }
    let rows: Vec<Vec<String>> = jobs
        .par_iter()
        .map(|&(hi, h, ei, eta, trial)| {
            let seed = derive_seed(args.seed, &[hi as u64, ei as u64, trial as u64]);
            let spec = NoiseSpec::new(alpha, eta, seed)?;
            let (g, truth) = erdos_renyi_instance(n, &spec, None)?;
            let anchors = anchors_for(&truth, h, derive_seed(seed, &[7]));
            let mut out = Vec::with_capacity(ANCHOR_METHODS.len());
            for method in ANCHOR_METHODS {
                let sol = run_anchored(method, &g, &anchors, seed)?;
                let tau = error_rate(&sol, &truth)?;
                out.push(format!("{method},{h},{eta},{seed},{tau}"));
            }
            Ok(out)
        })
        .collect::<CliResult<Vec<Vec<String>>>>()?;
    Ok(assemble_csv(
        "method,h,eta,seed,tau",
        rows.into_iter().flatten().collect(),
    ))
}

enum BadModel {
    Regular,
    ErdosRenyi,
}

/// MPS against the eigenvector and QCQP methods on K_100 with a planted
/// bad-edge subgraph.
fn mps_comparison(args: &ExperimentArgs, bad: BadModel) -> CliResult<String> {
    let n = args.n.unwrap_or(100);
    let trials = args.trials.unwrap_or(100);
    let h_list: Vec<usize> = match args.h {
        Some(h) => vec![h],
        None => vec![1, 10, 20, 30],
    };
    let d_list: Vec<usize> = (3..=10).map(|x| x * 5).collect(); // 15..50
    let mut jobs = Vec::new();
    for (hi, &h) in h_list.iter().enumerate() {
        for (di, &d) in d_list.iter().enumerate() {
            for trial in 0..trials {
                jobs.push((hi, h, di, d, trial));
            }
        }
    }
    let rows: Vec<Vec<String>> = jobs
        .par_iter()
        .map(|&(hi, h, di, d, trial)| {
            let seed = derive_seed(args.seed, &[hi as u64, di as u64, trial as u64]);
            let (g, truth) = match bad {
                BadModel::Regular => complete_with_regular_bad(n, d, seed)?,
                BadModel::ErdosRenyi => {
                    // flips drawn per edge with probability d/(n−1)
                    let eta = d as f64 / (n - 1) as f64;
                    let spec = NoiseSpec::new(1.0, eta, seed)?;
                    erdos_renyi_instance(n, &spec, None)?
                }
            };
            let anchors = anchors_for(&truth, h, derive_seed(seed, &[7]));
            let mut out = Vec::new();
            let mps = mps_sync(&g, &anchors, &MpsOptions::default())?;
            out.push(format!("mps,{h},{d},{seed},{}", error_rate(&mps, &truth)?));
            let eig = eig_sync(&g, true)?;
            out.push(format!("eig,{h},{d},{seed},{}", error_rate(&eig, &truth)?));
            if h > 1 {
                for method in [Method::QcqpIdentity, Method::QcqpDegree] {
                    let sol = run_anchored(method, &g, &anchors, seed)?;
                    out.push(format!("{method},{h},{d},{seed},{}", error_rate(&sol, &truth)?));
                }
            }
            Ok(out)
        })
        .collect::<CliResult<Vec<Vec<String>>>>()?;
    Ok(assemble_csv(
        "method,h,d,seed,tau",
        rows.into_iter().flatten().collect(),
    ))
}

/// MPS and friends on preferential-attachment graphs.
fn mps_preferential(args: &ExperimentArgs) -> CliResult<String> {
    let n = args.n.unwrap_or(500);
    let trials = args.trials.unwrap_or(100);
    let h_list: Vec<usize> = match args.h {
        Some(h) => vec![h],
        None => vec![1, 50, 100, 150],
    };
    let m_pa_list = [10usize, 30];
    let d_list: Vec<usize> = (1..=8).map(|x| x * 5).collect(); // 5..40
    let mut jobs = Vec::new();
    for (mi, &m_pa) in m_pa_list.iter().enumerate() {
        for (hi, &h) in h_list.iter().enumerate() {
            for (di, &d) in d_list.iter().enumerate() {
                for trial in 0..trials {
                    jobs.push((mi, m_pa, hi, h, di, d, trial));
                }
            }
        }
    }
    let rows: Vec<Vec<String>> = jobs
        .par_iter()
        .map(|&(mi, m_pa, hi, h, di, d, trial)| {
            let seed = derive_seed(args.seed, &[mi as u64, hi as u64, di as u64, trial as u64]);
            let (g, truth) = preferential_attachment_instance(n, m_pa, d as f64, seed)?;
            let anchors = anchors_for(&truth, h, derive_seed(seed, &[7]));
            let mut out = Vec::new();
            let mps = mps_sync(&g, &anchors, &MpsOptions::default())?;
            out.push(format!(
                "mps,{m_pa},{h},{d},{seed},{}",
                error_rate(&mps, &truth)?
            ));
            let eig = eig_sync(&g, true)?;
            out.push(format!(
                "eig,{m_pa},{h},{d},{seed},{}",
                error_rate(&eig, &truth)?
            ));
            if h > 1 {
                for method in [Method::QcqpIdentity, Method::QcqpDegree] {
                    let sol = run_anchored(method, &g, &anchors, seed)?;
                    out.push(format!(
                        "{method},{m_pa},{h},{d},{seed},{}",
                        error_rate(&sol, &truth)?
                    ));
                }
            }
            Ok(out)
        })
        .collect::<CliResult<Vec<Vec<String>>>>()?;
    Ok(assemble_csv(
        "method,m_pa,h,d,seed,tau",
        rows.into_iter().flatten().collect(),
    ))
}

/// Final error per assumed channel correctness probability: how sensitive
/// MPS is to a misspecified p when the true noise is unknown.
fn mps_sensitivity(args: &ExperimentArgs) -> CliResult<String> {
    let n = args.n.unwrap_or(100);
    let trials = args.trials.unwrap_or(50);
    let h = args.h.unwrap_or(1);
    let p_grid = [0.55, 0.6, 0.7, 0.8, 0.9, 0.95];
    let d_list: Vec<usize> = (3..=10).map(|x| x * 5).collect();
    let mut jobs = Vec::new();
    for (di, &d) in d_list.iter().enumerate() {
        for trial in 0..trials {
            jobs.push((di, d, trial));
        }
    }
    let rows: Vec<Vec<String>> = jobs
        .par_iter()
        .map(|&(di, d, trial)| {
            let seed = derive_seed(args.seed, &[di as u64, trial as u64]);
            let eta = d as f64 / (n - 1) as f64;
            let spec = NoiseSpec::new(1.0, eta, seed)?;
            let (g, truth) = erdos_renyi_instance(n, &spec, None)?;
            let anchors = anchors_for(&truth, h, derive_seed(seed, &[7]));
            let mut out = Vec::with_capacity(p_grid.len());
            for &p in &p_grid {
                let opts = MpsOptions { channel_p: p, ..Default::default() };
                let sol = mps_sync(&g, &anchors, &opts)?;
                let tau = error_rate(&sol, &truth)?;
                out.push(format!("{p},{d},{h},{seed},{tau}"));
            }
            Ok(out)
        })
        .collect::<CliResult<Vec<Vec<String>>>>()?;
    Ok(assemble_csv(
        "channel_p,d,h,seed,tau",
        rows.into_iter().flatten().collect(),
    ))
}

/// Five k-SYNC methods on the rolling-membership model.
fn ksync_congress(args: &ExperimentArgs) -> CliResult<String> {
    let trials = args.trials.unwrap_or(25);
    let gammas: Vec<f64> = match args.gamma {
        Some(g) => vec![g],
        None => vec![0.5, 0.75, 0.95],
    };
    let eta_grid: Vec<f64> = (0..=10).map(|i| 0.05 * i as f64).collect();
    let mut jobs = Vec::new();
    for (gi, &gamma) in gammas.iter().enumerate() {
        for (ei, &eta) in eta_grid.iter().enumerate() {
            for trial in 0..trials {
                jobs.push((gi, gamma, ei, eta, trial));
            }
        }
    }
    let rows: Vec<Vec<String>> = jobs
        .par_iter()
        .map(|&(gi, gamma, ei, eta, trial)| {
            let seed = derive_seed(args.seed, &[gi as u64, ei as u64, trial as u64]);
            let spec = CongressModelSpec {
                congresses: 10,
                senators: args.n.unwrap_or(200) / 10,
                gamma,
                alpha: args.alpha.unwrap_or(0.5),
                eta,
                seed,
            };
            let (g, truth, partition) = congress_model_i(&spec)?;
            let table = run_ksync_suite(&g, &partition, &truth, &KSYNC_METHODS, &[seed], eta)?;
            Ok(table
                .into_iter()
                .map(|r| {
                    format!(
                        "{},{gamma},{eta},{seed},{},{},{}",
                        r.method, r.tau, r.iterations, r.wall_ms
                    )
                })
                .collect())
        })
        .collect::<CliResult<Vec<Vec<String>>>>()?;
    Ok(assemble_csv(
        "method,gamma,eta,seed,tau,iterations,wall_ms",
        rows.into_iter().flatten().collect(),
    ))
}

/// Five k-SYNC methods on the equal-block benchmark.
fn ksync_benchmark(args: &ExperimentArgs) -> CliResult<String> {
    let n = args.n.unwrap_or(200);
    let alpha = args.alpha.unwrap_or(0.1);
    let trials = args.trials.unwrap_or(25);
    let k_list: Vec<usize> = match args.k {
        Some(k) => vec![k],
        None => vec![5, 10, 20, 25, 50, 100],
    };
    let eta_grid: Vec<f64> = (0..=10).map(|i| 0.05 * i as f64).collect();
    let mut jobs = Vec::new();
    for (ki, &k) in k_list.iter().enumerate() {
        for (ei, &eta) in eta_grid.iter().enumerate() {
            for trial in 0..trials {
                jobs.push((ki, k, ei, eta, trial));
            }
        }
    }
    let rows: Vec<Vec<String>> = jobs
        .par_iter()
        .map(|&(ki, k, ei, eta, trial)| {
            let seed = derive_seed(args.seed, &[ki as u64, ei as u64, trial as u64]);
            let (g, truth, partition) = equal_partition_benchmark_ii(n, k, alpha, eta, seed)?;
            let table = run_ksync_suite(&g, &partition, &truth, &KSYNC_METHODS, &[seed], eta)?;
            Ok(table
                .into_iter()
                .map(|r| {
                    format!(
                        "{},{k},{eta},{seed},{},{},{}",
                        r.method, r.tau, r.iterations, r.wall_ms
                    )
                })
                .collect())
        })
        .collect::<CliResult<Vec<Vec<String>>>>()?;
    Ok(assemble_csv(
        "method,k,eta,seed,tau,iterations,wall_ms",
        rows.into_iter().flatten().collect(),
    ))
}

/// Error rates as layers accumulate on one growing multiplex instance.
fn incremental_congress(args: &ExperimentArgs) -> CliResult<String> {
    let congresses = 10usize;
    let senators = args.n.unwrap_or(200) / congresses;
    let trials = args.trials.unwrap_or(25);
    let jobs: Vec<usize> = (0..trials).collect();
    let rows: Vec<Vec<String>> = jobs
        .par_iter()
        .map(|&trial| {
            let seed = derive_seed(args.seed, &[trial as u64]);
            let spec = CongressModelSpec {
                congresses,
                senators,
                gamma: args.gamma.unwrap_or(0.75),
                alpha: args.alpha.unwrap_or(0.5),
                eta: 0.2,
                seed,
            };
            let (g, truth, partition) = congress_model_i(&spec)?;
            let mut out = Vec::new();
            for r in 1..=congresses {
                let keep: Vec<usize> = (0..r * senators).collect();
                let sub = g.induced_subgraph(&keep)?;
                let sub_truth = GroundTruth::new(
                    keep.iter().map(|&i| truth.values()[i]).collect(),
                )?;
                // blocks renumbered to stay contiguous on the prefix
                let mut renumber = std::collections::HashMap::new();
                let mut block_of = Vec::with_capacity(keep.len());
                for &i in &keep {
                    let b = partition.block_of(i);
                    let next = renumber.len() as u32;
                    block_of.push(*renumber.entry(b).or_insert(next));
                }
                let sub_part = z2sync::Partition::new(block_of, renumber.len())?;
                let table =
                    run_ksync_suite(&sub, &sub_part, &sub_truth, &KSYNC_METHODS, &[seed], 0.2)?;
                for row in table {
                    out.push(format!("{},{r},{seed},{}", row.method, row.tau));
                }
            }
            Ok(out)
        })
        .collect::<CliResult<Vec<Vec<String>>>>()?;
    Ok(assemble_csv(
        "method,layers,seed,tau",
        rows.into_iter().flatten().collect(),
    ))
}

fn assemble_csv(header: &str, rows: Vec<String>) -> String {
    let mut out = String::with_capacity(rows.len() * 32 + header.len() + 1);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    out
}
