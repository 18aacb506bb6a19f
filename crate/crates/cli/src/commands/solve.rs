//! `z2sync solve --method <m> --graph <file> …`: one solver run with CSV
//! and JSON outputs.

use std::path::PathBuf;

use clap::Args;
use z2sync::anchored::{build_anchored_system, qcqp_sync_degree, qcqp_sync_identity};
use z2sync::io;
use z2sync::ksync::{eig_ksync, mveig_ksync, part_ksync};
use z2sync::mps::{mps_sync, mps_sync_with_trace, BeliefTraceRow, MpsOptions, RootRule};
use z2sync::sdp::{sdp_ksync, sdp_sync, sdp_sync_anchored_xy, sdp_sync_anchored_y, SdpOptions};
use z2sync::spectral::{eig_sync, laplacian_sync};
use z2sync::{error_rate, AnchorSet, Method, SyncSolution};

use crate::manifest::{write_output, RunManifest};
use crate::{CliError, CliResult};

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// One of: eig, eig-raw, laplacian, sdp, sdp-y, sdp-xy, qcqp-i, qcqp-d,
    /// mps, eig-k, mveig-k, part-k, sdp-k, mps-k.
    #[arg(long)]
    pub method: String,
    #[arg(long)]
    pub graph: PathBuf,
    /// Ground truth; enables the tau diagnostic.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Anchor file, required by anchored methods.
    #[arg(long)]
    pub anchors: Option<PathBuf>,
    /// Partition file, required by k-SYNC methods.
    #[arg(long)]
    pub partition: Option<PathBuf>,
    /// Channel correctness probability for MPS.
    #[arg(long, default_value_t = 0.8)]
    pub channel_p: f64,
    /// Iteration cap for MPS.
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    /// Convergence tolerance for MPS.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Seed for stochastic solver internals (SDP restarts).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the SDP Gram factor (SDP methods only).
    #[arg(long, default_value_t = false)]
    pub dump_gram: bool,
    /// Also write the per-iteration belief trace (MPS methods only).
    #[arg(long, default_value_t = false)]
    pub belief_trace: bool,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: SolveArgs, argv: &[String]) -> CliResult<()> {
    let method = Method::parse(&args.method)
        .ok_or_else(|| CliError::Usage(format!("unknown method `{}`", args.method)))?;
    let graph = io::read_graph(&args.graph)?;

    let anchors = match &args.anchors {
        Some(path) => Some(io::read_anchors(path)?),
        None => None,
    };
    let partition = match &args.partition {
        Some(path) => Some(io::read_partition(path)?),
        None => None,
    };
    if method.needs_anchors() && anchors.is_none() {
        return Err(CliError::Usage(format!(
            "method `{method}` requires --anchors"
        )));
    }
    if method.needs_partition() && partition.is_none() {
        return Err(CliError::Usage(format!(
            "method `{method}` requires --partition"
        )));
    }

    let sdp_opts = SdpOptions { seed: args.seed, ..Default::default() };
    let mps_opts = MpsOptions {
        channel_p: args.channel_p,
        max_iter: args.max_iter,
        tol: args.tol,
        root: RootRule::MaxDegree,
        ..Default::default()
    };

    let mut gram: Option<(Vec<f64>, usize, usize)> = None;
    let mut trace: Option<Vec<BeliefTraceRow>> = None;
    let mut keep_gram = |res: &z2sync::sdp::SdpResult| {
        if args.dump_gram {
            gram = Some((res.gram_factor.clone(), res.gram_dim, res.rank));
        }
    };
    let mut sol: SyncSolution = match method {
        Method::Eig => eig_sync(&graph, true)?,
        Method::EigRaw => eig_sync(&graph, false)?,
        Method::Laplacian => laplacian_sync(&graph)?,
        Method::Sdp => {
            let res = sdp_sync(&graph, &sdp_opts)?;
            keep_gram(&res);
            res.rounded
        }
        Method::SdpY => {
            let res = sdp_sync_anchored_y(&graph, anchors.as_ref().unwrap(), &sdp_opts)?;
            keep_gram(&res);
            res.rounded
        }
        Method::SdpXy => {
            let res = sdp_sync_anchored_xy(&graph, anchors.as_ref().unwrap(), &sdp_opts)?;
            keep_gram(&res);
            res.rounded
        }
        Method::QcqpIdentity => {
            let sys = build_anchored_system(&graph, anchors.as_ref().unwrap())?;
            qcqp_sync_identity(&sys)?
        }
        Method::QcqpDegree => {
            let sys = build_anchored_system(&graph, anchors.as_ref().unwrap())?;
            qcqp_sync_degree(&sys)?
        }
        Method::Mps => {
            let anchors = anchors.unwrap_or_else(AnchorSet::empty);
            if args.belief_trace {
                let (sol, rows) = mps_sync_with_trace(&graph, &anchors, &mps_opts)?;
                trace = Some(rows);
                sol
            } else {
                mps_sync(&graph, &anchors, &mps_opts)?
            }
        }
        Method::EigK => eig_ksync(&graph, partition.as_ref().unwrap())?,
        Method::MveigK => mveig_ksync(&graph, partition.as_ref().unwrap())?,
        Method::PartK => {
            part_ksync(&graph, partition.as_ref().unwrap())?
        }
        Method::SdpK => {
            let res = sdp_ksync(&graph, partition.as_ref().unwrap(), &sdp_opts)?;
            keep_gram(&res);
            res.rounded
        }
        Method::MpsK => {
            let opts = MpsOptions { partition: partition.clone(), ..mps_opts };
            let anchors = anchors.unwrap_or_else(AnchorSet::empty);
            if args.belief_trace {
                let (sol, rows) = mps_sync_with_trace(&graph, &anchors, &opts)?;
                trace = Some(rows);
                sol
            } else {
                mps_sync(&graph, &anchors, &opts)?
            }
        }
    };

    if let Some(path) = &args.truth {
        let truth = io::read_truth(path)?;
        let tau = error_rate(&sol, &truth)?;
        sol.set_diagnostic("tau", tau);
    }

    write_output(&args.out, "solution.csv", &io::write_solution_csv(&sol))?;
    write_output(
        &args.out,
        "diagnostics.json",
        &super::diagnostics_json(&sol.diagnostics),
    )?;
    let mut outputs = vec!["solution.csv", "diagnostics.json"];
    if let Some((factor, dim, rank)) = &gram {
        let mut csv = String::from("row,col,value\n");
        for i in 0..*dim {
            for c in 0..*rank {
                csv.push_str(&format!("{i},{c},{}\n", factor[i * rank + c]));
            }
        }
        write_output(&args.out, "gram_factor.csv", &csv)?;
        outputs.push("gram_factor.csv");
    }
    if let Some(rows) = &trace {
        let mut csv = String::from("iteration,node,p_plus\n");
        for (it, node, p) in rows {
            csv.push_str(&format!("{it},{node},{p}\n"));
        }
        write_output(&args.out, "belief_trace.csv", &csv)?;
        outputs.push("belief_trace.csv");
    }
    outputs.push("manifest.json");
    RunManifest::new(argv, &outputs).write(&args.out)?;
    if let Some(tau) = sol.diagnostics.get("tau") {
        println!("method {method}: tau = {tau}");
    } else {
        println!("method {method}: solved {} nodes", sol.len());
    }
    Ok(())
}
