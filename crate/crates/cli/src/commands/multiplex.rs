//! `z2sync multiplex --manifest <file> …`: end-to-end multiplex pipeline:
//! load layers, transform to a signed instance, solve, and report per-layer
//! misclassifications when labels are present.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use z2sync::io;
use z2sync::ksync::{eig_ksync, mveig_ksync, part_ksync};
use z2sync::mps::{mps_sync, MpsOptions};
use z2sync::multiplex::{misclassification_report, threshold_entries, Transform};
use z2sync::sdp::{sdp_ksync, sdp_sync, SdpOptions};
use z2sync::spectral::{eig_sync, laplacian_sync, spectrum};
use z2sync::{error_rate_masked, AnchorSet, Method};

use crate::manifest::{write_output, RunManifest};
use crate::{CliError, CliResult};

#[derive(Debug, Args)]
pub struct MultiplexArgs {
    /// Multiplex manifest JSON (layers, identity, epsilon, transform, theta).
    #[arg(long)]
    pub manifest: PathBuf,
    /// Solver: eig, eig-raw, laplacian, sdp, mps, or the k-SYNC variants
    /// eig-k, mveig-k, part-k, sdp-k, mps-k (entity partition).
    #[arg(long, default_value = "eig")]
    pub method: String,
    /// Seed for stochastic solver internals.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: MultiplexArgs, argv: &[String]) -> CliResult<()> {
    let method = Method::parse(&args.method)
        .ok_or_else(|| CliError::Usage(format!("unknown method `{}`", args.method)))?;
    if method.needs_anchors() {
        return Err(CliError::Usage(format!(
            "anchored method `{method}` is not available in the multiplex pipeline"
        )));
    }
    let (voting, manifest) = io::load_multiplex(&args.manifest)?;
    let transform = manifest.transform_kind()?;
    let (mut graph, partition, dropped) = voting.sign_transform(transform)?;

    let mut disconnect_warning = false;
    if let Some(theta) = manifest.theta {
        if transform != Transform::Linear {
            return Err(CliError::Usage(
                "theta thresholding applies to the linear transform only".into(),
            ));
        }
        let (filtered, warn) = threshold_entries(&graph, theta)?;
        graph = filtered;
        disconnect_warning = warn;
        if warn {
            eprintln!("warning: theta = {theta} disconnected the measurement graph");
        }
    }

    let sdp_opts = SdpOptions { seed: args.seed, ..Default::default() };
    let mut sol = match method {
        Method::Eig => eig_sync(&graph, true)?,
        Method::EigRaw => eig_sync(&graph, false)?,
        Method::Laplacian => laplacian_sync(&graph)?,
        Method::Sdp => sdp_sync(&graph, &sdp_opts)?.rounded,
        Method::Mps => mps_sync(&graph, &AnchorSet::empty(), &MpsOptions::default())?,
        Method::EigK => eig_ksync(&graph, &partition)?,
        Method::MveigK => mveig_ksync(&graph, &partition)?,
        Method::PartK => part_ksync(&graph, &partition)?,
        Method::SdpK => sdp_ksync(&graph, &partition, &sdp_opts)?.rounded,
        Method::MpsK => {
            let opts = MpsOptions { partition: Some(partition.clone()), ..Default::default() };
            mps_sync(&graph, &AnchorSet::empty(), &opts)?
        }
        other => {
            return Err(CliError::Usage(format!(
                "method `{other}` is not available in the multiplex pipeline"
            )))
        }
    };
    sol.set_diagnostic("dropped_entries", dropped as f64);
    sol.set_diagnostic("entities", partition.k() as f64);
    sol.set_diagnostic("disconnect_warning", disconnect_warning as u8 as f64);

    // Per-layer bipolarity diagnostics: the gap and ratio of each layer.
    let mut gaps = String::from("layer,lambda1,lambda2,lambda3,gap_23,ratio_32\n");
    let mut offset = 0usize;
    for (t, &s) in voting.layer_sizes().iter().enumerate() {
        let nodes: Vec<usize> = (offset..offset + s).collect();
        let layer_graph = graph.induced_subgraph(&nodes)?;
        let report = spectrum(&layer_graph, 3.min(s), false, None)?;
        let l1 = report.eigenvalues.first().copied().unwrap_or(f64::NAN);
        let l2 = report.eigenvalues.get(1).copied().unwrap_or(f64::NAN);
        let l3 = report.eigenvalues.get(2).copied().unwrap_or(f64::NAN);
        let _ = writeln!(
            gaps,
            "{t},{l1},{l2},{l3},{},{}",
            report.gap_23.unwrap_or(f64::NAN),
            report.ratio_32.unwrap_or(f64::NAN),
        );
        offset += s;
    }

    let mut outputs = vec!["solution.csv", "diagnostics.json", "layer_spectra.csv"];
    write_output(&args.out, "solution.csv", &io::write_solution_csv(&sol))?;
    write_output(&args.out, "layer_spectra.csv", &gaps)?;

    if voting.has_labels() {
        let report = misclassification_report(&sol, &voting)?;
        let mut csv = String::from("layer,missed_plus,missed_minus\n");
        for t in 0..voting.num_layers() {
            let _ = writeln!(csv, "{t},{},{}", report.missed_plus[t], report.missed_minus[t]);
        }
        write_output(&args.out, "misclassification.csv", &csv)?;
        outputs.push("misclassification.csv");
        sol.set_diagnostic("accuracy_plus", report.accuracy_plus);
        sol.set_diagnostic("accuracy_minus", report.accuracy_minus);
        sol.set_diagnostic("ignored_nodes", report.ignored as f64);
        if let Some(truth) = voting.labels_as_truth() {
            let mask = vec![true; truth.len()];
            sol.set_diagnostic("tau", error_rate_masked(&sol, &truth, &mask)?);
        } else {
            let mask = voting.labeled_mask();
            // labels exist but are partial: score only the labeled nodes
            let z: Vec<i8> = (0..voting.n())
                .map(|g| {
                    let (t, i) = voting.locate(g);
                    let l = voting.label(t, i);
                    if l == 0 {
                        1
                    } else {
                        l
                    }
                })
                .collect();
            let truth = z2sync::GroundTruth::new(z)?;
            sol.set_diagnostic("tau_labeled", error_rate_masked(&sol, &truth, &mask)?);
        }
    }
    write_output(
        &args.out,
        "diagnostics.json",
        &super::diagnostics_json(&sol.diagnostics),
    )?;
    outputs.push("manifest.json");
    RunManifest::new(argv, &outputs).write(&args.out)?;
    println!(
        "multiplex: {} layers, {} nodes, {} entities",
        voting.num_layers(),
        voting.n(),
        partition.k()
    );
    Ok(())
}
