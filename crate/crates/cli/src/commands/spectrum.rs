//! `z2sync spectrum --graph <file> …`: eigenvalue reports and histograms.

use std::path::PathBuf;

use clap::Args;
use z2sync::io;
use z2sync::spectral::spectrum;

use crate::manifest::{write_output, RunManifest};
use crate::CliResult;

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// How many top eigenvalues to report.
    #[arg(long, default_value_t = 3)]
    pub top: usize,
    /// Use the degree-normalized operator instead of raw Z.
    #[arg(long, default_value_t = false)]
    pub normalized: bool,
    /// Bin count for a full-spectrum histogram (dense solve, n ≤ 2000).
    #[arg(long)]
    pub histogram_bins: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: SpectrumArgs, argv: &[String]) -> CliResult<()> {
    let graph = io::read_graph(&args.graph)?;
    let report = spectrum(&graph, args.top, args.normalized, args.histogram_bins)?;

    write_output(&args.out, "spectrum.csv", &io::write_spectrum_csv(&report))?;
    let mut outputs = vec!["spectrum.csv"];
    if let Some(bins) = &report.histogram {
        write_output(&args.out, "histogram.csv", &io::write_histogram_csv(bins))?;
        outputs.push("histogram.csv");
    }
    let mut diag = std::collections::BTreeMap::new();
    if let Some(g) = report.gap_12 {
        diag.insert("gap_12".to_string(), g);
    }
    if let Some(g) = report.gap_23 {
        diag.insert("gap_23".to_string(), g);
    }
    if let Some(r) = report.ratio_32 {
        diag.insert("ratio_32".to_string(), r);
    }
    write_output(&args.out, "diagnostics.json", &super::diagnostics_json(&diag))?;
    outputs.push("diagnostics.json");
    outputs.push("manifest.json");
    RunManifest::new(argv, &outputs).write(&args.out)?;
    println!(
        "top eigenvalue {}",
        report.eigenvalues.first().copied().unwrap_or(f64::NAN)
    );
    Ok(())
}
