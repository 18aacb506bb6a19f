//! `z2sync generate <model> …`: seeded instance generation to CSV.

use std::path::PathBuf;

use clap::{Args, Subcommand};
use z2sync::generators::{
    complete_with_regular_bad, congress_model_i, equal_partition_benchmark_ii,
    erdos_renyi_instance, preferential_attachment_instance, CongressModelSpec, NoiseSpec,
};
use z2sync::io;

use crate::manifest::{write_output, RunManifest};
use crate::CliResult;

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(subcommand)]
    pub model: Model,
}

#[derive(Debug, Subcommand)]
pub enum Model {
    /// G(n, α) with flip probability η.
    ErdosRenyi {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        eta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Complete graph with an approximately d-regular flipped subgraph.
    CompleteRegularBad {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Preferential-attachment graph with Erdős–Rényi flips of expected
    /// degree d.
    PreferentialAttachment {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m_pa: usize,
        #[arg(long)]
        d: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rolling-membership multiplex model with persistence probability γ.
    #[command(name = "congress-model-1")]
    CongressModel1 {
        #[arg(long, short = 'C')]
        congresses: usize,
        #[arg(long, short = 'S')]
        senators: usize,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        eta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Equal-size-block partition benchmark.
    #[command(name = "benchmark-2")]
    Benchmark2 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        eta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

pub fn run(args: GenerateArgs, argv: &[String]) -> CliResult<()> {
    let (out, graph, truth, partition) = match args.model {
        Model::ErdosRenyi { n, alpha, eta, seed, out } => {
            let spec = NoiseSpec::new(alpha, eta, seed)?;
            let (g, t) = erdos_renyi_instance(n, &spec, None)?;
            (out, g, t, None)
        }
        Model::CompleteRegularBad { n, d, seed, out } => {
            let (g, t) = complete_with_regular_bad(n, d, seed)?;
            (out, g, t, None)
        }
        Model::PreferentialAttachment { n, m_pa, d, seed, out } => {
            let (g, t) = preferential_attachment_instance(n, m_pa, d, seed)?;
            (out, g, t, None)
        }
        Model::CongressModel1 { congresses, senators, gamma, alpha, eta, seed, out } => {
            let spec = CongressModelSpec { congresses, senators, gamma, alpha, eta, seed };
            let (g, t, p) = congress_model_i(&spec)?;
            (out, g, t, Some(p))
        }
        Model::Benchmark2 { n, k, alpha, eta, seed, out } => {
            let (g, t, p) = equal_partition_benchmark_ii(n, k, alpha, eta, seed)?;
            (out, g, t, Some(p))
        }
    };

    write_output(&out, "graph.csv", &io::write_graph_csv(&graph))?;
    write_output(&out, "truth.csv", &io::write_truth_csv(&truth))?;
    let mut outputs = vec!["graph.csv", "truth.csv"];
    if let Some(p) = &partition {
        write_output(&out, "partition.csv", &io::write_partition_csv(p))?;
        outputs.push("partition.csv");
    }
    outputs.push("manifest.json");
    RunManifest::new(argv, &outputs).write(&out)?;
    println!(
        "wrote {} nodes, {} edges to {}",
        graph.n(),
        graph.num_edges(),
        out.display()
    );
    Ok(())
}
