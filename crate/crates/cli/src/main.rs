use clap::Parser;

fn main() {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = z2sync_cli::Cli::parse();
    if let Err(e) = z2sync_cli::run(cli.command, argv) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
