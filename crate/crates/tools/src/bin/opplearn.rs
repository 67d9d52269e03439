use clap::Parser;
use opplearn_tools::cli::{run, Cli};

fn main() {
    let argv = std::env::args().collect::<Vec<_>>().join(" ");
    let cli = Cli::parse();
    if let Err(e) = run(cli, &argv) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
