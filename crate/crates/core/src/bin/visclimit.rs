use clap::Parser;
use visclimit::cli::{run_cli, Cli};

fn main() {
    std::process::exit(run_cli(Cli::parse()));
}
