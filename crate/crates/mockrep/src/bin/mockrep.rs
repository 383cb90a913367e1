use clap::Parser;
use mockrep::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
