use clap::Parser;
use coopsim::cli::{dispatch, Cli};

fn main() {
    std::process::exit(dispatch(&Cli::parse()));
}
