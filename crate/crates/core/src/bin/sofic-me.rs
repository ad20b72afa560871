use clap::Parser;
use sofic_me::cli::{main_with, Cli};

fn main() {
    std::process::exit(main_with(&Cli::parse()));
}
