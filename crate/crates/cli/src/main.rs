use clap::Parser;
use ewf_cli::config::Cli;

fn main() {
    std::process::exit(ewf_cli::main_with(Cli::parse()));
}
