mod commands;
mod document;
mod error;
mod report;

use clap::Parser;

/// Solve, evaluate and check ambiguity-averse MDPs.
#[derive(Debug, Parser)]
#[command(name = "aamdp", version)]
struct Cli {
    #[command(subcommand)]
    command: commands::Command,
}

fn main() {
    let cli = Cli::parse();
    let code = match commands::run(cli.command) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {failure}");
            failure.code
        }
    };
    std::process::exit(code);
}
