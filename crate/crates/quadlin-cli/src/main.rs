//! Command-line frontend: graph generation, identity suites, solvers and
//! star-triangle checks as reproducible batch commands.
//!
//! Exit codes: 0 on success, 1 on a failed numerical check, 2 on usage or
//! configuration errors. All randomness derives from `--seed`, so identical
//! invocations produce byte-identical outputs.

use clap::{Parser, Subcommand};

mod common;
mod graphcmd;
mod identities;
mod solvecmd;
mod startriangle;

#[derive(Parser)]
#[command(
    name = "quadlin",
    version,
    about = "Linear integrable quad-equations on rhombic quad-graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run identity suites (theta, functional equations, dominance margins).
    Identities(identities::Args),
    /// Generate, flip, validate and export quad-graphs.
    Graph(graphcmd::Args),
    /// Solve quad-equation, Laplace and exponential problems on a graph.
    Solve(solvecmd::Args),
    /// Two-field star-triangle maps: apply, invert, 4D consistency, special solution.
    Startriangle(startriangle::Args),
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Identities(args) => identities::run(args),
        Command::Graph(args) => graphcmd::run(args),
        Command::Solve(args) => solvecmd::run(args),
        Command::Startriangle(args) => startriangle::run(args),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(2);
        }
    }
}
