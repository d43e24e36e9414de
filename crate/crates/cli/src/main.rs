use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mcpcheck_cli::{run_all, summary, write_outputs, CheckKind, Overrides, RunConfig};
use mcpcheck_core::SpaceTag;

#[derive(Parser)]
#[command(name = "mcpcheck", version, about = "Certify the measure-contraction counterexamples in the sup-norm plane")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run checks against one space and write report.json and margins.csv.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// JSON file mirroring the run config; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_space)]
    space: Option<SpaceTag>,
    /// Repeatable; defaults to every check of the space.
    #[arg(long = "check", value_enum)]
    checks: Vec<CheckKind>,
    #[arg(long)]
    resolution: Option<f64>,
    /// Allowed excess of an MCP bin quotient over 1.
    #[arg(long = "tol")]
    tolerance: Option<f64>,
    #[arg(long)]
    t_grid: Option<usize>,
    #[arg(long)]
    l_grid: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write SVG plots.
    #[arg(long)]
    svg: bool,
}

fn parse_space(s: &str) -> Result<SpaceTag, String> {
    s.parse()
}

fn main() -> ExitCode {
    let Command::Verify(args) = Cli::parse().command;
    let flags = Overrides {
        space: args.space,
        checks: args.checks,
        resolution: args.resolution,
        tolerance: args.tolerance,
        t_grid: args.t_grid,
        l_grid: args.l_grid,
        seed: args.seed,
        out: args.out,
        svg: args.svg,
    };
    let config = match RunConfig::resolve(args.config.as_deref(), flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("usage error: {e}");
            return ExitCode::from(2);
        }
    };
    let reports = match run_all(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    print!("{}", summary(&reports));
    if let Err(e) = write_outputs(&config, &reports) {
        eprintln!("error writing outputs: {e:#}");
        return ExitCode::from(3);
    }
    if reports.iter().all(|r| r.passed()) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
