use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use utm_cli::{exit_code, run, Command, RunConfig};

#[derive(Parser)]
#[command(name = "utm", version, about = "Unified transform solver for linear KdV and heat problems")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct Common {
    /// TOML config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: RunConfig,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate q(x, t) on a grid
    Solve(Common),
    /// Sample the forward transform on the contours or at given points
    Transform(Common),
    /// Run verification suites
    Verify(Common),
    /// Locate zeros of the characteristic function
    Zeros(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match cli.command {
        Cmd::Solve(c) => (Command::Solve, c),
        Cmd::Transform(c) => (Command::Transform, c),
        Cmd::Verify(c) => (Command::Verify, c),
        Cmd::Zeros(c) => (Command::Zeros, c),
    };
    let result = common
        .config
        .as_deref()
        .map(RunConfig::from_file)
        .unwrap_or_else(|| Ok(RunConfig::default()))
        .map(|base| base.overlay(&common.flags))
        .and_then(|cfg| run(command, &cfg));
    match result {
        Ok(outcome) => {
            for c in outcome.checks.iter().filter(|c| !c.pass) {
                eprintln!("FAIL {} ({}): magnitude {:e} > tolerance {:e}", c.check_id, c.datum, c.magnitude, c.tolerance);
            }
            ExitCode::from(outcome.exit as u8)
        }
        Err(e) => {
            eprintln!("utm: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
