use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use shockcost::{execute, Command, Options};

/// Entropy-production costs of piecewise-constant solutions of scalar
/// conservation laws on the torus.
#[derive(Debug, Parser)]
#[command(name = "shockcost", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory (overrides the scenario's output.dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long)]
    jobs: Option<usize>,
    /// Also write diagram.svg.
    #[arg(long)]
    svg: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let opts = Options {
        command: args.command,
        scenario: args.scenario,
        out: args.out,
        jobs: args.jobs,
        svg: args.svg,
    };
    match execute(&opts) {
        Ok(paths) => {
            for p in paths {
                log::info!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("shockcost: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
