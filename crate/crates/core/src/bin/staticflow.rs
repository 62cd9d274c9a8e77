use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use staticflow::cli::{run_from_path, Command};

/// Static flow, exact vacua and boundary expansions.
#[derive(Debug, Parser)]
#[command(name = "staticflow", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,

    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,

    /// Output file; overrides `output.path`. Without either, output goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    ExitCode::from(run_from_path(args.command, &args.config, args.out.as_deref()).code())
}
