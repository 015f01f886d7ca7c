use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use tcom::cli::{parse_config, run_command, write_atomic, Command};
use tcom::Error;

/// Steady state, stability and nonreciprocal transmission of a
/// Tavis-Cummings coupling optomechanical system.
#[derive(Parser, Debug)]
#[command(name = "tcom", version)]
struct Args {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: PathBuf,

    /// One of: steady-state, stability, sweep, phase-curve, param-sweep,
    /// circulator, oracle-check.
    #[arg(long)]
    command: String,

    /// Output CSV path; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(args: &Args) -> Result<(), Error> {
    let command: Command = args.command.parse()?;
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::Io(format!("{}: {e}", args.config.display())))?;
    let cfg = parse_config(&text)?;
    let csv = run_command(command, &cfg)?;
    match &args.out {
        Some(path) => write_atomic(path, &csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tcom: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
