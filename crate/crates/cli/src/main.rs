use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use sqrtlap_cli::{run, Command, Overrides};

#[derive(Clone, Copy, ValueEnum)]
enum Cmd {
    Eigen,
    Constants,
    Verify,
    Solve,
}

/// Spectral Galerkin solver for A_{1/2}u = λβ(x)f(u).
#[derive(Parser)]
#[command(version)]
struct Args {
    command: Cmd,
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: output.directory next to the config).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Ok(n) = std::env::var("SQRTLAP_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("ignoring SQRTLAP_THREADS={n}: expected a positive integer"),
        }
    }
    let command = match args.command {
        Cmd::Eigen => Command::Eigen,
        Cmd::Constants => Command::Constants,
        Cmd::Verify => Command::Verify,
        Cmd::Solve => Command::Solve,
    };
    let outcome = run(command, &args.config, &Overrides { out: args.out, seed: args.seed });
    print!("{}", outcome.summary);
    if let Some(p) = &outcome.report {
        println!("report: {}", p.display());
    }
    if let Some(e) = &outcome.error {
        eprintln!("error [{}]: {}", e.code, e.message);
    }
    ExitCode::from(outcome.exit as u8)
}
