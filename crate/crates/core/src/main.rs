use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sato_tate::run::{run, Command, Settings};
use sato_tate::Error;

#[derive(Parser)]
#[command(
    name = "sato-tate",
    version,
    about = "Sato-Tate statistics for weight-2 and weight-3 newforms"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute and cache eigenvalues at good primes up to X
    Eigen(Invocation),
    /// Weyl sums, K-S statistics and determinant fibers of the classes
    Equidist(Invocation),
    /// Density of ordinary primes
    Density(Invocation),
    /// Monic integer polynomials with all roots in |z| <= 2
    Tset(Invocation),
    /// Nonvanishing scan of a twisted symmetric-power partial Euler product
    Lfunc(Invocation),
    /// Per-prime Clebsch-Gordan Euler factor identity
    Cgcheck(Invocation),
    /// Minor monomials and their T+ valuations
    Weightlat(Invocation),
}

#[derive(Args)]
struct Invocation {
    /// key = value file; flags given on the command line take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: Settings,
}

fn execute(command: Command, inv: Invocation) -> Result<i32, Error> {
    let mut settings = inv.settings;
    if let Some(path) = inv.config {
        let text = std::fs::read_to_string(&path).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        })?;
        settings = settings.or(Settings::from_kv(&text)?);
    }
    let outcome = run(&settings.resolve(command)?)?;
    println!("{}", outcome.report_path.display());
    if let Some(v) = &outcome.report.violation {
        eprintln!("error: {v}");
    }
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let (command, inv) = match Cli::parse().command {
        Cmd::Eigen(i) => (Command::Eigen, i),
        Cmd::Equidist(i) => (Command::Equidist, i),
        Cmd::Density(i) => (Command::Density, i),
        Cmd::Tset(i) => (Command::Tset, i),
        Cmd::Lfunc(i) => (Command::Lfunc, i),
        Cmd::Cgcheck(i) => (Command::Cgcheck, i),
        Cmd::Weightlat(i) => (Command::Weightlat, i),
    };
    match execute(command, inv) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
