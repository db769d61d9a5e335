//! Command line front end for `orbitk`: TOML configuration, JSON reports
//! and CSV plot data.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod plotdata;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::RunConfig;
pub use error::{CliError, CliResult, ExitStatus};
pub use report::Report;

#[derive(Debug, Parser)]
#[command(name = "orbitk", version, about = "Numerical checks of the orbit method on small Lie groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "ORBITK_THREADS")]
    threads: Option<usize>,
    /// Overrides `tolerances.tol`.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output directory (default: `output.dir`, then the current directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Jacobi, antisymmetry and nilpotency diagnostics.
    CheckAlgebra(ConfigArg),
    /// Sweep of the j-function relation and its hyperbolic form.
    JRelation(ConfigArg),
    /// Character values of the dictionary.
    Character(ConfigArg),
    /// Gram matrix, PSD verdict and translation invariance.
    Positivity(ConfigArg),
    /// GNS quotient and Schrödinger comparison.
    Gns(ConfigArg),
    /// CSV files from a saved report.
    EmitPlotdata {
        #[arg(long)]
        report: PathBuf,
    },
}

#[derive(Debug, clap::Args)]
struct ConfigArg {
    #[arg(long)]
    config: PathBuf,
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitStatus::Config.code() } else { 0 };
        }
    };
    match execute(cli) {
        Ok(status) => status.code(),
        Err(e) => {
            eprintln!("orbitk: {e}");
            e.status().code()
        }
    }
}

fn execute(cli: Cli) -> CliResult<ExitStatus> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(error::config_err("--threads must be positive"));
        }
        // a second initialization in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let (name, arg) = match cli.command {
        Command::EmitPlotdata { report } => {
            let r = Report::load(&report)?;
            let dir = cli.out.unwrap_or_else(|| report.parent().map(PathBuf::from).unwrap_or_default());
            for p in plotdata::emit_plotdata(&r, &dir)? {
                println!("{}", p.display());
            }
            return Ok(ExitStatus::Success);
        }
        Command::CheckAlgebra(a) => ("check-algebra", a),
        Command::JRelation(a) => ("j-relation", a),
        Command::Character(a) => ("character", a),
        Command::Positivity(a) => ("positivity", a),
        Command::Gns(a) => ("gns", a),
    };
    let mut cfg = RunConfig::load(&arg.config)?;
    if let Some(tol) = cli.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(error::config_err("--tol must be positive"));
        }
        cfg.tolerances.tol = tol;
    }
    let dir = cli.out.or_else(|| cfg.output.dir.as_ref().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("."));
    let report = commands::run_command(name, &cfg)?;
    let path = dir.join(format!("{name}.json"));
    io::write_atomic(&path, report.to_json().as_bytes())?;
    for f in &report.findings {
        eprintln!("orbitk: finding: {f}");
    }
    println!("{}", path.display());
    Ok(report.status())
}
