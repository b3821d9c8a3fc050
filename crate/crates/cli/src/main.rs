//! `bssn`: synthesize problems, run the semismooth Newton solvers and write
//! tables and images.
//!
//! Exit codes: 0 success, 1 configuration error, 2 convergence failure,
//! 3 internal error.

mod commands;
mod config;
mod error;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use config::{
    load, DeblurSettings, LcpTestSettings, Overrides, PathSettings, RegressSettings, SolveSettings,
};
use error::CliError;
use output::OutputDir;

#[derive(Debug, Parser)]
#[command(name = "bssn", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a problem read from CSV files
    Solve(RunArgs),
    /// Synthetic motion-blur reconstruction
    Deblur(RunArgs),
    /// Sparse robust regression on synthetic data
    Regress(RunArgs),
    /// Cross-validate the LCP solvers on random SPD instances
    LcpTest(RunArgs),
    /// Warm-started sweep over a weight grid for a problem read from CSV files
    Path(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// JSON configuration file
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(short, long, default_value = "out")]
    out: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
}

impl RunArgs {
    fn base_dir(&self) -> PathBuf {
        self.config
            .as_deref()
            .and_then(Path::parent)
            .map(Path::to_path_buf)
            .unwrap_or_default()
    }

    fn start<T: Serialize>(&self, command: &str, settings: &T) -> Result<OutputDir, CliError> {
        let out = OutputDir::create(&self.out)?;
        out.manifest(command, self.config.as_deref(), &self.overrides, settings)?;
        Ok(out)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(args) => {
            let settings = load::<SolveSettings>(args.config.as_deref(), true)?
                .finish(&args.base_dir(), &args.overrides)?;
            commands::solve_files(&settings, &args.start("solve", &settings)?)
        }
        Command::Deblur(args) => {
            let settings =
                load::<DeblurSettings>(args.config.as_deref(), false)?.finish(&args.overrides)?;
            commands::deblur(&settings, &args.start("deblur", &settings)?)
        }
        Command::Regress(args) => {
            let settings =
                load::<RegressSettings>(args.config.as_deref(), false)?.finish(&args.overrides)?;
            commands::regress(&settings, &args.start("regress", &settings)?)
        }
        Command::LcpTest(args) => {
            let settings =
                load::<LcpTestSettings>(args.config.as_deref(), false)?.finish(&args.overrides)?;
            commands::lcp_test(&settings, &args.start("lcp-test", &settings)?)
        }
        Command::Path(args) => {
            let settings = load::<PathSettings>(args.config.as_deref(), true)?
                .finish(&args.base_dir(), &args.overrides)?;
            commands::path(&settings, &args.start("path", &settings)?)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are configuration errors; help and version succeed
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bssn: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
