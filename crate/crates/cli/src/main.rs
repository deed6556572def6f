mod commands;
mod config;
mod error;
mod output;
mod plot;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use commands::Command;
use error::{CliError, CliResult};

/// Two atoms, one photon: couplings, dynamics and pulse optimization.
#[derive(Parser)]
#[command(name = "twoatom", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Collective decay rate and level shift versus separation.
    Rates(RunArgs),
    /// Single-photon (or coherent) pulse absorption.
    Simulate(RunArgs),
    /// Free decay from an excited state.
    Decay(RunArgs),
    /// Coherent-state drive: peak population versus separation.
    Coherent(RunArgs),
    /// Pulse-shape optimization of the peak excitation.
    Optimize(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration, applied on top of the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in preset (fig2 ... fig8, optimize_*).
    #[arg(long)]
    preset: Option<String>,
    /// Existing directory for the output files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads for sweeps.
    #[arg(long)]
    workers: Option<usize>,
}

fn execute(command: Command, args: RunArgs) -> CliResult<()> {
    if args.workers == Some(0) {
        return Err(CliError::Validation("--workers must be at least 1".into()));
    }
    let cfg = config::load(
        args.preset.as_deref(),
        args.config.as_deref(),
        command.name(),
    )?;
    output::check_out_dir(&args.out)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.workers {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Numerical(format!("thread pool: {e}")))?;
    let outcome = pool.install(|| commands::run(command, &cfg))?;
    output::write_all(&args.out, &outcome.artifacts)?;
    for line in &outcome.summary {
        println!("{line}");
    }
    for a in &outcome.artifacts {
        println!("wrote {}", args.out.join(&a.file_name).display());
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Sub::Rates(a) => (Command::Rates, a),
        Sub::Simulate(a) => (Command::Simulate, a),
        Sub::Decay(a) => (Command::Decay, a),
        Sub::Coherent(a) => (Command::Coherent, a),
        Sub::Optimize(a) => (Command::Optimize, a),
    };
    if let Err(e) = execute(command, args) {
        eprintln!("twoatom {}: {e}", command.name());
        std::process::exit(e.exit_code());
    }
}
