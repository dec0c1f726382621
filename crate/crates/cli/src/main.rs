//! `nlbox` experiment runner.
//!
//! Exit codes: 0 success, 1 a verify check failed, 2 configuration or
//! runtime error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use nlbox_cli::commands;
use nlbox_cli::config::{Command, ExperimentConfig, Format};
use nlbox_cli::records::{write_records, Record};

#[derive(Parser)]
#[command(name = "nlbox", version, about = "Nonlocal box protocol experiments")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Run the invariant suite; exits 1 if any check fails.
    Verify(Args),
    /// Amplified trivial protocol over a grid of box correctness values.
    Sweep(Args),
    /// Inner-product circuit success as the width grows.
    IpDecay(Args),
}

/// Flags override values read from `--config`.
#[derive(clap::Args, Default)]
struct Args {
    /// TOML experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// perfect | noisy:<p> | noisy:tsirelson | classical | local:<r>,<r> | quantum[:a0,a1,b0,b1]
    #[arg(long)]
    model: Option<String>,
    /// ip:<n> | eq:<n> | and | xor | random:<m>,<n>,<seed> | table:<path>
    #[arg(long)]
    function: Option<String>,
    /// Amplification depths, comma separated.
    #[arg(long, value_delimiter = ',')]
    depth: Option<Vec<u32>>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    p_min: Option<f64>,
    #[arg(long)]
    p_max: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    n_max: Option<u32>,
    /// Write the resolved config as TOML to this path.
    #[arg(long)]
    emit_config: Option<PathBuf>,
}

fn resolve(command: Command, args: &Args) -> anyhow::Result<ExperimentConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let config = ExperimentConfig::load(path)?;
            if config.command != command {
                bail!("{} is a {:?} config", path.display(), config.command);
            }
            config
        }
        None => ExperimentConfig::defaults(command),
    };
    macro_rules! set {
        ($($field:ident <- $arg:ident),*) => {
            $(if let Some(v) = &args.$arg { config.$field = v.clone(); })*
        };
    }
    set!(model <- model, function <- function, depth <- depth, trials <- trials, master_seed <- seed,
         format <- format, workers <- workers, p_min <- p_min, p_max <- p_max, step <- step, n_max <- n_max);
    if let Some(out) = &args.out {
        config.out = Some(out.clone());
    }
    config.validate()?;
    Ok(config)
}

fn emit<R: Record>(config: &ExperimentConfig, records: &[R]) -> anyhow::Result<()> {
    let mut out: Box<dyn Write> = match &config.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    write_records(records, config.format, &mut out)?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let (command, args) = match &cli.command {
        Sub::Verify(a) => (Command::Verify, a),
        Sub::Sweep(a) => (Command::Sweep, a),
        Sub::IpDecay(a) => (Command::IpDecay, a),
    };
    let config = resolve(command, args)?;
    if let Some(path) = &args.emit_config {
        std::fs::write(path, config.to_toml()).with_context(|| format!("writing {}", path.display()))?;
    }
    match command {
        Command::Verify => {
            let checks = commands::run_verify(&config);
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            for check in &checks {
                let verdict = if check.pass { "PASS" } else { "FAIL" };
                writeln!(lock, "{verdict} {} [{}]: {}", check.name, check.module, check.detail)?;
            }
            let failed = checks.iter().filter(|c| !c.pass).count();
            writeln!(lock, "{} checks, {failed} failed", checks.len())?;
            drop(lock);
            if config.out.is_some() {
                emit(&config, &checks)?;
            }
            Ok(failed == 0)
        }
        Command::Sweep => {
            emit(&config, &commands::run_sweep(&config)?)?;
            Ok(true)
        }
        Command::IpDecay => {
            emit(&config, &commands::run_ip_decay(&config)?)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
