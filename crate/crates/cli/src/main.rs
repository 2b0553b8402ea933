use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use pairgen_cli::app::{self, Command, Options};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Sub {
    /// Phasematched geometry, dispersion, overlap area and coupling
    Design,
    /// Joint spectral amplitude, pair metrics and intensity heatmap
    Jsa,
    /// Pair metrics across values of one parameter (needs --vary)
    Sweep,
    /// Raman noise comparison against a conventional SFWM source
    Raman,
}

/// Photon-pair source design from fiber modes to joint spectra and noise.
#[derive(Debug, Parser)]
#[command(name = "pairgen", version)]
struct Cli {
    #[arg(value_enum)]
    command: Sub,
    /// TOML config; built-in defaults when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, created if missing
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads
    #[arg(long)]
    threads: Option<usize>,
    /// Sweep specification, e.g. tau_p=10ps,1ps
    #[arg(long)]
    vary: Option<String>,
    /// Hold √ω, group velocities and area at their band-centre values
    #[arg(long)]
    frozen_factors: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let opts = Options {
        command: match cli.command {
            Sub::Design => Command::Design,
            Sub::Jsa => Command::Jsa,
            Sub::Sweep => Command::Sweep,
            Sub::Raman => Command::Raman,
        },
        config: cli.config,
        out: cli.out,
        threads: cli.threads,
        vary: cli.vary,
        frozen_factors: cli.frozen_factors,
    };
    match app::run(&opts) {
        Ok(out) => {
            for f in &out.files {
                println!("{}", out.dir.join(f).display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
