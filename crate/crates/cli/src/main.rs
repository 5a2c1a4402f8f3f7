//! `pvna`: sweeps, SOLT calibration and figure reproductions on the
//! simulated photonic vector network analyzer.

mod config;
mod figures;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pvna::calibration::{apply_correction, parse_error_terms, run_solt, write_error_terms, StandardsKit};
use pvna::sweep::run_sweep;

use config::{load_kit, RunConfig};
use figures::{Figure, FigureInput};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {msg}", path.display())]
    Config { path: PathBuf, msg: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Domain(#[from] pvna::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Io { .. } | CliError::Domain(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "pvna", version, about = "Photonic vector network analyzer simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the configured object; writes `<out>.s2p` and `<out>.csv`.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Error-terms file from `calibrate` to correct the raw sweep.
        #[arg(long)]
        cal: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Measure a standards kit over the configured grid; writes the error terms.
    Calibrate {
        #[arg(long)]
        config: PathBuf,
        /// Standards kit file; ideal standards when omitted.
        #[arg(long)]
        kit: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Reproduce one figure into a directory of CSVs and `summary.txt`.
    Figure {
        #[arg(value_enum)]
        name: Figure,
        /// Instrument to use instead of the figure's reference instrument.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Standards kit for fig9.
        #[arg(long)]
        kit: Option<PathBuf>,
    },
}

fn kit_or_ideal(kit: Option<&Path>) -> Result<StandardsKit, CliError> {
    kit.map_or_else(|| Ok(StandardsKit::ideal()), load_kit)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sweep { config, out, cal, seed } => {
            let cfg = RunConfig::load(&config)?.with_seed(seed);
            let terms = cal
                .map(|p| {
                    let text = std::fs::read_to_string(&p).map_err(|e| CliError::Io { path: p.clone(), source: e })?;
                    parse_error_terms(&text).map_err(|e| CliError::Config { path: p, msg: e.to_string() })
                })
                .transpose()?;
            let raw = run_sweep(&cfg.instrument, &cfg.out, &cfg.sweep)?;
            let s = match &terms {
                Some(t) => apply_correction(&raw.raw, t)?,
                None => raw.raw,
            };
            let clipped = raw.points.iter().filter(|p| p.clipped()).count();
            if clipped > 0 {
                eprintln!("warning: ADC clipping at {clipped} of {} points", raw.points.len());
            }
            let (s2p, csv) = output::write_sparams(&s, &out)?;
            println!("wrote {} and {}", s2p.display(), csv.display());
        }
        Command::Calibrate { config, kit, out, seed } => {
            let cfg = RunConfig::load(&config)?.with_seed(seed);
            let kit = kit_or_ideal(kit.as_deref())?;
            let terms = run_solt(&cfg.instrument, &kit, &cfg.sweep)?;
            output::write_file(&out, write_error_terms(&terms).as_bytes())?;
            println!("wrote {}", out.display());
        }
        Command::Figure { name, config, out, seed, kit } => {
            let cfg = config.as_deref().map(RunConfig::load).transpose()?;
            let input = FigureInput {
                seed: seed.or(cfg.as_ref().map(|c| c.seed)).unwrap_or(0),
                instrument: cfg.map(|c| c.instrument),
                kit: kit_or_ideal(kit.as_deref())?,
            };
            figures::run(name, input, &out)?;
            println!("wrote {}", out.join("summary.txt").display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
