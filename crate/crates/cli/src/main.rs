//! `fdss`: runs experiment spec files.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fdss_core::experiment::{self, ExperimentKind, ExperimentSpec};
use fdss_core::FdssError;

/// Exit status for malformed specs, bad arguments and mismatched inputs.
const EXIT_VALIDATION: u8 = 2;
/// Exit status for failures while a campaign or training run executes.
const EXIT_RUNTIME: u8 = 1;

#[derive(Parser)]
#[command(name = "fdss", version, about = "DFT-s-OFDM FDSS simulation and filter learning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// PAPR CCDF of each filter in the spec.
    Ccdf(Common),
    /// SER versus SNR of each filter in the spec.
    SerSweep(Common),
    /// Train every filter whose source is "train" and export it.
    Train(Common),
    /// PAPR gain and SNR loss of each filter against the baseline.
    Compare(Common),
    /// Resampled versus retrained zero-ISI filters at a second config.
    ResampleStudy(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment spec (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Overrides the seed stored in the spec.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

impl Command {
    fn parts(&self) -> (ExperimentKind, &Common) {
        match self {
            Command::Ccdf(c) => (ExperimentKind::Ccdf, c),
            Command::SerSweep(c) => (ExperimentKind::SerSweep, c),
            Command::Train(c) => (ExperimentKind::Train, c),
            Command::Compare(c) => (ExperimentKind::Compare, c),
            Command::ResampleStudy(c) => (ExperimentKind::ResampleStudy, c),
        }
    }
}

fn execute(kind: ExperimentKind, args: &Common) -> Result<(), FdssError> {
    let spec = ExperimentSpec::load(&args.spec)?;
    if spec.kind != kind {
        return Err(FdssError::Config(format!(
            "spec {} describes a {} experiment, not {}",
            args.spec.display(),
            spec.kind.name(),
            kind.name()
        )));
    }
    if args.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(args.threads)
            .build_global()
            .map_err(|e| FdssError::Config(format!("thread pool: {e}")))?;
    }
    let seed = args.seed.unwrap_or(spec.seed);
    let summary = experiment::run(&spec, seed, &args.out)?;
    for line in &summary.lines {
        println!("{line}");
    }
    for f in &summary.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = cli.command.parts();
    match execute(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { EXIT_VALIDATION } else { EXIT_RUNTIME })
        }
    }
}
