use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rvc_stream::cli::{cmd_offline, cmd_run, cmd_synth, exit_code};
use rvc_stream::data::{DriftKind, SyntheticDriftSpec};

#[derive(Parser)]
#[command(name = "rvc-stream", about = "Streaming active learning for regression experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a streaming experiment from a JSON config.
    Run { config: PathBuf },
    /// Run the offline sequential-CV evaluation from a JSON config.
    Offline { config: PathBuf },
    /// Generate a synthetic drifting stream as a dataset CSV.
    Synth {
        #[arg(long, value_enum)]
        kind: SynthKind,
        #[arg(long)]
        length: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        drift_position: Option<usize>,
        #[arg(long)]
        drift_width: Option<usize>,
        #[arg(long, default_value_t = 0.1)]
        noise_scale: f64,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum SynthKind {
    Abrupt,
    Gradual,
    Heteroscedastic,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config } => cmd_run(&config),
        Command::Offline { config } => cmd_offline(&config),
        Command::Synth {
            kind,
            length,
            dim,
            seed,
            out,
            drift_position,
            drift_width,
            noise_scale,
        } => {
            let kind = match kind {
                SynthKind::Abrupt => DriftKind::Abrupt,
                SynthKind::Gradual => DriftKind::Gradual,
                SynthKind::Heteroscedastic => DriftKind::HeteroscedasticStatic,
            };
            let spec = SyntheticDriftSpec {
                kind,
                length,
                dimension: dim,
                drift_position: drift_position.unwrap_or(length / 2),
                drift_width: drift_width.unwrap_or(if kind == DriftKind::Gradual {
                    length / 10
                } else {
                    0
                }),
                noise_scale,
                seed,
            };
            cmd_synth(&spec, &out)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("rvc-stream: {err}");
            ExitCode::from(exit_code(&err) as u8)
        }
    }
}
