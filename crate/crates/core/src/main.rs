use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use psisynth::render::{self, RenderError};

#[derive(Parser)]
#[command(
    name = "psisynth",
    version,
    about = "Offline renderer for the Schrödinger wavetable synthesizer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a note sequence to a WAV file.
    Render {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `out_path` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Density dump of the first voice; overrides `[dump]`.
        #[arg(long, requires = "every")]
        dump: Option<PathBuf>,
        #[arg(long, requires = "dump", value_parser = clap::value_parser!(u64).range(1..))]
        every: Option<u64>,
    },
    /// Run the simulation alone and dump densities.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        steps: u64,
        #[arg(long)]
        dump: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        every: u64,
    },
}

fn run(cli: Cli) -> Result<(), RenderError> {
    match cli.command {
        Command::Render {
            config,
            out,
            dump,
            every,
        } => {
            let mut config = render::load_config(&config)?;
            if let Some(out) = out {
                config.out_path = out.to_string_lossy().into_owned();
            }
            if let (Some(path), Some(every_steps)) = (dump, every) {
                config.dump = Some(render::DumpConfig {
                    path: path.to_string_lossy().into_owned(),
                    every_steps,
                });
            }
            let summary = render::render(&config)?;
            eprintln!(
                "wrote {} frames to {}",
                summary.frames,
                summary.out_path.display()
            );
            if let (Some(rows), Some(dump)) = (summary.dump_rows, &config.dump) {
                eprintln!("wrote {rows} dump rows to {}", dump.path);
            }
        }
        Command::Simulate {
            config,
            steps,
            dump,
            every,
        } => {
            let config = render::load_config(&config)?;
            let rows = render::simulate_to_path(&config, steps, every, &dump)?;
            eprintln!("wrote {rows} dump rows to {}", dump.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
