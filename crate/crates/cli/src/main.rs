use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fracwave_cli::{preset_listing, run, validate, Exit};

#[derive(Parser)]
#[command(name = "fracwave", version, about = "Fractional wave toolkit scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config and write its artifacts and manifest.
    Run { config: PathBuf },
    /// Check a config against the schema without running it.
    Validate { config: PathBuf },
    /// List scenario kinds, presets and solvers.
    ListPresets,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config } => {
            let report = run(&config);
            if report.exit == Exit::Pass {
                println!("{}: {}", report.output.display(), report.message);
            } else {
                eprintln!("{}: {}", report.output.display(), report.message);
            }
            ExitCode::from(report.exit.code() as u8)
        }
        Command::Validate { config } => match validate(&config) {
            Ok(cfg) => {
                println!("{}: valid {} config", config.display(), cfg.kind_name());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{}: {e}", config.display());
                ExitCode::from(Exit::Schema.code() as u8)
            }
        },
        Command::ListPresets => {
            print!("{}", preset_listing());
            ExitCode::SUCCESS
        }
    }
}
