//! `detect`: train, attack, plan, score, roc, sweep — all driven by one TOML
//! config file. Exit codes: 0 success, 2 config error, 3 data error,
//! 4 numeric error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use detect_cli::config::RunConfig;
use detect_cli::pipeline;

#[derive(Parser)]
#[command(name = "detect", version, about = "Randomized adversarial-input detection harness")]
struct Cli {
    /// Path to the TOML run configuration.
    #[arg(short, long, global = true, default_value = "detect.toml")]
    config: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train the full network on the configured dataset.
    Train,
    /// Craft every configured attack against the test split.
    Attack,
    /// Dump the sampling plan of one test input.
    Plan {
        /// Index into the test split.
        #[arg(long, default_value_t = 0)]
        input_index: usize,
    },
    /// Score the detection network on the configured eval set.
    Score,
    /// Assemble the ROC curve and AUC from scores.csv.
    Roc,
    /// Sweep (method, block, parameter) grids and report the best cells.
    Sweep,
    /// Run train, attack, score and roc in sequence.
    All,
}

fn run(cli: Cli) -> detect_cli::Result<()> {
    let (cfg, text) = RunConfig::load(&cli.config)?;
    match cli.command {
        Command::Train => {
            pipeline::stage_train(&cfg, &text)?;
        }
        Command::Attack => {
            pipeline::stage_attack(&cfg, &text)?;
        }
        Command::Plan { input_index } => {
            let path = pipeline::stage_plan(&cfg, &text, input_index)?;
            println!("plan written to {}", path.display());
        }
        Command::Score => {
            let path = pipeline::stage_score(&cfg, &text)?;
            println!("scores written to {}", path.display());
        }
        Command::Roc => {
            pipeline::stage_roc(&cfg, &text)?;
        }
        Command::Sweep => {
            pipeline::stage_sweep(&cfg, &text)?;
        }
        Command::All => {
            pipeline::stage_train(&cfg, &text)?;
            pipeline::stage_attack(&cfg, &text)?;
            pipeline::stage_score(&cfg, &text)?;
            pipeline::stage_roc(&cfg, &text)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
