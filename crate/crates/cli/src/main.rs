use std::path::{Path, PathBuf};
use std::process::ExitCode;

use awdo::NetworkShape;
use awdo_cli::commands;
use awdo_cli::{CliError, ExperimentConfig};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "awdo", version, about = "Wind driven optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an optimizer on an analytic objective.
    Bench {
        /// sphere, rosenbrock or rastrigin
        objective: String,
        /// awdo or cmaes
        optimizer: String,
        #[arg(long)]
        config: PathBuf,
    },
    /// Train the network by steepest descent.
    TrainGd {
        #[arg(long)]
        config: PathBuf,
    },
    /// Train the network with adaptive WDO.
    TrainAwdo {
        #[arg(long)]
        config: PathBuf,
    },
    /// Render hidden-layer weights from a params file as a PGM image.
    RenderWeights {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 400)]
        input: usize,
        #[arg(long, default_value_t = 25)]
        hidden: usize,
        #[arg(long, default_value_t = 10)]
        output: usize,
    },
}

fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
    ExperimentConfig::load(path)
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Bench {
            objective,
            optimizer,
            config,
        } => {
            let path = commands::cmd_bench(&objective, &optimizer, &load(&config)?)?;
            println!("wrote {}", path.display());
        }
        Command::TrainGd { config } => {
            let config = load(&config)?;
            let run = commands::cmd_train_gd(&config)?;
            if let Some(last) = run.history.last() {
                println!(
                    "iteration {}: cost {:.6}, train accuracy {:.4}",
                    last.iteration, last.cost, last.accuracy
                );
            }
            println!("wrote {}", config.output_dir.display());
        }
        Command::TrainAwdo { config } => {
            let config = load(&config)?;
            let run = commands::cmd_train_awdo(&config)?;
            if let Some(last) = run.history.last() {
                println!(
                    "iteration {}: best pressure {:.6}, train accuracy {:.4}",
                    last.iteration, last.best_pressure, last.train_accuracy_of_best
                );
            }
            println!("wrote {}", config.output_dir.display());
        }
        Command::RenderWeights {
            params,
            out,
            input,
            hidden,
            output,
        } => {
            let shape = NetworkShape::new(input, hidden, output)
                .map_err(|e| CliError::Config(e.to_string()))?;
            commands::cmd_render_weights(&params, shape, &out)?;
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
