use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::LevelFilter;
use rabi_cli::{execute, load_config, Mode, RunOptions};

#[derive(Parser)]
#[command(name = "rabi", version, about = "Quantum Rabi model phase diagrams, quenches and Wigner maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON configuration file
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (overrides `output_dir` in the config)
    #[arg(long, global = true, value_name = "DIR")]
    output: Option<PathBuf>,

    /// Worker threads for phase-diagram sweeps
    #[arg(long, global = true, value_name = "N")]
    workers: Option<NonZeroUsize>,

    /// More log output (-v info, -vv debug)
    #[arg(long, short, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Sweep g and ω_c and tabulate ground-state diagnostics
    PhaseDiagram,
    /// Evolve the open system after a sudden coupling quench
    Quench,
    /// Ground-state diagnostics at one parameter point
    GroundState,
    /// Cavity Wigner function of the ground state
    Wigner,
}

impl Command {
    fn mode(self) -> Mode {
        match self {
            Command::PhaseDiagram => Mode::PhaseDiagram,
            Command::Quench => Mode::Quench,
            Command::GroundState => Mode::GroundState,
            Command::Wigner => Mode::Wigner,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => LevelFilter::Warn,
        1 => LevelFilter::Info,
        _ => LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();

    let Some(config_path) = cli.config else {
        eprintln!("error: --config <PATH> is required");
        return ExitCode::from(2);
    };
    let workers = cli
        .workers
        .or_else(|| std::thread::available_parallelism().ok())
        .map_or(1, NonZeroUsize::get);
    let options = RunOptions {
        output: cli.output,
        workers,
    };
    let result = load_config(&config_path, Some(cli.command.mode())).and_then(|config| execute(&config, &options));
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
