use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gantry_ga::Algorithm;
use gantry_ga_cli::{cmd_qubits, cmd_run, cmd_sweep, CliError, RunOptions, SweepOptions};

#[derive(Parser)]
#[command(name = "gantry-ga", version, about = "Daily multi-gantry radiotherapy scheduling with genetic algorithms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Classical,
    Quantum,
}

impl From<Algo> for Algorithm {
    fn from(a: Algo) -> Self {
        match a {
            Algo::Classical => Algorithm::Classical,
            Algo::Quantum => Algorithm::Quantum,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one GA and write curves.csv, best_schedule.json and summary.json
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "classical")]
        algo: Algo,
        /// Overrides the seed in the config
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: available parallelism); never affects results
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        threads: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a parameter grid and write sweep.csv and sweep_summary.csv
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, value_enum, default_value = "classical")]
        algo: Algo,
        /// Master seed; grid points derive their own seeds from it
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        threads: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the qubit count a full quantum implementation would need
    Qubits {
        /// Population size
        #[arg(long = "N", value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        nt: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        ng: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        np: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..), default_value_t = 8)]
        ns: u64,
    },
}

fn execute(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Run { config, algo, seed, threads, out } => {
            let report = cmd_run(&RunOptions {
                config,
                algorithm: algo.into(),
                seed,
                threads: threads.map(|t| t as usize),
                out,
            })?;
            println!(
                "best fitness {} after {} generations in {:.2}s; wrote {}",
                report.best_fitness,
                report.generations,
                report.elapsed_seconds,
                report.out_dir.display()
            );
        }
        Command::Sweep { config, grid, algo, seed, threads, out } => {
            let report = cmd_sweep(&SweepOptions {
                config,
                grid,
                algorithm: algo.into(),
                seed,
                threads: threads.map(|t| t as usize),
                out,
            })?;
            println!(
                "{} points: {} ok, {} failed, {} excluded; wrote {}",
                report.points,
                report.succeeded,
                report.failed,
                report.excluded,
                report.out_dir.display()
            );
        }
        Command::Qubits { n, nt, ng, np, ns } => println!("{}", cmd_qubits(n, nt, ng, np, ns)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors exit 2, --help/--version exit 0
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gantry-ga: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
