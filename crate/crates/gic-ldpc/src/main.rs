use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gic_ldpc::config::parse_grid;
use gic_ldpc::pipeline::{run_scenario, RunOptions, StageSet, VERSION};
use gic_ldpc::{HarnessError, Scenario};

#[derive(Parser)]
#[command(name = "gic-ldpc", version = VERSION, about = "Han-Kobayashi LDPC experiments on the two-user Gaussian interference channel")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct Global {
    /// Scenario TOML file.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Override the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the output root directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the degree-distribution optimizer.
    Optimize,
    /// Certify admissibility by density evolution.
    Evaluate,
    /// Finite-length BER sweep.
    Ber,
    /// Rate-region computation.
    Region {
        /// Private power fraction grid, `start:step:stop`.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Every enabled stage in order.
    Run {
        /// Validate and write the manifest without computing anything.
        #[arg(long)]
        dry_run: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: Cli) -> Result<(), HarnessError> {
    let path = cli
        .global
        .scenario
        .ok_or_else(|| HarnessError::Config("--scenario is required".into()))?;
    let scenario = Scenario::load(&path)?;
    let mut opts = RunOptions {
        jobs: cli.global.jobs,
        out_dir: cli.global.out,
        seed: cli.global.seed,
        ..RunOptions::default()
    };
    match &cli.cmd {
        Command::Optimize => opts.stages = StageSet::only("optimize"),
        Command::Evaluate => opts.stages = StageSet::only("certify"),
        Command::Ber => {
            opts.stages = StageSet::only("ber");
            // offsets need the threshold from certification
            opts.stages.certify = scenario.file.ber.offsets_db.is_some();
        }
        Command::Region { grid } => {
            opts.stages = StageSet::only("region");
            if let Some(g) = grid {
                opts.region_grid = Some(parse_grid(g)?);
            }
        }
        Command::Run { dry_run } => opts.dry_run = *dry_run,
    }
    if !matches!(cli.cmd, Command::Run { .. }) {
        opts.force = true;
    }
    let summary = run_scenario(&scenario, &opts)?;
    println!("{}", summary.out_dir.display());
    Ok(())
}
