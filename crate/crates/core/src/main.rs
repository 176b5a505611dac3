use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use rivsed::cli::{self, exit};
use rivsed::config::RunConfig;

#[derive(Parser)]
#[command(name = "rivsed", version, about = "River sediment replenishment under costly observation")]
struct Args {
    /// Worker threads for parallel sections.
    #[arg(long, global = true, env = "RIVSED_THREADS")]
    threads: Option<usize>,

    /// Overrides the simulation and identification seeds.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Calibrates the streamflow model from a discharge record.
    Identify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "identify_out")]
        out: PathBuf,
    },
    /// Solves the control problem and exports the policy.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Runs the manufactured-solution convergence study.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimates the average cost of a solved policy by Monte Carlo.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        policy: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Prints the stationary statistics of the configured streamflow model.
    Moments {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load(path: &Path, seed: Option<u64>) -> anyhow::Result<RunConfig> {
    let mut config = RunConfig::load(path)?;
    if let Some(s) = seed {
        config.simulation.seed = s;
        config.identify.seed = s;
    }
    Ok(config)
}

fn run(args: Args) -> anyhow::Result<()> {
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    match args.command {
        Command::Identify { config, data, out } => {
            let config = load(&config, args.seed)?;
            let report = cli::run_identify(&config, &data, &out)?;
            let c = &report.calibration;
            println!("alpha,{}\na_prime,{}\nb_per_m3s,{}\na_shift_m3s,{}", c.alpha, c.a_prime, c.b, c.a_shift);
            println!("m1_over_rho,{}\nerror,{}", c.m1_over_rho(), c.error);
            if let Some(d) = report.decay {
                println!("rho_per_hour,{}", d.rho);
            }
        }
        Command::Solve { config, out } => {
            let config = load(&config, args.seed)?;
            let (solution, _) = cli::run_solve(&config, &out)?;
            println!("h = {} after {} sweeps", solution.h, solution.iterations);
        }
        Command::Verify { config, out } => {
            let config = load(&config, args.seed)?;
            let tables = cli::run_verify(&config, &out)?;
            for (beta, q_bar, rows) in tables {
                for r in rows {
                    if let Some(e) = r.errors {
                        println!("beta {beta} qbar {q_bar} N {}: l1 {:.3e} l2 {:.3e} linf {:.3e}", r.n, e.l1, e.l2, e.linf);
                    }
                }
            }
        }
        Command::Simulate { config, policy, out } => {
            let config = load(&config, args.seed)?;
            let report = cli::run_simulate(&config, &policy, &out)?;
            println!("{}", report.comparison_line());
        }
        Command::Moments { config } => {
            let config = load(&config, args.seed)?;
            print!("{}", cli::run_moments(&config)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();
    match run(args) {
        Ok(()) => ExitCode::from(exit::SUCCESS as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<rivsed::Error>().map_or(exit::USAGE, cli::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
