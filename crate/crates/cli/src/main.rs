use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use extbandit::pipeline::{
    cmd_analyze, cmd_bench, cmd_run, cmd_shape, AnalyzeOptions, BenchOptions, RunOptions, ShapeOptions,
};
use extbandit::Result;

/// Max K-armed bandit experiments: run sweeps, estimate tail shape, compute metrics.
#[derive(Parser)]
#[command(name = "extbandit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (task, policy, repetition) cell of a config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        exec: Exec,
    },
    /// Tail-shape constants, gaps and balanced alpha per arm.
    Shape {
        /// Experiment config (TOML) or a trace file (.csv).
        #[arg(long)]
        config: PathBuf,
        /// Report file (.csv) or directory receiving shape.csv.
        #[arg(long)]
        out: PathBuf,
        /// Samples per synthetic arm.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, env = "EXTBANDIT_SEED")]
        seed: Option<u64>,
    },
    /// Rank, win/tie/loss, regret and pull tables of a finished run.
    Analyze {
        /// Run directory; defaults to --out.
        #[arg(long)]
        results: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Reference policy for win/tie/loss; defaults to the first policy.
        #[arg(long)]
        reference: Option<String>,
        #[arg(long)]
        allow_partial: bool,
        #[arg(long, default_value_t = extbandit::metrics::BOOTSTRAP_ITERATIONS)]
        iterations: usize,
    },
    /// Built-in synthetic experiment (1-4) with MaxUCB, UCB and random.
    Bench {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        experiment: u8,
        #[arg(long, default_value_t = 2000)]
        horizon: u64,
        #[arg(long, default_value_t = 1000)]
        reps: u32,
        #[command(flatten)]
        exec: Exec,
    },
}

#[derive(Args)]
struct Exec {
    #[arg(long)]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long, env = "EXTBANDIT_SEED")]
    seed: Option<u64>,
    /// Worker threads (default: all CPUs).
    #[arg(long, default_value_t = 0)]
    parallel: usize,
    /// Skip cells already completed in --out.
    #[arg(long)]
    resume: bool,
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run { config, exec } => {
            let opts = RunOptions {
                seed: exec.seed,
                parallelism: exec.parallel,
                resume: exec.resume,
            };
            let summary = cmd_run(&config, &exec.out, &opts)?;
            println!(
                "{} cells, {} executed, {} failed -> {}",
                summary.manifest.cells.len(),
                summary.executed,
                summary.failures.len(),
                exec.out.display()
            );
            summary.into_result().map(drop)
        }
        Command::Shape {
            config,
            out,
            samples,
            seed,
        } => {
            let rows = cmd_shape(&config, &out, &ShapeOptions { samples, seed })?;
            let skipped = rows.iter().filter(|r| r.constants.is_none()).count();
            println!("{} arms, {skipped} skipped -> {}", rows.len(), extbandit::pipeline::shape::report_path(&out).display());
            Ok(())
        }
        Command::Analyze {
            results,
            out,
            reference,
            allow_partial,
            iterations,
        } => {
            let opts = AnalyzeOptions {
                reference,
                allow_partial,
                bootstrap_iterations: iterations,
                ..AnalyzeOptions::default()
            };
            let tables = cmd_analyze(results.as_ref().unwrap_or(&out), &out, &opts)?;
            println!("wrote {} -> {}", tables.keys().copied().collect::<Vec<_>>().join(", "), out.display());
            Ok(())
        }
        Command::Bench {
            experiment,
            horizon,
            reps,
            exec,
        } => {
            let opts = BenchOptions {
                experiment,
                horizon,
                repetitions: reps,
                seed: exec.seed.unwrap_or(0),
                parallelism: exec.parallel,
                resume: exec.resume,
            };
            for r in cmd_bench(&exec.out, &opts)? {
                println!(
                    "T={:<5} {:<8} regret={:.6} optimal_pulls={:.1}",
                    r.horizon, r.policy, r.proxy_regret, r.optimal_pulls
                );
            }
            Ok(())
        }
    }
}
