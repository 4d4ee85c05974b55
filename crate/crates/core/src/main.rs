//! Command-line driver: seeded experiment sweeps, lemma verification, proof
//! tracing, and plot emission.
//!
//! Exit codes: 0 on success, 1 when an assertion-style check fails (a lemma
//! verdict or a proof-trace fraction below 1), 2 on config or I/O errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lasso_mc::experiment::{
    load_config, load_sweep_config, read_summary_csv, run_simulate, run_sweep, run_trace_proof,
    run_verify_lemmas, write_outputs, ExperimentConfig, LemmaGridOptions, RunError,
};
use lasso_mc::plot::emit_plot_data;

/// Environment variable that overrides the config's output directory.
const OUTPUT_DIR_ENV: &str = "LASSO_MC_OUTPUT_DIR";

#[derive(Parser)]
#[command(
    name = "lasso-mc",
    about = "Constrained-Lasso Monte Carlo: prediction-error bounds, proof traces, \
and concentration checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured replicate sweep and write CSV + plot outputs.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads (0 = rayon default). Output is identical at any
        /// thread count.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Multi-p extension of simulate; one output subdirectory per p.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Verify the concentration lemmas on the full parameter grid.
    VerifyLemmas {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Monte Carlo replicates per grid point.
        #[arg(long, default_value_t = 20_000)]
        reps: usize,
        /// Test hook: halve every bound; the suite must then fail.
        #[arg(long, hide = true, default_value_t = false)]
        negative_control: bool,
    },
    /// Run replicates and require the proof inequalities to hold in all of
    /// them.
    TraceProof {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Regenerate plot files from an existing summary CSV.
    Plot {
        #[arg(long)]
        summary: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn apply_output_override(config: &mut ExperimentConfig) {
    if let Ok(dir) = std::env::var(OUTPUT_DIR_ENV) {
        if !dir.is_empty() {
            config.output_dir = PathBuf::from(dir);
        }
    }
}

fn install_thread_pool(threads: usize) -> Result<(), RunError> {
    if threads == 0 {
        return Ok(());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| RunError::Config(format!("cannot configure thread pool: {e}")))
}

fn run(cli: Cli) -> Result<ExitCode, RunError> {
    match cli.command {
        Command::Simulate { config, threads } => {
            install_thread_pool(threads)?;
            let mut config = load_config(&config)?;
            apply_output_override(&mut config);
            let output = run_simulate(&config)?;
            write_outputs(&config.output_dir, &output)?;
            emit_plot_data(&output.summary, &config.output_dir)?;
            println!(
                "wrote {} replicates over {} grid points to {}",
                output.replicates.len(),
                output.summary.len(),
                config.output_dir.display()
            );
            for s in &output.summary {
                println!(
                    "n={:<6} mean_mspe={:.6} (thm1 {:.6})  mean_mspe_hat={:.6} (thm2 {:.6})  \
est1/est3 hold: {:.0}%/{:.0}%",
                    s.n,
                    s.mean_mspe,
                    s.thm1_bound,
                    s.mean_mspe_hat,
                    s.thm2_bound,
                    100.0 * s.frac_est1_holds,
                    100.0 * s.frac_est3_holds,
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { config, threads } => {
            install_thread_pool(threads)?;
            let mut config = load_sweep_config(&config)?;
            if let Ok(dir) = std::env::var(OUTPUT_DIR_ENV) {
                if !dir.is_empty() {
                    config.output_dir = PathBuf::from(dir);
                }
            }
            let outputs = run_sweep(&config)?;
            let mut combined = Vec::new();
            for (p, output) in &outputs {
                let dir = config.output_dir.join(format!("p_{p}"));
                write_outputs(&dir, output)?;
                emit_plot_data(&output.summary, &dir)?;
                combined.extend(output.summary.iter().cloned());
                println!("p={p}: wrote outputs to {}", dir.display());
            }
            let combined_csv = lasso_mc::experiment::summary_csv(&combined);
            let combined_path = config.output_dir.join("summary.csv");
            std::fs::write(&combined_path, combined_csv).map_err(|source| RunError::Io {
                path: combined_path.clone(),
                source,
            })?;
            println!("combined summary: {}", combined_path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyLemmas {
            seed,
            reps,
            negative_control,
        } => {
            let opts = LemmaGridOptions {
                seed,
                reps,
                negative_control,
                ..LemmaGridOptions::default()
            };
            let outcome = run_verify_lemmas(&opts)?;
            for e in &outcome.entries {
                let status = if e.verdict.passes { "pass" } else { "FAIL" };
                let exact = e
                    .exact_value
                    .map(|x| format!("  exact={x:.6}"))
                    .unwrap_or_default();
                println!(
                    "[{status}] {:<45} empirical={:.6} bound={:.6} se={:.2e}{exact}",
                    e.label, e.verdict.empirical_value, e.verdict.bound_value, e.verdict.std_error,
                );
            }
            if outcome.all_pass() {
                println!("all {} lemma checks passed", outcome.entries.len());
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("lemma verification failed");
                Ok(ExitCode::from(1))
            }
        }
        Command::TraceProof { config, seed } => {
            let mut config = load_config(&config)?;
            if let Some(seed) = seed {
                config.master_seed = seed;
            }
            let outcome = run_trace_proof(&config)?;
            println!(
                "{} replicates: est1 holds in {:.2}%, est3 holds in {:.2}%",
                outcome.total,
                100.0 * outcome.frac_est1,
                100.0 * outcome.frac_est3,
            );
            if outcome.all_hold() {
                Ok(ExitCode::SUCCESS)
            } else {
                if let Some(row) = &outcome.first_violation {
                    eprintln!("first violating replicate: {row:#?}");
                }
                Ok(ExitCode::from(1))
            }
        }
        Command::Plot { summary, out } => {
            let rows = read_summary_csv(&summary)?;
            emit_plot_data(&rows, &out)?;
            println!("wrote summary.dat and summary.svg to {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}
