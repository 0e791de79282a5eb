//! `zospg` command line: run experiments, plot curves, verify properties,
//! print theoretical numbers.
//!
//! Exit codes: 0 success, 2 configuration error (also used by argument
//! parsing), 3 runtime abort, 4 verification failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use zospg::kernel::KernelSpec;
use zospg::optimizer::{log_growth_constant, n_epsilon, tau_schedule, theoretical_bound};
use zospg_harness::config::{load_config, ExperimentConfig, MethodConfig};
use zospg_harness::csvio::read_aggregate_csv;
use zospg_harness::runner::{bound_overlay, run_config_for_method, run_experiment};
use zospg_harness::{plot, verify};

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser)]
#[command(
    name = "zospg",
    about = "Zeroth-order stochastic projected gradient benchmarks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config: per-trial CSVs, aggregates, and a plot.
    Run {
        /// Path to the experiment TOML.
        config: PathBuf,
        /// Output directory (falls back to $ZOSPG_OUT_DIR, then ./out).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker-pool size for parallel trials.
        #[arg(long)]
        workers: Option<usize>,
        /// Master-seed override.
        #[arg(long)]
        seed: Option<u64>,
        /// Overlay the theoretical bound per method on the plot.
        #[arg(long)]
        bounds: bool,
    },
    /// Plot one or more aggregate CSVs into a single SVG.
    Plot {
        /// Aggregate CSV files (as written by `run`).
        aggregates: Vec<PathBuf>,
        /// Overlay theoretical bounds (requires --config for the scenario).
        #[arg(long)]
        bounds: bool,
        /// Experiment config for bound overlays and captioning.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output SVG path.
        #[arg(long, default_value = "plot.svg")]
        out: PathBuf,
    },
    /// Run the property verification suite and print a pass/fail table.
    Verify {
        /// Shrink Monte-Carlo sample sizes for a fast smoke pass.
        #[arg(long)]
        quick: bool,
    },
    /// Print the theoretical numbers for a config: kernel constants,
    /// schedules, error bounds, and the convex-case iteration budget when a
    /// [convex_budget] section is present.
    Bound {
        /// Path to the experiment TOML.
        config: PathBuf,
        /// Horizon for the error bound (defaults to the config iterations).
        #[arg(long)]
        horizon: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            out,
            workers,
            seed,
            bounds,
        } => cmd_run(&config, out, workers, seed, bounds),
        Command::Plot {
            aggregates,
            bounds,
            config,
            out,
        } => cmd_plot(&aggregates, bounds, config.as_deref(), &out),
        Command::Verify { quick } => cmd_verify(quick),
        Command::Bound { config, horizon } => cmd_bound(&config, horizon),
    }
}

fn default_out_dir(explicit: Option<PathBuf>) -> PathBuf {
    explicit
        .or_else(|| std::env::var_os("ZOSPG_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn load_or_exit(path: &Path) -> Result<ExperimentConfig, ExitCode> {
    load_config(path).map_err(|err| {
        eprintln!("configuration error: {err:#}");
        ExitCode::from(EXIT_CONFIG)
    })
}

fn cmd_run(
    config_path: &Path,
    out: Option<PathBuf>,
    workers: Option<usize>,
    seed: Option<u64>,
    bounds: bool,
) -> ExitCode {
    let mut cfg = match load_or_exit(config_path) {
        Ok(cfg) => cfg,
        Err(code) => return code,
    };
    if let Some(seed) = seed {
        cfg.master_seed = seed;
    }
    let out_dir = default_out_dir(out.or_else(|| cfg.output_dir.clone()));
    println!(
        "experiment {:?}: {} methods x {} trials x {} iterations -> {}",
        cfg.name,
        cfg.methods.len(),
        cfg.trials,
        cfg.iterations,
        out_dir.display()
    );
    match run_experiment(&cfg, &out_dir, workers, bounds) {
        Ok(report) => {
            for method in &report.methods {
                match &method.curve {
                    Some(curve) => println!(
                        "  {:<28} final mean error {:.6e} ({} trials{})",
                        method.label,
                        curve.final_mean(),
                        curve.trials,
                        if method.complete() { "" } else { ", INCOMPLETE" }
                    ),
                    None => println!("  {:<28} all trials failed", method.label),
                }
                for (trial, message) in &method.failures {
                    eprintln!("  {} trial {trial} aborted: {message}", method.label);
                }
            }
            for warning in &report.plot_warnings {
                eprintln!("plot warning: {warning}");
            }
            if let Some(path) = &report.plot_path {
                println!("plot written to {}", path.display());
            }
            if report.all_complete() {
                ExitCode::SUCCESS
            } else {
                eprintln!("one or more trials aborted; aggregates are marked incomplete");
                ExitCode::from(EXIT_RUNTIME)
            }
        }
        Err(err) => {
            eprintln!("runtime abort: {err:#}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

fn cmd_plot(
    aggregates: &[PathBuf],
    bounds: bool,
    config: Option<&Path>,
    out: &Path,
) -> ExitCode {
    if aggregates.is_empty() {
        eprintln!("configuration error: no aggregate files given");
        return ExitCode::from(EXIT_CONFIG);
    }
    let curves: Result<Vec<_>> = aggregates.iter().map(|p| read_aggregate_csv(p)).collect();
    let curves = match curves {
        Ok(c) => c,
        Err(err) => {
            eprintln!("configuration error: {err:#}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let mut overlays = Vec::new();
    let mut caption = String::from("replotted aggregates");
    if bounds {
        let Some(config_path) = config else {
            eprintln!("configuration error: --bounds requires --config");
            return ExitCode::from(EXIT_CONFIG);
        };
        let cfg = match load_or_exit(config_path) {
            Ok(cfg) => cfg,
            Err(code) => return code,
        };
        caption = format!("{} with theoretical bounds", cfg.name);
        for method in &cfg.methods {
            match bound_overlay(&cfg, method) {
                Ok(points) => overlays.push((format!("{} bound", method.label), points)),
                Err(err) => {
                    eprintln!("configuration error: {err:#}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            }
        }
    }
    match plot::emit_plot(&curves, &overlays, out, &caption) {
        Ok(warnings) => {
            for warning in warnings {
                eprintln!("plot warning: {warning}");
            }
            println!("plot written to {}", out.display());
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("runtime abort: {err:#}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

fn cmd_verify(quick: bool) -> ExitCode {
    let rows = verify::verify_suite(quick);
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut failures = 0;
    for row in &rows {
        let status = if row.passed { "PASS" } else { "FAIL" };
        if !row.passed {
            failures += 1;
        }
        println!("[{status}] {:<width$}  {}", row.name, row.detail);
    }
    println!(
        "{} checks, {} failed{}",
        rows.len(),
        failures,
        if quick { " (quick mode)" } else { "" }
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY)
    }
}

fn bound_lines(cfg: &ExperimentConfig, method: &MethodConfig, horizon: u64) -> Result<String> {
    let mut out = String::new();
    let kernel =
        KernelSpec::for_beta(method.beta).with_context(|| format!("method {}", method.label))?;
    let run_cfg = run_config_for_method(cfg, method, 0);
    let tau_first = tau_schedule(&run_cfg, &kernel, 1)?;
    let lipschitz_g = cfg.objective.lipschitz_on(cfg.set.max_norm() + tau_first);
    out.push_str(&format!(
        "method {}: beta = {}, kappa = {:.6}, kappa_beta = {:.6}\n",
        method.label,
        method.beta,
        kernel.kappa(),
        kernel.kappa_beta()
    ));
    out.push_str(&format!(
        "  tau_1 = {tau_first:.6}, G (inflated set) = {lipschitz_g:.6}, gamma = {}\n",
        method.gamma
    ));
    out.push_str(&format!(
        "  error bound at N = {horizon}: {:.6e}\n",
        theoretical_bound(&run_cfg, &kernel, lipschitz_g, horizon)
    ));
    if let Some(t2) = &cfg.convex_budget {
        let budget = n_epsilon(
            &run_cfg,
            &kernel,
            lipschitz_g,
            t2.eps,
            t2.radius,
            t2.rho,
            None,
        )?;
        out.push_str(&format!(
            "  convex reduction: eps = {}, R = {}, rho = {}, c' = {:.4} -> N(eps) = {budget}\n",
            t2.eps,
            t2.radius,
            t2.rho,
            log_growth_constant(t2.rho)
        ));
    }
    Ok(out)
}

fn cmd_bound(config_path: &Path, horizon: Option<u64>) -> ExitCode {
    let cfg = match load_or_exit(config_path) {
        Ok(cfg) => cfg,
        Err(code) => return code,
    };
    let horizon = horizon.unwrap_or(cfg.iterations);
    for method in &cfg.methods {
        match bound_lines(&cfg, method, horizon) {
            Ok(text) => print!("{text}"),
            Err(err) => {
                eprintln!("runtime abort: {err:#}");
                return ExitCode::from(EXIT_RUNTIME);
            }
        }
    }
    ExitCode::SUCCESS
}
