//! The `satsim` command line.
//!
//! Exit codes: 0 success, 2 config/validation error, 3
//! numerical/degenerate-state error, 4 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::dynamics::solve_fixed_point;
use crate::equilibrium::{equilibrium_entry, welfare_optimum};
use crate::error::{Error, Result};
use crate::harness::scenario::display_rounded;
use crate::harness::{
    builtin_config, derive_seed, dilution_table, export_report, export_sweep, load_config_path,
    run_scenario, run_sweep, sample_qualities, ExportFormat, ScenarioReport, SweepSpec,
};
use crate::metrics::concentration_report;

#[derive(Debug, Parser)]
#[command(
    name = "satsim",
    about = "Attention-market saturation simulator",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario (built-in or from a config file).
    Run(RunArgs),
    /// Re-run a scenario across an axis of parameter values.
    Sweep(SweepArgs),
    /// Solve the free-entry equilibrium for (p, A, k, z).
    Equilibrium(EquilibriumArgs),
    /// Print the symmetric dilution table.
    Dilution(DilutionArgs),
    /// Solve the interior fixed point for a configured scenario.
    FixedPoint(FixedPointArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Built-in scenario name (illustrative | dilution | calibration).
    #[arg(long, conflicts_with = "config")]
    scenario: Option<String>,
    /// Path to a scenario config (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory to export results into.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Metrics bundle format for --out.
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Scenario config path or built-in name.
    #[arg(long)]
    config: String,
    /// Dotted parameter path, e.g. dynamics.alpha.
    #[arg(long)]
    axis: String,
    /// Comma-separated axis values.
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_negative_numbers = true
    )]
    values: Vec<f64>,
    /// Replicate seeds per axis value.
    #[arg(long, default_value_t = 1)]
    replicates: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EquilibriumArgs {
    /// Monetization rate p.
    #[arg(long = "p")]
    monetization: f64,
    /// Total attention A.
    #[arg(long = "A")]
    attention: f64,
    /// Entry cost k.
    #[arg(long = "k")]
    entry_cost: f64,
    /// Outside-option weight z.
    #[arg(long = "z")]
    outside_weight: f64,
}

#[derive(Debug, Args)]
struct DilutionArgs {
    #[arg(long = "A", default_value_t = 10_000.0)]
    attention: f64,
    #[arg(long = "z", default_value_t = 100.0)]
    outside_weight: f64,
    #[arg(long = "p", default_value_t = 1.0)]
    monetization: f64,
    #[arg(long = "k", default_value_t = 1.0)]
    entry_cost: f64,
    /// Builder counts to tabulate.
    #[arg(
        long = "B-list",
        value_delimiter = ',',
        default_values_t = [100.0, 500.0, 1_000.0, 5_000.0, 9_900.0, 50_000.0]
    )]
    builder_counts: Vec<f64>,
    /// Directory to write dilution.csv into (full precision).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FixedPointArgs {
    /// Scenario config path or built-in name.
    #[arg(long)]
    config: String,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory to write final_state.csv into.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Equilibrium(args) => cmd_equilibrium(args),
        Command::Dilution(args) => cmd_dilution(args),
        Command::FixedPoint(args) => cmd_fixed_point(args),
    }
}

fn load_run_config(args: &RunArgs) -> Result<crate::harness::ScenarioConfig> {
    let mut config = match (&args.scenario, &args.config) {
        (Some(name), None) => builtin_config(name).ok_or_else(|| {
            Error::Validation(format!(
                "unknown scenario `{name}` (expected illustrative|dilution|calibration)"
            ))
        })?,
        (None, Some(path)) => load_config_path(&path.to_string_lossy())?,
        _ => {
            return Err(Error::Validation(
                "give exactly one of --scenario or --config".into(),
            ))
        }
    };
    if let Some(seed) = args.seed {
        config.seed = Some(seed);
    }
    Ok(config)
}

fn print_report(report: &ScenarioReport) {
    for w in &report.config_echo.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(name) = &report.config_echo.name {
        println!("scenario: {name}");
    }
    if let Some(rows) = &report.dilution {
        println!("{:>10} {:>10} {:>10}", "B", "s_bar", "profit");
        for row in rows {
            println!(
                "{:>10} {:>10} {:>10}",
                row.builders,
                display_rounded(row.average_attention),
                display_rounded(row.profit)
            );
        }
    } else {
        let m = &report.final_metrics;
        println!("builders: {}", m.count);
        println!("gini: {:.4}", m.gini);
        for &(f, s) in &m.top_shares {
            println!("top {:>5.2}% share: {:.4}", f * 100.0, s);
        }
        println!("median/mean: {:.4}", m.median_mean);
        for &(t, s) in &m.share_below {
            println!("share below {t}: {:.4}", s);
        }
        println!("outside attention: {}", report.outside_attention);
        match report.converged_at {
            Some(step) => println!("converged at step {step}"),
            None => println!("ran the full step budget without convergence"),
        }
        println!(
            "max conservation residual: {:.3e} * A",
            report.max_conservation_residual_rel
        );
    }
    if let Some(eq) = &report.equilibrium {
        println!(
            "free-entry equilibrium: B* = {} (interior: {}), s_bar = {}, outside absorption = {}",
            eq.builders, eq.interior, eq.attention_per_builder, eq.outside_absorption
        );
    }
    if !report.target_checks.is_empty() {
        println!("target checks:");
        for c in &report.target_checks {
            println!(
                "  [{}] {}: observed {:.4} vs target {:.4} (window [{}, {}])",
                if c.pass { "pass" } else { "FAIL" },
                c.name,
                c.observed,
                c.target,
                c.window.0,
                c.window.1
            );
        }
    }
    println!("runtime: {} ms", report.runtime_ms);
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let format: ExportFormat = args.format.parse()?;
    let config = load_run_config(&args)?;
    let report = run_scenario(&config)?;
    print_report(&report);
    if let Some(dir) = &args.out {
        let written = export_report(&report, format, dir)?;
        for path in written {
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let base = load_config_path(&args.config)?;
    let spec = SweepSpec {
        base,
        axis: args.axis.clone(),
        values: args.values.clone(),
        seeds_per_point: args.replicates,
    };
    let points = run_sweep(&spec)?;
    println!(
        "{:>12} {:>4} {:>20} {:>8} {:>8} {:>8}",
        args.axis, "rep", "seed", "gini", "top1%", "med/mean"
    );
    for p in &points {
        match &p.report {
            Some(r) => {
                let top1 = r
                    .final_metrics
                    .top_shares
                    .iter()
                    .find(|(f, _)| *f == 0.01)
                    .map(|&(_, s)| s)
                    .unwrap_or(f64::NAN);
                println!(
                    "{:>12} {:>4} {:>20} {:>8.4} {:>8.4} {:>8.4}",
                    p.axis_value,
                    p.replicate,
                    p.seed,
                    r.final_metrics.gini,
                    top1,
                    r.final_metrics.median_mean
                );
            }
            None => println!(
                "{:>12} {:>4} {:>20} failed: {}",
                p.axis_value,
                p.replicate,
                p.seed,
                p.error.as_deref().unwrap_or("unknown")
            ),
        }
    }
    if let Some(dir) = &args.out {
        let path = export_sweep(&points, dir)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_equilibrium(args: EquilibriumArgs) -> Result<()> {
    let eq = equilibrium_entry(
        args.monetization,
        args.attention,
        args.entry_cost,
        args.outside_weight,
    )?;
    println!("B* = {} (floor {})", eq.builders, eq.builders_floor);
    println!("interior: {}", eq.interior);
    println!("attention per builder: {}", eq.attention_per_builder);
    println!("profit at equilibrium: {}", eq.profit);
    println!("outside absorption: {}", eq.outside_absorption);
    let welfare = welfare_optimum(
        args.attention,
        args.outside_weight,
        args.monetization,
        args.entry_cost,
    )?;
    println!("welfare optimum B** = {}", welfare.social_optimum);
    println!("excess entry: {}", welfare.excess_entry);
    Ok(())
}

fn cmd_dilution(args: DilutionArgs) -> Result<()> {
    if args.builder_counts.is_empty() {
        return Err(Error::Validation("--B-list must be non-empty".into()));
    }
    let rows = dilution_table(
        args.attention,
        args.outside_weight,
        args.monetization,
        args.entry_cost,
        &args.builder_counts,
    );
    println!(
        "A = {}, z = {}, p = {}, k = {}",
        args.attention, args.outside_weight, args.monetization, args.entry_cost
    );
    println!("{:>10} {:>10} {:>10}", "B", "s_bar", "profit");
    for row in &rows {
        println!(
            "{:>10} {:>10} {:>10}",
            row.builders,
            display_rounded(row.average_attention),
            display_rounded(row.profit)
        );
    }
    let eq = equilibrium_entry(
        args.monetization,
        args.attention,
        args.entry_cost,
        args.outside_weight,
    )?;
    println!("zero-profit entry at B* = {}", eq.builders);
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)?;
        let mut out = String::from("builders,avg_attention,profit\n");
        for row in &rows {
            out.push_str(&format!(
                "{},{},{}\n",
                row.builders, row.average_attention, row.profit
            ));
        }
        let path = dir.join("dilution.csv");
        std::fs::write(&path, out)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_fixed_point(args: FixedPointArgs) -> Result<()> {
    let mut config = load_config_path(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = Some(seed);
    }
    config.validate()?;
    let beta = config.dynamics.beta;
    let total = config.market.aggregate_attention();
    let qualities = sample_qualities(
        &config.quality,
        config.market.builders as usize,
        derive_seed(config.seed.unwrap_or(0), "quality", 0),
        config.outside.effective_quality(beta),
    )?;
    let state = solve_fixed_point(
        &qualities,
        &config.outside,
        config.dynamics.alpha,
        beta,
        total,
    )?;
    let metrics = concentration_report(
        state.builders(),
        &config.metrics.top_fractions,
        &config.metrics.thresholds,
    )?;
    println!(
        "fixed point at alpha = {}, beta = {}",
        config.dynamics.alpha, beta
    );
    println!("gini: {:.4}", metrics.gini);
    for &(f, s) in &metrics.top_shares {
        println!("top {:>5.2}% share: {:.4}", f * 100.0, s);
    }
    println!("median/mean: {:.4}", metrics.median_mean);
    println!("outside attention: {}", state.outside());
    println!(
        "conservation residual: {:.3e} * A",
        state.conservation_residual() / total
    );
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)?;
        let mut out = String::from("builder_id,quality,attention\n");
        for (i, (&q, &x)) in qualities.realized.iter().zip(state.builders()).enumerate() {
            out.push_str(&format!("{i},{q},{x}\n"));
        }
        let path = dir.join("final_state.csv");
        std::fs::write(&path, out)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
