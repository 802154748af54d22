//! Scenario execution: quality sampling, dynamics, metrics, and target
//! comparisons.

use std::time::Instant;

use serde::Serialize;

use crate::dynamics::{run_deterministic, run_stochastic, UpdateMode};
use crate::equilibrium::{equilibrium_entry, EquilibriumResult};
use crate::error::{Error, Result};
use crate::harness::config::ScenarioConfig;
use crate::harness::rng::{derive_seed, sample_qualities};
use crate::metrics::{concentration_report, lorenz_curve, rank_distribution};
use crate::metrics::{ConcentrationReport, CurveData};
use crate::model::{builder_profit, symmetric_average, AttentionState};

/// One row of the symmetric dilution table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DilutionRow {
    pub builders: f64,
    /// `A / (B + z)`.
    pub average_attention: f64,
    /// `p * s - k`.
    pub profit: f64,
}

/// Evaluate average attention and profit per builder at each builder
/// count. Pure closed forms; no dynamics involved.
pub fn dilution_table(
    total_attention: f64,
    outside_weight: f64,
    monetization: f64,
    entry_cost: f64,
    builder_counts: &[f64],
) -> Vec<DilutionRow> {
    builder_counts
        .iter()
        .map(|&b| {
            let s = symmetric_average(total_attention, b, outside_weight);
            DilutionRow {
                builders: b,
                average_attention: s,
                profit: builder_profit(monetization, s, entry_cost),
            }
        })
        .collect()
}

/// One comparison against a published target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetCheck {
    pub name: String,
    pub observed: f64,
    pub target: f64,
    /// Acceptance window `[lo, hi]` for the observed value.
    pub window: (f64, f64),
    pub pass: bool,
}

impl TargetCheck {
    fn new(name: &str, observed: f64, target: f64, window: (f64, f64)) -> Self {
        Self {
            name: name.to_string(),
            observed,
            target,
            window,
            pass: observed >= window.0 && observed <= window.1,
        }
    }
}

/// Everything one run produces.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub config_echo: ScenarioConfig,
    pub final_metrics: ConcentrationReport,
    pub lorenz: CurveData,
    pub rank: CurveData,
    pub equilibrium: Option<EquilibriumResult>,
    /// Present for analytic dilution scenarios.
    pub dilution: Option<Vec<DilutionRow>>,
    pub target_checks: Vec<TargetCheck>,
    pub converged_at: Option<usize>,
    /// Largest per-step conservation residual observed, relative to `A`.
    pub max_conservation_residual_rel: f64,
    pub runtime_ms: u64,
    /// Realized qualities, parallel to `final_attention` (skipped in the
    /// JSON bundle; exported as final_state.csv).
    #[serde(skip)]
    pub qualities: Vec<f64>,
    /// Final builder attention vector.
    #[serde(skip)]
    pub final_attention: Vec<f64>,
    /// Final outside-option stock.
    pub outside_attention: f64,
}

fn check_budget(config: &ScenarioConfig, started: Instant, phase: &str) -> Result<()> {
    if let Some(budget) = config.runtime_budget_ms {
        let elapsed = started.elapsed().as_millis() as u64;
        if elapsed > budget {
            return Err(Error::Timeout(format!(
                "{elapsed} ms after {phase} exceeds budget of {budget} ms"
            )));
        }
    }
    Ok(())
}

/// Run one scenario end to end: sample qualities, evolve the state from
/// the uniform initial condition, compute metrics and curves, and grade
/// any built-in targets.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioReport> {
    config.validate()?;
    let started = Instant::now();

    let total = config.market.aggregate_attention();
    let beta = config.dynamics.beta;
    let z = config.outside_weight();
    let equilibrium = if z > 0.0 {
        Some(equilibrium_entry(
            config.market.monetization,
            total,
            config.market.entry_cost,
            z,
        )?)
    } else {
        None
    };

    if let Some(counts) = &config.dilution {
        return run_dilution_scenario(config, counts, total, z, equilibrium, started);
    }

    let builders = config.market.builders as usize;
    let quality_seed = derive_seed(config.seed.unwrap_or(0), "quality", 0);
    let qualities = sample_qualities(
        &config.quality,
        builders,
        quality_seed,
        config.outside.effective_quality(beta),
    )?;
    check_budget(config, started, "quality sampling")?;

    let initial = AttentionState::uniform(builders, z, total);
    let trajectory = match config.dynamics.mode {
        UpdateMode::Deterministic => run_deterministic(&initial, &qualities, &config.dynamics)?,
        UpdateMode::Stochastic => {
            let dyn_seed = derive_seed(config.seed.unwrap_or(0), "dynamics", 0);
            run_stochastic(&initial, &qualities, &config.dynamics, dyn_seed)?
        }
    };
    check_budget(config, started, "dynamics")?;

    let final_attention = trajectory.final_state.builders().to_vec();
    let final_metrics = concentration_report(
        &final_attention,
        &config.metrics.top_fractions,
        &config.metrics.thresholds,
    )?;
    let lorenz = lorenz_curve(&final_attention, config.metrics.lorenz_points)?;
    let rank = rank_distribution(&final_attention);
    check_budget(config, started, "metrics")?;

    let target_checks = builtin_target_checks(config, &final_metrics);

    Ok(ScenarioReport {
        config_echo: config.clone(),
        final_metrics,
        lorenz,
        rank,
        equilibrium,
        dilution: None,
        target_checks,
        converged_at: trajectory.converged_at,
        max_conservation_residual_rel: trajectory.max_conservation_residual / total,
        runtime_ms: started.elapsed().as_millis() as u64,
        qualities: qualities.realized,
        final_attention,
        outside_attention: trajectory.final_state.outside(),
    })
}

fn run_dilution_scenario(
    config: &ScenarioConfig,
    counts: &[f64],
    total: f64,
    z: f64,
    equilibrium: Option<EquilibriumResult>,
    started: Instant,
) -> Result<ScenarioReport> {
    let rows = dilution_table(
        total,
        z,
        config.market.monetization,
        config.market.entry_cost,
        counts,
    );
    let mut checks = Vec::new();
    if config.name.as_deref() == Some("dilution") {
        checks = dilution_target_checks(&rows);
    }

    // Metrics describe the symmetric allocation at the configured B:
    // every builder holds A/(B+z) exactly.
    let builders = config.market.builders as usize;
    let share = symmetric_average(total, builders as f64, z);
    let final_attention = vec![share; builders];
    let final_metrics = concentration_report(
        &final_attention,
        &config.metrics.top_fractions,
        &config.metrics.thresholds,
    )?;
    let lorenz = lorenz_curve(&final_attention, config.metrics.lorenz_points)?;
    let rank = rank_distribution(&final_attention);

    Ok(ScenarioReport {
        config_echo: config.clone(),
        final_metrics,
        lorenz,
        rank,
        equilibrium,
        dilution: Some(rows),
        target_checks: checks,
        converged_at: None,
        max_conservation_residual_rel: 0.0,
        runtime_ms: started.elapsed().as_millis() as u64,
        qualities: vec![0.0; builders],
        final_attention,
        outside_attention: total - share * builders as f64,
    })
}

/// Format a table value the way the dilution table prints it: one
/// decimal at magnitude >= 10, two below.
pub fn display_rounded(v: f64) -> String {
    if v.abs() >= 10.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.2}")
    }
}

fn displayed_window(target: f64) -> (f64, f64) {
    // Half an ulp of the displayed precision.
    let half = if target.abs() >= 10.0 { 0.05 } else { 0.005 };
    (target - half, target + half)
}

fn dilution_target_checks(rows: &[DilutionRow]) -> Vec<TargetCheck> {
    // Published (B, s-bar, profit) rows for A = 10000, z = 100, p = 1,
    // k = 1.
    const TABLE: [(f64, f64, f64); 6] = [
        (100.0, 50.0, 49.0),
        (500.0, 16.7, 15.7),
        (1_000.0, 9.09, 8.09),
        (5_000.0, 1.96, 0.96),
        (9_900.0, 1.00, 0.00),
        (50_000.0, 0.20, -0.80),
    ];
    let mut checks = Vec::new();
    for (b, s_target, pi_target) in TABLE {
        let Some(row) = rows.iter().find(|r| r.builders == b) else {
            continue;
        };
        checks.push(TargetCheck::new(
            &format!("s_bar(B={b})"),
            row.average_attention,
            s_target,
            displayed_window(s_target),
        ));
        checks.push(TargetCheck::new(
            &format!("profit(B={b})"),
            row.profit,
            pi_target,
            displayed_window(pi_target),
        ));
    }
    checks
}

/// Target checks for the built-in dynamic scenarios.
///
/// Only windows with an authoritative basis are graded: the published
/// concentration tables are single unseeded draws whose low-alpha columns
/// disagree with the closed-form oracles, so per-column absolute checks
/// would grade noise. What remains: the alpha = 1 illustrative run must
/// exceed Gini 0.8 and top-1% 0.45, and the alpha = 0.6 calibration run
/// is compared against the App Store windows.
fn builtin_target_checks(
    config: &ScenarioConfig,
    metrics: &ConcentrationReport,
) -> Vec<TargetCheck> {
    let mut checks = Vec::new();
    let top1 = metrics
        .top_shares
        .iter()
        .find(|(f, _)| *f == 0.01)
        .map(|&(_, s)| s);
    match config.name.as_deref() {
        Some("illustrative") if config.dynamics.alpha == 1.0 => {
            checks.push(TargetCheck::new(
                "gini(alpha=1)",
                metrics.gini,
                0.87,
                (0.8, 1.0),
            ));
            if let Some(top1) = top1 {
                checks.push(TargetCheck::new(
                    "top_1pct(alpha=1)",
                    top1,
                    0.627,
                    (0.45, 1.0),
                ));
            }
        }
        Some("calibration") if config.dynamics.alpha == 0.6 => {
            if let Some(top1) = top1 {
                checks.push(TargetCheck::new(
                    "top_1pct(alpha=0.6)",
                    top1,
                    0.687,
                    (0.55, 0.80),
                ));
            }
            if let Some(&(_, below)) = metrics.share_below.iter().find(|(t, _)| *t == 100.0) {
                checks.push(TargetCheck::new(
                    "share_below_100(alpha=0.6)",
                    below,
                    0.228,
                    (0.10, 0.35),
                ));
            }
        }
        _ => {}
    }
    checks
}
