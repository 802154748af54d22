//! Parameter sweeps: one scenario re-run across an axis of values with
//! per-point replicate seeds.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::config::ScenarioConfig;
use crate::harness::rng::derive_seed;
use crate::harness::scenario::{run_scenario, ScenarioReport};

/// A sweep: `base` re-run with `axis` set to each value, `seeds_per_point`
/// replicates each.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub base: ScenarioConfig,
    /// Dotted parameter path, e.g. `dynamics.alpha` or `market.builders`.
    pub axis: String,
    pub values: Vec<f64>,
    pub seeds_per_point: usize,
}

/// Outcome of one `(value, replicate)` cell. Failures are recorded, not
/// propagated, so one bad point cannot abort a sweep.
#[derive(Debug, Serialize)]
pub struct SweepPoint {
    pub axis_value: f64,
    pub replicate: usize,
    pub seed: u64,
    pub report: Option<ScenarioReport>,
    pub error: Option<String>,
}

/// Set `path` to `value` on a copy of the config. Count-valued fields
/// round to the nearest integer.
///
/// Sweeping `dynamics.delta` rescales the step budget to hold
/// `delta * steps` constant, so every point reallocates the same total
/// mass and the comparison stays like-for-like.
pub fn set_axis_value(config: &ScenarioConfig, path: &str, value: f64) -> Result<ScenarioConfig> {
    let mut cfg = config.clone();
    match path {
        "market.consumers" => cfg.market.consumers = value.round() as u64,
        "market.attention_per_consumer" => cfg.market.attention_per_consumer = value,
        "market.builders" => cfg.market.builders = value.round() as u64,
        "market.monetization" => cfg.market.monetization = value,
        "market.entry_cost" => cfg.market.entry_cost = value,
        "outside.weight" => cfg.outside = crate::model::OutsideOption::Weight(value),
        "outside.quality" => cfg.outside = crate::model::OutsideOption::Quality(value),
        "dynamics.alpha" => cfg.dynamics.alpha = value,
        "dynamics.beta" => cfg.dynamics.beta = value,
        "dynamics.delta" => {
            if value > 0.0 {
                let mass = config.dynamics.delta * config.dynamics.steps as f64;
                cfg.dynamics.steps = (mass / value).round() as usize;
            }
            cfg.dynamics.delta = value;
        }
        "dynamics.steps" => cfg.dynamics.steps = value.round() as usize,
        "quality.mu" => match &mut cfg.quality {
            crate::model::QualityDistribution::Normal { mu, .. }
            | crate::model::QualityDistribution::LogNormal { mu, .. } => *mu = value,
            _ => {
                return Err(Error::Validation(format!(
                    "axis `{path}` does not apply to the configured quality distribution"
                )))
            }
        },
        "quality.sigma" => match &mut cfg.quality {
            crate::model::QualityDistribution::Normal { sigma, .. }
            | crate::model::QualityDistribution::LogNormal { sigma, .. } => *sigma = value,
            _ => {
                return Err(Error::Validation(format!(
                    "axis `{path}` does not apply to the configured quality distribution"
                )))
            }
        },
        "quality.value" => match &mut cfg.quality {
            crate::model::QualityDistribution::Constant { value: v } => *v = value,
            _ => {
                return Err(Error::Validation(format!(
                    "axis `{path}` does not apply to the configured quality distribution"
                )))
            }
        },
        _ => return Err(Error::Validation(format!("unknown sweep axis `{path}`"))),
    }
    Ok(cfg)
}

/// Threads to use for sweep points: `SATSIM_THREADS` if set, otherwise
/// the machine parallelism.
fn sweep_threads() -> usize {
    std::env::var("SATSIM_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Run every `(value, replicate)` cell. Results are ordered by
/// `(value index, replicate)`.
///
/// Per-cell seeds derive from the master seed and the replicate index
/// only: replicates get independent draws, while points along the axis
/// share them (common random numbers), so axis effects are not
/// confounded with sampling noise. Permuting `values` therefore permutes
/// the reports without changing any one of them.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepPoint>> {
    if spec.values.is_empty() {
        return Err(Error::Validation("sweep values must be non-empty".into()));
    }
    if spec.seeds_per_point == 0 {
        return Err(Error::Validation("seeds_per_point must be >= 1".into()));
    }
    // Validate the axis path up front so a typo fails the whole sweep.
    set_axis_value(&spec.base, &spec.axis, spec.values[0])?;

    let master = spec.base.seed.unwrap_or(0);
    let cells: Vec<(f64, usize)> = spec
        .values
        .iter()
        .flat_map(|&v| (0..spec.seeds_per_point).map(move |r| (v, r)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(sweep_threads())
        .build()
        .map_err(|e| Error::Validation(format!("thread pool: {e}")))?;
    let points = pool.install(|| {
        cells
            .par_iter()
            .map(|&(value, replicate)| {
                let seed = derive_seed(master, "sweep-replicate", replicate as u64);
                let outcome = set_axis_value(&spec.base, &spec.axis, value).and_then(|mut cfg| {
                    cfg.seed = Some(seed);
                    run_scenario(&cfg)
                });
                match outcome {
                    Ok(report) => SweepPoint {
                        axis_value: value,
                        replicate,
                        seed,
                        report: Some(report),
                        error: None,
                    },
                    Err(e) => SweepPoint {
                        axis_value: value,
                        replicate,
                        seed,
                        report: None,
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect()
    });
    Ok(points)
}
