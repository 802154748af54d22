//! Scenario configuration: TOML schema, validation, and the built-in
//! scenarios.
//!
//! Configs are a single TOML document with sections `market`, `outside`,
//! `quality`, `dynamics`, optional `metrics` and `dilution`, plus
//! top-level `name`, `seed`, and `runtime_budget_ms`. Unknown keys are
//! rejected (fail-closed) so typos in sweep automation surface
//! immediately.

use serde::{Deserialize, Serialize};

use crate::dynamics::{DynamicsConfig, UpdateMode};
use crate::error::{Error, Result};
use crate::model::{MarketParams, OutsideOption, QualityDistribution};

/// Metric requests attached to a scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsSpec {
    pub top_fractions: Vec<f64>,
    pub thresholds: Vec<f64>,
    pub lorenz_points: usize,
}

impl Default for MetricsSpec {
    fn default() -> Self {
        Self {
            top_fractions: vec![0.01, 0.1],
            thresholds: vec![100.0],
            lorenz_points: 200,
        }
    }
}

impl MetricsSpec {
    fn validate(&self) -> Result<()> {
        if self.top_fractions.iter().any(|f| !(*f > 0.0 && *f <= 1.0)) {
            return Err(Error::Validation(
                "metrics.top_fractions must lie in (0, 1]".into(),
            ));
        }
        if self.thresholds.iter().any(|t| !t.is_finite() || *t <= 0.0) {
            return Err(Error::Validation(
                "metrics.thresholds must be positive".into(),
            ));
        }
        if self.lorenz_points == 0 {
            return Err(Error::Validation(
                "metrics.lorenz_points must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// A fully validated scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub name: Option<String>,
    /// Master seed; required when qualities are random or the update is
    /// stochastic.
    pub seed: Option<u64>,
    pub market: MarketParams,
    pub outside: OutsideOption,
    /// Distribution spec only; realized draws are sampled at run time.
    pub quality: QualityDistribution,
    pub dynamics: DynamicsConfig,
    pub metrics: MetricsSpec,
    /// When present the scenario bypasses dynamics and evaluates the
    /// symmetric dilution table at these builder counts.
    pub dilution: Option<Vec<f64>>,
    pub runtime_budget_ms: Option<u64>,
    /// Non-fatal notes recorded during loading (e.g. both `weight` and
    /// `quality` given for the outside option).
    pub warnings: Vec<String>,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.market.validate()?;
        self.outside.validate()?;
        self.quality.validate()?;
        self.dynamics.validate()?;
        self.metrics.validate()?;
        if let Some(counts) = &self.dilution {
            if counts.is_empty() {
                return Err(Error::Validation(
                    "dilution.builder_counts must be non-empty".into(),
                ));
            }
            if counts.iter().any(|b| !b.is_finite() || *b < 0.0) {
                return Err(Error::Validation(
                    "dilution.builder_counts must be non-negative".into(),
                ));
            }
        }
        let needs_seed =
            !self.quality.is_degenerate() || self.dynamics.mode == UpdateMode::Stochastic;
        if needs_seed && self.seed.is_none() {
            return Err(Error::Validation(
                "seed is required when quality is random or mode is stochastic".into(),
            ));
        }
        Ok(())
    }

    /// Effective outside weight `z` under this scenario's `beta`.
    pub fn outside_weight(&self) -> f64 {
        self.outside.weight(self.dynamics.beta)
    }
}

// ── raw TOML schema ─────────────────────────────────────────────────────

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: Option<String>,
    seed: Option<u64>,
    runtime_budget_ms: Option<u64>,
    market: RawMarket,
    outside: RawOutside,
    quality: RawQuality,
    dynamics: RawDynamics,
    #[serde(default)]
    metrics: Option<RawMetrics>,
    #[serde(default)]
    dilution: Option<RawDilution>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMarket {
    population: Option<u64>,
    consumers: u64,
    attention_per_consumer: f64,
    builders: u64,
    monetization: f64,
    entry_cost: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutside {
    weight: Option<f64>,
    quality: Option<f64>,
    #[serde(default)]
    absent: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuality {
    distribution: String,
    value: Option<f64>,
    mu: Option<f64>,
    sigma: Option<f64>,
    lo: Option<f64>,
    hi: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDynamics {
    alpha: f64,
    beta: f64,
    delta: f64,
    steps: usize,
    mode: Option<String>,
    convergence_tol: Option<f64>,
    snapshot_every: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMetrics {
    top_fractions: Option<Vec<f64>>,
    thresholds: Option<Vec<f64>>,
    lorenz_points: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDilution {
    builder_counts: Vec<f64>,
}

fn require_only(
    section: &str,
    distribution: &str,
    allowed: &[(&str, Option<f64>)],
    forbidden: &[(&str, Option<f64>)],
) -> Result<Vec<f64>> {
    for (key, v) in forbidden {
        if v.is_some() {
            return Err(Error::Validation(format!(
                "{section}: key `{key}` does not apply to distribution `{distribution}`"
            )));
        }
    }
    allowed
        .iter()
        .map(|(key, v)| {
            v.ok_or_else(|| {
                Error::Validation(format!(
                    "{section}: distribution `{distribution}` requires key `{key}`"
                ))
            })
        })
        .collect()
}

impl RawConfig {
    fn into_config(self) -> Result<ScenarioConfig> {
        let mut warnings = Vec::new();

        let outside = if self.outside.absent {
            if self.outside.weight.is_some() || self.outside.quality.is_some() {
                return Err(Error::Validation(
                    "outside: `absent = true` excludes `weight` and `quality`".into(),
                ));
            }
            OutsideOption::Absent
        } else {
            match (self.outside.weight, self.outside.quality) {
                (Some(z), None) => OutsideOption::Weight(z),
                (None, Some(q0)) => OutsideOption::Quality(q0),
                (Some(z), Some(q0)) => {
                    warnings.push(format!(
                        "outside: both weight ({z}) and quality ({q0}) given; \
                         the weight takes precedence"
                    ));
                    OutsideOption::Weight(z)
                }
                (None, None) => {
                    return Err(Error::Validation(
                        "outside: give `weight`, `quality`, or `absent = true`".into(),
                    ))
                }
            }
        };

        let q = &self.quality;
        let quality = match q.distribution.as_str() {
            "constant" => {
                let v = require_only(
                    "quality",
                    "constant",
                    &[("value", q.value)],
                    &[("mu", q.mu), ("sigma", q.sigma), ("lo", q.lo), ("hi", q.hi)],
                )?;
                QualityDistribution::Constant { value: v[0] }
            }
            "normal" => {
                let v = require_only(
                    "quality",
                    "normal",
                    &[("mu", q.mu), ("sigma", q.sigma)],
                    &[("value", q.value), ("lo", q.lo), ("hi", q.hi)],
                )?;
                QualityDistribution::Normal {
                    mu: v[0],
                    sigma: v[1],
                }
            }
            "uniform" => {
                let v = require_only(
                    "quality",
                    "uniform",
                    &[("lo", q.lo), ("hi", q.hi)],
                    &[("value", q.value), ("mu", q.mu), ("sigma", q.sigma)],
                )?;
                QualityDistribution::Uniform { lo: v[0], hi: v[1] }
            }
            "lognormal" => {
                let v = require_only(
                    "quality",
                    "lognormal",
                    &[("mu", q.mu), ("sigma", q.sigma)],
                    &[("value", q.value), ("lo", q.lo), ("hi", q.hi)],
                )?;
                QualityDistribution::LogNormal {
                    mu: v[0],
                    sigma: v[1],
                }
            }
            other => {
                return Err(Error::Validation(format!(
                    "quality: unknown distribution `{other}` \
                     (expected constant|normal|uniform|lognormal)"
                )))
            }
        };

        let mode = match self.dynamics.mode.as_deref() {
            None | Some("deterministic") => UpdateMode::Deterministic,
            Some("stochastic") => UpdateMode::Stochastic,
            Some(other) => {
                return Err(Error::Validation(format!(
                    "dynamics: unknown mode `{other}` (expected deterministic|stochastic)"
                )))
            }
        };

        let metrics = match self.metrics {
            None => MetricsSpec::default(),
            Some(raw) => {
                let defaults = MetricsSpec::default();
                MetricsSpec {
                    top_fractions: raw.top_fractions.unwrap_or(defaults.top_fractions),
                    thresholds: raw.thresholds.unwrap_or(defaults.thresholds),
                    lorenz_points: raw.lorenz_points.unwrap_or(defaults.lorenz_points),
                }
            }
        };

        let config = ScenarioConfig {
            name: self.name,
            seed: self.seed,
            market: MarketParams {
                population: self.market.population,
                consumers: self.market.consumers,
                attention_per_consumer: self.market.attention_per_consumer,
                builders: self.market.builders,
                monetization: self.market.monetization,
                entry_cost: self.market.entry_cost,
            },
            outside,
            quality,
            dynamics: DynamicsConfig {
                alpha: self.dynamics.alpha,
                beta: self.dynamics.beta,
                delta: self.dynamics.delta,
                steps: self.dynamics.steps,
                mode,
                convergence_tol: self
                    .dynamics
                    .convergence_tol
                    .unwrap_or(DynamicsConfig::DEFAULT_CONVERGENCE_TOL),
                snapshot_every: self.dynamics.snapshot_every,
            },
            metrics,
            dilution: self.dilution.map(|d| d.builder_counts),
            runtime_budget_ms: self.runtime_budget_ms,
            warnings,
        };
        config.validate()?;
        Ok(config)
    }
}

/// Names of the built-in scenarios.
pub const BUILTIN_SCENARIOS: [&str; 3] = ["illustrative", "dilution", "calibration"];

/// Illustrative market: 10,000 attention units over 1,000 builders with
/// unit-normal quality, z = 100, beta = 1, delta = 0.1, T = 500. The
/// convergence tolerance is pinned far below the default so the run
/// covers the full published horizon even when absolute step changes get
/// small (at alpha = 1 the builder stocks keep differentiating long
/// after their absolute changes shrink).
const ILLUSTRATIVE_TOML: &str = r#"
name = "illustrative"
seed = 42

[market]
consumers = 10000
attention_per_consumer = 1.0
builders = 1000
monetization = 1.0
entry_cost = 1.0

[outside]
weight = 100.0
quality = 0.0

[quality]
distribution = "normal"
mu = 0.0
sigma = 1.0

[dynamics]
alpha = 1.0
beta = 1.0
delta = 0.1
steps = 500
mode = "deterministic"
convergence_tol = 1e-30

[metrics]
top_fractions = [0.01, 0.1]
thresholds = [100.0]
lorenz_points = 200
"#;

/// Symmetric dilution sweep: A = 10,000, z = 100, p = 1, k = 1, evaluated
/// analytically at the listed builder counts (zero-profit entry lands at
/// B* = 9,900).
const DILUTION_TOML: &str = r#"
name = "dilution"

[market]
consumers = 10000
attention_per_consumer = 1.0
builders = 9900
monetization = 1.0
entry_cost = 1.0

[outside]
weight = 100.0

[quality]
distribution = "constant"
value = 0.0

[dynamics]
alpha = 0.0
beta = 1.0
delta = 0.1
steps = 0

[dilution]
builder_counts = [100, 500, 1000, 5000, 9900, 50000]
"#;

/// App Store calibration: 800,000 builders, 3.8e10 attention units,
/// z = 50,000, N(0, 1.5^2) quality, beta = 1, delta = 0.1, T = 300.
/// Snapshots are disabled: 150 dense states of 800,000 stocks would
/// retain about a gigabyte.
const CALIBRATION_TOML: &str = r#"
name = "calibration"
seed = 7

[market]
consumers = 38000000000
attention_per_consumer = 1.0
builders = 800000
monetization = 1.0
entry_cost = 1.0

[outside]
weight = 50000.0
quality = 0.0

[quality]
distribution = "normal"
mu = 0.0
sigma = 1.5

[dynamics]
alpha = 0.6
beta = 1.0
delta = 0.1
steps = 300
mode = "deterministic"
convergence_tol = 1e-30
snapshot_every = 0

[metrics]
top_fractions = [0.01, 0.1]
thresholds = [100.0]
lorenz_points = 200
"#;

/// The built-in scenario for `name`, if any.
pub fn builtin_config(name: &str) -> Option<ScenarioConfig> {
    let toml = match name {
        "illustrative" => ILLUSTRATIVE_TOML,
        "dilution" => DILUTION_TOML,
        "calibration" => CALIBRATION_TOML,
        _ => return None,
    };
    Some(parse_config(toml).expect("built-in configs are valid"))
}

fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let msg = e.to_string();
        if msg.contains("unknown field") {
            Error::Validation(format!("unknown key: {msg}"))
        } else {
            Error::Parse(msg)
        }
    })?;
    raw.into_config()
}

/// Parse and validate a config document. A source that consists of
/// nothing but a built-in scenario name resolves to that built-in.
pub fn load_config(source: &str) -> Result<ScenarioConfig> {
    let trimmed = source.trim();
    if let Some(builtin) = builtin_config(trimmed) {
        return Ok(builtin);
    }
    parse_config(source)
}

/// Load a config from a file path, or by built-in name if `path` names a
/// scenario rather than a file.
pub fn load_config_path(path: &str) -> Result<ScenarioConfig> {
    if let Some(builtin) = builtin_config(path) {
        return Ok(builtin);
    }
    let text = std::fs::read_to_string(path)?;
    load_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn illustrative_builtin_matches_published_parameters() {
        let cfg = builtin_config("illustrative").unwrap();
        assert_eq!(cfg.market.consumers, 10_000);
        assert_eq!(cfg.market.attention_per_consumer, 1.0);
        assert_eq!(cfg.market.aggregate_attention(), 10_000.0);
        assert_eq!(cfg.market.builders, 1_000);
        assert_eq!(cfg.outside, OutsideOption::Weight(100.0));
        assert_eq!(
            cfg.quality,
            QualityDistribution::Normal {
                mu: 0.0,
                sigma: 1.0
            }
        );
        assert_eq!(cfg.dynamics.beta, 1.0);
        assert_eq!(cfg.dynamics.delta, 0.1);
        assert_eq!(cfg.dynamics.steps, 500);
        // z and q0 are both published; the weight wins and the load
        // records it.
        assert_eq!(cfg.warnings.len(), 1);
    }

    #[test]
    fn calibration_builtin_matches_published_parameters() {
        let cfg = builtin_config("calibration").unwrap();
        assert_eq!(cfg.market.builders, 800_000);
        assert_eq!(cfg.market.aggregate_attention(), 3.8e10);
        assert_eq!(cfg.outside, OutsideOption::Weight(50_000.0));
        assert_eq!(
            cfg.quality,
            QualityDistribution::Normal {
                mu: 0.0,
                sigma: 1.5
            }
        );
        assert_eq!(cfg.dynamics.alpha, 0.6);
        assert_eq!(cfg.dynamics.steps, 300);
        assert_eq!(cfg.dynamics.snapshot_every, Some(0));
    }

    #[test]
    fn dilution_builtin_lists_table_rows() {
        let cfg = builtin_config("dilution").unwrap();
        assert_eq!(
            cfg.dilution.as_deref().unwrap(),
            &[100.0, 500.0, 1_000.0, 5_000.0, 9_900.0, 50_000.0]
        );
        assert_eq!(cfg.market.entry_cost, 1.0);
        assert_eq!(cfg.outside_weight(), 100.0);
    }

    #[test]
    fn load_config_resolves_builtin_names() {
        let cfg = load_config("illustrative").unwrap();
        assert_eq!(cfg.name.as_deref(), Some("illustrative"));
        let cfg = load_config("  calibration \n").unwrap();
        assert_eq!(cfg.name.as_deref(), Some("calibration"));
    }

    fn minimal_toml(dynamics_extra: &str) -> String {
        format!(
            r#"
seed = 1
[market]
consumers = 100
attention_per_consumer = 1.0
builders = 10
monetization = 1.0
entry_cost = 1.0
[outside]
weight = 5.0
[quality]
distribution = "normal"
mu = 0.0
sigma = 1.0
[dynamics]
alpha = 0.5
beta = 1.0
delta = 0.1
steps = 10
{dynamics_extra}
"#
        )
    }

    #[test]
    fn valid_minimal_config_applies_defaults() {
        let cfg = load_config(&minimal_toml("")).unwrap();
        assert_eq!(cfg.metrics, MetricsSpec::default());
        assert_eq!(cfg.dynamics.convergence_tol, 1e-10);
        assert_eq!(cfg.dynamics.mode, UpdateMode::Deterministic);
        assert!(cfg.dilution.is_none());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = minimal_toml("stepz = 3");
        let err = load_config(&text).unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
        assert!(err.to_string().contains("unknown"));
    }

    #[test]
    fn malformed_toml_is_a_parse_error() {
        assert!(matches!(
            load_config("[market\nconsumers = 1"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn delta_zero_fails_validation() {
        let text = minimal_toml("").replace("delta = 0.1", "delta = 0.0");
        assert!(matches!(load_config(&text), Err(Error::Validation(_))));
    }

    #[test]
    fn missing_seed_with_random_quality_is_rejected() {
        let text = minimal_toml("").replace("seed = 1\n", "");
        let err = load_config(&text).unwrap_err();
        assert!(err.to_string().contains("seed"));
        // Constant quality needs no seed.
        let text = text
            .replace("distribution = \"normal\"", "distribution = \"constant\"")
            .replace("mu = 0.0\nsigma = 1.0", "value = 0.0");
        assert!(load_config(&text).is_ok());
    }

    #[test]
    fn stochastic_mode_requires_seed() {
        let text = minimal_toml("mode = \"stochastic\"")
            .replace("distribution = \"normal\"", "distribution = \"constant\"")
            .replace("mu = 0.0\nsigma = 1.0", "value = 0.0")
            .replace("seed = 1\n", "");
        assert!(matches!(load_config(&text), Err(Error::Validation(_))));
    }

    #[test]
    fn quality_keys_must_match_distribution() {
        let text = minimal_toml("").replace("mu = 0.0", "value = 1.0\nmu = 0.0");
        let err = load_config(&text).unwrap_err();
        assert!(err.to_string().contains("value"));
        let text = minimal_toml("").replace("sigma = 1.0\n", "");
        assert!(load_config(&text).is_err());
    }

    #[test]
    fn outside_weight_precedence_records_warning() {
        let text = minimal_toml("").replace("weight = 5.0", "weight = 5.0\nquality = 0.3");
        let cfg = load_config(&text).unwrap();
        assert_eq!(cfg.outside, OutsideOption::Weight(5.0));
        assert_eq!(cfg.warnings.len(), 1);

        let text = minimal_toml("").replace("weight = 5.0", "absent = true");
        let cfg = load_config(&text).unwrap();
        assert_eq!(cfg.outside, OutsideOption::Absent);

        let text = minimal_toml("").replace("weight = 5.0", "");
        assert!(load_config(&text).is_err());
    }
}
