//! Primitive types and single-period formulas of the attention market.
//!
//! The market hands a fixed attention pool `A = M * a` to `B` builders and
//! one outside option. Static allocation follows the discrete-choice
//! (logit) rule: builder `i` with quality `q_i` receives
//! `A * exp(beta q_i) / (sum_j exp(beta q_j) + w0)`, where `w0` is the
//! outside option's effective weight. All exponential sums are evaluated
//! in log space (max-subtracted log-sum-exp), so shares stay finite
//! whenever the true values are representable.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{log_sum_exp, RunningSum};

/// Relative tolerance for the attention-conservation invariant.
pub const CONSERVATION_RTOL: f64 = 1e-12;

/// Supply and demand primitives of one market.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarketParams {
    /// Total population `N`. Informational only: no formula uses it, but
    /// when present it bounds both `consumers` and `builders`.
    pub population: Option<u64>,
    /// Number of consumers `M`.
    pub consumers: u64,
    /// Attention budget per consumer per period, `a`.
    pub attention_per_consumer: f64,
    /// Number of builders `B`.
    pub builders: u64,
    /// Value captured per unit of attention, `p`.
    pub monetization: f64,
    /// Fixed cost of entry, `k`. Marginal cost is identically zero.
    pub entry_cost: f64,
}

impl MarketParams {
    pub fn validate(&self) -> Result<()> {
        if self.consumers < 1 {
            return Err(Error::Validation("consumers must be >= 1".into()));
        }
        if !(self.attention_per_consumer.is_finite() && self.attention_per_consumer > 0.0) {
            return Err(Error::Validation(
                "attention_per_consumer must be positive and finite".into(),
            ));
        }
        if !(self.monetization.is_finite() && self.monetization > 0.0) {
            return Err(Error::Validation("monetization must be positive".into()));
        }
        if !(self.entry_cost.is_finite() && self.entry_cost > 0.0) {
            return Err(Error::Validation("entry_cost must be positive".into()));
        }
        if let Some(n) = self.population {
            if self.consumers > n {
                return Err(Error::Validation(format!(
                    "consumers ({}) exceeds population ({n})",
                    self.consumers
                )));
            }
            if self.builders > n {
                return Err(Error::Validation(format!(
                    "builders ({}) exceeds population ({n})",
                    self.builders
                )));
            }
        }
        let a_total = self.aggregate_attention();
        if !(a_total.is_finite() && a_total > 0.0) {
            return Err(Error::Validation(format!(
                "aggregate attention M*a = {a_total} must be positive and finite"
            )));
        }
        Ok(())
    }

    /// Total attention available per period, `A = M * a`.
    pub fn aggregate_attention(&self) -> f64 {
        aggregate_attention(self.consumers, self.attention_per_consumer)
    }
}

/// `A = M * a`. Zero consumers yield zero; callers that require `A > 0`
/// flag that themselves.
pub fn aggregate_attention(consumers: u64, attention_per_consumer: f64) -> f64 {
    consumers as f64 * attention_per_consumer
}

/// The "do nothing / stay with incumbents" alternative.
///
/// Given either as an effective logit weight `z` or as a quality `q0`
/// (weight `exp(beta * q0)`). `Absent` is the `q0 -> -inf` sentinel: no
/// outside option competes for attention. When a config supplies both
/// forms, the weight wins and a warning is recorded at load time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutsideOption {
    Weight(f64),
    Quality(f64),
    Absent,
}

impl OutsideOption {
    pub fn validate(&self) -> Result<()> {
        match *self {
            OutsideOption::Weight(z) if !(z.is_finite() && z > 0.0) => Err(Error::Validation(
                format!("outside weight must be positive and finite, got {z}"),
            )),
            OutsideOption::Quality(q0) if q0.is_nan() || q0 == f64::INFINITY => Err(
                Error::Validation(format!("outside quality must not be NaN/+inf, got {q0}")),
            ),
            _ => Ok(()),
        }
    }

    /// Natural log of the effective logit weight: `ln z`, `beta * q0`, or
    /// `-inf` when absent.
    pub fn log_weight(&self, beta: f64) -> f64 {
        match *self {
            OutsideOption::Weight(z) => z.ln(),
            OutsideOption::Quality(q0) => beta * q0,
            OutsideOption::Absent => f64::NEG_INFINITY,
        }
    }

    /// Effective weight `z` (or `exp(beta q0)`); zero when absent.
    pub fn weight(&self, beta: f64) -> f64 {
        match *self {
            OutsideOption::Weight(z) => z,
            _ => self.log_weight(beta).exp(),
        }
    }

    /// Quality level whose logit weight equals this option's weight,
    /// i.e. `ln(z)/beta` for a direct weight. This is what the
    /// reinforcement dynamics store as the outside option's quality.
    pub fn effective_quality(&self, beta: f64) -> f64 {
        match *self {
            OutsideOption::Weight(z) => z.ln() / beta,
            OutsideOption::Quality(q0) => q0,
            OutsideOption::Absent => f64::NEG_INFINITY,
        }
    }
}

/// Effective outside-option weight `exp(beta * (q0 - q))` relative to a
/// common builder quality `q`.
pub fn outside_weight(outside_quality: f64, reference_quality: f64, beta: f64) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Validation(format!(
            "beta must be positive, got {beta}"
        )));
    }
    let w = (beta * (outside_quality - reference_quality)).exp();
    if !w.is_finite() {
        return Err(Error::NumericalRange(format!(
            "exp({beta} * ({outside_quality} - {reference_quality})) overflows"
        )));
    }
    Ok(w)
}

/// Quality distribution spec.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QualityDistribution {
    Constant { value: f64 },
    Normal { mu: f64, sigma: f64 },
    Uniform { lo: f64, hi: f64 },
    LogNormal { mu: f64, sigma: f64 },
}

impl QualityDistribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            QualityDistribution::Constant { value } if !value.is_finite() => {
                Err(Error::Validation("constant quality must be finite".into()))
            }
            QualityDistribution::Normal { mu, sigma }
            | QualityDistribution::LogNormal { mu, sigma }
                if !(mu.is_finite() && sigma.is_finite() && sigma >= 0.0) =>
            {
                Err(Error::Validation(format!(
                    "normal/lognormal quality requires finite mu and sigma >= 0, got mu={mu} sigma={sigma}"
                )))
            }
            QualityDistribution::Uniform { lo, hi }
                if !(lo.is_finite() && hi.is_finite() && lo < hi) =>
            {
                Err(Error::Validation(format!(
                    "uniform quality requires lo < hi, got lo={lo} hi={hi}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// True when every draw takes a single value.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            *self,
            QualityDistribution::Constant { .. }
                | QualityDistribution::Normal { sigma: 0.0, .. }
                | QualityDistribution::LogNormal { sigma: 0.0, .. }
        )
    }
}

/// Realized quality draws for one market instance.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityModel {
    pub distribution: QualityDistribution,
    /// `q_1 .. q_B`.
    pub realized: Vec<f64>,
    /// Effective outside-option quality `q0`; `-inf` means no outside
    /// option.
    pub outside_quality: f64,
}

impl QualityModel {
    pub fn new(
        distribution: QualityDistribution,
        realized: Vec<f64>,
        outside_quality: f64,
    ) -> Result<Self> {
        distribution.validate()?;
        if realized.iter().any(|q| !q.is_finite()) {
            return Err(Error::Validation(
                "realized qualities must all be finite".into(),
            ));
        }
        if let QualityDistribution::Constant { value } = distribution {
            if realized.iter().any(|&q| q != value) {
                return Err(Error::Validation(format!(
                    "constant({value}) quality model contains a differing realized value"
                )));
            }
        }
        if outside_quality.is_nan() || outside_quality == f64::INFINITY {
            return Err(Error::Validation(
                "outside quality must be finite or -inf".into(),
            ));
        }
        Ok(Self {
            distribution,
            realized,
            outside_quality,
        })
    }

    /// All builders share quality `value`.
    pub fn constant(builders: usize, value: f64, outside_quality: f64) -> Self {
        Self {
            distribution: QualityDistribution::Constant { value },
            realized: vec![value; builders],
            outside_quality,
        }
    }

    pub fn builders(&self) -> usize {
        self.realized.len()
    }
}

/// The dynamical state: outside stock `x0` plus one stock per builder,
/// summing to the attention pool `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionState {
    outside: f64,
    builders: Vec<f64>,
    total: f64,
}

impl AttentionState {
    /// Checks non-negativity and conservation (`x0 + sum x_i = A` within
    /// `CONSERVATION_RTOL * A`).
    pub fn new(outside: f64, builders: Vec<f64>, total: f64) -> Result<Self> {
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::Validation(format!(
                "total attention must be positive and finite, got {total}"
            )));
        }
        if outside < 0.0 || builders.iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(Error::Validation(
                "attention stocks must be non-negative and finite".into(),
            ));
        }
        let state = Self {
            outside,
            builders,
            total,
        };
        let residual = state.conservation_residual();
        if residual > CONSERVATION_RTOL * total {
            return Err(Error::Validation(format!(
                "attention not conserved: |x0 + sum(x) - A| = {residual:e} exceeds {CONSERVATION_RTOL:e} * A"
            )));
        }
        Ok(state)
    }

    /// Uniform initial condition: `x_i(0) = A/(B+z)` for every builder and
    /// `x0(0) = z A/(B+z)`.
    pub fn uniform(builders: usize, outside_weight: f64, total: f64) -> Self {
        let denom = builders as f64 + outside_weight;
        let per_builder = total / denom;
        Self {
            outside: outside_weight * total / denom,
            builders: vec![per_builder; builders],
            total,
        }
    }

    pub(crate) fn from_parts_unchecked(outside: f64, builders: Vec<f64>, total: f64) -> Self {
        Self {
            outside,
            builders,
            total,
        }
    }

    pub fn outside(&self) -> f64 {
        self.outside
    }

    pub fn builders(&self) -> &[f64] {
        &self.builders
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// `|x0 + sum(x_i) - A|`, computed with compensated summation.
    pub fn conservation_residual(&self) -> f64 {
        let mut acc = RunningSum::new();
        acc.add(self.outside);
        for &x in &self.builders {
            acc.add(x);
        }
        (acc.value() - self.total).abs()
    }
}

/// Output of the static logit allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationResult {
    /// Attention captured by each builder, `s_1 .. s_B`.
    pub shares: Vec<f64>,
    /// Attention absorbed by the outside option.
    pub outside_share: f64,
    /// `ln Z` where `Z = sum_j exp(beta q_j) + w0` is the logit
    /// normalizer. Kept in log form; `Z` itself may overflow f64 even
    /// when every share is representable.
    pub log_normalizer: f64,
}

impl AllocationResult {
    /// The normalizer `Z` itself (may be `inf` for extreme inputs).
    pub fn normalizer(&self) -> f64 {
        self.log_normalizer.exp()
    }
}

/// Static (single-period) logit allocation of `total_attention` across
/// builders and the outside option.
///
/// The `outside` argument is authoritative for the outside option's
/// weight; `qualities.outside_quality` is not consulted here.
pub fn static_allocation(
    qualities: &QualityModel,
    outside: &OutsideOption,
    beta: f64,
    total_attention: f64,
) -> Result<AllocationResult> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Validation(format!(
            "beta must be positive, got {beta}"
        )));
    }
    if !(total_attention.is_finite() && total_attention > 0.0) {
        return Err(Error::Validation(format!(
            "total attention must be positive and finite, got {total_attention}"
        )));
    }
    outside.validate()?;
    if qualities.realized.iter().any(|q| !q.is_finite()) {
        return Err(Error::Validation(
            "realized qualities must all be finite".into(),
        ));
    }

    let outside_log_weight = outside.log_weight(beta);
    let builder_terms = qualities.realized.iter().map(|&q| beta * q);
    let log_normalizer = log_sum_exp(
        builder_terms
            .clone()
            .chain(std::iter::once(outside_log_weight)),
    );
    if log_normalizer == f64::NEG_INFINITY {
        return Err(Error::DegenerateInput(
            "no builders and no outside option: allocation undefined".into(),
        ));
    }

    // Softmax relative to the log normalizer, then one exact
    // renormalization pass so conservation holds to rounding error.
    let mut raw: Vec<f64> = builder_terms.map(|t| (t - log_normalizer).exp()).collect();
    let raw_outside = (outside_log_weight - log_normalizer).exp();
    let mut acc = RunningSum::new();
    for &w in &raw {
        acc.add(w);
    }
    acc.add(raw_outside);
    let norm = acc.value();
    for w in &mut raw {
        *w = total_attention * (*w / norm);
    }
    Ok(AllocationResult {
        shares: raw,
        outside_share: total_attention * (raw_outside / norm),
        log_normalizer,
    })
}

/// Average attention per builder in the symmetric benchmark,
/// `A / (B + z)`. `builders` is continuous: the equilibrium formulas
/// differentiate through it.
pub fn symmetric_average(total_attention: f64, builders: f64, outside_weight: f64) -> f64 {
    total_attention / (builders + outside_weight)
}

/// Profit of a builder holding `attention`: `p * s - k`.
pub fn builder_profit(monetization: f64, attention: f64, entry_cost: f64) -> f64 {
    monetization * attention - entry_cost
}

/// Attention ratio between two builders, `exp(beta (q_i - q_j))`.
///
/// Equals `s_i / s_j` of [`static_allocation`] for any common
/// denominator: relative attention depends only on the quality gap.
pub fn attention_ratio(quality_i: f64, quality_j: f64, beta: f64) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Validation(format!(
            "beta must be positive, got {beta}"
        )));
    }
    let r = (beta * (quality_i - quality_j)).exp();
    if !r.is_finite() {
        return Err(Error::NumericalRange(format!(
            "exp({beta} * ({quality_i} - {quality_j})) overflows"
        )));
    }
    Ok(r)
}

/// Elasticity of average attention per builder with respect to entry:
/// `-B / (B + z)`, in `(-1, 0]`.
pub fn entry_elasticity(builders: f64, outside_weight: f64) -> f64 {
    -builders / (builders + outside_weight)
}
