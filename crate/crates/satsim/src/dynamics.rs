//! Reinforcement reallocation dynamics.
//!
//! Each step, a fraction `delta` of the attention pool is reallocated.
//! A reallocated unit lands on option `i` (builders plus the outside
//! option) with probability
//!
//! ```text
//! p_i = x_i^alpha * exp(beta q_i) / sum_j x_j^alpha * exp(beta q_j)
//! ```
//!
//! and the deterministic mean-field update is
//! `x_i' = (1 - delta) x_i + delta A p_i`. The stochastic variant removes
//! the same fraction proportionally and re-adds it as `round(delta A)`
//! discrete units drawn multinomially — its expectation is exactly the
//! mean-field step, and the two coincide in the large-`A` limit.
//!
//! `alpha = 0` is the static logit allocation; `alpha = 1` with equal
//! qualities is linear preferential attachment; `alpha = 1` with
//! heterogeneous qualities has no interior fixed point and concentrates
//! attention (condensation). Interior fixed points for `alpha < 1` follow
//! the share law `x_i/x_j = exp(beta (q_i - q_j) / (1 - alpha))`.
//!
//! Conventions: `0^alpha = 0` for `alpha > 0` and `0^0 = 1`, so a builder
//! whose stock hits zero under reinforcement is absorbed there.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{AttentionState, OutsideOption, QualityModel};
use crate::numeric::{bisect_decreasing, log_sum_exp, RunningSum};

/// Largest reinforcement strength the fixed-point solver accepts. The
/// exponent `1/(1-alpha)` blows the quality spread up twenty-fold at the
/// cap already; past it the interior solution stops being numerically
/// meaningful, and at `alpha = 1` it does not exist at all under
/// heterogeneity. That regime is reachable only through simulation.
pub const MAX_FIXED_POINT_ALPHA: f64 = 0.95;

/// How to evolve the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateMode {
    Deterministic,
    Stochastic,
}

/// Parameters of one dynamics run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DynamicsConfig {
    /// Reinforcement strength `alpha >= 0`.
    pub alpha: f64,
    /// Quality sensitivity `beta > 0`.
    pub beta: f64,
    /// Fraction of the pool reallocated per step, in `(0, 1]`.
    pub delta: f64,
    /// Step budget `T`.
    pub steps: usize,
    pub mode: UpdateMode,
    /// Convergence threshold on the L-inf step change, relative to `A`.
    pub convergence_tol: f64,
    /// Keep every n-th state snapshot; `Some(0)` keeps none (final state
    /// only), `None` means every `ceil(T/200)`-th.
    pub snapshot_every: Option<usize>,
}

impl DynamicsConfig {
    pub const DEFAULT_CONVERGENCE_TOL: f64 = 1e-10;

    pub fn new(alpha: f64, beta: f64, delta: f64, steps: usize) -> Self {
        Self {
            alpha,
            beta,
            delta,
            steps,
            mode: UpdateMode::Deterministic,
            convergence_tol: Self::DEFAULT_CONVERGENCE_TOL,
            snapshot_every: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::Validation(format!(
                "alpha must be >= 0, got {}",
                self.alpha
            )));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::Validation(format!(
                "beta must be positive, got {}",
                self.beta
            )));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::Validation(format!(
                "delta must lie in (0, 1], got {}",
                self.delta
            )));
        }
        if !(self.convergence_tol.is_finite() && self.convergence_tol > 0.0) {
            return Err(Error::Validation(format!(
                "convergence_tol must be positive, got {}",
                self.convergence_tol
            )));
        }
        Ok(())
    }

    fn snapshot_interval(&self) -> usize {
        match self.snapshot_every {
            Some(n) => n,
            None => self.steps.div_ceil(200).max(1),
        }
    }
}

/// Time series of one run. Snapshots are thinned per
/// [`DynamicsConfig::snapshot_every`]; every snapshot satisfies the
/// conservation invariant.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// `(step index, state)` pairs; step 0 is the initial state.
    pub snapshots: Vec<(usize, AttentionState)>,
    /// Step at which the L-inf change first dropped below tolerance.
    pub converged_at: Option<usize>,
    pub final_state: AttentionState,
    /// Largest `|x0 + sum(x) - A|` observed at any step, measured before
    /// the per-step renormalization.
    pub max_conservation_residual: f64,
    /// Steps actually executed (may stop early on convergence).
    pub steps_run: usize,
}

/// Log-weight of one option: `alpha * ln(x) + beta * q`, with the
/// `0^alpha` conventions.
#[inline]
fn log_weight(stock: f64, quality: f64, alpha: f64, beta: f64) -> f64 {
    if alpha == 0.0 {
        beta * quality
    } else if stock == 0.0 {
        f64::NEG_INFINITY
    } else {
        alpha * stock.ln() + beta * quality
    }
}

/// Reallocation probabilities over the `B + 1` options.
///
/// Index 0 is the outside option; index `i + 1` is builder `i`. Entries
/// are non-negative and sum to one within rounding error.
pub fn reallocation_probabilities(
    state: &AttentionState,
    qualities: &QualityModel,
    alpha: f64,
    beta: f64,
) -> Result<Vec<f64>> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::Validation(format!(
            "alpha must be >= 0, got {alpha}"
        )));
    }
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Validation(format!(
            "beta must be positive, got {beta}"
        )));
    }
    if state.builders().len() != qualities.builders() {
        return Err(Error::Validation(format!(
            "state has {} builders but quality model has {}",
            state.builders().len(),
            qualities.builders()
        )));
    }

    let n = state.builders().len() + 1;
    let mut weights = Vec::with_capacity(n);
    weights.push(log_weight(
        state.outside(),
        qualities.outside_quality,
        alpha,
        beta,
    ));
    for (&x, &q) in state.builders().iter().zip(&qualities.realized) {
        weights.push(log_weight(x, q, alpha, beta));
    }

    let max = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::DegenerateState(
            "every reallocation weight is zero; no destination for attention".into(),
        ));
    }
    let mut acc = RunningSum::new();
    for w in &mut weights {
        *w = (*w - max).exp();
        acc.add(*w);
    }
    let norm = acc.value();
    for w in &mut weights {
        *w /= norm;
    }
    Ok(weights)
}

/// One deterministic mean-field update. `probs` uses the layout of
/// [`reallocation_probabilities`] (outside option first) and must sum to
/// one; the output conserves `total`.
pub fn mean_field_step(
    state: &AttentionState,
    probs: &[f64],
    delta: f64,
    total: f64,
) -> AttentionState {
    let (next, _) = step_with_residual(state, probs, delta, total);
    next
}

/// Update plus the pre-renormalization conservation residual.
fn step_with_residual(
    state: &AttentionState,
    probs: &[f64],
    delta: f64,
    total: f64,
) -> (AttentionState, f64) {
    assert_eq!(
        probs.len(),
        state.builders().len() + 1,
        "probability vector must cover outside option plus every builder"
    );
    let keep = 1.0 - delta;
    let inflow = delta * total;

    let outside = keep * state.outside() + inflow * probs[0];
    let mut builders = Vec::with_capacity(state.builders().len());
    let mut acc = RunningSum::new();
    acc.add(outside);
    for (&x, &p) in state.builders().iter().zip(&probs[1..]) {
        let v = keep * x + inflow * p;
        acc.add(v);
        builders.push(v);
    }
    let sum = acc.value();
    let residual = (sum - total).abs();

    // Exact renormalization: a relative correction of order 1e-16 per
    // step that stops conservation error from accumulating over long
    // runs.
    let scale = total / sum;
    let outside = outside * scale;
    for b in &mut builders {
        *b *= scale;
    }
    (
        AttentionState::from_parts_unchecked(outside, builders, total),
        residual,
    )
}

fn run_loop(
    initial: &AttentionState,
    qualities: &QualityModel,
    config: &DynamicsConfig,
    mut draw: Option<(&mut ChaCha12Rng, u64, f64)>,
) -> Result<Trajectory> {
    config.validate()?;
    if initial.builders().len() != qualities.builders() {
        return Err(Error::Validation(format!(
            "initial state has {} builders but quality model has {}",
            initial.builders().len(),
            qualities.builders()
        )));
    }

    let total = initial.total();
    let interval = config.snapshot_interval();
    let mut snapshots = Vec::new();
    if interval > 0 {
        snapshots.push((0, initial.clone()));
    }

    let mut state = initial.clone();
    let mut max_residual = state.conservation_residual();
    let mut converged_at = None;
    let mut steps_run = 0;

    // At alpha = 0 the probabilities do not depend on the state; compute
    // them once.
    let static_probs = if config.alpha == 0.0 {
        Some(reallocation_probabilities(
            &state,
            qualities,
            config.alpha,
            config.beta,
        )?)
    } else {
        None
    };

    let mut counts: Vec<u64> = Vec::new();
    let mut probs_buf: Vec<f64>;
    for step in 1..=config.steps {
        let probs: &[f64] = match &static_probs {
            Some(p) => p,
            None => {
                probs_buf =
                    reallocation_probabilities(&state, qualities, config.alpha, config.beta)?;
                &probs_buf
            }
        };

        let (next, residual) = match &mut draw {
            None => step_with_residual(&state, probs, config.delta, total),
            Some((rng, units, unit_mass)) => {
                multinomial_counts(rng, *units, probs, &mut counts);
                stochastic_step(&state, &counts, config.delta, total, *unit_mass)
            }
        };
        max_residual = max_residual.max(residual);

        let mut change: f64 = (next.outside() - state.outside()).abs();
        for (a, b) in next.builders().iter().zip(state.builders()) {
            let d = (a - b).abs();
            if d > change {
                change = d;
            }
        }
        state = next;
        steps_run = step;

        if interval > 0 && step % interval == 0 {
            snapshots.push((step, state.clone()));
        }
        if change < config.convergence_tol * total {
            converged_at = Some(step);
            break;
        }
    }

    Ok(Trajectory {
        snapshots,
        converged_at,
        final_state: state,
        max_conservation_residual: max_residual,
        steps_run,
    })
}

/// Iterate the mean-field update until the step budget is exhausted or
/// the L-inf change drops below tolerance. Bit-reproducible for fixed
/// inputs on one build.
pub fn run_deterministic(
    initial: &AttentionState,
    qualities: &QualityModel,
    config: &DynamicsConfig,
) -> Result<Trajectory> {
    if config.mode != UpdateMode::Deterministic {
        return Err(Error::Validation(
            "run_deterministic requires mode = deterministic".into(),
        ));
    }
    run_loop(initial, qualities, config, None)
}

/// Stochastic counterpart: every step removes fraction `delta`
/// proportionally from each stock and redistributes `round(delta A)`
/// discrete units by a seeded multinomial draw. Identical seeds give
/// identical trajectories.
pub fn run_stochastic(
    initial: &AttentionState,
    qualities: &QualityModel,
    config: &DynamicsConfig,
    seed: u64,
) -> Result<Trajectory> {
    if config.mode != UpdateMode::Stochastic {
        return Err(Error::Validation(
            "run_stochastic requires mode = stochastic".into(),
        ));
    }
    config.validate()?;
    let pool = config.delta * initial.total();
    if pool < 1.0 {
        return Err(Error::Validation(format!(
            "stochastic mode needs delta * A >= 1 reallocatable unit, got {pool}"
        )));
    }
    let units = pool.round() as u64;
    // Each unit carries delta*A/U mass so the redistributed total equals
    // the removed total exactly and the expected step is the mean-field
    // update.
    let unit_mass = pool / units as f64;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    run_loop(
        initial,
        qualities,
        config,
        Some((&mut rng, units, unit_mass)),
    )
}

/// Multinomial draw as a chain of conditional binomials, O(B) per step.
fn multinomial_counts(rng: &mut ChaCha12Rng, units: u64, probs: &[f64], counts: &mut Vec<u64>) {
    counts.clear();
    counts.resize(probs.len(), 0);
    let mut remaining_units = units;
    let mut remaining_prob = 1.0f64;
    for (i, &p) in probs.iter().enumerate() {
        if remaining_units == 0 {
            break;
        }
        if remaining_prob <= 0.0 {
            break;
        }
        if i + 1 == probs.len() {
            counts[i] = remaining_units;
            break;
        }
        let cond = (p / remaining_prob).clamp(0.0, 1.0);
        let draw = Binomial::new(remaining_units, cond)
            .expect("conditional probability is clamped to [0, 1]")
            .sample(rng);
        counts[i] = draw;
        remaining_units -= draw;
        remaining_prob -= p;
    }
}

fn stochastic_step(
    state: &AttentionState,
    counts: &[u64],
    delta: f64,
    total: f64,
    unit_mass: f64,
) -> (AttentionState, f64) {
    let keep = 1.0 - delta;
    let outside = keep * state.outside() + unit_mass * counts[0] as f64;
    let mut builders = Vec::with_capacity(state.builders().len());
    let mut acc = RunningSum::new();
    acc.add(outside);
    for (&x, &c) in state.builders().iter().zip(&counts[1..]) {
        let v = keep * x + unit_mass * c as f64;
        acc.add(v);
        builders.push(v);
    }
    let sum = acc.value();
    let residual = (sum - total).abs();
    let scale = total / sum;
    let outside = outside * scale;
    for b in &mut builders {
        *b *= scale;
    }
    (
        AttentionState::from_parts_unchecked(outside, builders, total),
        residual,
    )
}

/// Interior fixed point of the mean-field dynamics for `alpha < 1`.
///
/// Solves for the scalar normalizer `Z*` with
/// `sum_i (A exp(beta q_i) / Z*)^{1/(1-alpha)} = A` — the left side is
/// strictly decreasing in `Z*`, so bisection (performed on `ln Z*`)
/// converges unconditionally. Returns the state
/// `x_i* = (A exp(beta q_i) / Z*)^{1/(1-alpha)}`, renormalized so the
/// total is exact; the solver residual before renormalization is below
/// `1e-9 * A`.
///
/// The `outside` argument participates like a builder with log-weight
/// `ln z` (or `beta q0`). Fixed points do not depend on `delta`.
pub fn solve_fixed_point(
    qualities: &QualityModel,
    outside: &OutsideOption,
    alpha: f64,
    beta: f64,
    total_attention: f64,
) -> Result<AttentionState> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::Validation(format!(
            "alpha must be >= 0, got {alpha}"
        )));
    }
    if alpha > MAX_FIXED_POINT_ALPHA {
        return Err(Error::UnsupportedRegime(format!(
            "fixed-point solving supports alpha <= {MAX_FIXED_POINT_ALPHA}; got {alpha}. \
             At alpha = 1 no interior fixed point exists under heterogeneous quality; \
             use the simulation instead"
        )));
    }
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Validation(format!(
            "beta must be positive, got {beta}"
        )));
    }
    if !(total_attention.is_finite() && total_attention > 0.0) {
        return Err(Error::Validation(format!(
            "total attention must be positive, got {total_attention}"
        )));
    }
    outside.validate()?;
    if qualities.realized.iter().any(|q| !q.is_finite()) {
        return Err(Error::Validation(
            "realized qualities must all be finite".into(),
        ));
    }

    let exponent = 1.0 / (1.0 - alpha);
    let ln_a = total_attention.ln();
    let outside_term = outside.log_weight(beta);
    let terms = || {
        qualities
            .realized
            .iter()
            .map(move |&q| beta * q)
            .chain(std::iter::once(outside_term))
    };

    // log of sum_i x_i(L) for L = ln Z; strictly decreasing in L.
    let log_total = |l: f64| log_sum_exp(terms().map(|t| exponent * (ln_a + t - l)));
    if log_total(ln_a) == f64::NEG_INFINITY {
        return Err(Error::DegenerateInput(
            "no builders and no outside option: fixed point undefined".into(),
        ));
    }

    // Bracket the root of log_total(L) - ln A around its analytic
    // center, widening until the sign change is enclosed.
    let center = ln_a - (1.0 - alpha) * (ln_a - log_sum_exp(terms().map(|t| exponent * t)));
    let mut lo = center - 1.0;
    let mut hi = center + 1.0;
    let mut width = 1.0;
    while log_total(lo) - ln_a <= 0.0 {
        width *= 2.0;
        lo -= width;
    }
    while log_total(hi) - ln_a >= 0.0 {
        width *= 2.0;
        hi += width;
    }
    let log_z = bisect_decreasing(lo, hi, |l| log_total(l) - ln_a);

    let mut builders: Vec<f64> = qualities
        .realized
        .iter()
        .map(|&q| (exponent * (ln_a + beta * q - log_z)).exp())
        .collect();
    let outside_stock = (exponent * (ln_a + outside_term - log_z)).exp();

    let mut acc = RunningSum::new();
    acc.add(outside_stock);
    for &b in &builders {
        acc.add(b);
    }
    let sum = acc.value();
    let residual = (sum - total_attention).abs();
    if residual.is_nan() || residual >= 1e-9 * total_attention {
        return Err(Error::NumericalRange(format!(
            "fixed-point residual {residual:e} exceeds 1e-9 * A"
        )));
    }
    let scale = total_attention / sum;
    for b in &mut builders {
        *b *= scale;
    }
    AttentionState::new(outside_stock * scale, builders, total_attention)
}

/// Quality sensitivity the fixed point effectively applies:
/// `beta / (1 - alpha)`. Reinforcement steepens the quality-to-attention
/// map without changing its form.
pub fn effective_sensitivity(beta: f64, alpha: f64) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Validation(format!(
            "beta must be positive, got {beta}"
        )));
    }
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::Validation(format!(
            "alpha must be >= 0, got {alpha}"
        )));
    }
    if alpha >= 1.0 {
        return Err(Error::Domain(format!(
            "effective sensitivity diverges at alpha >= 1, got {alpha}"
        )));
    }
    Ok(beta / (1.0 - alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{static_allocation, QualityDistribution};

    fn table1_qualities(seed: u64) -> QualityModel {
        use rand_distr::Normal;
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let realized: Vec<f64> = (0..1_000).map(|_| normal.sample(&mut rng)).collect();
        QualityModel::new(
            QualityDistribution::Normal {
                mu: 0.0,
                sigma: 1.0,
            },
            realized,
            100f64.ln(), // z = 100 folded into the outside quality
        )
        .unwrap()
    }

    #[test]
    fn probabilities_full_symmetry() {
        let q = QualityModel::constant(4, 1.5, 1.5);
        let state = AttentionState::uniform(4, 1.0, 10.0);
        for alpha in [0.0, 0.5, 1.0, 2.0] {
            let p = reallocation_probabilities(&state, &q, alpha, 1.0).unwrap();
            for &pi in &p {
                assert!((pi - 0.2).abs() < 1e-14, "alpha={alpha}");
            }
        }
    }

    #[test]
    fn probabilities_alpha_zero_match_static_logit() {
        let q = QualityModel::new(
            QualityDistribution::Normal {
                mu: 0.0,
                sigma: 1.0,
            },
            vec![-0.7, 0.0, 1.3],
            0.4,
        )
        .unwrap();
        // Any state: alpha = 0 ignores stocks entirely.
        let state = AttentionState::new(1.0, vec![5.0, 3.0, 1.0], 10.0).unwrap();
        let p = reallocation_probabilities(&state, &q, 0.0, 1.0).unwrap();
        let alloc = static_allocation(&q, &OutsideOption::Quality(0.4), 1.0, 10.0).unwrap();
        assert!((p[0] - alloc.outside_share / 10.0).abs() < 1e-14);
        for (pi, s) in p[1..].iter().zip(&alloc.shares) {
            assert!((pi - s / 10.0).abs() < 1e-14);
        }
    }

    #[test]
    fn probabilities_alpha_one_equal_quality_is_linear_pa() {
        let q = QualityModel::constant(3, 0.0, 0.0);
        let state = AttentionState::new(4.0, vec![1.0, 2.0, 3.0], 10.0).unwrap();
        let p = reallocation_probabilities(&state, &q, 1.0, 1.0).unwrap();
        let expect = [0.4, 0.1, 0.2, 0.3];
        for (pi, e) in p.iter().zip(expect) {
            assert!((pi - e).abs() < 1e-14);
        }
    }

    #[test]
    fn probabilities_sum_to_one() {
        let q = table1_qualities(3);
        let state = AttentionState::uniform(1_000, 100.0, 10_000.0);
        let p = reallocation_probabilities(&state, &q, 0.7, 1.0).unwrap();
        let sum: f64 = crate::numeric::compensated_sum(&p);
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_state_is_an_error() {
        let q = QualityModel::constant(2, 0.0, f64::NEG_INFINITY);
        // All stocks zero with alpha > 0: nothing can attract attention.
        let state = AttentionState::from_parts_unchecked(1.0, vec![0.0, 0.0], 1.0);
        assert!(matches!(
            reallocation_probabilities(&state, &q, 0.5, 1.0),
            Err(Error::DegenerateState(_))
        ));
        // alpha = 0 recovers: 0^0 = 1.
        assert!(reallocation_probabilities(&state, &q, 0.0, 1.0).is_ok());
    }

    #[test]
    fn zero_stock_is_absorbing_under_reinforcement() {
        let q = QualityModel::constant(2, 0.0, f64::NEG_INFINITY);
        let state = AttentionState::new(0.0, vec![0.0, 10.0], 10.0).unwrap();
        let p = reallocation_probabilities(&state, &q, 0.5, 1.0).unwrap();
        assert_eq!(p[1], 0.0);
        let next = mean_field_step(&state, &p, 0.3, 10.0);
        assert_eq!(next.builders()[0], 0.0);
        let p2 = reallocation_probabilities(&next, &q, 0.5, 1.0).unwrap();
        assert_eq!(p2[1], 0.0);
    }

    #[test]
    fn full_reallocation_lands_on_probabilities() {
        let q = QualityModel::new(
            QualityDistribution::Uniform { lo: -1.0, hi: 1.0 },
            vec![0.2, -0.4],
            0.0,
        )
        .unwrap();
        let state = AttentionState::new(2.0, vec![5.0, 3.0], 10.0).unwrap();
        let p = reallocation_probabilities(&state, &q, 0.8, 1.0).unwrap();
        let next = mean_field_step(&state, &p, 1.0, 10.0);
        assert!((next.outside() - 10.0 * p[0]).abs() < 1e-12);
        assert!((next.builders()[0] - 10.0 * p[1]).abs() < 1e-12);
        assert!((next.builders()[1] - 10.0 * p[2]).abs() < 1e-12);
    }

    #[test]
    fn step_conserves_total() {
        let q = table1_qualities(5);
        let state = AttentionState::uniform(1_000, 100.0, 10_000.0);
        let p = reallocation_probabilities(&state, &q, 1.0, 1.0).unwrap();
        for delta in [0.05, 0.5, 1.0] {
            let next = mean_field_step(&state, &p, delta, 10_000.0);
            assert!(next.conservation_residual() < 1e-12 * 10_000.0);
        }
    }

    #[test]
    fn fixed_point_input_is_stationary_for_every_delta() {
        let q = QualityModel::new(
            QualityDistribution::Normal {
                mu: 0.0,
                sigma: 1.0,
            },
            vec![-0.9, 0.1, 0.6, 1.4],
            0.0,
        )
        .unwrap();
        let fp = solve_fixed_point(&q, &OutsideOption::Quality(0.0), 0.6, 1.0, 100.0).unwrap();
        for delta in [0.01, 0.1, 0.5, 1.0] {
            let p = reallocation_probabilities(&fp, &q, 0.6, 1.0).unwrap();
            let next = mean_field_step(&fp, &p, delta, 100.0);
            let mut worst: f64 = (next.outside() - fp.outside()).abs();
            for (a, b) in next.builders().iter().zip(fp.builders()) {
                worst = worst.max((a - b).abs());
            }
            assert!(worst < 1e-8 * 100.0, "delta={delta}: moved {worst:e}");
        }
    }

    #[test]
    fn uniform_state_with_constant_quality_never_moves() {
        let q = QualityModel::constant(50, 0.3, 0.3);
        let initial = AttentionState::uniform(50, 1.0, 510.0);
        for alpha in [0.0, 0.5, 1.0] {
            let mut cfg = DynamicsConfig::new(alpha, 1.0, 0.2, 200);
            cfg.snapshot_every = Some(0);
            let traj = run_deterministic(&initial, &q, &cfg).unwrap();
            for (a, b) in traj.final_state.builders().iter().zip(initial.builders()) {
                assert!((a - b).abs() < 1e-9, "alpha={alpha}");
            }
        }
    }

    #[test]
    fn alpha_zero_run_contracts_to_static_allocation() {
        let q = table1_qualities(11);
        let a = 10_000.0;
        let initial = AttentionState::uniform(1_000, 100.0, a);
        let mut cfg = DynamicsConfig::new(0.0, 1.0, 0.1, 500);
        // Let the geometric contraction run its full course.
        cfg.convergence_tol = 1e-16;
        let traj = run_deterministic(&initial, &q, &cfg).unwrap();
        let alloc = static_allocation(&q, &OutsideOption::Weight(100.0), 1.0, a).unwrap();
        // Geometric contraction: |x_T - s*| <= (1-delta)^T * A, i.e.
        // far below 1e-12 * A at T = 500.
        for (x, s) in traj.final_state.builders().iter().zip(&alloc.shares) {
            assert!((x - s).abs() < 1e-12 * a);
        }
        assert!((traj.final_state.outside() - alloc.outside_share).abs() < 1e-12 * a);
        assert!(traj.converged_at.is_some());
        assert!(traj.max_conservation_residual < 1e-9 * a);
    }

    #[test]
    fn deterministic_run_is_reproducible() {
        let q = table1_qualities(17);
        let initial = AttentionState::uniform(1_000, 100.0, 10_000.0);
        let cfg = DynamicsConfig::new(0.8, 1.0, 0.1, 50);
        let a = run_deterministic(&initial, &q, &cfg).unwrap();
        let b = run_deterministic(&initial, &q, &cfg).unwrap();
        assert_eq!(a.final_state, b.final_state);
    }

    #[test]
    fn trajectory_snapshots_conserve_and_thin() {
        let q = table1_qualities(23);
        let initial = AttentionState::uniform(1_000, 100.0, 10_000.0);
        let mut cfg = DynamicsConfig::new(1.0, 1.0, 0.1, 400);
        cfg.snapshot_every = Some(100);
        let traj = run_deterministic(&initial, &q, &cfg).unwrap();
        // One snapshot per 100 steps actually run, plus the initial state.
        assert_eq!(traj.snapshots.len(), traj.steps_run / 100 + 1);
        for (i, (step, s)) in traj.snapshots.iter().enumerate() {
            assert_eq!(*step, i * 100);
            assert!(
                s.conservation_residual() < 1e-9 * 10_000.0,
                "at step {step}"
            );
        }
    }

    #[test]
    fn stochastic_seed_determinism_and_expectation() {
        let q = QualityModel::new(
            QualityDistribution::Uniform { lo: -1.0, hi: 1.0 },
            vec![0.5, 0.0, -0.5, 0.25, -0.25],
            0.0,
        )
        .unwrap();
        let initial = AttentionState::uniform(5, 1.0, 1_200.0);
        let mut cfg = DynamicsConfig::new(0.5, 1.0, 0.5, 1);
        cfg.mode = UpdateMode::Stochastic;
        cfg.snapshot_every = Some(0);

        let a = run_stochastic(&initial, &q, &cfg, 99).unwrap();
        let b = run_stochastic(&initial, &q, &cfg, 99).unwrap();
        assert_eq!(a.final_state, b.final_state);
        let c = run_stochastic(&initial, &q, &cfg, 100).unwrap();
        assert_ne!(a.final_state, c.final_state);

        // Mean of one-step outcomes over 100 seeds tracks the mean-field
        // step within 3 standard errors per entry.
        let n_seeds = 100;
        let mut mean = vec![0.0f64; 6];
        for seed in 0..n_seeds {
            let t = run_stochastic(&initial, &q, &cfg, seed).unwrap();
            mean[0] += t.final_state.outside();
            for (i, &x) in t.final_state.builders().iter().enumerate() {
                mean[i + 1] += x;
            }
        }
        for m in &mut mean {
            *m /= n_seeds as f64;
        }
        let p = reallocation_probabilities(&initial, &q, 0.5, 1.0).unwrap();
        let det = mean_field_step(&initial, &p, 0.5, 1_200.0);
        let expect = std::iter::once(det.outside()).chain(det.builders().iter().copied());
        let units = 600.0;
        for (i, (m, e)) in mean.iter().zip(expect).enumerate() {
            let se =
                (0.5 * 1_200.0) * (p[i] * (1.0 - p[i]) / units).sqrt() / (n_seeds as f64).sqrt();
            assert!(
                (m - e).abs() < 3.0 * se + 1e-9,
                "entry {i}: mean {m} vs mean-field {e}, se {se}"
            );
        }
    }

    #[test]
    fn stochastic_runs_conserve_attention() {
        let q = table1_qualities(47);
        let a = 10_000.0;
        let initial = AttentionState::uniform(1_000, 100.0, a);
        let mut cfg = DynamicsConfig::new(0.7, 1.0, 0.1, 100);
        cfg.mode = UpdateMode::Stochastic;
        cfg.snapshot_every = Some(25);
        let traj = run_stochastic(&initial, &q, &cfg, 5).unwrap();
        assert!(traj.max_conservation_residual < 1e-9 * a);
        for (step, s) in &traj.snapshots {
            assert!(s.conservation_residual() < 1e-9 * a, "at step {step}");
        }
    }

    #[test]
    fn stochastic_requires_a_full_unit() {
        let q = QualityModel::constant(2, 0.0, 0.0);
        let initial = AttentionState::uniform(2, 1.0, 3.0);
        let mut cfg = DynamicsConfig::new(0.0, 1.0, 0.1, 1);
        cfg.mode = UpdateMode::Stochastic;
        assert!(matches!(
            run_stochastic(&initial, &q, &cfg, 1),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn mode_mismatch_is_rejected() {
        let q = QualityModel::constant(2, 0.0, 0.0);
        let initial = AttentionState::uniform(2, 1.0, 300.0);
        let cfg = DynamicsConfig::new(0.0, 1.0, 0.1, 1);
        assert!(run_stochastic(&initial, &q, &cfg, 1).is_err());
        let mut cfg = cfg;
        cfg.mode = UpdateMode::Stochastic;
        assert!(run_deterministic(&initial, &q, &cfg).is_err());
    }

    #[test]
    fn fixed_point_nests_static_allocation_at_alpha_zero() {
        let q = table1_qualities(31);
        let outside = OutsideOption::Weight(100.0);
        let fp = solve_fixed_point(&q, &outside, 0.0, 1.0, 10_000.0).unwrap();
        let alloc = static_allocation(&q, &outside, 1.0, 10_000.0).unwrap();
        for (x, s) in fp.builders().iter().zip(&alloc.shares) {
            assert!(((x - s) / s).abs() < 1e-10);
        }
    }

    #[test]
    fn fixed_point_symmetric_split() {
        let q = QualityModel::constant(9, -2.0, -2.0);
        for alpha in [0.0, 0.3, 0.6, 0.9] {
            let fp =
                solve_fixed_point(&q, &OutsideOption::Quality(-2.0), alpha, 2.0, 50.0).unwrap();
            for &x in fp.builders() {
                assert!((x - 5.0).abs() < 1e-9, "alpha={alpha}");
            }
            assert!((fp.outside() - 5.0).abs() < 1e-9);
        }
    }

    #[test]
    fn fixed_point_analytic_two_builder_case() {
        // q = (0, ln 4), beta = 1, alpha = 0.5, A = 17, no outside:
        // x* proportional to exp(2 q) gives (1, 16); Z* = sqrt(17 A).
        let q = QualityModel::new(
            QualityDistribution::Uniform { lo: -1.0, hi: 2.0 },
            vec![0.0, 4f64.ln()],
            f64::NEG_INFINITY,
        )
        .unwrap();
        let fp = solve_fixed_point(&q, &OutsideOption::Absent, 0.5, 1.0, 17.0).unwrap();
        assert!((fp.builders()[0] - 1.0).abs() < 1e-9);
        assert!((fp.builders()[1] - 16.0).abs() < 1e-9);
        assert!(fp.outside() < 1e-12);
    }

    #[test]
    fn fixed_point_share_law() {
        let q = table1_qualities(37);
        let outside = OutsideOption::Weight(100.0);
        for alpha in [0.25, 0.5, 0.75, 0.9] {
            let fp = solve_fixed_point(&q, &outside, alpha, 1.0, 10_000.0).unwrap();
            let sens = effective_sensitivity(1.0, alpha).unwrap();
            let xs = fp.builders();
            for &(i, j) in &[(0usize, 1usize), (10, 500), (999, 3)] {
                let expect = (sens * (q.realized[i] - q.realized[j])).exp();
                let got = xs[i] / xs[j];
                assert!(
                    (got / expect - 1.0).abs() < 1e-8,
                    "alpha={alpha} pair ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn fixed_point_rejects_unsupported_alpha() {
        let q = QualityModel::constant(2, 0.0, 0.0);
        assert!(matches!(
            solve_fixed_point(&q, &OutsideOption::Quality(0.0), 0.96, 1.0, 10.0),
            Err(Error::UnsupportedRegime(_))
        ));
        assert!(solve_fixed_point(&q, &OutsideOption::Quality(0.0), 0.95, 1.0, 10.0).is_ok());
    }

    #[test]
    fn dynamics_land_on_fixed_point() {
        // Table 1 configuration, long horizon: the deterministic run
        // ends within L-inf 1e-6 * A of the solved fixed point.
        let q = table1_qualities(41);
        let a = 10_000.0;
        let initial = AttentionState::uniform(1_000, 100.0, a);
        let outside = OutsideOption::Weight(100.0);
        for alpha in [0.25, 0.5, 0.75, 0.9] {
            let mut cfg = DynamicsConfig::new(alpha, 1.0, 0.1, 5_000);
            cfg.snapshot_every = Some(0);
            let traj = run_deterministic(&initial, &q, &cfg).unwrap();
            let fp = solve_fixed_point(&q, &outside, alpha, 1.0, a).unwrap();
            let mut worst: f64 = (traj.final_state.outside() - fp.outside()).abs();
            for (x, y) in traj.final_state.builders().iter().zip(fp.builders()) {
                worst = worst.max((x - y).abs());
            }
            assert!(worst < 1e-6 * a, "alpha={alpha}: L-inf gap {worst:e}");
        }
    }

    #[test]
    fn concentration_monotone_in_alpha_at_the_fixed_point() {
        // Long-run deterministic states coincide with the fixed points
        // for alpha < 1 (tested above); across an alpha grid the builder
        // Gini rises strictly and median/mean falls strictly. The
        // pattern is not specific to normal quality.
        use crate::harness::sample_qualities;

        let draws = [
            sample_qualities(
                &QualityDistribution::Normal {
                    mu: 0.0,
                    sigma: 1.0,
                },
                1_000,
                43,
                100f64.ln(),
            )
            .unwrap(),
            sample_qualities(
                &QualityDistribution::Uniform { lo: -2.0, hi: 2.0 },
                1_000,
                43,
                100f64.ln(),
            )
            .unwrap(),
            sample_qualities(
                &QualityDistribution::LogNormal {
                    mu: 0.0,
                    sigma: 1.0,
                },
                1_000,
                43,
                100f64.ln(),
            )
            .unwrap(),
        ];
        let outside = OutsideOption::Weight(100.0);
        for q in &draws {
            let mut last_gini = -1.0;
            let mut last_mm = 2.0;
            for alpha in [0.0, 0.25, 0.5, 0.75, 0.9] {
                let fp = solve_fixed_point(q, &outside, alpha, 1.0, 10_000.0).unwrap();
                let g = crate::metrics::gini(fp.builders()).unwrap();
                let mm = crate::metrics::median_mean_ratio(fp.builders()).unwrap();
                assert!(
                    g > last_gini,
                    "gini not increasing at alpha={alpha} for {:?}",
                    q.distribution
                );
                assert!(
                    mm < last_mm,
                    "median/mean not decreasing at alpha={alpha} for {:?}",
                    q.distribution
                );
                last_gini = g;
                last_mm = mm;
            }
        }
    }

    #[test]
    fn effective_sensitivity_values() {
        assert_eq!(effective_sensitivity(1.0, 0.0).unwrap(), 1.0);
        assert_eq!(effective_sensitivity(1.0, 0.5).unwrap(), 2.0);
        assert_eq!(effective_sensitivity(2.0, 0.75).unwrap(), 8.0);
        assert!(matches!(
            effective_sensitivity(1.0, 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn config_validation() {
        assert!(DynamicsConfig::new(0.5, 1.0, 0.1, 10).validate().is_ok());
        assert!(DynamicsConfig::new(-0.1, 1.0, 0.1, 10).validate().is_err());
        assert!(DynamicsConfig::new(0.5, 0.0, 0.1, 10).validate().is_err());
        assert!(DynamicsConfig::new(0.5, 1.0, 0.0, 10).validate().is_err());
        assert!(DynamicsConfig::new(0.5, 1.0, 1.1, 10).validate().is_err());
        assert!(DynamicsConfig::new(0.5, 1.0, 1.0, 0).validate().is_ok());
    }
}
