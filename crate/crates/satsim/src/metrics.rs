//! Concentration and distribution statistics over builder attention
//! vectors.
//!
//! All metrics operate on the builder vector only — the outside option is
//! not a producer — and are invariant under permutation and positive
//! scaling of the input. Closed-form comparators for log-normal attention
//! (`gini = 2 Phi(sigma_eff / sqrt 2) - 1`,
//! `median/mean = exp(-sigma_eff^2 / 2)` with
//! `sigma_eff = beta sigma / (1 - alpha)`) serve as oracles for the
//! sampled metrics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{normal_cdf, RunningSum};

/// Bundle of concentration statistics for one attention vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationReport {
    /// Gini coefficient in `[0, 1)`; zero iff all values are equal.
    pub gini: f64,
    /// `(fraction, share held by that top fraction)`, sorted by fraction.
    pub top_shares: Vec<(f64, f64)>,
    /// Sample median over sample mean.
    pub median_mean: f64,
    /// `(threshold, fraction of entries strictly below it)`.
    pub share_below: Vec<(f64, f64)>,
    pub count: usize,
    pub total: f64,
}

/// A curve as ordered `(x, y)` points (Lorenz or rank-attention).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveData {
    pub points: Vec<(f64, f64)>,
}

fn validate_values(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::DegenerateInput("empty value vector".into()));
    }
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::DegenerateInput(
            "values must be non-negative and finite".into(),
        ));
    }
    Ok(())
}

fn sorted_ascending(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    v
}

/// Top-k count `ceil(fraction * n)`, guarded against the float product
/// landing epsilon above an integer.
fn top_count(n: usize, fraction: f64) -> usize {
    ((fraction * n as f64 - 1e-9).ceil() as usize).clamp(1, n)
}

/// Gini coefficient by the sorted-index formula
/// `G = 2 * sum(i * x_(i)) / (n * sum x) - (n + 1) / n`
/// over the ascending sort with 1-based ranks.
pub fn gini(values: &[f64]) -> Result<f64> {
    validate_values(values)?;
    let sorted = sorted_ascending(values);
    let n = sorted.len() as f64;
    let mut total = RunningSum::new();
    let mut weighted = RunningSum::new();
    for (i, &x) in sorted.iter().enumerate() {
        total.add(x);
        weighted.add((i + 1) as f64 * x);
    }
    let total = total.value();
    if total <= 0.0 {
        return Err(Error::DegenerateInput(
            "gini undefined for zero total".into(),
        ));
    }
    Ok(2.0 * weighted.value() / (n * total) - (n + 1.0) / n)
}

/// Share of the total held by the `ceil(fraction * n)` largest values.
pub fn top_share(values: &[f64], fraction: f64) -> Result<f64> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Validation(format!(
            "top-share fraction must lie in (0, 1], got {fraction}"
        )));
    }
    validate_values(values)?;
    let sorted = sorted_ascending(values);
    let mut total = RunningSum::new();
    for &x in &sorted {
        total.add(x);
    }
    let total = total.value();
    if total <= 0.0 {
        return Err(Error::DegenerateInput(
            "top share undefined for zero total".into(),
        ));
    }
    let k = top_count(sorted.len(), fraction);
    let mut top = RunningSum::new();
    for &x in &sorted[sorted.len() - k..] {
        top.add(x);
    }
    Ok(top.value() / total)
}

/// Sample median (lower median for even counts) divided by the sample
/// mean.
pub fn median_mean_ratio(values: &[f64]) -> Result<f64> {
    validate_values(values)?;
    let sorted = sorted_ascending(values);
    let mut total = RunningSum::new();
    for &x in &sorted {
        total.add(x);
    }
    let mean = total.value() / sorted.len() as f64;
    if mean <= 0.0 {
        return Err(Error::DegenerateInput(
            "median/mean undefined for zero mean".into(),
        ));
    }
    Ok(sorted[(sorted.len() - 1) / 2] / mean)
}

/// Fraction of entries strictly below `threshold`.
pub fn share_below(values: &[f64], threshold: f64) -> Result<f64> {
    validate_values(values)?;
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(Error::Validation(format!(
            "threshold must be positive, got {threshold}"
        )));
    }
    let below = values.iter().filter(|&&v| v < threshold).count();
    Ok(below as f64 / values.len() as f64)
}

/// Lorenz curve: cumulative population share versus cumulative value
/// share over the ascending sort, sampled at `npoints + 1` evenly spaced
/// population quantiles including both endpoints.
pub fn lorenz_curve(values: &[f64], npoints: usize) -> Result<CurveData> {
    if npoints == 0 {
        return Err(Error::Validation("lorenz curve needs npoints >= 1".into()));
    }
    validate_values(values)?;
    let sorted = sorted_ascending(values);
    let n = sorted.len();
    // Exact prefix sums; cumulative[n] doubles as the total.
    let mut cumulative = Vec::with_capacity(n + 1);
    cumulative.push(0.0);
    let mut acc = RunningSum::new();
    for &x in &sorted {
        acc.add(x);
        cumulative.push(acc.value());
    }
    let total = cumulative[n];
    if total <= 0.0 {
        return Err(Error::DegenerateInput(
            "lorenz curve undefined for zero total".into(),
        ));
    }
    let mut points = Vec::with_capacity(npoints + 1);
    for k in 0..=npoints {
        let t = k as f64 / npoints as f64;
        let position = t * n as f64;
        let idx = (position.floor() as usize).min(n);
        let frac = position - idx as f64;
        let mut cum = cumulative[idx];
        if frac > 0.0 && idx < n {
            cum += frac * sorted[idx];
        }
        points.push((t, cum / total));
    }
    Ok(CurveData { points })
}

/// Rank-attention pairs sorted by value descending, rank starting at 1.
/// Zero values are retained (with `y = 0`); log-log exports drop them.
pub fn rank_distribution(values: &[f64]) -> CurveData {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| f64::total_cmp(b, a));
    CurveData {
        points: sorted
            .into_iter()
            .enumerate()
            .map(|(i, v)| ((i + 1) as f64, v))
            .collect(),
    }
}

/// Least-squares slope of `log(value)` against `log(rank)` over the top
/// fraction of ranks. Requires at least 10 positive values in the
/// selected top set.
pub fn estimate_tail_exponent(values: &[f64], top_fraction: f64) -> Result<f64> {
    if !(top_fraction > 0.0 && top_fraction <= 1.0) {
        return Err(Error::Validation(format!(
            "top fraction must lie in (0, 1], got {top_fraction}"
        )));
    }
    validate_values(values)?;
    let ranked = rank_distribution(values);
    let k = top_count(values.len(), top_fraction);
    let pts: Vec<(f64, f64)> = ranked.points[..k]
        .iter()
        .filter(|(_, v)| *v > 0.0)
        .map(|&(r, v)| (r.ln(), v.ln()))
        .collect();
    if pts.len() < 10 {
        return Err(Error::DegenerateInput(format!(
            "tail fit needs >= 10 positive values in the top fraction, found {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for &(x, y) in &pts {
        sxy += (x - mean_x) * (y - mean_y);
        sxx += (x - mean_x) * (x - mean_x);
    }
    Ok(sxy / sxx)
}

/// Closed-form Gini and median/mean of the log-normal attention
/// distribution induced by normal quality with spread `sigma` under
/// reinforcement `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticConcentration {
    pub gini: f64,
    pub median_mean: f64,
}

/// `sigma_eff = beta * sigma / (1 - alpha)`;
/// `gini = 2 Phi(sigma_eff / sqrt 2) - 1`,
/// `median_mean = exp(-sigma_eff^2 / 2)`.
pub fn analytic_concentration(beta: f64, sigma: f64, alpha: f64) -> Result<AnalyticConcentration> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Validation(format!(
            "beta must be positive, got {beta}"
        )));
    }
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::Validation(format!(
            "sigma must be non-negative, got {sigma}"
        )));
    }
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::Validation(format!(
            "alpha must be >= 0, got {alpha}"
        )));
    }
    if alpha >= 1.0 {
        return Err(Error::Domain(format!(
            "analytic concentration requires alpha < 1, got {alpha}"
        )));
    }
    let sigma_eff = beta * sigma / (1.0 - alpha);
    Ok(AnalyticConcentration {
        gini: 2.0 * normal_cdf(sigma_eff / std::f64::consts::SQRT_2) - 1.0,
        median_mean: (-0.5 * sigma_eff * sigma_eff).exp(),
    })
}

/// Full report over one builder vector.
pub fn concentration_report(
    values: &[f64],
    top_fractions: &[f64],
    thresholds: &[f64],
) -> Result<ConcentrationReport> {
    let mut top_shares = Vec::with_capacity(top_fractions.len());
    for &f in top_fractions {
        top_shares.push((f, top_share(values, f)?));
    }
    top_shares.sort_by(|a, b| f64::total_cmp(&a.0, &b.0));
    let mut below = Vec::with_capacity(thresholds.len());
    for &t in thresholds {
        below.push((t, share_below(values, t)?));
    }
    below.sort_by(|a, b| f64::total_cmp(&a.0, &b.0));
    let mut total = RunningSum::new();
    for &v in values {
        total.add(v);
    }
    Ok(ConcentrationReport {
        gini: gini(values)?,
        top_shares,
        median_mean: median_mean_ratio(values)?,
        share_below: below,
        count: values.len(),
        total: total.value(),
    })
}
