//! Free-entry equilibrium, comparative statics, welfare, and endogenous
//! attention growth.
//!
//! Builders enter until profit `p * A/(B+z) - k` hits zero, giving
//! `B* = max(pA/k - z, 0)`. At any interior equilibrium the attention per
//! builder is pinned at `k/p` — independent of the attention pool — which
//! is why demand growth is absorbed entirely by entry. `B*` is treated as
//! continuous (the comparative statics differentiate through it); the
//! floored count is carried alongside for integer readings.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{builder_profit, symmetric_average};
use crate::numeric::bisect_decreasing;

/// Free-entry equilibrium of the symmetric market.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumResult {
    /// Continuous equilibrium builder count `B*`.
    pub builders: f64,
    /// `floor(B*)` for integer interpretations.
    pub builders_floor: u64,
    /// Whether entry is viable at all (`B* > 0`, i.e. `k < pA/z`).
    pub interior: bool,
    /// Average attention per builder at the equilibrium. Interior: `k/p`.
    /// Boundary (`B* = 0`): the hypothetical `A/z` a first entrant faces.
    pub attention_per_builder: f64,
    /// Profit at the equilibrium: zero when interior, the (non-positive)
    /// would-be entrant profit otherwise.
    pub profit: f64,
    /// Fraction of total attention the outside option absorbs,
    /// `z/(B*+z)`; interior equilibria satisfy `z/(B*+z) = kz/(pA)`.
    pub outside_absorption: f64,
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::Validation(format!(
            "{name} must be positive and finite, got {v}"
        )));
    }
    Ok(())
}

/// Solve the free-entry condition `p * A/(B+z) = k`.
pub fn equilibrium_entry(
    monetization: f64,
    total_attention: f64,
    entry_cost: f64,
    outside_weight: f64,
) -> Result<EquilibriumResult> {
    check_positive("monetization", monetization)?;
    check_positive("total attention", total_attention)?;
    check_positive("entry cost", entry_cost)?;
    check_positive("outside weight", outside_weight)?;

    let unconstrained = monetization * total_attention / entry_cost - outside_weight;
    let builders = unconstrained.max(0.0);
    let interior = builders > 0.0;
    let (attention_per_builder, profit) = if interior {
        (entry_cost / monetization, 0.0)
    } else {
        let s = symmetric_average(total_attention, 0.0, outside_weight);
        (s, builder_profit(monetization, s, entry_cost))
    };
    Ok(EquilibriumResult {
        builders,
        builders_floor: builders as u64,
        interior,
        attention_per_builder,
        profit,
        outside_absorption: outside_weight / (builders + outside_weight),
    })
}

/// Entry viability: `k < pA/z`. Equality is excluded — at the boundary no
/// entrant can recover the fixed cost.
pub fn entry_viable(
    monetization: f64,
    total_attention: f64,
    entry_cost: f64,
    outside_weight: f64,
) -> bool {
    entry_cost < monetization * total_attention / outside_weight
}

/// Attention per builder at any interior free-entry equilibrium: `k/p`.
/// Independent of both the attention pool and the outside option.
pub fn zero_profit_attention(entry_cost: f64, monetization: f64) -> f64 {
    entry_cost / monetization
}

/// Partial derivatives of `B* = pA/k - z` at an interior equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparativeStatics {
    /// `dB*/dA = p/k`.
    pub wrt_attention: f64,
    /// `dB*/dp = A/k`.
    pub wrt_monetization: f64,
    /// `dB*/dk = -pA/k^2`.
    pub wrt_entry_cost: f64,
    /// `dB*/dz = -1`.
    pub wrt_outside_weight: f64,
}

/// Comparative statics of equilibrium entry. Requires an interior
/// equilibrium (`k < pA/z`).
pub fn comparative_statics(
    monetization: f64,
    total_attention: f64,
    entry_cost: f64,
    outside_weight: f64,
) -> Result<ComparativeStatics> {
    check_positive("monetization", monetization)?;
    check_positive("total attention", total_attention)?;
    check_positive("entry cost", entry_cost)?;
    check_positive("outside weight", outside_weight)?;
    if !entry_viable(monetization, total_attention, entry_cost, outside_weight) {
        return Err(Error::Domain(format!(
            "comparative statics require an interior equilibrium (k < pA/z); \
             got k={entry_cost}, pA/z={}",
            monetization * total_attention / outside_weight
        )));
    }
    Ok(ComparativeStatics {
        wrt_attention: monetization / entry_cost,
        wrt_monetization: total_attention / entry_cost,
        wrt_entry_cost: -monetization * total_attention / (entry_cost * entry_cost),
        wrt_outside_weight: -1.0,
    })
}

/// Aggregate log welfare `W(B) = B * ln(A/(B+z))`, with `W(0) = 0`.
pub fn welfare(builders: f64, total_attention: f64, outside_weight: f64) -> f64 {
    if builders == 0.0 {
        return 0.0;
    }
    builders * (total_attention.ln() - (builders + outside_weight).ln())
}

/// `W'(B) = ln A - ln(B+z) - B/(B+z)`; strictly decreasing in `B`.
fn welfare_slope(builders: f64, total_attention: f64, outside_weight: f64) -> f64 {
    total_attention.ln() - (builders + outside_weight).ln() - builders / (builders + outside_weight)
}

/// Welfare comparison between the planner's optimum and free entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WelfareResult {
    /// Socially optimal builder count `B**` (zero when `A <= z`).
    pub social_optimum: f64,
    pub welfare_at_social: f64,
    pub welfare_at_free_entry: f64,
    /// `B* > B**`: the business-stealing externality induces excess
    /// entry.
    pub excess_entry: bool,
}

/// Maximize `W(B)` by bisection on `W'` and compare against the
/// free-entry count for `(p, k)`.
pub fn welfare_optimum(
    total_attention: f64,
    outside_weight: f64,
    monetization: f64,
    entry_cost: f64,
) -> Result<WelfareResult> {
    check_positive("total attention", total_attention)?;
    check_positive("outside weight", outside_weight)?;
    check_positive("monetization", monetization)?;
    check_positive("entry cost", entry_cost)?;

    let social_optimum = if total_attention <= outside_weight {
        // W'(0) = ln(A/z) <= 0: no interior optimum.
        0.0
    } else {
        // W' is strictly decreasing, positive at the lower bracket edge
        // and negative at 10A, so the sign-change root is unique.
        bisect_decreasing(1e-9, 10.0 * total_attention, |b| {
            welfare_slope(b, total_attention, outside_weight)
        })
    };
    let eq = equilibrium_entry(monetization, total_attention, entry_cost, outside_weight)?;
    Ok(WelfareResult {
        social_optimum,
        welfare_at_social: welfare(social_optimum, total_attention, outside_weight),
        welfare_at_free_entry: welfare(eq.builders, total_attention, outside_weight),
        excess_entry: eq.builders > social_optimum,
    })
}

/// Fraction of attention the outside option captures at builder count
/// `B`: `z/(B+z)`. The builder collective share is the complement.
pub fn outside_absorption(builders: f64, outside_weight: f64) -> f64 {
    outside_weight / (builders + outside_weight)
}

/// Equilibrium trajectory under growing attention `A(t) = A0 * g(t)` and
/// time-varying entry cost `k(t)`, sampled on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthPath {
    pub times: Vec<f64>,
    /// `A(t)`.
    pub attention: Vec<f64>,
    /// `k(t)`.
    pub entry_cost: Vec<f64>,
    /// `B*(t)`.
    pub builders: Vec<f64>,
    /// `s̄(t) = k(t)/p` where entry is interior; `None` where `B*(t) = 0`
    /// (no builder exists to average over).
    pub attention_per_builder: Vec<Option<f64>>,
}

/// Evaluate the free-entry equilibrium along a growth path.
///
/// Per-builder attention tracks `k(t)/p` at every interior point no
/// matter how fast `g(t)` grows: demand expansion is absorbed by entry.
pub fn growth_trajectory(
    initial_attention: f64,
    monetization: f64,
    outside_weight: f64,
    growth: impl Fn(f64) -> f64,
    entry_cost: impl Fn(f64) -> f64,
    times: &[f64],
) -> Result<GrowthPath> {
    check_positive("initial attention", initial_attention)?;
    check_positive("monetization", monetization)?;
    check_positive("outside weight", outside_weight)?;

    let mut path = GrowthPath {
        times: times.to_vec(),
        attention: Vec::with_capacity(times.len()),
        entry_cost: Vec::with_capacity(times.len()),
        builders: Vec::with_capacity(times.len()),
        attention_per_builder: Vec::with_capacity(times.len()),
    };
    for &t in times {
        let g = growth(t);
        let k = entry_cost(t);
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::Validation(format!("g({t}) = {g} must be positive")));
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::Validation(format!("k({t}) = {k} must be positive")));
        }
        let a_t = initial_attention * g;
        let b_t = (monetization * a_t / k - outside_weight).max(0.0);
        path.attention.push(a_t);
        path.entry_cost.push(k);
        path.builders.push(b_t);
        path.attention_per_builder.push(if b_t > 0.0 {
            Some(k / monetization)
        } else {
            None
        });
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table3_equilibrium() {
        let eq = equilibrium_entry(1.0, 10_000.0, 1.0, 100.0).unwrap();
        assert_eq!(eq.builders, 9_900.0);
        assert_eq!(eq.builders_floor, 9_900);
        assert!(eq.interior);
        assert_eq!(eq.attention_per_builder, 1.0);
        assert_eq!(eq.profit, 0.0);
        assert!((eq.outside_absorption - 0.01).abs() < 1e-15);
    }

    #[test]
    fn boundary_and_interior_cases() {
        // k = pA/z exactly: no entry.
        let eq = equilibrium_entry(1.0, 10_000.0, 100.0, 100.0).unwrap();
        assert_eq!(eq.builders, 0.0);
        assert!(!eq.interior);
        assert!(eq.profit <= 0.0);
        assert_eq!(eq.outside_absorption, 1.0);
        assert!(!entry_viable(1.0, 10_000.0, 100.0, 100.0));

        let eq = equilibrium_entry(1.0, 10_000.0, 2.0, 100.0).unwrap();
        assert_eq!(eq.builders, 4_900.0);

        assert!(entry_viable(1.0, 10_000.0, 1.0, 100.0));
        assert!(entry_viable(1.0, 10_000.0, 1e-12, 100.0));
    }

    #[test]
    fn inertia_shutdown() {
        // z >= pA/k prevents all entry.
        let eq = equilibrium_entry(1.0, 10_000.0, 1.0, 10_000.0).unwrap();
        assert_eq!(eq.builders, 0.0);
        assert!(!eq.interior);
        let eq = equilibrium_entry(1.0, 10_000.0, 1.0, 2e5).unwrap();
        assert_eq!(eq.builders, 0.0);
    }

    #[test]
    fn zero_profit_attention_values() {
        assert_eq!(zero_profit_attention(1.0, 1.0), 1.0);
        assert_eq!(zero_profit_attention(7.3, 7.3), 1.0);
        assert_eq!(zero_profit_attention(0.5, 2.0), 0.25);
    }

    #[test]
    fn zero_profit_identity() {
        for &(p, k) in &[(1.0, 1.0), (2.5, 0.7), (0.3, 11.0), (49.0, 1.0)] {
            let pi = builder_profit(p, zero_profit_attention(k, p), k);
            assert!(pi.abs() <= 1e-12 * k, "profit {pi} at p={p}, k={k}");
        }
    }

    #[test]
    fn comparative_statics_values_and_signs() {
        let cs = comparative_statics(1.0, 10_000.0, 1.0, 100.0).unwrap();
        assert_eq!(cs.wrt_attention, 1.0);
        assert_eq!(cs.wrt_monetization, 10_000.0);
        assert_eq!(cs.wrt_entry_cost, -10_000.0);
        assert_eq!(cs.wrt_outside_weight, -1.0);

        let cs = comparative_statics(2.0, 500.0, 0.25, 30.0).unwrap();
        assert!(cs.wrt_attention > 0.0);
        assert!(cs.wrt_monetization > 0.0);
        assert!(cs.wrt_entry_cost < 0.0);
        assert_eq!(cs.wrt_outside_weight, -1.0);

        assert!(matches!(
            comparative_statics(1.0, 10.0, 100.0, 100.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn welfare_values() {
        assert_eq!(welfare(0.0, 10_000.0, 100.0), 0.0);
        let w = welfare(100.0, 10_000.0, 100.0);
        assert!((w - 100.0 * 50f64.ln()).abs() < 1e-9);
        // B + z > A puts the per-builder value below 1, so W < 0.
        assert!(welfare(20_000.0, 10_000.0, 100.0) < 0.0);
    }

    #[test]
    fn welfare_optimum_table3_parameters() {
        let res = welfare_optimum(10_000.0, 100.0, 1.0, 1.0).unwrap();
        // Bisection oracle: the slope changes sign inside [3600, 3800].
        assert!(welfare_slope(3_600.0, 10_000.0, 100.0) > 0.0);
        assert!(welfare_slope(3_800.0, 10_000.0, 100.0) < 0.0);
        assert!(res.social_optimum > 3_600.0 && res.social_optimum < 3_750.0);
        assert!(welfare_slope(res.social_optimum, 10_000.0, 100.0).abs() < 1e-9);
        assert!(res.excess_entry, "B* = 9900 must exceed B**");
        assert!(res.welfare_at_social >= res.welfare_at_free_entry);
    }

    #[test]
    fn welfare_optimum_degenerate_when_outside_dominates() {
        let res = welfare_optimum(100.0, 100.0, 1.0, 1.0).unwrap();
        assert_eq!(res.social_optimum, 0.0);
        let res = welfare_optimum(50.0, 100.0, 1.0, 1.0).unwrap();
        assert_eq!(res.social_optimum, 0.0);
    }

    #[test]
    fn demand_invariance() {
        let base = equilibrium_entry(1.3, 5_000.0, 0.8, 60.0).unwrap();
        for &c in &[2.0, 10.0, 1e3] {
            let scaled = equilibrium_entry(1.3, c * 5_000.0, 0.8, 60.0).unwrap();
            assert_eq!(scaled.attention_per_builder, base.attention_per_builder);
            assert_eq!(scaled.profit, 0.0);
            assert!(scaled.builders > base.builders);
        }
    }

    #[test]
    fn cost_collapse_monotonicity() {
        // k -> 0: entry grows without bound, per-builder attention
        // vanishes, both monotonically.
        let mut last_b = 0.0;
        let mut last_s = f64::INFINITY;
        for i in 0..12 {
            let k = 1.0 / 4f64.powi(i);
            let eq = equilibrium_entry(1.0, 10_000.0, k, 100.0).unwrap();
            assert!(eq.builders > last_b);
            assert!(eq.attention_per_builder < last_s);
            last_b = eq.builders;
            last_s = eq.attention_per_builder;
        }
        assert!(last_b > 4e7);
        assert!(last_s < 1e-6);
    }

    #[test]
    fn outside_absorption_values() {
        assert_eq!(outside_absorption(0.0, 42.0), 1.0);
        // At the Table 3 equilibrium, z/(B*+z) = kz/(pA).
        let at_eq = outside_absorption(9_900.0, 100.0);
        let kz_pa = 1.0 * 100.0 / (1.0 * 10_000.0);
        assert!((at_eq - kz_pa).abs() < 1e-15);
        assert!(outside_absorption(1e12, 100.0) < 1e-9);
    }

    #[test]
    fn growth_constant_cost_keeps_share_flat() {
        let times: Vec<f64> = (0..20).map(|i| i as f64 * 0.25).collect();
        let path =
            growth_trajectory(1_000.0, 2.0, 50.0, |t| (1.7 * t).exp(), |_| 3.0, &times).unwrap();
        for (i, s) in path.attention_per_builder.iter().enumerate() {
            assert_eq!(s.unwrap(), 1.5, "at t index {i}");
        }
        // Demand doubling bumps B* by pA/k while s-bar stays put.
        assert!(path.builders.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn growth_outruns_cost_decline() {
        // k(t) = e^-t, g(t) = e^{2t}: attention grows faster than cost
        // falls, B* grows like e^{3t}, yet s-bar tracks k(t)/p exactly.
        let times: Vec<f64> = (0..=8).map(|i| i as f64 * 0.5).collect();
        let path = growth_trajectory(
            1_000.0,
            1.0,
            10.0,
            |t| (2.0 * t).exp(),
            |t| (-t).exp(),
            &times,
        )
        .unwrap();
        for (i, &t) in times.iter().enumerate() {
            let expect = (-t).exp();
            let got = path.attention_per_builder[i].unwrap();
            assert!(
                ((got - expect) / expect).abs() < 1e-12,
                "s-bar at t={t}: {got} vs {expect}"
            );
            let b_expect = 1_000.0 * (3.0 * t).exp() - 10.0;
            assert!(((path.builders[i] - b_expect) / b_expect).abs() < 1e-12);
        }
    }

    #[test]
    fn growth_rejects_invalid_functions() {
        let times = [0.0, 1.0];
        assert!(growth_trajectory(1.0, 1.0, 1.0, |_| 0.0, |_| 1.0, &times).is_err());
        assert!(growth_trajectory(1.0, 1.0, 1.0, |_| 1.0, |t| -t, &times).is_err());
    }

    #[test]
    fn comparative_statics_match_finite_differences() {
        // Spot check; the full 100-point grid lives in the acceptance
        // suite.
        let (p, a, k, z) = (1.7, 8_000.0, 0.4, 55.0);
        let b = |p: f64, a: f64, k: f64, z: f64| equilibrium_entry(p, a, k, z).unwrap().builders;
        let cs = comparative_statics(p, a, k, z).unwrap();
        let rel = 1e-6;
        let fd_a = (b(p, a * (1.0 + rel), k, z) - b(p, a * (1.0 - rel), k, z)) / (2.0 * rel * a);
        let fd_p = (b(p * (1.0 + rel), a, k, z) - b(p * (1.0 - rel), a, k, z)) / (2.0 * rel * p);
        let fd_k = (b(p, a, k * (1.0 + rel), z) - b(p, a, k * (1.0 - rel), z)) / (2.0 * rel * k);
        let fd_z = (b(p, a, k, z * (1.0 + rel)) - b(p, a, k, z * (1.0 - rel))) / (2.0 * rel * z);
        assert!((fd_a / cs.wrt_attention - 1.0).abs() < 1e-6);
        assert!((fd_p / cs.wrt_monetization - 1.0).abs() < 1e-6);
        assert!((fd_k / cs.wrt_entry_cost - 1.0).abs() < 1e-6);
        assert!((fd_z / cs.wrt_outside_weight - 1.0).abs() < 1e-6);
    }
}
