//! Interior fixed points of the reinforcement dynamics and their
//! agreement with long simulations.
//!
//! ```bash
//! cargo run -p satsim --example fixed_point
//! ```

use satsim::dynamics::{
    effective_sensitivity, run_deterministic, solve_fixed_point, DynamicsConfig,
};
use satsim::harness::{derive_seed, sample_qualities};
use satsim::metrics::gini;
use satsim::model::{AttentionState, OutsideOption, QualityDistribution};

fn main() {
    let builders = 1_000;
    let total = 10_000.0;
    let z = 100.0;
    let beta = 1.0;
    let outside = OutsideOption::Weight(z);
    let qualities = sample_qualities(
        &QualityDistribution::Normal {
            mu: 0.0,
            sigma: 1.0,
        },
        builders,
        derive_seed(42, "quality", 0),
        z.ln(),
    )
    .unwrap();

    println!("reinforcement steepens the quality-to-attention map:");
    println!(
        "{:>6} {:>12} {:>12} {:>14}",
        "alpha", "beta_eff", "gini(x*)", "outside share"
    );
    for alpha in [0.0, 0.25, 0.5, 0.75, 0.9] {
        let fp = solve_fixed_point(&qualities, &outside, alpha, beta, total).unwrap();
        println!(
            "{alpha:>6} {:>12.2} {:>12.4} {:>14.4}",
            effective_sensitivity(beta, alpha).unwrap(),
            gini(fp.builders()).unwrap(),
            fp.outside() / total
        );
    }

    // The simulation converges to the same point.
    let alpha = 0.6;
    let fp = solve_fixed_point(&qualities, &outside, alpha, beta, total).unwrap();
    let initial = AttentionState::uniform(builders, z, total);
    let mut cfg = DynamicsConfig::new(alpha, beta, 0.1, 5_000);
    cfg.snapshot_every = Some(0);
    let traj = run_deterministic(&initial, &qualities, &cfg).unwrap();
    let mut gap: f64 = (traj.final_state.outside() - fp.outside()).abs();
    for (x, y) in traj.final_state.builders().iter().zip(fp.builders()) {
        gap = gap.max((x - y).abs());
    }
    println!(
        "\nalpha = {alpha}: simulation from uniform initial conditions ends \
         within {:.2e} * A of the solved fixed point",
        gap / total
    );
    match traj.converged_at {
        Some(step) => println!("(converged at step {step})"),
        None => println!("(ran the full budget)"),
    }

    // At alpha = 1 with heterogeneous quality no interior fixed point
    // exists; the solver refuses anything past its supported range.
    let err = solve_fixed_point(&qualities, &outside, 0.99, beta, total).unwrap_err();
    println!("\nalpha = 0.99 -> {err}");
}
