//! App-store-scale run: 800,000 builders contesting 3.8e10 attention
//! units, graded against the published concentration targets.
//!
//! Takes roughly half a minute; run with `--release` for speed.
//!
//! ```bash
//! cargo run --release -p satsim --example calibration
//! ```

use satsim::harness::{builtin_config, run_scenario};

fn main() {
    let base = builtin_config("calibration").unwrap();
    println!(
        "B = {}, A = {:e}, z = {}, q ~ N(0, 1.5^2), T = {}",
        base.market.builders,
        base.market.aggregate_attention(),
        base.outside_weight(),
        base.dynamics.steps
    );
    println!(
        "\n{:>6} {:>10} {:>10} {:>10} {:>12} {:>10}",
        "alpha", "top 1%", "gini", "med/mean", "share < 100", "seconds"
    );
    for alpha in [0.0, 0.3, 0.6, 0.8] {
        let mut cfg = base.clone();
        cfg.dynamics.alpha = alpha;
        let report = run_scenario(&cfg).unwrap();
        let m = &report.final_metrics;
        let top1 = m
            .top_shares
            .iter()
            .find(|(f, _)| *f == 0.01)
            .map(|&(_, s)| s)
            .unwrap();
        let below = m
            .share_below
            .iter()
            .find(|(t, _)| *t == 100.0)
            .map(|&(_, s)| s)
            .unwrap();
        println!(
            "{alpha:>6} {:>9.1}% {:>10.3} {:>12.2e} {:>11.1}% {:>10.1}",
            100.0 * top1,
            m.gini,
            m.median_mean,
            100.0 * below,
            report.runtime_ms as f64 / 1_000.0
        );
        for check in &report.target_checks {
            println!(
                "       [{}] {}: {:.3} vs window [{}, {}]",
                if check.pass { "pass" } else { "MISS" },
                check.name,
                check.observed,
                check.window.0,
                check.window.1
            );
        }
    }
    println!("\nconcentration rises steeply in alpha at full market scale;");
    println!("the converged alpha = 0.6 state is more concentrated than the");
    println!("published single-draw targets it is graded against.");
}
