//! Parameter sweep with replicate seeds and CSV export.
//!
//! ```bash
//! cargo run -p satsim --example sweep_alpha
//! ```

use satsim::harness::{builtin_config, export_sweep, run_sweep, SweepSpec};

fn main() {
    let mut base = builtin_config("illustrative").unwrap();
    base.dynamics.steps = 300; // keep the demo quick
    let spec = SweepSpec {
        base,
        axis: "dynamics.alpha".into(),
        values: vec![0.0, 0.25, 0.5, 0.75, 1.0],
        seeds_per_point: 3,
    };
    let points = run_sweep(&spec).unwrap();

    println!("{:>6} {:>4} {:>8} {:>8}", "alpha", "rep", "gini", "top 1%");
    for p in &points {
        let r = p.report.as_ref().unwrap();
        let top1 = r
            .final_metrics
            .top_shares
            .iter()
            .find(|(f, _)| *f == 0.01)
            .map(|&(_, s)| s)
            .unwrap();
        println!(
            "{:>6} {:>4} {:>8.3} {:>7.1}%",
            p.axis_value,
            p.replicate,
            r.final_metrics.gini,
            100.0 * top1
        );
    }

    let dir = std::env::temp_dir().join("satsim_sweep_alpha");
    let path = export_sweep(&points, &dir).unwrap();
    println!("\nwrote {}", path.display());
    println!("(set SATSIM_THREADS to cap sweep parallelism)");
}
