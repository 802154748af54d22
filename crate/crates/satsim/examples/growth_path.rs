//! Endogenous attention growth: expanding the attention pool cannot lift
//! per-builder outcomes while entry costs keep falling.
//!
//! ```bash
//! cargo run -p satsim --example growth_path
//! ```

use satsim::equilibrium::growth_trajectory;

fn main() {
    let times: Vec<f64> = (0..=8).map(|i| i as f64 * 0.5).collect();

    // Attention grows like e^(2t) while entry costs fall like e^(-t):
    // the equilibrium builder count explodes like e^(3t), and the
    // per-builder share tracks k(t)/p all the way down.
    let path = growth_trajectory(
        10_000.0,
        1.0,
        100.0,
        |t| (2.0 * t).exp(),
        |t| (-t).exp(),
        &times,
    )
    .unwrap();

    println!("A(t) = 1e4 * e^(2t), k(t) = e^(-t), p = 1, z = 100");
    println!(
        "{:>5} {:>14} {:>10} {:>16} {:>12}",
        "t", "A(t)", "k(t)", "B*(t)", "s_bar(t)"
    );
    for (i, t) in times.iter().enumerate() {
        println!(
            "{:>5} {:>14.3e} {:>10.4} {:>16.3e} {:>12.4}",
            t,
            path.attention[i],
            path.entry_cost[i],
            path.builders[i],
            path.attention_per_builder[i].unwrap()
        );
    }
    println!(
        "\nattention grew {:.0}x; per-builder attention still fell {:.0}x —",
        path.attention.last().unwrap() / path.attention[0],
        path.attention_per_builder[0].unwrap()
            / path.attention_per_builder.last().unwrap().unwrap()
    );
    println!("the demand side never appears in s_bar = k/p.");
}
