//! Free-entry equilibrium: entry counts, comparative statics, welfare,
//! and what happens to per-builder outcomes as entry costs collapse.
//!
//! ```bash
//! cargo run -p satsim --example equilibrium
//! ```

use satsim::equilibrium::{
    comparative_statics, equilibrium_entry, welfare_optimum, zero_profit_attention,
};

fn main() {
    let (p, a, k, z) = (1.0, 10_000.0, 1.0, 100.0);

    let eq = equilibrium_entry(p, a, k, z).unwrap();
    println!("market: p = {p}, A = {a}, k = {k}, z = {z}");
    println!("free entry stops at B* = {} builders", eq.builders);
    println!(
        "attention per builder there: {} (= k/p)",
        eq.attention_per_builder
    );
    println!("profit per builder there: {}", eq.profit);
    println!(
        "outside option absorbs {:.1}% of attention",
        eq.outside_absorption * 100.0
    );

    let cs = comparative_statics(p, a, k, z).unwrap();
    println!("\ncomparative statics of B*:");
    println!(
        "  dB*/dA = {:>10}   (more attention -> more builders)",
        cs.wrt_attention
    );
    println!(
        "  dB*/dp = {:>10}   (better monetization -> more builders)",
        cs.wrt_monetization
    );
    println!(
        "  dB*/dk = {:>10}   (cheaper entry -> more builders)",
        cs.wrt_entry_cost
    );
    println!(
        "  dB*/dz = {:>10}   (stronger inertia -> fewer builders)",
        cs.wrt_outside_weight
    );

    let welfare = welfare_optimum(a, z, p, k).unwrap();
    println!(
        "\nwelfare-optimal builder count B** = {:.1}; free entry overshoots: {}",
        welfare.social_optimum, welfare.excess_entry
    );

    // Entry costs falling toward zero: participation explodes while the
    // per-builder outcome, pinned at k/p, vanishes.
    println!("\nas k -> 0 (with A fixed at {a}):");
    println!("{:>10} {:>14} {:>14}", "k", "B*", "s_bar(B*)");
    let mut k_t = 1.0;
    for _ in 0..6 {
        let eq = equilibrium_entry(p, a, k_t, z).unwrap();
        println!(
            "{:>10} {:>14.0} {:>14}",
            k_t,
            eq.builders,
            zero_profit_attention(k_t, p)
        );
        k_t /= 10.0;
    }
    println!("\nscaling A x10 changes none of the s_bar column (demand invariance):");
    let eq10 = equilibrium_entry(p, 10.0 * a, k, z).unwrap();
    println!(
        "  A = {}: B* = {}, s_bar = {}",
        10.0 * a,
        eq10.builders,
        eq10.attention_per_builder
    );
}
