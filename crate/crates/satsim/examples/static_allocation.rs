//! Static logit allocation of attention: shares, the relative-quality
//! ratio law, and outside-option absorption.
//!
//! ```bash
//! cargo run -p satsim --example static_allocation
//! ```

use satsim::model::{
    attention_ratio, static_allocation, OutsideOption, QualityDistribution, QualityModel,
};

fn main() {
    // Five builders with spread-out quality against an outside option.
    let qualities = QualityModel::new(
        QualityDistribution::Uniform { lo: -2.0, hi: 2.0 },
        vec![-1.5, -0.5, 0.0, 0.8, 1.9],
        0.0,
    )
    .unwrap();
    let beta = 1.0;
    let total = 1_000.0;
    let outside = OutsideOption::Quality(0.0);

    let alloc = static_allocation(&qualities, &outside, beta, total).unwrap();
    println!("total attention: {total}, beta = {beta}, outside quality = 0");
    println!("{:>8} {:>10} {:>10}", "quality", "share", "% of pool");
    for (q, s) in qualities.realized.iter().zip(&alloc.shares) {
        println!("{q:>8} {s:>10.3} {:>9.1}%", 100.0 * s / total);
    }
    println!(
        "outside: {:>10.3} {:>9.1}%",
        alloc.outside_share,
        100.0 * alloc.outside_share / total
    );

    // Relative attention depends only on the quality gap, never on who
    // else competes.
    let r = attention_ratio(1.9, 0.8, beta).unwrap();
    println!(
        "\nshare ratio of the top two builders: {:.4} = exp(beta * (1.9 - 0.8)) = {:.4}",
        alloc.shares[4] / alloc.shares[3],
        r
    );

    // Higher beta amplifies the same quality gaps.
    for beta in [0.5, 1.0, 2.0, 4.0] {
        let alloc = static_allocation(&qualities, &outside, beta, total).unwrap();
        let top = alloc.shares.last().unwrap() / total;
        println!(
            "beta = {beta}: top builder takes {:.1}% of the pool",
            100.0 * top
        );
    }
}
