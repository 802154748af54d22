//! Attention dilution under entry: the symmetric benchmark table.
//!
//! ```bash
//! cargo run -p satsim --example dilution
//! ```

use satsim::harness::dilution_table;
use satsim::harness::scenario::display_rounded;

fn main() {
    let (a, z, p, k) = (10_000.0, 100.0, 1.0, 1.0);
    let counts = [100.0, 500.0, 1_000.0, 5_000.0, 9_900.0, 50_000.0];

    println!("A = {a}, z = {z}, p = {p}, k = {k}");
    println!("{:>10} {:>10} {:>10}", "B", "s_bar(B)", "profit(B)");
    for row in dilution_table(a, z, p, k, &counts) {
        println!(
            "{:>10} {:>10} {:>10}",
            row.builders,
            display_rounded(row.average_attention),
            display_rounded(row.profit)
        );
    }
    println!("\naverage attention per builder falls monotonically in B;");
    println!("profit crosses zero exactly at the free-entry count B* = 9900.");
}
