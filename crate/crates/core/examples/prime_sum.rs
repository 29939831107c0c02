//! Truncated prime sum and its error bound.
//!
//!     cargo run --release --example prime_sum

use chaoscope::families::prime_sum_truncation;
use chaoscope::Parameter;

fn main() -> chaoscope::Result<()> {
    let a = Parameter::untagged(1.3)?;
    let x = 2.7;
    for p in [1_000u64, 10_000, 100_000] {
        let (v, bound) = prime_sum_truncation(&a, x, p)?;
        let (v2, _) = prime_sum_truncation(&a, x, 2 * p)?;
        println!("P = {p:>6}: value {v:.12}  |v(P) - v(2P)| = {:.3e}  bound {bound:.1e}", (v - v2).abs());
    }
    Ok(())
}
