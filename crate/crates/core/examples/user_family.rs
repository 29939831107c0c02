//! A family given as an expression in `a` and `x`.
//!
//!     cargo run --release --example user_family

use chaoscope::classifier::check_sensitive;
use chaoscope::{classify_kind, FamilySpec, RealInterval, ScanConfig};

fn main() -> chaoscope::Result<()> {
    let config = ScanConfig::default();
    let range = RealInterval::closed(0.0, 200.0)?;
    for (id, src) in [("cos_ax", "cos(a*x)"), ("flat", "0*a + 1"), ("damped", "exp(-x) * sin(a*x)")] {
        let spec = FamilySpec::from_expr(id, src, RealInterval::real_line(), RealInterval::real_line())?;
        let s = check_sensitive(&spec, &config, &range)?;
        println!("{id} = {src}: sensitive {} (λ ≈ {:.3})", s.holds, s.lambda_estimate);
        if id != "damped" {
            println!("  verdict: {}", classify_kind(&spec, &config, &range)?.label);
        }
    }
    Ok(())
}
