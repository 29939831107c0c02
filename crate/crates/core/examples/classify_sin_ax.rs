//! Chaos-kind verdict for sin(ax) on a finite horizon.
//!
//!     cargo run --release --example classify_sin_ax

use chaoscope::{classify_kind, find_family, RealInterval, ScanConfig};

fn main() -> chaoscope::Result<()> {
    let spec = find_family("sin_ax", 0)?;
    let range = RealInterval::closed(0.0, 500.0)?;
    let v = classify_kind(&spec, &ScanConfig::default(), &range)?;
    println!("label: {}", v.label);
    println!("cross chains hold: {} (mu {:?})", v.cross.holds, v.cross.mu_estimate);
    println!("disjoint chains hold: {}", v.disjoint.holds);
    println!("sensitive: {} (lambda {:.3})", v.sensitive.holds, v.sensitive.lambda_estimate);
    for unit in v.cross.units.iter().take(3) {
        let a = &unit.attempts[0];
        println!("  α = {} β = {} depth {} over {}", a.alpha, a.beta, a.outcome.depth(), a.final_range);
    }
    Ok(())
}
