//! Crossings, windows and a window chain for one pair of family members.
//!
//!     cargo run --release --example window_scan

use chaoscope::scanner::{build_chain, find_windows, gap_separation, scan_crossings, ChainOutcome};
use chaoscope::{find_family, Parameter, RealInterval, ScanConfig, WindowKind};

fn main() -> chaoscope::Result<()> {
    let spec = find_family("sin_ax", 0)?;
    let config = ScanConfig::default();
    let one = Parameter::untagged(1.0)?;
    let two = Parameter::untagged(2.0)?;

    let r = RealInterval::closed(0.1, 2.0 * std::f64::consts::PI - 0.1)?;
    for c in scan_crossings(&spec, &one, &two, &r, &config)? {
        println!("sin x = sin 2x at z = {:.12}{}", c.z, if c.tangential { " (tangential)" } else { "" });
    }

    let golden = Parameter::untagged((1.0 + 5f64.sqrt()) / 2.0)?;
    let r = RealInterval::closed(0.0, 500.0)?;
    let ws = find_windows(&spec, &one, &golden, 0.5, WindowKind::Cross, &r, &config)?;
    println!("{} cross windows at ε = 0.5 for α = 1, β = φ", ws.len());
    if let [w1, w2, ..] = ws.as_slice() {
        let g = gap_separation(&spec, &one, &golden, w1, w2, &config)?;
        println!("gap between the first two: max |d| = {:.4} at z = {:.4}", g.value, g.w);
    }
    match build_chain(&spec, &one, &golden, WindowKind::Cross, &r, &config)? {
        ChainOutcome::Chain(c) => {
            println!("cross chain of depth {}, smallest gap {:.4}", c.windows.len(), c.min_gap());
            for w in &c.windows {
                println!("  ε = {:<10} [{:.6}, {:.6}]", w.eps, w.x1, w.y1);
            }
        }
        ChainOutcome::Failure(f) => println!("no chain: {f:?}"),
    }
    match build_chain(&spec, &one, &golden, WindowKind::Disjoint, &r, &config)? {
        ChainOutcome::Chain(c) => println!("disjoint chain of depth {}", c.windows.len()),
        ChainOutcome::Failure(f) => println!("disjoint chain fails at level {} ({:?})", f.deepest_level, f.reason),
    }
    Ok(())
}
