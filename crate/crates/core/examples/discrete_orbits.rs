//! Orbit-separation checks on sequence families: tail statistics, the Du
//! criterion and the two-condition recurrence/divergence check.
//!
//!     cargo run --release --example discrete_orbits

use chaoscope::discrete::{check_41, check_du, find_sequence, tail_study};
use chaoscope::{Parameter, ScanConfig};

fn main() -> chaoscope::Result<()> {
    let config = ScanConfig::default();
    let logistic = find_sequence("logistic_357")?;
    let x = Parameter::untagged(0.3)?;
    let y = Parameter::untagged(0.3 + 1e-9)?;
    for s in tail_study(&logistic, &x, &y, &config)? {
        println!("n in {:?}: max {:.4} min {:.3e}", s.n_range, s.limsup_est, s.liminf_est);
    }

    for id in ["logistic_357", "sin_drift", "sin_drift_commensurable"] {
        let fam = find_sequence(id)?;
        let du = check_du(&fam, 0.1, &config)?;
        let found = du.witnesses.iter().filter(|w| w.found).count();
        println!("{id}: Du with λ = 0.1 {} ({found}/{} neighbourhoods)", verdict(du.holds), du.witnesses.len());
        let c = check_41(&fam, 0.1, &config)?;
        println!(
            "{id}: two-condition check {} (condition 1 failures {}, condition 2 failures {})",
            verdict(c.holds),
            c.condition1_failures,
            c.condition2_failures
        );
    }
    Ok(())
}

fn verdict(b: bool) -> &'static str {
    if b {
        "holds"
    } else {
        "fails"
    }
}
