//! Sensitivity taxonomy: convergence of ψ_{u(n)} along parameter sequences.
//!
//!     cargo run --release --example taxonomy_points

use chaoscope::taxonomy::{battery, classify_family, classify_point, convergence_profile, probe_grid, LimitId};
use chaoscope::{find_family, Parameter, ScanConfig};

fn main() -> chaoscope::Result<()> {
    let config = ScanConfig::default();
    let half = Parameter::rational(1, 2)?;

    let mixed = find_family("mixed_rat_irr", 0)?;
    let probes = probe_grid(&mixed.theta, config.boundary_margin);
    for seq in battery(&mixed, &half, &config) {
        let p = convergence_profile(&mixed, &half, &seq, &probes, &config)?;
        let limit = match &p.limit_id {
            LimitId::AlphaItself => "ψ_α".to_string(),
            LimitId::Other(b) => format!("ψ at {b}"),
            LimitId::None => "none".to_string(),
        };
        println!("{:<22} {:<22} {:?} -> {limit}", seq.name, p.class, p.verdict);
    }
    let r = classify_point(&mixed, &half, &config)?;
    println!("mixed_rat_irr at 1/2: {:?}, exceptional class {:?}", r.label, r.exceptional_class);

    for id in ["log_sine", "linear_ax", "sin_2pia", "xi_random", "theta_family"] {
        let f = find_family(id, 0)?;
        println!("{id}: {:?}", classify_family(&f, &config)?.label);
    }
    Ok(())
}
