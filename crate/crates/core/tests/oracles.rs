//! Independent oracles: everything here re-derives results from the family
//! evaluators on its own grids, never through the scanner internals.

use std::f64::consts::PI;

use chaoscope::families::{eval, prime_sum_truncation, FamilySpec, MomentScale};
use chaoscope::scanner::{build_chain, find_windows, scan_crossings, ChainOutcome};
use chaoscope::{find_family, Parameter, RealInterval, ScanConfig, Window, WindowKind};

fn u(v: f64) -> Parameter {
    Parameter::untagged(v).unwrap()
}

fn small_config() -> ScanConfig {
    ScanConfig { grid_points: 20_000, ..ScanConfig::default() }
}

fn abs_d(spec: &FamilySpec, a: &Parameter, b: &Parameter, z: f64) -> f64 {
    (eval(spec, a, z).unwrap() - eval(spec, b, z).unwrap()).abs()
}

fn signed_d(spec: &FamilySpec, a: &Parameter, b: &Parameter, z: f64) -> f64 {
    eval(spec, a, z).unwrap() - eval(spec, b, z).unwrap()
}

/// Uniform grid in the family's scan coordinate.
fn dense_grid(scale: MomentScale, range: &RealInterval, n: usize) -> Vec<f64> {
    let (t0, t1) = (scale.forward(range.lo), scale.forward(range.hi));
    (0..n).map(|i| scale.inverse(t0 + (t1 - t0) * i as f64 / (n - 1) as f64)).collect()
}

/// Cases covering linear and reciprocal scan grids.
fn cases() -> Vec<(&'static str, f64, f64, RealInterval)> {
    vec![
        ("sin_ax", 1.0, 2.0, RealInterval::closed(0.1, 2.0 * PI - 0.1).unwrap()),
        ("sin_ax", 1.0, (1.0 + 5f64.sqrt()) / 2.0, RealInterval::closed(0.0, 300.0).unwrap()),
        ("log_sine", 0.3, 0.7, RealInterval::closed(0.01, 1.0).unwrap()),
        ("g_iter_1", 0.8, 1.1, RealInterval::closed(-2.0, 2.0).unwrap()),
        ("sin_2pia", 0.2, 0.45, RealInterval::closed(0.0, 0.99).unwrap()),
        ("linear_ax", 0.5, 1.5, RealInterval::closed(-10.0, 10.0).unwrap()),
    ]
}

#[test]
fn sin_crossings_match_closed_form() {
    let f = find_family("sin_ax", 0).unwrap();
    let r = RealInterval::closed(0.1, 2.0 * PI - 0.1).unwrap();
    let roots = scan_crossings(&f, &u(1.0), &u(2.0), &r, &ScanConfig::default()).unwrap();
    let z: Vec<f64> = roots.iter().map(|c| c.z).collect();
    // sin x = sin 2x  ⇔  sin x (1 − 2 cos x) = 0
    let expected = [PI / 3.0, PI, 5.0 * PI / 3.0];
    assert_eq!(z.len(), 3, "{z:?}");
    for (a, b) in z.iter().zip(expected) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}

#[test]
fn crossings_complete_on_dense_grid() {
    let config = small_config();
    for (id, a, b, range) in cases() {
        let f = find_family(id, 0).unwrap();
        let (a, b) = (u(a), u(b));
        let roots: Vec<f64> = scan_crossings(&f, &a, &b, &range, &config).unwrap().iter().map(|c| c.z).collect();
        let xs = dense_grid(f.scale, &range, 10 * config.grid_points);
        let ds: Vec<f64> = xs.iter().map(|&z| signed_d(&f, &a, &b, z)).collect();
        for i in 1..xs.len() {
            if ds[i - 1] * ds[i] < 0.0 {
                let (lo, hi) = (xs[i - 1], xs[i]);
                let slack = 1e-9 * (1.0 + hi.abs());
                assert!(
                    roots.iter().any(|&r| r >= lo - slack && r <= hi + slack),
                    "{id}: sign change in [{lo}, {hi}] with no reported crossing"
                );
            }
        }
        // and every reported crossing is a zero of d
        for r in &roots {
            assert!(abs_d(&f, &a, &b, *r) <= 2.0 * config.tol_zero, "{id}: d({r}) is not zero");
        }
    }
}

fn revalidate(f: &FamilySpec, a: &Parameter, b: &Parameter, w: &Window, config: &ScanConfig, construction_points: usize) {
    let target = match w.kind {
        WindowKind::Cross => 0.0,
        WindowKind::Disjoint => w.eps,
    };
    let tol = match w.kind {
        WindowKind::Cross => config.tol_zero,
        WindowKind::Disjoint => config.tol_eq,
    };
    for end in [w.x1, w.y1] {
        let v = abs_d(f, a, b, end);
        assert!((v - target).abs() <= 2.0 * tol, "{}: boundary {end} has |d| = {v}, want {target}", f.id);
    }
    let n = 10 * construction_points.max(10);
    for i in 1..n {
        let z = w.x1 + (w.y1 - w.x1) * i as f64 / n as f64;
        if z <= w.x1 || z >= w.y1 {
            continue;
        }
        let v = abs_d(f, a, b, z);
        assert!(v > 0.0 && v < w.eps + 2.0 * config.tol_eq, "{}: interior z = {z} has |d| = {v} in {w:?}", f.id);
    }
}

#[test]
fn windows_revalidate_at_ten_times_density() {
    let config = small_config();
    let mut checked = 0;
    for (id, a, b, range) in cases() {
        let f = find_family(id, 0).unwrap();
        let (a, b) = (u(a), u(b));
        let grid = dense_grid(f.scale, &range, config.grid_points);
        for kind in [WindowKind::Cross, WindowKind::Disjoint] {
            for eps in config.ladder() {
                for w in find_windows(&f, &a, &b, eps, kind, &range, &config).unwrap() {
                    let inside = grid.iter().filter(|&&z| z > w.x1 && z < w.y1).count();
                    revalidate(&f, &a, &b, &w, &config, inside);
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 50, "only {checked} windows checked");
}

#[test]
fn chain_gaps_reevaluate_above_mu() {
    let config = small_config();
    let f = find_family("sin_ax", 0).unwrap();
    let (a, b) = (u(1.0), u((1.0 + 5f64.sqrt()) / 2.0));
    let r = RealInterval::closed(0.0, 500.0).unwrap();
    let ChainOutcome::Chain(c) = build_chain(&f, &a, &b, WindowKind::Cross, &r, &config).unwrap() else {
        panic!("expected a cross chain");
    };
    assert_eq!(c.windows.len(), config.ladder_depth);
    for pair in c.windows.windows(2) {
        assert!(pair[0].eps > pair[1].eps);
    }
    for (i, w) in c.windows.iter().enumerate() {
        for v in &c.windows[i + 1..] {
            assert!(w.y1 < v.x1 || v.y1 < w.x1, "windows overlap");
        }
    }
    for g in &c.gaps {
        let v = abs_d(&f, &a, &b, g.w);
        assert!((v - g.value).abs() < 1e-12);
        assert!(g.gap_lo <= g.w && g.w <= g.gap_hi);
        assert!(v > c.mu_candidate && v > config.mu_min);
    }
}

fn trial_division_primes(limit: u64) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    for n in 2..=limit {
        if out.iter().take_while(|&&p| p * p <= n).all(|&p| n % p != 0) {
            out.push(n);
        }
    }
    out
}

#[test]
fn prime_sum_matches_direct_sum() {
    let primes = trial_division_primes(3000);
    for &(a, x) in &[(1.0, 1.0), (2.5, -7.0), (-0.3, 40.0)] {
        let direct: f64 = primes.iter().map(|&p| (a * x / p as f64).sin() / (p * p) as f64).sum();
        let (v, bound) = prime_sum_truncation(&u(a), x, 3000).unwrap();
        assert!((v - direct).abs() < 1e-15, "{v} vs {direct}");
        assert_eq!(bound, 1.0 / 3000.0);
    }
}
