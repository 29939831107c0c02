//! Point and family taxonomy from the convergence of ψ_{u(n)} along parameter
//! sequences u(n) → α: uniform, non-uniform or divergent, and to which limit.

use std::f64::consts::{FRAC_PI_4, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{eval, FamilySpec};
use crate::model::{Parameter, RealInterval, ScanConfig};

/// Moments at which convergence is probed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeGrid {
    /// Interior moments used for pointwise convergence and limit identification.
    pub core: Vec<f64>,
    /// Core plus moments approaching each end of Θ (or growing without bound).
    pub sup: Vec<f64>,
}

const CORE_POINTS: usize = 33;
const FAR_MOMENT: f64 = 1e12;
const CORE_REACH: f64 = 10.0;

/// Probe grid on Θ. Moments within `margin` (relative) of a finite end are left out.
pub fn probe_grid(theta: &RealInterval, margin: f64) -> ProbeGrid {
    // pointwise behaviour is read at moderate moments when Θ has any
    let (lo, hi) = (theta.lo.max(-CORE_REACH), theta.hi.min(CORE_REACH));
    let (clo, chi) = if lo < hi {
        (lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo))
    } else {
        (theta.lo + 0.1 * theta.width(), theta.hi - 0.1 * theta.width())
    };
    let core: Vec<f64> = (0..CORE_POINTS)
        .map(|i| clo + (chi - clo) * i as f64 / (CORE_POINTS - 1) as f64)
        .collect();
    let mut sup = core.clone();
    for (end, inner, down) in [(theta.lo, clo, true), (theta.hi, chi, false)] {
        if end.is_finite() {
            let stop = margin * end.abs().max(1.0);
            let mut gap = (inner - end).abs() / 2.0;
            while gap > stop {
                sup.push(if down { end + gap } else { end - gap });
                gap /= 2.0;
            }
        } else {
            let mut z = inner.abs().max(1.0) * 2.0;
            while z <= FAR_MOMENT {
                sup.push(if down { -z } else { z });
                z *= 2.0;
            }
        }
    }
    sup.sort_by(f64::total_cmp);
    sup.dedup();
    sup.retain(|&x| theta.contains(x));
    ProbeGrid { core, sup }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvVerdict {
    Uniform,
    Nonuniform,
    Divergent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "limit", content = "beta", rename_all = "snake_case")]
pub enum LimitId {
    AlphaItself,
    /// A family member at a fitted parameter, e.g. α under another class.
    Other(Parameter),
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceProfile {
    pub sequence: String,
    /// Tag class of the terms, or "mixed" when it changes along the sequence.
    pub class: String,
    /// (n, sup over the probe grid of |ψ_{u(n)} − limit|).
    pub sup_norms: Vec<(usize, f64)>,
    pub pointwise_ok: bool,
    pub limit_id: LimitId,
    pub verdict: ConvVerdict,
    /// Probe moments skipped because they are documented singular moments.
    pub excluded: Vec<f64>,
}

/// Named parameter sequence converging to α.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedSequence {
    pub name: String,
    pub terms: Vec<Parameter>,
}

fn class_of(terms: &[Parameter]) -> String {
    let first = terms.first().map(|t| t.tag().class_name()).unwrap_or("untagged");
    if terms.iter().all(|t| t.tag().class_name() == first) {
        first.to_string()
    } else {
        "mixed".to_string()
    }
}

/// ψ on the probe moments; singular moments are reported and dropped.
fn eval_probes(spec: &FamilySpec, a: &Parameter, xs: &[f64], excluded: &mut Vec<f64>) -> Result<Vec<Option<f64>>> {
    xs.iter()
        .map(|&x| match eval(spec, a, x) {
            Ok(v) => Ok(Some(v)),
            Err(Error::Singular { .. }) => {
                if !excluded.contains(&x) {
                    excluded.push(x);
                }
                Ok(None)
            }
            Err(e) => Err(e.at_moment(x)),
        })
        .collect()
}

fn max_gap(a: &[Option<f64>], b: &[Option<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .filter_map(|(u, v)| Some((u.as_ref()? - v.as_ref()?).abs()))
        .fold(0.0, f64::max)
}

/// Fitted candidates for a limit other than ψ_α.
fn fitted_candidates(alpha: &Parameter) -> Vec<Parameter> {
    let mut out = Vec::new();
    let v = alpha.value();
    if let Ok(p) = Parameter::transcendental(v) {
        out.push(p);
    }
    for d in 2..=6 {
        if let Ok(p) = Parameter::algebraic(d, v) {
            out.push(p);
        }
    }
    if let Ok(p) = Parameter::untagged(v) {
        out.push(p);
    }
    out.retain(|p| p != alpha);
    out
}

/// Convergence of ψ_{u(n)} to a limit along `seq` → α.
pub fn convergence_profile(
    spec: &FamilySpec,
    alpha: &Parameter,
    seq: &NamedSequence,
    probes: &ProbeGrid,
    config: &ScanConfig,
) -> Result<ConvergenceProfile> {
    let terms = &seq.terms;
    if terms.len() < 2 {
        return Err(Error::Precondition(format!("sequence {} needs at least two terms", seq.name)));
    }
    let mut last_dist = f64::INFINITY;
    for t in terms {
        let dist = (t.value() - alpha.value()).abs();
        if t == alpha || !(dist < last_dist) {
            return Err(Error::Precondition(format!(
                "sequence {} must approach α = {alpha} strictly, term {t} does not",
                seq.name
            )));
        }
        last_dist = dist;
    }
    let mut excluded = Vec::new();
    let core: Vec<Vec<Option<f64>>> = terms
        .iter()
        .map(|t| eval_probes(spec, t, &probes.core, &mut excluded))
        .collect::<Result<_>>()?;
    let n = terms.len();
    let window = (n / 4).max(2);
    let last = &core[n - 1];
    let pointwise_ok = core[n - window..].iter().all(|c| max_gap(c, last) <= config.tol_conv);

    let alpha_core = eval_probes(spec, alpha, &probes.core, &mut excluded)?;
    let limit_id = if !pointwise_ok {
        LimitId::None
    } else if max_gap(last, &alpha_core) <= config.tol_conv {
        LimitId::AlphaItself
    } else {
        let mut found = LimitId::None;
        for cand in fitted_candidates(alpha) {
            let Ok(vals) = eval_probes(spec, &cand, &probes.core, &mut excluded) else { continue };
            if max_gap(last, &vals) <= config.tol_conv {
                found = LimitId::Other(cand);
                break;
            }
        }
        found
    };

    let limit_sup = match &limit_id {
        LimitId::AlphaItself => eval_probes(spec, alpha, &probes.sup, &mut excluded)?,
        LimitId::Other(b) => eval_probes(spec, b, &probes.sup, &mut excluded)?,
        LimitId::None => eval_probes(
            spec,
            if pointwise_ok { &terms[n - 1] } else { alpha },
            &probes.sup,
            &mut excluded,
        )?,
    };
    let mut sup_norms = Vec::with_capacity(n);
    for (k, t) in terms.iter().enumerate() {
        let vals = eval_probes(spec, t, &probes.sup, &mut excluded)?;
        sup_norms.push((k, max_gap(&vals, &limit_sup)));
    }
    let verdict = if !pointwise_ok {
        ConvVerdict::Divergent
    } else {
        let converged = match limit_id {
            // Cauchy form against the last term
            LimitId::None => sup_norms[n - window..].iter().all(|s| s.1 <= config.tol_conv),
            _ => sup_norms[n - 1].1 <= config.tol_conv,
        };
        if converged {
            ConvVerdict::Uniform
        } else {
            ConvVerdict::Nonuniform
        }
    };
    excluded.sort_by(f64::total_cmp);
    Ok(ConvergenceProfile {
        sequence: seq.name.clone(),
        class: class_of(terms),
        sup_norms,
        pointwise_ok,
        limit_id,
        verdict,
        excluded,
    })
}

// ---------------------------------------------------------------------------
// sequence battery

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy)]
enum TermClass {
    Rational,
    Algebraic(u32),
    Transcendental,
}

/// α + sign·c·2^{-m}; c = 1 (exact rational when α is), √2, 2^{1/d} or π/4.
/// All c lie in [π/4, √2], so mixed-class sequences still approach monotonically.
fn term(alpha: &Parameter, sign: i64, m: u32, class: TermClass) -> Result<Parameter> {
    let scale = (-(m as f64)).exp2();
    match class {
        TermClass::Rational => match alpha.as_ratio() {
            Some((p, q)) => {
                let den = (q as i128) << m;
                let num = (p as i128) * (1i128 << m) + sign as i128 * q as i128;
                let (num, den) = (i64::try_from(num), i64::try_from(den));
                match (num, den) {
                    (Ok(n), Ok(d)) => Parameter::rational(n, d),
                    _ => Err(Error::Precondition("rational sequence term overflows".into())),
                }
            }
            // no exact ratio for α: nearest dyadic rational offset
            None => {
                let v = alpha.value() + sign as f64 * scale;
                let den = 1i64 << 52;
                Parameter::rational((v * den as f64).round() as i64, den)
            }
        },
        TermClass::Algebraic(d) => {
            let c = if d == 2 { SQRT_2 } else { 2f64.powf(1.0 / d as f64) };
            Parameter::algebraic(d, alpha.value() + sign as f64 * c * scale)
        }
        TermClass::Transcendental => Parameter::transcendental(alpha.value() + sign as f64 * FRAC_PI_4 * scale),
    }
}

/// The fixed battery: for each direction, rational, quadratic irrational,
/// transcendental, mixed-degree algebraic, alternating and seeded random classes.
/// Sequences that would leave Ω are omitted.
pub fn battery(spec: &FamilySpec, alpha: &Parameter, config: &ScanConfig) -> Vec<NamedSequence> {
    let len = config.seq_len.max(2);
    let mut out = Vec::new();
    for (sign, dir) in [(1i64, "above"), (-1i64, "below")] {
        // first offset: room to the boundary of Ω, halved, capped at 1/4
        let room = if sign > 0 { spec.omega.hi - alpha.value() } else { alpha.value() - spec.omega.lo };
        if !(room > 0.0) {
            continue;
        }
        let mut m0 = 2u32;
        while SQRT_2 * (-(m0 as f64)).exp2() >= room / 2.0 && m0 < 60 {
            m0 += 1;
        }
        let kinds: [(&str, Box<dyn Fn(usize) -> TermClass>); 6] = [
            ("rational", Box::new(|_| TermClass::Rational)),
            ("quadratic", Box::new(|_| TermClass::Algebraic(2))),
            ("transcendental", Box::new(|_| TermClass::Transcendental)),
            ("mixed_degree", Box::new(|k| TermClass::Algebraic(2 + (k % 5) as u32))),
            ("alternating", Box::new(|k| if k % 2 == 0 { TermClass::Rational } else { TermClass::Transcendental })),
            (
                "random_class",
                Box::new(move |k| match mix64(config.seed ^ ((k as u64) << 8) ^ sign as u64) % 4 {
                    0 => TermClass::Rational,
                    1 => TermClass::Algebraic(2),
                    2 => TermClass::Algebraic(3),
                    _ => TermClass::Transcendental,
                }),
            ),
        ];
        for (name, class) in kinds.iter() {
            let terms: Result<Vec<Parameter>> =
                (0..len).map(|k| term(alpha, sign, m0 + k as u32, class(k))).collect();
            let Ok(terms) = terms else { continue };
            if terms.iter().any(|t| !spec.omega.contains(t.value()) || t == alpha) {
                continue;
            }
            out.push(NamedSequence { name: format!("{name}_{dir}"), terms });
        }
    }
    out
}

// ---------------------------------------------------------------------------
// classification

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointLabel {
    Insensitive,
    SmoothSensitive,
    Discontinuity,
    TotalDisorder,
    DenseDisorder,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub alpha: Parameter,
    pub label: PointLabel,
    /// For discontinuity points: the class whose sequences still reach ψ_α.
    pub exceptional_class: Option<String>,
    pub divergent_fraction: f64,
    pub profiles: Vec<ConvergenceProfile>,
    /// Labels are relative to the fixed battery of sequences.
    pub battery_relative: bool,
}

fn skipped(e: &Error) -> bool {
    matches!(e, Error::InvalidParameter(_) | Error::Domain { .. })
}

/// Label for a parameter point over the battery.
pub fn classify_point(spec: &FamilySpec, alpha: &Parameter, config: &ScanConfig) -> Result<PointReport> {
    config.validate()?;
    let a = alpha.value();
    if !spec.omega.contains(a) || a == spec.omega.lo || a == spec.omega.hi {
        return Err(Error::Precondition(format!("α = {alpha} must lie in the interior of Ω = {}", spec.omega)));
    }
    let probes = probe_grid(&spec.theta, config.boundary_margin);
    let mid = probes.core[CORE_POINTS / 2];
    eval(spec, alpha, mid).map_err(|e| e.at_moment(mid))?;
    let mut profiles = Vec::new();
    for seq in battery(spec, alpha, config) {
        match convergence_profile(spec, alpha, &seq, &probes, config) {
            Ok(p) => profiles.push(p),
            // families rejecting a tag class drop those sequences
            Err(e) if skipped(&e) => continue,
            Err(e) => return Err(e),
        }
    }
    let total = profiles.len();
    let divergent = profiles.iter().filter(|p| p.verdict == ConvVerdict::Divergent).count();
    let frac = if total == 0 { 0.0 } else { divergent as f64 / total as f64 };
    let to_alpha = |p: &ConvergenceProfile| p.limit_id == LimitId::AlphaItself;
    let mut exceptional_class = None;
    let label = if total == 0 {
        PointLabel::Inconclusive
    } else if profiles.iter().all(|p| to_alpha(p) && p.verdict == ConvVerdict::Uniform) {
        PointLabel::Insensitive
    } else if profiles.iter().all(|p| to_alpha(p) && p.verdict == ConvVerdict::Nonuniform) {
        PointLabel::SmoothSensitive
    } else if divergent == total {
        PointLabel::TotalDisorder
    } else if frac >= config.dense_fraction {
        PointLabel::DenseDisorder
    } else {
        let convergent: Vec<&ConvergenceProfile> =
            profiles.iter().filter(|p| p.verdict != ConvVerdict::Divergent).collect();
        let exceptions: Vec<&&ConvergenceProfile> = convergent.iter().filter(|p| to_alpha(p)).collect();
        let others = convergent.len() - exceptions.len();
        let mut classes: Vec<&str> = exceptions.iter().map(|p| p.class.as_str()).collect();
        classes.dedup();
        let one_class = classes.len() <= 1 && classes.first() != Some(&"mixed");
        let elsewhere = convergent.iter().all(|p| to_alpha(p) || p.limit_id != LimitId::None);
        if others > exceptions.len() && one_class && elsewhere {
            exceptional_class = classes.first().map(|c| c.to_string());
            PointLabel::Discontinuity
        } else {
            PointLabel::Inconclusive
        }
    };
    Ok(PointReport {
        alpha: *alpha,
        label,
        exceptional_class,
        divergent_fraction: frac,
        profiles,
        battery_relative: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyLabel {
    Insensitive,
    SmoothSensitive,
    DiscontinuousSensitive,
    TotallyDisordered,
    DenseDisordered,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub label: FamilyLabel,
    pub points: Vec<PointReport>,
}

/// Sample points of Ω: k/11 of the sampling region for k = 1..10, as exact rationals.
pub fn family_sample_points(spec: &FamilySpec) -> Result<Vec<Parameter>> {
    let reg = if spec.omega.is_finite() { spec.omega } else { spec.sample_omega };
    (1..=10)
        .map(|k| {
            let v = reg.lo + reg.width() * k as f64 / 11.0;
            // lo and width are sampled on a grid fine enough for an exact ratio
            let den = 11_000i64;
            let num = (v * den as f64).round() as i64;
            Parameter::rational(num, den)
        })
        .collect()
}

/// Per-point labels on a 10-point sample of Ω, aggregated into a family label.
pub fn classify_family(spec: &FamilySpec, config: &ScanConfig) -> Result<FamilyReport> {
    let mut points = Vec::new();
    for a in family_sample_points(spec)? {
        points.push(classify_point(spec, &a, config)?);
    }
    let n = points.len();
    let count = |l: PointLabel| points.iter().filter(|p| p.label == l).count();
    let label = if count(PointLabel::Insensitive) == n {
        FamilyLabel::Insensitive
    } else if count(PointLabel::SmoothSensitive) == n {
        FamilyLabel::SmoothSensitive
    } else if count(PointLabel::SmoothSensitive) + count(PointLabel::Discontinuity) == n
        && count(PointLabel::Discontinuity) > 0
    {
        FamilyLabel::DiscontinuousSensitive
    } else if count(PointLabel::TotalDisorder) == n {
        FamilyLabel::TotallyDisordered
    } else if count(PointLabel::DenseDisorder) as f64 >= config.dense_fraction * n as f64 {
        FamilyLabel::DenseDisordered
    } else {
        FamilyLabel::Mixed
    };
    Ok(FamilyReport { label, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::find_family;
    use crate::model::default_config;
    use std::f64::consts::PI;

    fn dyadic(alpha: f64, len: usize, lo: i32) -> NamedSequence {
        NamedSequence {
            name: "dyadic".into(),
            terms: (0..len)
                .map(|n| Parameter::untagged(alpha + (-(n as i32 + lo) as f64).exp2()).unwrap())
                .collect(),
        }
    }

    #[test]
    fn probes_respect_domain() {
        let t = RealInterval::new(0.0, 1.0, true, false).unwrap();
        let g = probe_grid(&t, 1e-12);
        assert!(g.sup.iter().all(|&x| x > 0.0 && x <= 1.0));
        assert!(g.sup.iter().any(|&x| x < 1e-11));
        let line = probe_grid(&RealInterval::real_line(), 1e-12);
        assert!(line.sup.iter().any(|&x| x > 1e11));
        assert!(line.sup.iter().any(|&x| x < -1e11));
        assert_eq!(line.core.len(), CORE_POINTS);
    }

    #[test]
    fn linear_uniform_on_unit_interval() {
        let f = find_family("linear_ax", 0).unwrap();
        let c = default_config();
        let a = Parameter::untagged(1.0).unwrap();
        let probes = probe_grid(&RealInterval::closed(0.0, 1.0).unwrap(), c.boundary_margin);
        let p = convergence_profile(&f, &a, &dyadic(1.0, 24, 1), &probes, &c).unwrap();
        assert_eq!(p.verdict, ConvVerdict::Uniform);
        assert_eq!(p.limit_id, LimitId::AlphaItself);
        // closed form: sup over x ≤ 1 of 2^{-n}·x
        for &(n, s) in &p.sup_norms {
            assert!((s - (-(n as f64 + 1.0)).exp2()).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_nonuniform_on_long_interval() {
        let f = find_family("linear_ax", 0).unwrap();
        let c = default_config();
        let a = Parameter::untagged(1.0).unwrap();
        let probes = probe_grid(&RealInterval::closed(0.0, 1e6).unwrap(), c.boundary_margin);
        let p = convergence_profile(&f, &a, &dyadic(1.0, 24, 1), &probes, &c).unwrap();
        assert_eq!(p.verdict, ConvVerdict::Nonuniform);
        assert!(p.pointwise_ok);
    }

    #[test]
    fn sequence_must_approach() {
        let f = find_family("linear_ax", 0).unwrap();
        let c = default_config();
        let a = Parameter::untagged(1.0).unwrap();
        let probes = probe_grid(&RealInterval::closed(0.0, 1.0).unwrap(), c.boundary_margin);
        let mut s = dyadic(1.0, 5, 1);
        s.terms.swap(1, 2);
        assert!(convergence_profile(&f, &a, &s, &probes, &c).is_err());
    }

    #[test]
    fn mixed_family_two_limits() {
        let f = find_family("mixed_rat_irr", 0).unwrap();
        let c = default_config();
        let half = Parameter::rational(1, 2).unwrap();
        let probes = probe_grid(&f.theta, c.boundary_margin);
        let b = battery(&f, &half, &c);
        let rat = b.iter().find(|s| s.name == "rational_above").unwrap();
        let p = convergence_profile(&f, &half, rat, &probes, &c).unwrap();
        assert_eq!(p.limit_id, LimitId::AlphaItself);
        assert_eq!(p.verdict, ConvVerdict::Uniform);
        let irr = b.iter().find(|s| s.name == "quadratic_below").unwrap();
        let p = convergence_profile(&f, &half, irr, &probes, &c).unwrap();
        assert_eq!(p.verdict, ConvVerdict::Nonuniform);
        match &p.limit_id {
            LimitId::Other(beta) => {
                // [sin(π/(1−x)) + 1]/2 at x = 0.3
                let v = eval(&f, beta, 0.3).unwrap();
                assert!((v - ((PI / 0.7).sin() + 1.0) / 2.0).abs() < 1e-12);
            }
            other => panic!("unexpected limit {other:?}"),
        }
        let rep = classify_point(&f, &half, &c).unwrap();
        assert_eq!(rep.label, PointLabel::Discontinuity);
        assert_eq!(rep.exceptional_class.as_deref(), Some("rational"));
    }

    #[test]
    fn point_labels_on_builtins() {
        let c = default_config();
        let half = Parameter::rational(1, 2).unwrap();
        let ls = find_family("log_sine", 0).unwrap();
        assert_eq!(classify_point(&ls, &half, &c).unwrap().label, PointLabel::SmoothSensitive);
        let xi = find_family("xi_random", 0).unwrap();
        assert_eq!(classify_point(&xi, &half, &c).unwrap().label, PointLabel::TotalDisorder);
        let th = find_family("theta_family", 0).unwrap();
        assert_eq!(classify_point(&th, &half, &c).unwrap().label, PointLabel::DenseDisorder);
        let user = FamilySpec::from_expr("k", "x + 0*a", RealInterval::real_line(), RealInterval::real_line()).unwrap();
        assert_eq!(classify_point(&user, &half, &c).unwrap().label, PointLabel::Insensitive);
    }

    #[test]
    fn battery_is_deterministic() {
        let f = find_family("theta_family", 0).unwrap();
        let c = default_config();
        let a = Parameter::rational(1, 2).unwrap();
        let r1 = serde_json::to_string(&classify_point(&f, &a, &c).unwrap()).unwrap();
        let r2 = serde_json::to_string(&classify_point(&f, &a, &c).unwrap()).unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn battery_terms_have_honest_tags() {
        let f = find_family("sin_ax", 0).unwrap();
        let c = default_config();
        let a = Parameter::rational(3, 4).unwrap();
        for s in battery(&f, &a, &c) {
            assert_eq!(s.terms.len(), c.seq_len);
            if s.name.starts_with("rational") {
                assert!(s.terms.iter().all(|t| t.tag().is_rational()));
            }
        }
    }
}
