//! Built-in function families ψ_a and user-registered expression families.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::error::{DomainKind, Error, Result};
use crate::expr::Expr;
use crate::model::{ParamTag, Parameter, RealInterval};

/// Pure evaluator (a, x) ↦ ψ_a(x). Domain checks happen in [`eval`].
pub type Evaluator = Arc<dyn Fn(&Parameter, f64) -> Result<f64> + Send + Sync>;

/// Coordinate in which scan grids are laid out uniformly.
///
/// Families whose oscillation rate blows up near a boundary of Θ get a
/// reciprocal coordinate so that grid spacing follows the local period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "scale", rename_all = "snake_case")]
pub enum MomentScale {
    Linear,
    /// t = 1 / (x − anchor), for moments above the anchor.
    ReciprocalAbove { anchor: f64 },
    /// t = 1 / (anchor − x), for moments below the anchor.
    ReciprocalBelow { anchor: f64 },
}

impl MomentScale {
    pub fn forward(&self, x: f64) -> f64 {
        match *self {
            MomentScale::Linear => x,
            MomentScale::ReciprocalAbove { anchor } => 1.0 / (x - anchor),
            MomentScale::ReciprocalBelow { anchor } => 1.0 / (anchor - x),
        }
    }

    pub fn inverse(&self, t: f64) -> f64 {
        match *self {
            MomentScale::Linear => t,
            MomentScale::ReciprocalAbove { anchor } => anchor + 1.0 / t,
            MomentScale::ReciprocalBelow { anchor } => anchor - 1.0 / t,
        }
    }

    /// Whether the coordinate is usable on `range` (it must not contain the anchor).
    pub fn applies_to(&self, range: &RealInterval) -> bool {
        match *self {
            MomentScale::Linear => true,
            MomentScale::ReciprocalAbove { anchor } => range.lo > anchor,
            MomentScale::ReciprocalBelow { anchor } => range.hi < anchor,
        }
    }
}

/// How a family reads the arithmetic class of its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TagPolicy {
    /// The class is ignored.
    Ignored,
    /// The class selects a branch; untagged values take the irrational branch.
    Branching,
    /// The class selects a branch and untagged values are rejected.
    Required,
}

/// A named family (ψ_a)_{a∈Ω} of real functions of the moment x ∈ Θ.
#[derive(Clone)]
pub struct FamilySpec {
    pub id: String,
    pub omega: RealInterval,
    pub theta: RealInterval,
    pub evaluator: Evaluator,
    pub codomain_hint: Option<RealInterval>,
    pub notes: String,
    /// Finite part of Ω from which quantifiers draw samples.
    pub sample_omega: RealInterval,
    pub scale: MomentScale,
    pub tag_policy: TagPolicy,
    /// Moments where the formula is undefined (may lie on ∂Θ).
    pub singular: Vec<f64>,
}

impl fmt::Debug for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FamilySpec")
            .field("id", &self.id)
            .field("omega", &self.omega)
            .field("theta", &self.theta)
            .field("sample_omega", &self.sample_omega)
            .field("scale", &self.scale)
            .finish_non_exhaustive()
    }
}

/// Catalog entry as shown by `chaoscope list`.
#[derive(Debug, Clone, Serialize)]
pub struct FamilySummary {
    pub id: String,
    pub omega: RealInterval,
    pub theta: RealInterval,
    pub notes: String,
}

impl FamilySpec {
    /// Family from an expression in `a` (parameter) and `x` (moment).
    pub fn from_expr(id: &str, src: &str, omega: RealInterval, theta: RealInterval) -> Result<Self> {
        let expr: Expr = src.parse()?;
        let sample_omega = default_sample_region(&omega);
        let evaluator: Evaluator = Arc::new(move |a: &Parameter, x: f64| Ok(expr.eval(a.value(), x)));
        Ok(FamilySpec {
            id: id.to_string(),
            omega,
            theta,
            evaluator,
            codomain_hint: None,
            notes: format!("user family: {src}"),
            sample_omega,
            scale: MomentScale::Linear,
            tag_policy: TagPolicy::Ignored,
            singular: Vec::new(),
        })
    }

    pub fn summary(&self) -> FamilySummary {
        FamilySummary {
            id: self.id.clone(),
            omega: self.omega,
            theta: self.theta,
            notes: self.notes.clone(),
        }
    }

    pub fn with_sample_omega(mut self, region: RealInterval) -> Self {
        self.sample_omega = region;
        self
    }
}

/// Finite sampling region inside Ω: 10% inset for bounded Ω, a unit-scale box otherwise.
pub fn default_sample_region(omega: &RealInterval) -> RealInterval {
    let (lo, hi) = match (omega.lo.is_finite(), omega.hi.is_finite()) {
        (true, true) => {
            let w = omega.width();
            (omega.lo + 0.1 * w, omega.hi - 0.1 * w)
        }
        (true, false) => (omega.lo + 0.5, omega.lo + 3.0),
        (false, true) => (omega.hi - 3.0, omega.hi - 0.5),
        (false, false) => (0.5, 3.0),
    };
    RealInterval::closed(lo, hi).expect("non-empty sample region")
}

/// ψ_a(x) with domain and singularity checks.
pub fn eval(spec: &FamilySpec, a: &Parameter, x: f64) -> Result<f64> {
    if !spec.omega.contains(a.value()) {
        return Err(Error::Domain {
            what: DomainKind::Parameter,
            value: a.value(),
            domain: format!("Ω = {}", spec.omega),
        });
    }
    if !spec.theta.contains(x) {
        return Err(Error::Domain {
            what: DomainKind::Moment,
            value: x,
            domain: format!("Θ = {}", spec.theta),
        });
    }
    if spec.singular.iter().any(|&s| s == x) {
        return Err(Error::Singular {
            moment: x,
            reason: format!("{} is undefined there", spec.id),
        });
    }
    let v = (spec.evaluator)(a, x)?;
    if !v.is_finite() {
        return Err(Error::Divergence {
            at: format!("x = {x}"),
            detail: format!("{} evaluated to {v} for a = {a}", spec.id),
        });
    }
    Ok(v)
}

/// Signed difference ψ_α(x) − ψ_β(x).
pub fn signed_diff(spec: &FamilySpec, alpha: &Parameter, beta: &Parameter, x: f64) -> Result<f64> {
    Ok(eval(spec, alpha, x)? - eval(spec, beta, x)?)
}

/// |ψ_α(x) − ψ_β(x)|.
pub fn eval_diff(spec: &FamilySpec, alpha: &Parameter, beta: &Parameter, x: f64) -> Result<f64> {
    signed_diff(spec, alpha, beta, x).map(f64::abs)
}

// ---------------------------------------------------------------------------
// prime sum

fn sieve(limit: usize) -> Vec<u32> {
    if limit < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for n in 2..=limit {
        if !composite[n] {
            out.push(n as u32);
            let mut m = n * n;
            while m <= limit {
                composite[m] = true;
                m += n;
            }
        }
    }
    out
}

/// Truncation bound used by the built-in `prime_sum` evaluator.
pub const PRIME_SUM_DEFAULT_P: u64 = 100_000;

fn default_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve(PRIME_SUM_DEFAULT_P as usize))
}

fn prime_sum_over(primes: &[u32], a: f64, x: f64) -> f64 {
    primes
        .iter()
        .map(|&p| {
            let p = p as f64;
            (a * x / p).sin() / (p * p)
        })
        .sum()
}

/// Σ_{p ≤ P} sin(ax/p)/p² together with the remainder bound 1/P.
///
/// The bound follows from |sin| ≤ 1 and Σ_{n>P} 1/n² ≤ 1/P.
pub fn prime_sum_truncation(a: &Parameter, x: f64, p_max: u64) -> Result<(f64, f64)> {
    if p_max < 2 {
        return Err(Error::Precondition(format!(
            "prime sum truncation needs P >= 2, got {p_max}"
        )));
    }
    let value = if p_max == PRIME_SUM_DEFAULT_P {
        prime_sum_over(default_primes(), a.value(), x)
    } else {
        let limit = usize::try_from(p_max)
            .map_err(|_| Error::Precondition(format!("P = {p_max} is too large")))?;
        prime_sum_over(&sieve(limit), a.value(), x)
    };
    Ok((value, 1.0 / p_max as f64))
}

// ---------------------------------------------------------------------------
// F_a iteration

/// F_a(x) = a (sin πx + cos 2x + x).
pub fn f_map(a: f64, x: f64) -> f64 {
    a * ((PI * x).sin() + (2.0 * x).cos() + x)
}

/// F_a^n(x), the n-th iterate. Non-finite intermediates are reported as divergence.
pub fn iterate_f(a: &Parameter, x: f64, n: u32) -> Result<f64> {
    if n < 1 {
        return Err(Error::Precondition("iterate_f needs n >= 1".into()));
    }
    let mut y = x;
    for k in 1..=n {
        y = f_map(a.value(), y);
        if !y.is_finite() {
            return Err(Error::Divergence {
                at: format!("iterate {k} of F_a from x = {x}"),
                detail: format!("a = {a} produced {y}"),
            });
        }
    }
    Ok(y)
}

/// G_a^n(x) = F_a^n(x) − aⁿ x.
pub fn g_iter(a: &Parameter, x: f64, n: u32) -> Result<f64> {
    let fx = iterate_f(a, x, n)?;
    let v = fx - a.value().powi(n as i32) * x;
    if !v.is_finite() {
        return Err(Error::Divergence {
            at: format!("G_a^{n}({x})"),
            detail: format!("a = {a} produced {v}"),
        });
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// Ξ surrogate

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seeded hash of a parameter's canonical bytes, mapped into (0, 1).
///
/// Distinct parameters (value or class) give unrelated outputs, so
/// ψ_{u(n)} = x·Ξ(u(n)) jumps at every term of any sequence u(n).
pub fn xi(seed: u64, a: &Parameter) -> f64 {
    let mut h = mix64(seed ^ 0x9e37_79b9_7f4a_7c15);
    for chunk in a.canonical_bytes().chunks(8) {
        let mut buf = [0u8; 8];
        buf[..chunk.len()].copy_from_slice(chunk);
        h = mix64(h ^ u64::from_le_bytes(buf)).wrapping_add(0x9e37_79b9_7f4a_7c15);
    }
    ((mix64(h) >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}

/// ϑ(a): 3/4 on rationals, 1 on transcendentals, 1/n on algebraic irrationals of degree n.
pub fn vartheta(a: &Parameter) -> Result<f64> {
    match a.tag() {
        ParamTag::Rational { .. } => Ok(0.75),
        ParamTag::Transcendental => Ok(1.0),
        ParamTag::AlgebraicIrrational { degree } => Ok(1.0 / degree as f64),
        ParamTag::Untagged => Err(Error::InvalidParameter(format!(
            "theta_family needs an arithmetic-class tag, got untagged {a}"
        ))),
    }
}

// ---------------------------------------------------------------------------
// catalog

fn iv(lo: f64, hi: f64, lo_open: bool, hi_open: bool) -> RealInterval {
    RealInterval::new(lo, hi, lo_open, hi_open).expect("static interval")
}

fn unit_codomain() -> Option<RealInterval> {
    Some(iv(0.0, 1.0, false, false))
}

fn log_sine_value(a: f64, x: f64, alt: bool) -> f64 {
    if a == 0.0 {
        // continuous extension: a ln(·) → 0 as a → 0⁺
        return 0.5;
    }
    let log = if alt { (0.5 * a * x).ln() } else { -(2.0 * a * x).ln() };
    ((a * log / x).sin() + 1.0) / 2.0
}

fn sine_of_reciprocal(a: f64, x: f64) -> f64 {
    ((2.0 * PI * a / (1.0 - x)).sin() + 1.0) / 2.0
}

fn spec(
    id: &str,
    omega: RealInterval,
    theta: RealInterval,
    evaluator: Evaluator,
    notes: &str,
) -> FamilySpec {
    FamilySpec {
        id: id.to_string(),
        omega,
        theta,
        evaluator,
        codomain_hint: None,
        notes: notes.to_string(),
        sample_omega: default_sample_region(&omega),
        scale: MomentScale::Linear,
        tag_policy: TagPolicy::Ignored,
        singular: Vec::new(),
    }
}

/// Every built-in family; `seed` fixes the Ξ surrogate of `xi_random`.
pub fn catalog(seed: u64) -> Vec<FamilySpec> {
    let line = RealInterval::real_line();
    let mut out = Vec::new();

    let mut f = spec(
        "log_sine",
        iv(0.0, 1.0, false, false),
        iv(0.0, 1.0, true, false),
        Arc::new(|a, x| Ok(log_sine_value(a.value(), x, false))),
        "{sin[a ln(1/(2ax))/x] + 1}/2; first-kind example and smooth-sensitive example; a = 0 gives 1/2",
    );
    f.codomain_hint = unit_codomain();
    f.scale = MomentScale::ReciprocalAbove { anchor: 0.0 };
    f.singular = vec![0.0];
    out.push(f);

    let mut f = spec(
        "log_sine_alt",
        iv(0.0, 1.0, false, false),
        iv(0.0, 1.0, true, false),
        Arc::new(|a, x| Ok(log_sine_value(a.value(), x, true))),
        "{sin[a ln(ax/2)/x] + 1}/2; alternative reading of 1/2ax as (1/2)ax",
    );
    f.codomain_hint = unit_codomain();
    f.scale = MomentScale::ReciprocalAbove { anchor: 0.0 };
    f.singular = vec![0.0];
    out.push(f);

    let mut f = spec(
        "sin_ax",
        line,
        line,
        Arc::new(|a, x| Ok((a.value() * x).sin())),
        "sin(ax); first-kind example",
    );
    f.codomain_hint = Some(iv(-1.0, 1.0, false, false));
    out.push(f);

    for n in 1..=5u32 {
        let mut f = spec(
            &format!("g_iter_{n}"),
            line,
            line,
            Arc::new(move |a, x| g_iter(a, x, n)),
            &format!("F_a^{n}(x) - a^{n} x with F_a(x) = a(sin πx + cos 2x + x); third-kind example"),
        );
        f.sample_omega = iv(0.5, 1.5, false, false);
        out.push(f);
    }

    out.push(spec(
        "prime_sum",
        line,
        line,
        Arc::new(|a, x| Ok(prime_sum_over(default_primes(), a.value(), x))),
        "Σ_p sin(ax/p)/p² over primes p ≤ 10^5 (remainder ≤ 1e-5)",
    ));

    let mut f = spec(
        "linear_ax",
        line,
        line,
        Arc::new(|a, x| Ok(a.value() * x)),
        "ax; smooth sensitive dependence on unbounded Θ",
    );
    f.sample_omega = iv(0.5, 2.5, false, false);
    out.push(f);

    let mut f = spec(
        "sin_2pia",
        iv(0.0, 1.0, false, false),
        iv(0.0, 1.0, false, true),
        Arc::new(|a, x| Ok(sine_of_reciprocal(a.value(), x))),
        "[sin(2πa/(1-x)) + 1]/2; smooth sensitive dependence",
    );
    f.codomain_hint = unit_codomain();
    f.scale = MomentScale::ReciprocalBelow { anchor: 1.0 };
    f.singular = vec![1.0];
    out.push(f);

    let mut f = spec(
        "mixed_rat_irr",
        iv(0.0, 1.0, false, false),
        iv(0.0, 1.0, false, true),
        Arc::new(|a, x| {
            Ok(match a.tag() {
                ParamTag::Rational { .. } => a.value() * x,
                _ => sine_of_reciprocal(a.value(), x),
            })
        }),
        "ax for rational a, [sin(2πa/(1-x)) + 1]/2 otherwise (untagged counts as irrational)",
    );
    f.codomain_hint = unit_codomain();
    f.scale = MomentScale::ReciprocalBelow { anchor: 1.0 };
    f.tag_policy = TagPolicy::Branching;
    f.singular = vec![1.0];
    out.push(f);

    let mut f = spec(
        "xi_random",
        iv(0.0, 1.0, true, true),
        iv(0.0, 1.0, true, true),
        Arc::new(move |a, x| Ok(x * xi(seed, a))),
        "x Ξ(a) with Ξ a seeded hash of the parameter into (0, 1); totally disordered",
    );
    f.codomain_hint = unit_codomain();
    f.tag_policy = TagPolicy::Branching;
    out.push(f);

    let mut f = spec(
        "theta_family",
        iv(0.0, 1.0, true, false),
        iv(0.0, 1.0, false, true),
        Arc::new(|a, x| {
            let t = vartheta(a)?;
            let inner = ((1.0 / t).sin() + 1.0) / (2.0 - 2.0 * x);
            Ok((inner.sin() + 1.0) / 2.0)
        }),
        "{sin{[sin(1/ϑ(a)) + 1]/(2-2x)} + 1}/2 with ϑ read from the parameter class; needs tagged parameters",
    );
    f.codomain_hint = unit_codomain();
    f.tag_policy = TagPolicy::Required;
    f.scale = MomentScale::ReciprocalBelow { anchor: 1.0 };
    f.singular = vec![1.0];
    out.push(f);

    out
}

/// The catalog with the default seed.
pub fn builtin_catalog() -> Vec<FamilySpec> {
    catalog(0)
}

pub fn find_family(id: &str, seed: u64) -> Result<FamilySpec> {
    catalog(seed)
        .into_iter()
        .find(|f| f.id == id)
        .ok_or_else(|| Error::UnknownFamily(id.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(id: &str) -> FamilySpec {
        find_family(id, 0).unwrap()
    }

    fn u(v: f64) -> Parameter {
        Parameter::untagged(v).unwrap()
    }

    #[test]
    fn catalog_ids() {
        let ids: Vec<String> = builtin_catalog().into_iter().map(|f| f.id).collect();
        for id in [
            "log_sine", "log_sine_alt", "sin_ax", "g_iter_1", "g_iter_5", "prime_sum",
            "linear_ax", "sin_2pia", "mixed_rat_irr", "xi_random", "theta_family",
        ] {
            assert!(ids.iter().any(|i| i == id), "missing {id}");
        }
        assert!(matches!(find_family("nope", 0), Err(Error::UnknownFamily(_))));
    }

    #[test]
    fn simple_values() {
        assert_eq!(eval(&fam("sin_ax"), &u(0.0), 1.0).unwrap(), 0.0);
        let half = Parameter::rational(1, 2).unwrap();
        assert_eq!(eval(&fam("linear_ax"), &half, 2.0).unwrap(), 1.0);
        assert!(eval(&fam("sin_ax"), &u(1.0), PI).unwrap().abs() < 1e-12);
        assert_eq!(eval(&fam("prime_sum"), &u(0.0), 5.0).unwrap(), 0.0);
        assert_eq!(eval(&fam("log_sine"), &u(0.0), 0.3).unwrap(), 0.5);
    }

    #[test]
    fn theta_family_at_three_quarters() {
        let f = fam("theta_family");
        let a = Parameter::rational(3, 4).unwrap();
        assert_eq!(vartheta(&a).unwrap(), 0.75);
        // ψ_a(0) = {sin{[sin(4/3)+1]/2}+1}/2; sin(4/3) = 0.971937901363312...
        let inner = (0.971_937_901_363_312_7_f64 + 1.0) / 2.0;
        let expect = (inner.sin() + 1.0) / 2.0;
        let got = eval(&f, &a, 0.0).unwrap();
        assert!((got - expect).abs() < 1e-15, "{got} vs {expect}");
        assert!((got - 0.916_903_698_134_156_3).abs() < 1e-12);
        assert!(eval(&f, &u(0.5), 0.0).is_err());
        let alg = Parameter::algebraic(3, 0.5).unwrap();
        assert!((vartheta(&alg).unwrap() - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn domain_and_singular_errors() {
        let f = fam("log_sine");
        assert!(matches!(
            eval(&f, &u(2.0), 0.5),
            Err(Error::Domain { what: DomainKind::Parameter, .. })
        ));
        assert!(matches!(
            eval(&f, &u(0.5), 0.0),
            Err(Error::Domain { what: DomainKind::Moment, .. })
        ));
        let mut g = fam("sin_2pia");
        g.theta = RealInterval::closed(0.0, 1.0).unwrap();
        assert!(matches!(eval(&g, &u(0.5), 1.0), Err(Error::Singular { .. })));
    }

    #[test]
    fn diff_examples() {
        let s = fam("sin_ax");
        let one = u(1.0);
        let two = u(2.0);
        assert_eq!(eval_diff(&s, &one, &one, 0.7).unwrap(), 0.0);
        // sin z − sin 2z = sin z (1 − 2 cos z) vanishes at z = π/3
        assert!(eval_diff(&s, &one, &two, PI / 3.0).unwrap() < 1e-15);
        let l = fam("linear_ax");
        let d = eval_diff(&l, &u(0.3), &u(-1.2), -2.0).unwrap();
        assert!((d - 1.5 * 2.0).abs() < 1e-15);
    }

    #[test]
    fn prime_sum_examples() {
        let (v, b) = prime_sum_truncation(&u(0.0), 5.0, 100).unwrap();
        assert_eq!(v, 0.0);
        assert!(b <= 0.01);
        let (v, b) = prime_sum_truncation(&u(1.0), 1.0, 2).unwrap();
        assert_eq!(v, (0.5f64).sin() / 4.0);
        assert!(b <= 0.5);
        assert!(prime_sum_truncation(&u(1.0), 1.0, 1).is_err());
        let (v4, b4) = prime_sum_truncation(&u(1.0), 1.0, 10_000).unwrap();
        let (v5, _) = prime_sum_truncation(&u(1.0), 1.0, 100_000).unwrap();
        assert!((v4 - v5).abs() < b4);
    }

    #[test]
    fn sieve_counts() {
        assert_eq!(sieve(1).len(), 0);
        assert_eq!(sieve(2), vec![2]);
        assert_eq!(sieve(100).len(), 25);
        assert_eq!(sieve(100_000).len(), 9592);
    }

    #[test]
    fn f_iteration() {
        assert_eq!(iterate_f(&u(0.0), 12.3, 3).unwrap(), 0.0);
        assert_eq!(iterate_f(&u(1.0), 0.0, 1).unwrap(), 1.0);
        // hand composition
        let a = 0.5;
        let once = a * ((PI * 0.3).sin() + (0.6f64).cos() + 0.3);
        let twice = a * ((PI * once).sin() + (2.0 * once).cos() + once);
        assert_eq!(iterate_f(&u(a), 0.3, 2).unwrap(), twice);
        assert!(iterate_f(&u(1.0), 0.0, 0).is_err());
        assert!(matches!(
            iterate_f(&u(1e200), 1e200, 3),
            Err(Error::Divergence { .. })
        ));
    }

    #[test]
    fn g_iter_vanishing_term_at_zero() {
        for n in 1..=5 {
            for &a in &[-1.3, 0.4, 0.9, 1.7, 2.2] {
                let p = u(a);
                assert_eq!(g_iter(&p, 0.0, n).unwrap(), iterate_f(&p, 0.0, n).unwrap());
            }
        }
    }

    #[test]
    fn mixed_branches_on_tag() {
        let f = fam("mixed_rat_irr");
        let r = Parameter::rational(1, 3).unwrap();
        assert_eq!(eval(&f, &r, 0.6).unwrap(), r.value() * 0.6);
        let t = Parameter::transcendental(1.0 / 3.0).unwrap();
        assert_eq!(eval(&f, &t, 0.6).unwrap(), sine_of_reciprocal(1.0 / 3.0, 0.6));
        let a = Parameter::algebraic(2, 1.0 / 3.0).unwrap();
        assert_eq!(eval(&f, &a, 0.6).unwrap(), sine_of_reciprocal(1.0 / 3.0, 0.6));
    }

    #[test]
    fn xi_is_deterministic_and_spread() {
        let f = find_family("xi_random", 7).unwrap();
        let a = u(0.25);
        let v1 = eval(&f, &a, 0.5).unwrap();
        let v2 = eval(&f, &a, 0.5).unwrap();
        assert_eq!(v1.to_bits(), v2.to_bits());
        let g = find_family("xi_random", 8).unwrap();
        assert_ne!(v1, eval(&g, &a, 0.5).unwrap());
        let mut mean = 0.0;
        for i in 1..1000 {
            let v = xi(0, &u(i as f64 / 1000.0));
            assert!(v > 0.0 && v < 1.0);
            mean += v;
        }
        mean /= 999.0;
        assert!((mean - 0.5).abs() < 0.05);
        // same value, different class
        assert_ne!(
            xi(0, &Parameter::rational(1, 2).unwrap()),
            xi(0, &Parameter::transcendental(0.5).unwrap())
        );
    }

    #[test]
    fn user_expression_family() {
        let f = FamilySpec::from_expr(
            "user",
            "a*x^2 - sin(x)",
            RealInterval::real_line(),
            RealInterval::real_line(),
        )
        .unwrap();
        let v = eval(&f, &u(2.0), 1.5).unwrap();
        assert!((v - (2.0 * 2.25 - 1.5f64.sin())).abs() < 1e-15);
        assert!(FamilySpec::from_expr("bad", "a*", RealInterval::real_line(), RealInterval::real_line()).is_err());
    }

    #[test]
    fn scales_invert() {
        for s in [
            MomentScale::Linear,
            MomentScale::ReciprocalAbove { anchor: 0.0 },
            MomentScale::ReciprocalBelow { anchor: 1.0 },
        ] {
            for &x in &[0.01, 0.3, 0.97] {
                assert!((s.inverse(s.forward(x)) - x).abs() < 1e-14);
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn evaluators_are_bit_deterministic(a in 0.01f64..0.99, x in 0.01f64..0.99) {
                for f in builtin_catalog() {
                    if f.id == "prime_sum" { continue; }
                    let p = if f.tag_policy == TagPolicy::Required {
                        Parameter::transcendental(a).unwrap()
                    } else {
                        u(a)
                    };
                    if let Ok(v) = eval(&f, &p, x) {
                        prop_assert_eq!(v.to_bits(), eval(&f, &p, x).unwrap().to_bits());
                    }
                }
            }

            #[test]
            fn prime_sum_doubling_within_tail_bound(a in -5.0f64..5.0, x in -20.0f64..20.0, p in 2u64..3000) {
                let pa = u(a);
                let (v1, bound) = prime_sum_truncation(&pa, x, p).unwrap();
                let (v2, _) = prime_sum_truncation(&pa, x, 2 * p).unwrap();
                prop_assert!((v1 - v2).abs() <= bound);
            }
        }
    }
}
