//! Domain types shared by every analysis module.
//!
//! The continuous quantifiers of the chaos definitions ("for every ε",
//! "for every pair", "for every neighborhood") are discretized through
//! [`ScanConfig`]. Everything here is immutable after construction.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arithmetic class of a parameter value.
///
/// A float cannot tell whether the number it approximates is rational,
/// so families that branch on the class read the tag, never the value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum ParamTag {
    Rational { p: i64, q: i64 },
    AlgebraicIrrational { degree: u32 },
    Transcendental,
    Untagged,
}

impl ParamTag {
    pub fn class_name(&self) -> &'static str {
        match self {
            ParamTag::Rational { .. } => "rational",
            ParamTag::AlgebraicIrrational { .. } => "algebraic_irrational",
            ParamTag::Transcendental => "transcendental",
            ParamTag::Untagged => "untagged",
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, ParamTag::Rational { .. })
    }
}

/// A point of the parameter space Ω: a finite real plus its arithmetic class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParameter")]
pub struct Parameter {
    value: f64,
    tag: ParamTag,
}

#[derive(Deserialize)]
struct RawParameter {
    value: f64,
    tag: ParamTag,
}

impl TryFrom<RawParameter> for Parameter {
    type Error = Error;

    fn try_from(raw: RawParameter) -> Result<Self> {
        let p = match raw.tag {
            ParamTag::Rational { p, q } => Parameter::rational(p, q)?,
            ParamTag::AlgebraicIrrational { degree } => Parameter::algebraic(degree, raw.value)?,
            ParamTag::Transcendental => Parameter::transcendental(raw.value)?,
            ParamTag::Untagged => Parameter::untagged(raw.value)?,
        };
        if p.value.to_bits() != raw.value.to_bits() {
            return Err(Error::InvalidParameter(format!(
                "value {} does not match tag {:?}",
                raw.value, raw.tag
            )));
        }
        Ok(p)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn check_finite(value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("value {value} is not finite")))
    }
}

impl Parameter {
    /// Rational p/q, stored in lowest terms with a positive denominator.
    pub fn rational(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        let (mut p, mut q) = (p as i128, q as i128);
        if q < 0 {
            p = -p;
            q = -q;
        }
        let g = gcd(p.unsigned_abs() as u64, q as u64).max(1) as i128;
        let (p, q) = (p / g, q / g);
        let (p, q) = match (i64::try_from(p), i64::try_from(q)) {
            (Ok(p), Ok(q)) => (p, q),
            _ => return Err(Error::InvalidParameter("rational out of range".into())),
        };
        Ok(Parameter {
            value: p as f64 / q as f64,
            tag: ParamTag::Rational { p, q },
        })
    }

    pub fn algebraic(degree: u32, value: f64) -> Result<Self> {
        if degree < 2 {
            return Err(Error::InvalidParameter(format!(
                "algebraic irrational degree must be at least 2, got {degree}"
            )));
        }
        check_finite(value)?;
        Ok(Parameter {
            value,
            tag: ParamTag::AlgebraicIrrational { degree },
        })
    }

    pub fn transcendental(value: f64) -> Result<Self> {
        check_finite(value)?;
        Ok(Parameter {
            value,
            tag: ParamTag::Transcendental,
        })
    }

    pub fn untagged(value: f64) -> Result<Self> {
        check_finite(value)?;
        Ok(Parameter {
            value,
            tag: ParamTag::Untagged,
        })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn tag(&self) -> ParamTag {
        self.tag
    }

    /// Exact numerator and denominator of a rational-tagged parameter.
    pub fn as_ratio(&self) -> Option<(i64, i64)> {
        match self.tag {
            ParamTag::Rational { p, q } => Some((p, q)),
            _ => None,
        }
    }

    /// The same value carried under another arithmetic class.
    ///
    /// Retagging to rational is only possible when the parameter is already
    /// rational, since an exact ratio cannot be recovered from a float.
    pub fn retag(&self, class: &str) -> Option<Parameter> {
        match class {
            "rational" => self.as_ratio().map(|_| *self),
            "algebraic_irrational" => Parameter::algebraic(2, self.value).ok(),
            "transcendental" => Parameter::transcendental(self.value).ok(),
            "untagged" => Parameter::untagged(self.value).ok(),
            _ => None,
        }
    }

    /// Byte string identifying value and class; input to seeded hashing.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(26);
        out.extend_from_slice(&self.value.to_bits().to_le_bytes());
        match self.tag {
            ParamTag::Rational { p, q } => {
                out.push(1);
                out.extend_from_slice(&p.to_le_bytes());
                out.extend_from_slice(&q.to_le_bytes());
            }
            ParamTag::AlgebraicIrrational { degree } => {
                out.push(2);
                out.extend_from_slice(&degree.to_le_bytes());
            }
            ParamTag::Transcendental => out.push(3),
            ParamTag::Untagged => out.push(0),
        }
        out
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tag {
            ParamTag::Rational { p, q } => write!(f, "{p}/{q}"),
            ParamTag::AlgebraicIrrational { degree } => write!(f, "alg:{degree}:{}", self.value),
            ParamTag::Transcendental => write!(f, "trans:{}", self.value),
            ParamTag::Untagged => write!(f, "{}", self.value),
        }
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    let t = s.trim();
    let v = match t {
        "pi" => std::f64::consts::PI,
        "-pi" => -std::f64::consts::PI,
        "e" => std::f64::consts::E,
        "inf" | "+inf" => f64::INFINITY,
        "-inf" => f64::NEG_INFINITY,
        _ => t
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("not a number: `{t}`")))?,
    };
    if v.is_nan() {
        return Err(Error::Parse(format!("not a number: `{t}`")));
    }
    Ok(v)
}

/// Parses the parameter literal language: `0.5`, `3/4`, `alg:2:1.4142…`, `trans:3.14…`.
impl FromStr for Parameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("alg:") {
            let (deg, val) = rest
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected alg:n:value, got `{s}`")))?;
            let degree = deg
                .trim()
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad degree in `{s}`")))?;
            return Parameter::algebraic(degree, parse_f64(val)?);
        }
        if let Some(rest) = s.strip_prefix("trans:") {
            return Parameter::transcendental(parse_f64(rest)?);
        }
        if let Some((p, q)) = s.split_once('/') {
            let p = p
                .trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("bad numerator in `{s}`")))?;
            let q = q
                .trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("bad denominator in `{s}`")))?;
            return Parameter::rational(p, q);
        }
        Parameter::untagged(parse_f64(s)?)
    }
}

mod ext_f64 {
    //! Serde for endpoints that may be infinite.
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => match s.as_str() {
                "inf" | "+inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                _ => Err(serde::de::Error::custom(format!("bad endpoint `{s}`"))),
            },
        }
    }
}

/// A real interval with independently open or closed ends.
///
/// Infinite ends are always open. Scan ranges must be finite; domains
/// such as Θ = ℝ may not be.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct RealInterval {
    #[serde(with = "ext_f64")]
    pub lo: f64,
    #[serde(with = "ext_f64")]
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

#[derive(Deserialize)]
struct RawInterval {
    #[serde(with = "ext_f64")]
    lo: f64,
    #[serde(with = "ext_f64")]
    hi: f64,
    lo_open: bool,
    hi_open: bool,
}

impl TryFrom<RawInterval> for RealInterval {
    type Error = Error;

    fn try_from(r: RawInterval) -> Result<Self> {
        RealInterval::new(r.lo, r.hi, r.lo_open, r.hi_open)
    }
}

impl RealInterval {
    pub fn new(lo: f64, hi: f64, lo_open: bool, hi_open: bool) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || !(lo < hi) {
            return Err(Error::Precondition(format!(
                "interval needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(RealInterval {
            lo,
            hi,
            lo_open: lo_open || lo.is_infinite(),
            hi_open: hi_open || hi.is_infinite(),
        })
    }

    pub fn closed(lo: f64, hi: f64) -> Result<Self> {
        RealInterval::new(lo, hi, false, false)
    }

    pub fn real_line() -> Self {
        RealInterval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
            lo_open: true,
            hi_open: true,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_open { x > self.lo } else { x >= self.lo };
        let below = if self.hi_open { x < self.hi } else { x <= self.hi };
        above && below
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// True when every point of `other` lies in the closure of `self`.
    pub fn covers(&self, other: &RealInterval) -> bool {
        other.lo >= self.lo && other.hi <= self.hi
    }
}

impl fmt::Display for RealInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_open { '(' } else { '[' };
        let r = if self.hi_open { ')' } else { ']' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

/// Parses `lo:hi` as a closed interval (infinite ends become open).
impl FromStr for RealInterval {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (lo, hi) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected lo:hi, got `{s}`")))?;
        RealInterval::closed(parse_f64(lo)?, parse_f64(hi)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strength {
    Strong,
    Weak,
}

impl FromStr for Strength {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strong" => Ok(Strength::Strong),
            "weak" => Ok(Strength::Weak),
            _ => Err(Error::Parse(format!("strength must be strong|weak, got `{s}`"))),
        }
    }
}

/// Discretization of every quantifier in the definitions.
///
/// Field names are the config-file schema. Fields beyond the core
/// window-scanning set tune the discrete and convergence analyses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub grid_points: usize,
    pub eps_top: f64,
    pub eps_ratio: f64,
    pub ladder_depth: usize,
    pub tol_eq: f64,
    pub tol_zero: f64,
    pub refine_iters: u32,
    pub mu_min: f64,
    pub pair_samples: usize,
    pub nbhd_shrink: f64,
    pub tail_start: u64,
    pub tail_len: u64,
    pub seed: u64,
    /// Number of shrinking neighborhoods probed per weak quantifier.
    pub nbhd_levels: usize,
    /// β candidates tried per neighborhood before it counts as failed.
    pub beta_candidates: usize,
    /// Range doublings allowed when a chain search fails.
    pub max_widenings: u32,
    pub strength: Strength,
    /// Force pairs with rational ratio (periodic counterexamples).
    pub commensurable_pairs: bool,
    pub tol_liminf: f64,
    pub du_samples: usize,
    pub du_y_grid: usize,
    /// Threshold below which a sup-norm or Cauchy spread counts as zero.
    pub tol_conv: f64,
    pub seq_len: usize,
    pub dense_fraction: f64,
    /// Closest relative approach of the sup-norm probes to a boundary of Θ.
    pub boundary_margin: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            grid_points: 100_000,
            eps_top: 0.5,
            eps_ratio: 0.25,
            ladder_depth: 5,
            tol_eq: 1e-7,
            tol_zero: 1e-9,
            refine_iters: 80,
            mu_min: 0.05,
            pair_samples: 16,
            nbhd_shrink: 0.5,
            tail_start: 10_000,
            tail_len: 90_000,
            seed: 0,
            nbhd_levels: 3,
            beta_candidates: 4,
            max_widenings: 9,
            strength: Strength::Weak,
            commensurable_pairs: false,
            tol_liminf: 1e-3,
            du_samples: 8,
            du_y_grid: 1000,
            tol_conv: 1e-3,
            seq_len: 24,
            dense_fraction: 0.5,
            boundary_margin: 1e-12,
        }
    }
}

/// The documented defaults.
pub fn default_config() -> ScanConfig {
    ScanConfig::default()
}

fn require(ok: bool, field: &'static str, reason: impl Into<String>) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidConfig {
            field,
            reason: reason.into(),
        })
    }
}

impl ScanConfig {
    /// Checks every field invariant, naming the first one violated.
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        require(self.grid_points >= 16, "grid_points", "must be at least 16")?;
        require(pos(self.eps_top), "eps_top", "must be > 0")?;
        require(
            self.eps_ratio > 0.0 && self.eps_ratio < 1.0,
            "eps_ratio",
            "must lie in (0, 1)",
        )?;
        require(self.ladder_depth >= 2, "ladder_depth", "must be at least 2")?;
        require(pos(self.tol_eq), "tol_eq", "must be > 0")?;
        require(pos(self.tol_zero), "tol_zero", "must be > 0")?;
        require(self.refine_iters >= 1, "refine_iters", "must be at least 1")?;
        require(pos(self.mu_min), "mu_min", "must be > 0")?;
        require(self.pair_samples >= 1, "pair_samples", "must be at least 1")?;
        require(
            self.nbhd_shrink > 0.0 && self.nbhd_shrink < 1.0,
            "nbhd_shrink",
            "must lie in (0, 1)",
        )?;
        require(self.tail_len >= 1, "tail_len", "must be at least 1")?;
        require(self.nbhd_levels >= 1, "nbhd_levels", "must be at least 1")?;
        require(self.beta_candidates >= 1, "beta_candidates", "must be at least 1")?;
        require(pos(self.tol_liminf), "tol_liminf", "must be > 0")?;
        require(self.du_samples >= 1, "du_samples", "must be at least 1")?;
        require(self.du_y_grid >= 2, "du_y_grid", "must be at least 2")?;
        require(pos(self.tol_conv), "tol_conv", "must be > 0")?;
        require(self.seq_len >= 4, "seq_len", "must be at least 4")?;
        require(
            self.dense_fraction > 0.0 && self.dense_fraction <= 1.0,
            "dense_fraction",
            "must lie in (0, 1]",
        )?;
        require(
            self.boundary_margin > 0.0 && self.boundary_margin < 0.5,
            "boundary_margin",
            "must lie in (0, 0.5)",
        )?;
        let smallest = self.smallest_level();
        require(
            self.tol_eq < smallest / 4.0,
            "tol_eq",
            format!(
                "must be below a quarter of the smallest ladder level ({smallest:e}) so that adjacent levels stay distinguishable"
            ),
        )?;
        Ok(())
    }

    /// Validating constructor for configs assembled by hand.
    pub fn checked(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    /// ε levels `eps_top · eps_ratio^k` for k in 0..ladder_depth.
    pub fn ladder(&self) -> Vec<f64> {
        (0..self.ladder_depth)
            .map(|k| self.eps_top * self.eps_ratio.powi(k as i32))
            .collect()
    }

    pub fn smallest_level(&self) -> f64 {
        self.eps_top * self.eps_ratio.powi(self.ladder_depth as i32 - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    /// Boundary |d| = ε; the graphs never meet inside.
    Disjoint,
    /// Boundary d = 0; consecutive intersections of the graphs.
    Cross,
}

impl FromStr for WindowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disjoint" => Ok(WindowKind::Disjoint),
            "cross" => Ok(WindowKind::Cross),
            _ => Err(Error::Parse(format!("kind must be disjoint|cross, got `{s}`"))),
        }
    }
}

impl fmt::Display for WindowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WindowKind::Disjoint => "disjoint",
            WindowKind::Cross => "cross",
        })
    }
}

/// An interval [x1, y1] on which 0 < |ψ_α − ψ_β| < eps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub kind: WindowKind,
    pub x1: f64,
    pub y1: f64,
    pub eps: f64,
    pub interior_min: f64,
    pub interior_max: f64,
}

impl Window {
    pub fn intersects(&self, other: &Window) -> bool {
        self.x1 <= other.y1 && other.x1 <= self.y1
    }
}

/// A moment between two windows where the graphs are at least `value` apart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapWitness {
    pub w: f64,
    pub value: f64,
    pub gap_lo: f64,
    pub gap_hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Kind1,
    Kind2,
    Kind3,
    SensitiveOnly,
    Insensitive,
    Inconclusive,
}

impl Label {
    pub fn is_chaotic(&self) -> bool {
        matches!(self, Label::Kind1 | Label::Kind2 | Label::Kind3)
    }

    /// Label from the (cross, disjoint) dependence outcomes and sensitivity.
    pub fn from_outcomes(cross: bool, disjoint: bool, sensitive: bool) -> Label {
        match (cross, disjoint) {
            (true, false) => Label::Kind1,
            (false, true) => Label::Kind2,
            (true, true) => Label::Kind3,
            (false, false) if sensitive => Label::SensitiveOnly,
            (false, false) => Label::Insensitive,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("label serializes");
        f.write_str(s.as_str().unwrap_or("?"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_ladder_levels() {
        let c = default_config();
        let ladder = c.ladder();
        assert_eq!(ladder.len(), 5);
        assert_eq!(ladder[0], 0.5);
        assert_eq!(ladder[1], 0.125);
        assert_eq!(ladder[4], 0.5 * 0.25f64.powi(4));
        c.validate().unwrap();
    }

    #[test]
    fn default_tol_eq_below_quarter_level() {
        let c = default_config();
        assert!(c.tol_eq < 0.5 * 0.25f64.powi(5) / 4.0);
        assert!(c.tol_eq < c.smallest_level() / 4.0);
    }

    #[test]
    fn long_ladder_accepted_or_rejected_by_smallest_level() {
        // 0.5 * 0.9^49 = 2.86e-3, a quarter of which is far above tol_eq
        let c = ScanConfig {
            eps_ratio: 0.9,
            ladder_depth: 50,
            ..default_config()
        };
        let smallest = 0.5 * 0.9f64.powi(49);
        assert!(c.tol_eq < smallest / 4.0);
        assert!(c.validate().is_ok());

        let c = ScanConfig {
            eps_ratio: 0.1,
            ladder_depth: 50,
            ..default_config()
        };
        match c.validate() {
            Err(Error::InvalidConfig { field, .. }) => assert_eq!(field, "tol_eq"),
            other => panic!("expected tol_eq violation, got {other:?}"),
        }
    }

    #[test]
    fn bad_fields_are_named() {
        let c = ScanConfig {
            eps_ratio: 1.5,
            ..default_config()
        };
        assert!(matches!(
            c.validate(),
            Err(Error::InvalidConfig { field: "eps_ratio", .. })
        ));
        let c = ScanConfig {
            ladder_depth: 1,
            ..default_config()
        };
        assert!(matches!(
            c.validate(),
            Err(Error::InvalidConfig { field: "ladder_depth", .. })
        ));
    }

    #[test]
    fn rational_is_reduced() {
        let p = Parameter::rational(6, -8).unwrap();
        assert_eq!(p.as_ratio(), Some((-3, 4)));
        assert_eq!(p.value(), -0.75);
        assert!(Parameter::rational(1, 0).is_err());
    }

    #[test]
    fn tags_are_validated() {
        assert!(Parameter::algebraic(1, 2.0).is_err());
        assert!(Parameter::untagged(f64::INFINITY).is_err());
        assert!(Parameter::transcendental(f64::NAN).is_err());
    }

    #[test]
    fn parameter_literals() {
        let p: Parameter = "3/4".parse().unwrap();
        assert_eq!(p.as_ratio(), Some((3, 4)));
        let p: Parameter = "alg:3:1.2599".parse().unwrap();
        assert_eq!(p.tag(), ParamTag::AlgebraicIrrational { degree: 3 });
        let p: Parameter = "trans:pi".parse().unwrap();
        assert_eq!(p.value(), std::f64::consts::PI);
        let p: Parameter = "-0.25".parse().unwrap();
        assert_eq!(p.tag(), ParamTag::Untagged);
        assert!("alg:x:1".parse::<Parameter>().is_err());
    }

    #[test]
    fn intervals() {
        let r: RealInterval = "-10:10".parse().unwrap();
        assert!(r.contains(-10.0) && r.contains(10.0));
        assert!("1:1".parse::<RealInterval>().is_err());
        let half = RealInterval::new(0.0, 1.0, true, false).unwrap();
        assert!(!half.contains(0.0) && half.contains(1.0));
        let line: RealInterval = "-inf:inf".parse().unwrap();
        assert!(line.lo_open && line.hi_open && !line.is_finite());
        let json = serde_json::to_string(&line).unwrap();
        let back: RealInterval = serde_json::from_str(&json).unwrap();
        assert_eq!(back, line);
    }

    #[test]
    fn config_json_uses_field_names() {
        let c: ScanConfig = serde_json::from_str(r#"{"grid_points": 2000, "seed": 7}"#).unwrap();
        assert_eq!(c.grid_points, 2000);
        assert_eq!(c.seed, 7);
        assert_eq!(c.eps_top, 0.5);
        assert!(serde_json::from_str::<ScanConfig>(r#"{"grid_pionts": 1}"#).is_err());
    }

    #[test]
    fn label_truth_table() {
        assert_eq!(Label::from_outcomes(true, false, true), Label::Kind1);
        assert_eq!(Label::from_outcomes(false, true, true), Label::Kind2);
        assert_eq!(Label::from_outcomes(true, true, false), Label::Kind3);
        assert_eq!(Label::from_outcomes(false, false, true), Label::SensitiveOnly);
        assert_eq!(Label::from_outcomes(false, false, false), Label::Insensitive);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn rational_round_trips(p in -1_000_000i64..1_000_000, q in 1i64..1_000_000) {
                let r = Parameter::rational(p, q).unwrap();
                let (rp, rq) = r.as_ratio().unwrap();
                // same rational number, lowest terms
                prop_assert_eq!(rp as i128 * q as i128, p as i128 * rq as i128);
                prop_assert!(rq > 0);
                prop_assert_eq!(gcd(rp.unsigned_abs(), rq as u64), 1);
                let json = serde_json::to_string(&r).unwrap();
                let back: Parameter = serde_json::from_str(&json).unwrap();
                prop_assert_eq!(back, r);
                let text: Parameter = r.to_string().parse().unwrap();
                prop_assert_eq!(text, r);
            }
        }
    }
}
