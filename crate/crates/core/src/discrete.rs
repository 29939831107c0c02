//! Sequence families u_x(n): tail limsup/liminf estimates, the Du-style
//! criterion and the two-condition discrete criterion.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{DomainKind, Error, Result};
use crate::model::{ParamTag, Parameter, RealInterval, ScanConfig};

/// State-advance plug-in: u_x(0) = observe(init(x)), u_x(n+1) = observe(step(state_n)).
pub trait Operator: Send + Sync {
    fn init(&self, x: &Parameter) -> Result<f64>;
    fn step(&self, state: f64) -> f64;
    fn observe(&self, state: f64) -> f64 {
        state
    }
}

/// Plain iteration of a real map; the initial state is the parameter itself.
pub struct Iteration<F: Fn(f64) -> f64 + Send + Sync> {
    pub map: F,
}

impl<F: Fn(f64) -> f64 + Send + Sync> Operator for Iteration<F> {
    fn init(&self, x: &Parameter) -> Result<f64> {
        Ok(x.value())
    }

    fn step(&self, state: f64) -> f64 {
        (self.map)(state)
    }
}

pub type DirectGenerator = Arc<dyn Fn(&Parameter, u64) -> Result<f64> + Send + Sync>;

#[derive(Clone)]
pub enum Generator {
    Direct(DirectGenerator),
    Operator(Arc<dyn Operator>),
}

/// Which parameters a sequence family accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamKind {
    Real,
    /// Only rational-tagged parameters.
    Rational,
}

#[derive(Clone)]
pub struct SequenceFamily {
    pub id: String,
    pub omega: RealInterval,
    pub generator: Generator,
    pub notes: String,
    pub sample_omega: RealInterval,
    pub param_kind: ParamKind,
}

impl fmt::Debug for SequenceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SequenceFamily")
            .field("id", &self.id)
            .field("omega", &self.omega)
            .finish_non_exhaustive()
    }
}

impl SequenceFamily {
    fn check(&self, x: &Parameter) -> Result<()> {
        if !self.omega.contains(x.value()) {
            return Err(Error::Domain {
                what: DomainKind::Parameter,
                value: x.value(),
                domain: format!("Ω = {}", self.omega),
            });
        }
        if self.param_kind == ParamKind::Rational && !x.tag().is_rational() {
            return Err(Error::InvalidParameter(format!(
                "{} needs a rational-tagged parameter (p/q), got {x}",
                self.id
            )));
        }
        Ok(())
    }

    /// Calls `f(n, u_x(n))` for n in `from..to`, streaming the orbit.
    pub fn for_each_term<F: FnMut(u64, f64)>(&self, x: &Parameter, from: u64, to: u64, mut f: F) -> Result<()> {
        self.check(x)?;
        let diverged = |n: u64, v: f64| Error::Divergence {
            at: format!("n = {n}"),
            detail: format!("{} from {x} produced {v}", self.id),
        };
        match &self.generator {
            Generator::Direct(g) => {
                for n in from..to {
                    let v = g(x, n)?;
                    if !v.is_finite() {
                        return Err(diverged(n, v));
                    }
                    f(n, v);
                }
            }
            Generator::Operator(op) => {
                let mut s = op.init(x)?;
                for n in 0..to {
                    if n > 0 {
                        s = op.step(s);
                    }
                    let v = op.observe(s);
                    if !v.is_finite() {
                        return Err(diverged(n, v));
                    }
                    if n >= from {
                        f(n, v);
                    }
                }
            }
        }
        Ok(())
    }

    /// u_x(n).
    pub fn term(&self, x: &Parameter, n: u64) -> Result<f64> {
        let mut out = f64::NAN;
        self.for_each_term(x, n, n + 1, |_, v| out = v)?;
        Ok(out)
    }

    /// u_x(n) for n in `from..to`.
    pub fn terms(&self, x: &Parameter, from: u64, to: u64) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(to.saturating_sub(from) as usize);
        self.for_each_term(x, from, to, |_, v| out.push(v))?;
        Ok(out)
    }

    /// A parameter of the right kind near `v`.
    pub fn sample_param(&self, v: f64) -> Result<Parameter> {
        match self.param_kind {
            ParamKind::Real => Parameter::untagged(v),
            ParamKind::Rational => {
                const Q: i64 = 1000;
                Parameter::rational((v * Q as f64).round() as i64, Q)
            }
        }
    }
}

/// sin(π p n / q) through the exact residue of p·n modulo 2q.
fn sin_pi_rational(p: i64, q: i64, n: u64) -> f64 {
    let m = 2 * q as i128;
    let r = ((p as i128 * n as i128) % m + m) % m;
    (PI * r as f64 / q as f64).sin()
}

fn iv(lo: f64, hi: f64, lo_open: bool, hi_open: bool) -> RealInterval {
    RealInterval::new(lo, hi, lo_open, hi_open).expect("static interval")
}

pub const LOGISTIC_R: f64 = 3.57;

pub fn builtin_sequences() -> Vec<SequenceFamily> {
    let line = RealInterval::real_line();
    vec![
        SequenceFamily {
            id: "logistic_357".into(),
            omega: iv(0.0, 1.0, true, true),
            generator: Generator::Operator(Arc::new(Iteration { map: |s: f64| LOGISTIC_R * s * (1.0 - s) })),
            notes: "orbit of 3.57x(1-x) started at the parameter".into(),
            sample_omega: iv(0.05, 0.95, false, false),
            param_kind: ParamKind::Real,
        },
        SequenceFamily {
            id: "sin_drift".into(),
            omega: line,
            generator: Generator::Direct(Arc::new(|a: &Parameter, n: u64| {
                let n = n as f64;
                Ok((a.value() * n).sin() - n.sin())
            })),
            notes: "u_a(n) = sin(an) - sin n".into(),
            sample_omega: iv(0.5, 3.0, false, false),
            param_kind: ParamKind::Real,
        },
        SequenceFamily {
            id: "sin_drift_commensurable".into(),
            omega: line,
            generator: Generator::Direct(Arc::new(|r: &Parameter, n: u64| match r.tag() {
                ParamTag::Rational { p, q } => Ok(sin_pi_rational(p, q, n) - (n as f64).sin()),
                _ => Err(Error::InvalidParameter(format!("expected p/q, got {r}"))),
            })),
            notes: "u(n) = sin(πrn) - sin n for rational r = p/q (a = πr), periodic in the first term".into(),
            sample_omega: iv(0.2, 1.8, false, false),
            param_kind: ParamKind::Rational,
        },
    ]
}

pub fn find_sequence(id: &str) -> Result<SequenceFamily> {
    builtin_sequences()
        .into_iter()
        .find(|f| f.id == id)
        .ok_or_else(|| Error::UnknownFamily(id.to_string()))
}

// ---------------------------------------------------------------------------
// tail statistics

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailStats {
    pub limsup_est: f64,
    pub liminf_est: f64,
    /// Half-open index window [start, end).
    pub n_range: (u64, u64),
    pub argmax_index: u64,
    pub argmin_index: u64,
}

fn tail_end(config: &ScanConfig) -> u64 {
    config.tail_start + config.tail_len
}

fn stats_of(d: &[f64], start: u64) -> TailStats {
    let mut s = TailStats {
        limsup_est: f64::NEG_INFINITY,
        liminf_est: f64::INFINITY,
        n_range: (start, start + d.len() as u64),
        argmax_index: start,
        argmin_index: start,
    };
    for (k, &v) in d.iter().enumerate() {
        if v > s.limsup_est {
            s.limsup_est = v;
            s.argmax_index = start + k as u64;
        }
        if v < s.liminf_est {
            s.liminf_est = v;
            s.argmin_index = start + k as u64;
        }
    }
    s
}

fn distances(fam: &SequenceFamily, tail_x: &[f64], y: &Parameter, config: &ScanConfig) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(tail_x.len());
    fam.for_each_term(y, config.tail_start, tail_end(config), |n, v| {
        out.push((tail_x[(n - config.tail_start) as usize] - v).abs())
    })?;
    Ok(out)
}

/// max and min of |u_x(n) − u_y(n)| over the configured tail.
pub fn tail_stats(fam: &SequenceFamily, x: &Parameter, y: &Parameter, config: &ScanConfig) -> Result<TailStats> {
    if config.tail_len == 0 {
        return Err(Error::InvalidConfig { field: "tail_len", reason: "must be positive".into() });
    }
    let tx = fam.terms(x, config.tail_start, tail_end(config))?;
    Ok(stats_of(&distances(fam, &tx, y, config)?, config.tail_start))
}

/// Doubling study for one pair: quarter, half and full tail.
pub fn tail_study(fam: &SequenceFamily, x: &Parameter, y: &Parameter, config: &ScanConfig) -> Result<Vec<TailStats>> {
    if config.tail_len == 0 {
        return Err(Error::InvalidConfig { field: "tail_len", reason: "must be positive".into() });
    }
    let tx = fam.terms(x, config.tail_start, tail_end(config))?;
    Ok(tail_doubling(&distances(fam, &tx, y, config)?, config.tail_start))
}

/// Tail statistics on the first quarter, half and all of the tail.
pub fn tail_doubling(d: &[f64], start: u64) -> Vec<TailStats> {
    [4usize, 2, 1]
        .iter()
        .map(|&k| stats_of(&d[..(d.len() / k).max(1)], start))
        .collect()
}

// ---------------------------------------------------------------------------
// Du criterion

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuWitness {
    pub x: Parameter,
    pub v: RealInterval,
    /// The accepted y, or the best candidate when none qualified.
    pub y: Parameter,
    pub found: bool,
    pub stats: TailStats,
    /// Same pair on 1/4, 1/2 and the full tail.
    pub study: Vec<TailStats>,
    pub candidates_tried: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuResult {
    pub lambda: f64,
    pub holds: bool,
    pub witnesses: Vec<DuWitness>,
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

fn frac(v: f64) -> f64 {
    v - v.floor()
}

/// Sampled x and open set V for the i-th Du sample: V alternates between a
/// small interval around x and one half a diameter away.
fn du_sample(fam: &SequenceFamily, i: usize, seed: u64) -> Result<(f64, RealInterval)> {
    let reg = fam.sample_omega;
    let w = reg.width();
    let offset = frac((seed % 1_000_003) as f64 * 0.754_877_666_246_692_7);
    let x = reg.lo + w * frac(offset + (i as f64 + 1.0) * INV_PHI);
    let half = 0.025 * w;
    let centre = if i % 2 == 0 { x } else { reg.lo + frac((x - reg.lo) / w + 0.5) * w };
    let lo = (centre - half).max(reg.lo);
    let hi = (centre + half).min(reg.hi);
    Ok((x, RealInterval::new(lo, hi, true, true)?))
}

/// Distance of a tail from being a Du witness; 0 means accepted.
fn du_shortfall(s: &TailStats, lambda: f64, config: &ScanConfig) -> f64 {
    ((lambda - config.tol_eq) - s.limsup_est).max(0.0) / lambda
        + (s.liminf_est - config.tol_liminf).max(0.0) / config.tol_liminf.max(f64::MIN_POSITIVE)
}

struct YSearch<'a> {
    fam: &'a SequenceFamily,
    tail_x: Vec<f64>,
    v: RealInterval,
    lambda: f64,
    config: &'a ScanConfig,
    seen: Vec<Parameter>,
    best: Option<(f64, Parameter, TailStats, Vec<f64>)>,
}

impl YSearch<'_> {
    /// Shortfall of the candidate nearest to `yv` (∞ outside V).
    fn score(&mut self, yv: f64) -> Result<f64> {
        if !self.v.contains(yv) {
            return Ok(f64::INFINITY);
        }
        let y = self.fam.sample_param(yv)?;
        let d = distances(self.fam, &self.tail_x, &y, self.config)?;
        let s = stats_of(&d, self.config.tail_start);
        let score = du_shortfall(&s, self.lambda, self.config);
        if !self.seen.contains(&y) {
            self.seen.push(y);
        }
        if self.best.as_ref().is_none_or(|b| score < b.0) {
            self.best = Some((score, y, s, d));
        }
        Ok(score)
    }

    fn done(&self) -> bool {
        self.best.as_ref().is_some_and(|b| b.0 == 0.0)
    }
}

fn du_search(
    fam: &SequenceFamily,
    x: &Parameter,
    v: &RealInterval,
    lambda: f64,
    config: &ScanConfig,
) -> Result<DuWitness> {
    let tail_x = fam.terms(x, config.tail_start, tail_end(config))?;
    let mut search = YSearch { fam, tail_x, v: *v, lambda, config, seen: Vec::new(), best: None };
    let n = config.du_y_grid.max(1);
    let step = v.width() / (n + 1) as f64;
    let mut best_k = 1usize;
    let mut best_score = f64::INFINITY;
    for k in 1..=n {
        let sc = search.score(v.lo + step * k as f64)?;
        if sc < best_score {
            best_score = sc;
            best_k = k;
        }
        if search.done() {
            break;
        }
    }
    // golden-section refinement around the best grid point
    if !search.done() {
        let mut a = v.lo + step * (best_k as f64 - 1.0);
        let mut b = v.lo + step * (best_k as f64 + 1.0);
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let mut fc = search.score(c)?;
        let mut fd = search.score(d)?;
        for _ in 0..config.refine_iters.min(40) {
            if search.done() || !(b - a > 0.0) {
                break;
            }
            if fc <= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - INV_PHI * (b - a);
                fc = search.score(c)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + INV_PHI * (b - a);
                fd = search.score(d)?;
            }
        }
    }
    let tried = search.seen.len();
    let (score, y, stats, d) = search
        .best
        .ok_or_else(|| Error::Precondition(format!("open set {v} contains no admissible parameter")))?;
    Ok(DuWitness {
        x: *x,
        v: *v,
        y,
        found: score == 0.0,
        stats,
        study: tail_doubling(&d, config.tail_start),
        candidates_tried: tried,
    })
}

/// For du_samples pairs (x, V), searches y ∈ V with limsup ≥ λ and liminf ≈ 0.
pub fn check_du(fam: &SequenceFamily, lambda: f64, config: &ScanConfig) -> Result<DuResult> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Precondition(format!("λ must be positive, got {lambda}")));
    }
    config.validate()?;
    let mut witnesses = Vec::with_capacity(config.du_samples);
    for i in 0..config.du_samples {
        let (xv, v) = du_sample(fam, i, config.seed)?;
        let x = fam.sample_param(xv)?;
        witnesses.push(du_search(fam, &x, &v, lambda, config)?);
    }
    let holds = !witnesses.is_empty() && witnesses.iter().all(|w| w.found);
    Ok(DuResult { lambda, holds, witnesses })
}

// ---------------------------------------------------------------------------
// two-condition criterion

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub n: u64,
    /// min of d(m) over m > n in the tail.
    pub min_after: f64,
    /// max of d(m) over m > n in the tail.
    pub max_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cond41Attempt {
    pub beta: Parameter,
    pub condition1: bool,
    pub condition2: bool,
    pub checkpoints: Vec<Checkpoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cond41Unit {
    pub alpha: Parameter,
    pub chi: Parameter,
    pub radius: f64,
    pub success: bool,
    pub attempts: Vec<Cond41Attempt>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cond41Result {
    pub eps_div: f64,
    /// Smallest ε of the ladder; condition 1 for it implies every larger ε.
    pub eps_min: f64,
    pub holds: bool,
    pub condition1_failures: usize,
    pub condition2_failures: usize,
    pub units: Vec<Cond41Unit>,
}

/// Checkpoints at the start and at each quarter of the tail.
fn checkpoints(d: &[f64], start: u64) -> Vec<Checkpoint> {
    let len = d.len();
    // suffix extrema
    let mut smin = vec![f64::INFINITY; len + 1];
    let mut smax = vec![f64::NEG_INFINITY; len + 1];
    for k in (0..len).rev() {
        smin[k] = smin[k + 1].min(d[k]);
        smax[k] = smax[k + 1].max(d[k]);
    }
    (0..4)
        .map(|q| {
            let k = q * len / 4;
            Checkpoint { n: start + k as u64, min_after: smin[k + 1], max_after: smax[k + 1] }
        })
        .collect()
}

/// Condition 1 at level `eps`: after each checkpoint the tails come closer than eps.
pub fn condition1(fam: &SequenceFamily, x: &Parameter, y: &Parameter, eps: f64, config: &ScanConfig) -> Result<bool> {
    let tx = fam.terms(x, config.tail_start, tail_end(config))?;
    let d = distances(fam, &tx, y, config)?;
    Ok(checkpoints(&d, config.tail_start).iter().all(|c| c.min_after < eps))
}

/// Finite surrogate of the two-condition criterion with divergence threshold `eps_div`.
pub fn check_41(fam: &SequenceFamily, eps_div: f64, config: &ScanConfig) -> Result<Cond41Result> {
    if !(eps_div > 0.0) || !eps_div.is_finite() {
        return Err(Error::Precondition(format!("ε_div must be positive, got {eps_div}")));
    }
    config.validate()?;
    let eps_min = config.smallest_level();
    let reg = fam.sample_omega;
    let diam = reg.width();
    let mut units = Vec::new();
    let (mut c1_fail, mut c2_fail) = (0, 0);
    let offset = frac((config.seed % 1_000_003) as f64 * 0.754_877_666_246_692_7);
    for i in 0..config.du_samples {
        let a = reg.lo + diam * frac(offset + (i as f64 + 1.0) * INV_PHI);
        let c = reg.lo + diam * frac(offset + (i as f64 + 1.0) * 0.414_213_562_373_095_1);
        let alpha = fam.sample_param(a)?;
        let chi = fam.sample_param(c)?;
        let tx = fam.terms(&alpha, config.tail_start, tail_end(config))?;
        for level in 0..config.nbhd_levels {
            let radius = 0.25 * diam * config.nbhd_shrink.powi(level as i32);
            let mut attempts: Vec<Cond41Attempt> = Vec::new();
            let mut success = false;
            for j in 0..config.beta_candidates {
                let mag = 0.1 + 0.85 * frac((j / 2 + 1) as f64 * INV_PHI);
                let off = if j % 2 == 0 { mag } else { -mag };
                let bv = c + radius * off;
                if !fam.omega.contains(bv) {
                    continue;
                }
                let beta = fam.sample_param(bv)?;
                if beta == alpha || attempts.iter().any(|t| t.beta == beta) {
                    continue;
                }
                let d = distances(fam, &tx, &beta, config)?;
                let cps = checkpoints(&d, config.tail_start);
                let condition1 = cps.iter().all(|c| c.min_after < eps_min);
                let condition2 = cps.iter().all(|c| c.max_after >= eps_div);
                success = condition1 && condition2;
                attempts.push(Cond41Attempt { beta, condition1, condition2, checkpoints: cps });
                if success {
                    break;
                }
            }
            if !success {
                if !attempts.iter().any(|t| t.condition1) {
                    c1_fail += 1;
                }
                if !attempts.iter().any(|t| t.condition2) {
                    c2_fail += 1;
                }
            }
            units.push(Cond41Unit { alpha, chi, radius, success, attempts });
        }
    }
    let holds = !units.is_empty() && units.iter().all(|u| u.success);
    Ok(Cond41Result {
        eps_div,
        eps_min,
        holds,
        condition1_failures: c1_fail,
        condition2_failures: c2_fail,
        units,
    })
}
