//! Crossings, ε-windows, window chains along the ε-ladder and gap witnesses
//! for a fixed pair (α, β) on a finite range of moments.
//!
//! Everything is built from one sampled profile of d(z) = ψ_α(z) − ψ_β(z).
//! Grid features are refined with bisection (roots, level crossings) and
//! golden-section search (extrema between samples).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{eval, FamilySpec, MomentScale};
use crate::model::{GapWitness, Parameter, RealInterval, ScanConfig, Window, WindowKind};

/// A refined zero of d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub z: f64,
    /// d touches zero without changing sign (|d| ≤ tol_zero at the refined minimum).
    pub tangential: bool,
}

/// A chain of pairwise disjoint windows at strictly decreasing ε.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowChain {
    pub kind: WindowKind,
    pub windows: Vec<Window>,
    pub pairwise_disjoint: bool,
    /// One witness per consecutive pair of windows.
    pub gaps: Vec<GapWitness>,
    /// The μ the gap witnesses were required to exceed.
    pub mu_candidate: f64,
    pub range: RealInterval,
}

impl WindowChain {
    /// Smallest gap witness value, or +∞ for a single window.
    pub fn min_gap(&self) -> f64 {
        self.gaps.iter().map(|g| g.value).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum ChainFailReason {
    /// No window of the kind exists at this level.
    NoWindow,
    /// Windows exist but all meet an already selected window.
    NoDisjointWindow,
    /// Disjoint windows exist but every gap maximum is ≤ μ.
    GapTooSmall { best_gap: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainFailure {
    pub kind: WindowKind,
    /// Number of windows chained before the failing level.
    pub deepest_level: usize,
    pub failed_eps: f64,
    #[serde(flatten)]
    pub reason: ChainFailReason,
    pub range: RealInterval,
    pub partial: Vec<Window>,
    pub partial_gaps: Vec<GapWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ChainOutcome {
    Chain(WindowChain),
    Failure(ChainFailure),
}

impl ChainOutcome {
    pub fn is_chain(&self) -> bool {
        matches!(self, ChainOutcome::Chain(_))
    }

    pub fn depth(&self) -> usize {
        match self {
            ChainOutcome::Chain(c) => c.windows.len(),
            ChainOutcome::Failure(f) => f.deepest_level,
        }
    }
}

// ---------------------------------------------------------------------------
// refinement primitives

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Bisection on a bracket where `f(a)` and `f(b)` have opposite signs.
/// Returns the endpoint of the final bracket with the smaller |f|.
fn bisect<F>(mut f: F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64, iters: u32) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    for _ in 0..iters {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    Ok(if fa.abs() <= fb.abs() { a } else { b })
}

/// Golden-section minimization of `f` on [a, b]; returns the best point seen.
fn golden_min<F>(mut f: F, mut a: f64, mut b: f64, iters: u32) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let (mut best_x, mut best_f) = if fc <= fd { (c, fc) } else { (d, fd) };
    for _ in 0..iters {
        if !(b - a > 0.0) || c <= a || d >= b {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
            if fc < best_f {
                best_x = c;
                best_f = fc;
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
            if fd < best_f {
                best_x = d;
                best_f = fd;
            }
        }
    }
    Ok((best_x, best_f))
}

fn golden_max<F>(mut f: F, a: f64, b: f64, iters: u32) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (x, v) = golden_min(|z| f(z).map(|v| -v), a, b, iters)?;
    Ok((x, -v))
}

// ---------------------------------------------------------------------------
// grids

/// Sampling grid on `range`, uniform in the family's scale coordinate.
/// Endpoints are exactly `range.lo` and `range.hi`.
pub fn scan_grid(scale: MomentScale, range: &RealInterval, points: usize) -> Vec<f64> {
    let n = points.max(3);
    let scale = if scale.applies_to(range) { scale } else { MomentScale::Linear };
    let (t0, t1) = (scale.forward(range.lo), scale.forward(range.hi));
    let mut xs: Vec<f64> = (0..n)
        .map(|i| {
            let t = t0 + (t1 - t0) * (i as f64 / (n - 1) as f64);
            scale.inverse(t)
        })
        .collect();
    xs.sort_by(f64::total_cmp);
    xs[0] = range.lo;
    xs[n - 1] = range.hi;
    xs.dedup();
    xs
}

/// ψ_a on every grid point; errors carry the failing moment.
pub fn eval_grid(spec: &FamilySpec, a: &Parameter, xs: &[f64]) -> Result<Vec<f64>> {
    xs.iter()
        .map(|&x| eval(spec, a, x).map_err(|e| e.at_moment(x)))
        .collect()
}

fn check_range(spec: &FamilySpec, range: &RealInterval) -> Result<()> {
    if !range.is_finite() {
        return Err(Error::Precondition(format!("scan range {range} must be finite")));
    }
    if !spec.theta.contains(range.lo) || !spec.theta.contains(range.hi) {
        return Err(Error::Precondition(format!(
            "scan range {range} is not inside Θ = {} of {}",
            spec.theta, spec.id
        )));
    }
    Ok(())
}

fn check_pair(alpha: &Parameter, beta: &Parameter) -> Result<()> {
    if alpha == beta {
        return Err(Error::Precondition(format!(
            "α and β must differ, both are {alpha}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// profile

#[derive(Debug, Clone, Copy)]
struct PosMin {
    z: f64,
    value: f64,
}

/// Run of samples between two consecutive roots.
#[derive(Debug, Clone, Copy)]
struct Hump {
    lo: f64,
    hi: f64,
    sample_max: f64,
    /// Refined maximum of |d|, filled in when sample_max < the profile's ε cap.
    max: Option<f64>,
    min: f64,
}

/// Sampled d together with every grid feature the window search needs.
pub struct Profile<'a> {
    spec: &'a FamilySpec,
    alpha: Parameter,
    beta: Parameter,
    range: RealInterval,
    iters: u32,
    tol_zero: f64,
    tol_eq: f64,
    xs: Vec<f64>,
    ds: Vec<f64>,
    roots: Vec<Crossing>,
    pos_mins: Vec<PosMin>,
    humps: Vec<Hump>,
}

impl<'a> Profile<'a> {
    /// Samples d on `points` grid points of `range` and locates its features.
    /// Cross humps are refined only if their sampled maximum is below `eps_cap`.
    pub fn build(
        spec: &'a FamilySpec,
        alpha: &Parameter,
        beta: &Parameter,
        range: &RealInterval,
        points: usize,
        config: &ScanConfig,
        eps_cap: f64,
    ) -> Result<Self> {
        check_pair(alpha, beta)?;
        check_range(spec, range)?;
        let xs = scan_grid(spec.scale, range, points);
        let pa = eval_grid(spec, alpha, &xs)?;
        Self::from_alpha_values(spec, alpha, beta, range, xs, &pa, config, eps_cap)
    }

    /// As [`Profile::build`] but reuses ψ_α already sampled on `xs`.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_alpha_values(
        spec: &'a FamilySpec,
        alpha: &Parameter,
        beta: &Parameter,
        range: &RealInterval,
        xs: Vec<f64>,
        psi_alpha: &[f64],
        config: &ScanConfig,
        eps_cap: f64,
    ) -> Result<Self> {
        check_pair(alpha, beta)?;
        let pb = eval_grid(spec, beta, &xs)?;
        let ds = psi_alpha.iter().zip(&pb).map(|(a, b)| a - b).collect();
        let mut p = Profile {
            spec,
            alpha: *alpha,
            beta: *beta,
            range: *range,
            iters: config.refine_iters,
            tol_zero: config.tol_zero,
            tol_eq: config.tol_eq,
            xs,
            ds,
            roots: Vec::new(),
            pos_mins: Vec::new(),
            humps: Vec::new(),
        };
        p.locate_roots()?;
        p.locate_humps(eps_cap)?;
        Ok(p)
    }

    pub fn range(&self) -> RealInterval {
        self.range
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.roots
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ds.iter().copied())
    }

    /// Signed d(z).
    pub fn d(&self, z: f64) -> Result<f64> {
        let a = eval(self.spec, &self.alpha, z).map_err(|e| e.at_moment(z))?;
        let b = eval(self.spec, &self.beta, z).map_err(|e| e.at_moment(z))?;
        Ok(a - b)
    }

    fn abs_d(&self, z: f64) -> Result<f64> {
        self.d(z).map(f64::abs)
    }

    /// Index of the first sample strictly greater than z.
    fn upper(&self, z: f64) -> usize {
        self.xs.partition_point(|&x| x <= z)
    }

    /// Index of the first sample ≥ z.
    fn lower(&self, z: f64) -> usize {
        self.xs.partition_point(|&x| x < z)
    }

    fn locate_roots(&mut self) -> Result<()> {
        let n = self.xs.len();
        let mut roots = Vec::new();
        let mut pos_mins = Vec::new();
        // ψ_α and ψ_β agree at every sample: no isolated zeros, hence no windows
        if self.ds.iter().all(|&d| d == 0.0) {
            self.roots = roots;
            self.pos_mins = pos_mins;
            return Ok(());
        }
        for i in 0..n {
            let di = self.ds[i];
            if di == 0.0 {
                let crossing = i > 0 && i + 1 < n && self.ds[i - 1] * self.ds[i + 1] < 0.0;
                roots.push(Crossing { z: self.xs[i], tangential: !crossing });
                continue;
            }
            if i + 1 < n && di * self.ds[i + 1] < 0.0 {
                let z = bisect(|z| self.d(z), self.xs[i], self.xs[i + 1], di, self.ds[i + 1], self.iters)?;
                roots.push(Crossing { z, tangential: false });
            }
            // sample-level local minimum of |d| without a sign change: probe
            // between the neighbours for a hidden root pair or a positive minimum
            if i == 0 || i + 1 == n {
                continue;
            }
            let (l, r) = (self.ds[i - 1], self.ds[i + 1]);
            if l * di <= 0.0 || r * di <= 0.0 || di.abs() > l.abs() || di.abs() > r.abs() {
                continue;
            }
            let s = di.signum();
            let (lo, hi) = (self.xs[i - 1], self.xs[i + 1]);
            let (zm, gm) = golden_min(|z| self.d(z).map(|v| s * v), lo, hi, self.iters)?;
            if gm < 0.0 {
                let a = bisect(|z| self.d(z), lo, zm, l, s * gm, self.iters)?;
                let b = bisect(|z| self.d(z), zm, hi, s * gm, r, self.iters)?;
                roots.push(Crossing { z: a, tangential: false });
                roots.push(Crossing { z: b, tangential: false });
            } else if gm <= self.tol_zero {
                roots.push(Crossing { z: zm, tangential: true });
            } else {
                pos_mins.push(PosMin { z: zm, value: gm });
            }
        }
        roots.sort_by(|a, b| a.z.total_cmp(&b.z));
        roots.dedup_by(|a, b| a.z == b.z);
        pos_mins.sort_by(|a, b| a.z.total_cmp(&b.z));
        self.roots = roots;
        self.pos_mins = pos_mins;
        Ok(())
    }

    /// Refined maximum of |d| over (lo, hi), probing every sample-level local maximum.
    fn refined_max(&self, lo: f64, hi: f64, edge_lo: f64, edge_hi: f64) -> Result<f64> {
        let (i0, i1) = (self.upper(lo), self.lower(hi));
        if i0 >= i1 {
            let (_, v) = golden_max(|z| self.abs_d(z), lo, hi, self.iters)?;
            return Ok(v.max(edge_lo).max(edge_hi));
        }
        let mut best = edge_lo.max(edge_hi);
        for j in i0..i1 {
            let v = self.ds[j].abs();
            best = best.max(v);
            let left = if j == i0 { edge_lo } else { self.ds[j - 1].abs() };
            let right = if j + 1 == i1 { edge_hi } else { self.ds[j + 1].abs() };
            if v >= left && v >= right {
                let a = if j == i0 { lo } else { self.xs[j - 1] };
                let b = if j + 1 == i1 { hi } else { self.xs[j + 1] };
                let (_, m) = golden_max(|z| self.abs_d(z), a, b, self.iters)?;
                best = best.max(m);
            }
        }
        Ok(best)
    }

    fn locate_humps(&mut self, eps_cap: f64) -> Result<()> {
        let mut humps = Vec::with_capacity(self.roots.len().saturating_sub(1));
        for pair in self.roots.windows(2) {
            let (lo, hi) = (pair[0].z, pair[1].z);
            if !(hi > lo) {
                continue;
            }
            let (i0, i1) = (self.upper(lo), self.lower(hi));
            let (mut smax, mut smin) = (0.0f64, f64::INFINITY);
            for j in i0..i1 {
                let v = self.ds[j].abs();
                smax = smax.max(v);
                smin = smin.min(v);
            }
            if i0 >= i1 {
                smin = self.abs_d(0.5 * (lo + hi))?;
                smax = smin;
            }
            humps.push(Hump { lo, hi, sample_max: smax, max: None, min: smin });
        }
        for h in humps.iter_mut() {
            // a hump touching zero inside is never a window
            if h.sample_max < eps_cap && h.min > 0.0 {
                h.max = Some(self.refined_max(h.lo, h.hi, 0.0, 0.0)?);
            }
        }
        self.humps = humps;
        Ok(())
    }

    /// All maximal windows of `kind` at level `eps`, ordered by position.
    pub fn windows(&self, kind: WindowKind, eps: f64) -> Result<Vec<Window>> {
        match kind {
            WindowKind::Cross => Ok(self.cross_windows(eps)),
            WindowKind::Disjoint => self.disjoint_windows(eps),
        }
    }

    fn cross_windows(&self, eps: f64) -> Vec<Window> {
        self.humps
            .iter()
            .filter_map(|h| {
                let max = h.max?;
                (max < eps && h.min > 0.0).then_some(Window {
                    kind: WindowKind::Cross,
                    x1: h.lo,
                    y1: h.hi,
                    eps,
                    interior_min: h.min,
                    interior_max: max,
                })
            })
            .collect()
    }

    fn disjoint_windows(&self, eps: f64) -> Result<Vec<Window>> {
        let mut out: Vec<Window> = Vec::new();
        for pm in &self.pos_mins {
            if pm.value >= eps || out.last().is_some_and(|w| pm.z <= w.y1) {
                continue;
            }
            if let Some(w) = self.component_around(pm, eps)? {
                out.push(w);
            }
        }
        Ok(out)
    }

    /// The component of {|d| < eps} containing a positive local minimum,
    /// if it is a valid disjoint window strictly inside the range.
    fn component_around(&self, pm: &PosMin, eps: f64) -> Result<Option<Window>> {
        let s = self.d(pm.z)?.signum();
        let level = |z: f64| self.abs_d(z).map(|v| v - eps);
        let inside = |j: usize| self.ds[j] * s > 0.0 && self.ds[j].abs() < eps;

        // left boundary
        let mut j = self.upper(pm.z);
        let mut inner = pm.z;
        loop {
            if j == 0 {
                return Ok(None);
            }
            j -= 1;
            if self.xs[j] == pm.z {
                continue;
            }
            if inside(j) {
                inner = self.xs[j];
                continue;
            }
            if self.ds[j] * s <= 0.0 {
                return Ok(None);
            }
            break;
        }
        let x1 = bisect(level, self.xs[j], inner, self.ds[j].abs() - eps, self.abs_d(inner)? - eps, self.iters)?;

        // right boundary
        let n = self.xs.len();
        let mut j = self.lower(pm.z);
        let mut inner = pm.z;
        loop {
            if j >= n {
                return Ok(None);
            }
            if self.xs[j] == pm.z || inside(j) {
                inner = self.xs[j].max(inner);
                j += 1;
                continue;
            }
            if self.ds[j] * s <= 0.0 {
                return Ok(None);
            }
            break;
        }
        let y1 = bisect(level, inner, self.xs[j], self.abs_d(inner)? - eps, self.ds[j].abs() - eps, self.iters)?;

        if !(y1 > x1) || x1 <= self.range.lo || y1 >= self.range.hi {
            return Ok(None);
        }
        let (bx, by) = (self.abs_d(x1)?, self.abs_d(y1)?);
        if (bx - eps).abs() > self.tol_eq || (by - eps).abs() > self.tol_eq {
            return Ok(None);
        }
        // no zero of d, tangential or not, may sit inside
        let k = self.roots.partition_point(|r| r.z < x1);
        if self.roots.get(k).is_some_and(|r| r.z <= y1) {
            return Ok(None);
        }
        let max = self.refined_max(x1, y1, bx, by)?;
        if max >= eps + self.tol_eq || max.max(bx).max(by) > eps + self.tol_eq {
            return Ok(None);
        }
        let mut min = pm.value;
        for q in &self.pos_mins {
            if q.z > x1 && q.z < y1 {
                min = min.min(q.value);
            }
        }
        for j in self.upper(x1)..self.lower(y1) {
            min = min.min(self.ds[j].abs());
        }
        if min <= self.tol_zero {
            return Ok(None);
        }
        Ok(Some(Window {
            kind: WindowKind::Disjoint,
            x1,
            y1,
            eps,
            interior_min: min,
            interior_max: max.min(eps),
        }))
    }

    /// Gap witness between two disjoint windows, from the grid then refined.
    pub fn gap(&self, w1: &Window, w2: &Window) -> Result<GapWitness> {
        if w1.intersects(w2) && !(w1.y1 == w2.x1 || w2.y1 == w1.x1) {
            return Err(Error::Precondition("windows overlap, there is no gap".into()));
        }
        let (lo, hi) = if w1.y1 <= w2.x1 { (w1.y1, w2.x1) } else { (w2.y1, w1.x1) };
        if lo == hi {
            return Ok(GapWitness { w: lo, value: self.abs_d(lo)?, gap_lo: lo, gap_hi: hi });
        }
        let (best_sample, _) = self.gap_sample_max(lo, hi);
        let (mut w, mut value) = match best_sample {
            Some(j) => (self.xs[j], self.ds[j].abs()),
            None => (lo, self.abs_d(lo)?),
        };
        for z in [lo, hi] {
            let v = self.abs_d(z)?;
            if v > value {
                w = z;
                value = v;
            }
        }
        let (a, b) = match best_sample {
            Some(j) => (
                if j > 0 { self.xs[j - 1].max(lo) } else { lo },
                if j + 1 < self.xs.len() { self.xs[j + 1].min(hi) } else { hi },
            ),
            None => (lo, hi),
        };
        let (zr, vr) = golden_max(|z| self.abs_d(z), a, b, self.iters)?;
        if vr > value {
            w = zr;
            value = vr;
        }
        Ok(GapWitness { w, value, gap_lo: lo, gap_hi: hi })
    }

    /// Largest sampled |d| strictly inside (lo, hi).
    fn gap_sample_max(&self, lo: f64, hi: f64) -> (Option<usize>, f64) {
        let mut best = (None, 0.0);
        for j in self.upper(lo)..self.lower(hi) {
            let v = self.ds[j].abs();
            if best.0.is_none() || v > best.1 {
                best = (Some(j), v);
            }
        }
        best
    }

    /// Walks the ε-ladder selecting one window per level.
    pub fn chain(&self, kind: WindowKind, config: &ScanConfig) -> Result<ChainOutcome> {
        let ladder = config.ladder();
        let mut selected: Vec<Window> = Vec::new();
        let mut gaps: Vec<GapWitness> = Vec::new();
        for (k, &eps) in ladder.iter().enumerate() {
            let next = ladder.get(k + 1).copied();
            let all = self.windows(kind, eps)?;
            let fail = |reason| {
                Ok(ChainOutcome::Failure(ChainFailure {
                    kind,
                    deepest_level: k,
                    failed_eps: eps,
                    reason,
                    range: self.range,
                    partial: selected.clone(),
                    partial_gaps: gaps.clone(),
                }))
            };
            if all.is_empty() {
                return fail(ChainFailReason::NoWindow);
            }
            let free: Vec<Window> = all
                .into_iter()
                .filter(|w| selected.iter().all(|s| !s.intersects(w)))
                .collect();
            if free.is_empty() {
                return fail(ChainFailReason::NoDisjointWindow);
            }
            // windows that are still usable one level down are kept for later
            let spare = |w: &Window| match (next, kind) {
                (None, _) => false,
                (Some(e), WindowKind::Cross) => w.interior_max < e,
                (Some(e), WindowKind::Disjoint) => w.interior_max < e || w.interior_min < e,
            };
            let choice = match selected.last() {
                None => free
                    .iter()
                    .min_by_key(|w| spare(w))
                    .copied()
                    .map(|w| (w, None)),
                Some(prev) => {
                    let mut best: Option<(Window, f64, bool)> = None;
                    let mut best_gap = 0.0f64;
                    for w in &free {
                        let g = self.gap_estimate(prev, w)?;
                        best_gap = best_gap.max(g);
                        if g <= config.mu_min {
                            continue;
                        }
                        let sp = spare(w);
                        let better = match best {
                            None => true,
                            Some((_, bg, bsp)) => (!sp && bsp) || (sp == bsp && g > bg),
                        };
                        if better {
                            best = Some((*w, g, sp));
                        }
                    }
                    match best {
                        Some((w, _, _)) => {
                            let witness = self.gap(prev, &w)?;
                            Some((w, Some(witness)))
                        }
                        None => return fail(ChainFailReason::GapTooSmall { best_gap }),
                    }
                }
            };
            let (w, witness) = choice.expect("free windows are non-empty");
            selected.push(w);
            if let Some(g) = witness {
                gaps.push(g);
            }
        }
        Ok(ChainOutcome::Chain(WindowChain {
            kind,
            windows: selected,
            pairwise_disjoint: true,
            gaps,
            mu_candidate: config.mu_min,
            range: self.range,
        }))
    }

    /// Cheap gap maximum from the samples and the window edges.
    fn gap_estimate(&self, w1: &Window, w2: &Window) -> Result<f64> {
        let (lo, hi) = if w1.y1 <= w2.x1 { (w1.y1, w2.x1) } else { (w2.y1, w1.x1) };
        let (_, v) = self.gap_sample_max(lo, hi);
        let edge = match w1.kind {
            WindowKind::Cross => 0.0,
            WindowKind::Disjoint => w1.eps.min(w2.eps),
        };
        let v = v.max(edge);
        if v > 0.0 || lo == hi {
            return Ok(v);
        }
        self.abs_d(0.5 * (lo + hi))
    }
}

// ---------------------------------------------------------------------------
// public operations

/// Refined zeros of ψ_α − ψ_β on `range`, ascending.
pub fn scan_crossings(
    spec: &FamilySpec,
    alpha: &Parameter,
    beta: &Parameter,
    range: &RealInterval,
    config: &ScanConfig,
) -> Result<Vec<Crossing>> {
    let p = Profile::build(spec, alpha, beta, range, config.grid_points, config, 0.0)?;
    Ok(p.roots)
}

/// Maximal ε-windows of the given kind on `range`.
pub fn find_windows(
    spec: &FamilySpec,
    alpha: &Parameter,
    beta: &Parameter,
    eps: f64,
    kind: WindowKind,
    range: &RealInterval,
    config: &ScanConfig,
) -> Result<Vec<Window>> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Precondition(format!("eps must be positive, got {eps}")));
    }
    if alpha == beta {
        return Ok(Vec::new());
    }
    let p = Profile::build(spec, alpha, beta, range, config.grid_points, config, eps)?;
    p.windows(kind, eps)
}

/// Chain of windows along the configured ε-ladder, or a report of where it stalled.
pub fn build_chain(
    spec: &FamilySpec,
    alpha: &Parameter,
    beta: &Parameter,
    kind: WindowKind,
    range: &RealInterval,
    config: &ScanConfig,
) -> Result<ChainOutcome> {
    let p = Profile::build(spec, alpha, beta, range, config.grid_points, config, config.eps_top)?;
    p.chain(kind, config)
}

/// Maximizer of |d| on the closed gap between two disjoint windows.
pub fn gap_separation(
    spec: &FamilySpec,
    alpha: &Parameter,
    beta: &Parameter,
    w1: &Window,
    w2: &Window,
    config: &ScanConfig,
) -> Result<GapWitness> {
    let (lo, hi) = if w1.y1 <= w2.x1 { (w1.y1, w2.x1) } else { (w2.y1, w1.x1) };
    if w1.intersects(w2) && lo != hi {
        return Err(Error::Precondition("windows overlap, there is no gap".into()));
    }
    check_pair(alpha, beta)?;
    if lo == hi {
        let v = eval(spec, alpha, lo)? - eval(spec, beta, lo)?;
        return Ok(GapWitness { w: lo, value: v.abs(), gap_lo: lo, gap_hi: hi });
    }
    let range = RealInterval::closed(lo, hi)?;
    let p = Profile::build(spec, alpha, beta, &range, config.grid_points, config, 0.0)?;
    let (j, _) = p.gap_sample_max(lo, hi);
    let mut best = (lo, p.abs_d(lo)?);
    for (z, v) in p.samples() {
        if v.abs() > best.1 {
            best = (z, v.abs());
        }
    }
    let (a, b) = match j {
        Some(j) => (p.xs[j - 1], p.xs[j + 1]),
        None => (lo, hi),
    };
    let (zr, vr) = golden_max(|z| p.abs_d(z), a, b, config.refine_iters)?;
    if vr > best.1 {
        best = (zr, vr);
    }
    Ok(GapWitness { w: best.0, value: best.1, gap_lo: lo, gap_hi: hi })
}

/// Outcome of re-checking a recorded window from scratch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowCheck {
    pub valid: bool,
    pub boundary_error: f64,
    pub interior_min: f64,
    pub interior_max: f64,
}

/// Re-validates a window on `samples` interior points using only the evaluator.
/// Boundary and interior conditions are allowed a slack of `slack`.
pub fn revalidate_window(
    spec: &FamilySpec,
    alpha: &Parameter,
    beta: &Parameter,
    w: &Window,
    samples: usize,
    slack: f64,
) -> Result<WindowCheck> {
    let d = |z: f64| -> Result<f64> { Ok((eval(spec, alpha, z)? - eval(spec, beta, z)?).abs()) };
    let target = match w.kind {
        WindowKind::Cross => 0.0,
        WindowKind::Disjoint => w.eps,
    };
    let boundary_error = (d(w.x1)? - target).abs().max((d(w.y1)? - target).abs());
    let mut min = f64::INFINITY;
    let mut max = 0.0f64;
    let n = samples.max(1);
    for i in 1..=n {
        let z = w.x1 + (w.y1 - w.x1) * (i as f64 / (n + 1) as f64);
        if !(z > w.x1 && z < w.y1) {
            continue;
        }
        let v = d(z)?;
        min = min.min(v);
        max = max.max(v);
    }
    let valid = w.y1 > w.x1 && boundary_error <= slack && min > 0.0 && max < w.eps + slack;
    Ok(WindowCheck { valid, boundary_error, interior_min: min, interior_max: max })
}

/// Sampled (z, d(z)) pairs for plotting.
pub fn plot_samples(
    spec: &FamilySpec,
    alpha: &Parameter,
    beta: &Parameter,
    range: &RealInterval,
    points: usize,
) -> Result<Vec<(f64, f64)>> {
    check_range(spec, range)?;
    let xs = scan_grid(spec.scale, range, points);
    let pa = eval_grid(spec, alpha, &xs)?;
    let pb = eval_grid(spec, beta, &xs)?;
    Ok(xs.into_iter().zip(pa.iter().zip(pb).map(|(a, b)| a - b)).collect())
}
