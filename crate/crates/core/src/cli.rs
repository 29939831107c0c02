//! Command-line front end. `run` parses argv, executes one command and returns the exit code:
//! 0 definitive result, 3 inconclusive, 1 usage error, 2 evaluation error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::classifier::classify_kind;
use crate::discrete::{check_41, check_du, find_sequence, tail_study, SequenceFamily};
use crate::error::{Error, Result};
use crate::families::{builtin_catalog, find_family, FamilySpec};
use crate::model::{Label, Parameter, RealInterval, ScanConfig, Strength, WindowKind};
use crate::report::{load_config, to_json_line, write_atomic, CommandRecord, Report};
use crate::scanner::{build_chain, eval_grid, find_windows, scan_crossings, scan_grid};
use crate::taxonomy::{classify_family, classify_point, FamilyLabel, PointLabel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_EVAL: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "chaoscope", version, about = "Classify parametrized families by window chains, orbit separation and convergence")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// ScanConfig JSON, or a previous report (its embedded config is used).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Machine-readable output for `list`.
    #[arg(long, global = true)]
    pub json: bool,
    /// Scan range lo:hi inside Θ.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub range: Option<String>,
    /// Quantifier strength for pair sampling (default weak).
    #[arg(long, global = true)]
    pub strength: Option<Strength>,
    /// Seed for pair streams and the xi_random surrogate.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the report here (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Register FAMILY as a user family ψ_a(x) given by this expression.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub expr: Option<String>,
    /// Ω of a user family (default: the real line).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub omega: Option<String>,
    /// Θ of a user family (default: the real line).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta: Option<String>,
    /// Force sampled pairs to have rational ratio β/α.
    #[arg(long, global = true)]
    pub pairs_commensurable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ListKind {
    Continuous,
    Discrete,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Built-in function and sequence families.
    List {
        #[arg(long, value_enum)]
        kind: Option<ListKind>,
    },
    /// Chaos-kind verdict for a function family.
    Classify { family: String },
    /// Windows, crossings and the chain for one pair (α, β).
    Windows {
        family: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Parameter,
        #[arg(long, allow_hyphen_values = true)]
        beta: Parameter,
        #[arg(long, default_value = "cross")]
        kind: WindowKind,
        /// Window level; defaults to the top of the ε-ladder.
        #[arg(long)]
        eps: Option<f64>,
        /// CSV of z, ψ_α(z), ψ_β(z), |d(z)| over the scan grid.
        #[arg(long)]
        plot_data: Option<PathBuf>,
    },
    /// Orbit-separation analyses of a sequence family.
    Discrete {
        family: String,
        #[command(subcommand)]
        analysis: DiscreteCmd,
    },
    /// Sensitivity taxonomy at a parameter point or over the family.
    Taxonomy {
        family: String,
        #[arg(long, allow_hyphen_values = true, conflicts_with = "family_wide", required_unless_present = "family_wide")]
        alpha: Option<Parameter>,
        #[arg(long = "family")]
        family_wide: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum DiscreteCmd {
    /// limsup ≥ λ with liminf ≈ 0 for witnesses near every sampled point.
    Du {
        #[arg(long, default_value_t = 0.1)]
        lambda: f64,
    },
    /// Recurrence below every ladder ε plus divergence to ε_div.
    Cond41 {
        #[arg(long, default_value_t = 0.1)]
        eps_div: f64,
    },
    /// Tail statistics of |u_x(n) − u_y(n)| with the doubling study.
    Tail {
        #[arg(long, allow_hyphen_values = true)]
        x: Parameter,
        #[arg(long, allow_hyphen_values = true)]
        y: Parameter,
    },
}

#[derive(Debug, Clone, Serialize)]
struct ListEntry {
    id: String,
    kind: &'static str,
    omega: RealInterval,
    theta: Option<RealInterval>,
    notes: String,
}

#[derive(Debug, Clone, Serialize)]
struct SequenceSummary {
    id: String,
    omega: RealInterval,
    notes: String,
}

fn sequence_summary(f: &SequenceFamily) -> SequenceSummary {
    SequenceSummary { id: f.id.clone(), omega: f.omega, notes: f.notes.clone() }
}

/// Outcome of a command before it is written out.
struct Outcome {
    report: Report,
    definitive: bool,
    summary: String,
}

/// Runs the CLI on `argv` (program name first).
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let args: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(&cli, &args, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_usage() || matches!(e, Error::Io(_) | Error::Json(_)) {
                EXIT_USAGE
            } else {
                EXIT_EVAL
            }
        }
    }
}

/// Arguments worth recording for replay: drops `--config`, `--out` and `--plot-data`.
pub fn replay_args(args: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in args {
        if skip {
            skip = false;
            continue;
        }
        let flag = ["--config", "--out", "--plot-data"].iter().find(|f| a.starts_with(**f));
        match flag {
            Some(f) if a.len() == f.len() => skip = true,
            Some(f) if a.as_bytes()[f.len()] == b'=' => {}
            _ => out.push(a.clone()),
        }
    }
    out
}

fn effective_config(g: &GlobalOpts) -> Result<ScanConfig> {
    let mut c = match &g.config {
        Some(p) => load_config(p)?,
        None => ScanConfig::default(),
    };
    if let Some(s) = g.strength {
        c.strength = s;
    }
    if let Some(seed) = g.seed {
        c.seed = seed;
    }
    if g.pairs_commensurable {
        c.commensurable_pairs = true;
    }
    c.checked()
}

fn parse_interval(s: &str, what: &str) -> Result<RealInterval> {
    s.parse().map_err(|e: Error| Error::Parse(format!("{what}: {e}")))
}

fn function_family(id: &str, g: &GlobalOpts, seed: u64) -> Result<FamilySpec> {
    match &g.expr {
        Some(src) => {
            if builtin_catalog().iter().any(|f| f.id == id) {
                return Err(Error::Precondition(format!("`{id}` is a built-in family, pick another name for --expr")));
            }
            let omega = g.omega.as_deref().map(|s| parse_interval(s, "--omega")).transpose()?;
            let theta = g.theta.as_deref().map(|s| parse_interval(s, "--theta")).transpose()?;
            FamilySpec::from_expr(
                id,
                src,
                omega.unwrap_or_else(RealInterval::real_line),
                theta.unwrap_or_else(RealInterval::real_line),
            )
        }
        None => find_family(id, seed),
    }
}

/// Explicit --range, or Θ itself when it is bounded (open ends nudged inward).
fn scan_range(spec: &FamilySpec, g: &GlobalOpts) -> Result<RealInterval> {
    if let Some(r) = &g.range {
        let r = parse_interval(r, "--range")?;
        if !r.is_finite() || !spec.theta.contains(r.lo) || !spec.theta.contains(r.hi) {
            return Err(Error::Precondition(format!("--range {r} must be finite and inside Θ = {}", spec.theta)));
        }
        return Ok(r);
    }
    let t = spec.theta;
    if !t.is_finite() {
        return Err(Error::Precondition(format!("Θ = {t} of {} is unbounded, pass --range lo:hi", spec.id)));
    }
    let nudge = 1e-6 * t.width();
    let lo = if t.lo_open { t.lo + nudge } else { t.lo };
    let hi = if t.hi_open { t.hi - nudge } else { t.hi };
    RealInterval::closed(lo, hi)
}

fn check_param(spec: &FamilySpec, a: &Parameter, flag: &str) -> Result<()> {
    if spec.omega.contains(a.value()) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{flag} {a} lies outside Ω = {}", spec.omega)))
    }
}

fn execute(cli: &Cli, args: &[String], stdout: &mut dyn Write) -> Result<i32> {
    let g = &cli.global;
    if let Command::List { kind } = &cli.command {
        list(*kind, g.json, stdout)?;
        return Ok(EXIT_OK);
    }
    let config = effective_config(g)?;
    let record = |name: &str| CommandRecord { name: name.to_string(), args: replay_args(args) };
    let outcome = match &cli.command {
        Command::List { .. } => unreachable!("handled above"),
        Command::Classify { family } => classify(family, g, &config, record("classify"))?,
        Command::Windows { family, alpha, beta, kind, eps, plot_data } => windows(
            family,
            g,
            &config,
            WindowsArgs { alpha, beta, kind: *kind, eps: *eps, plot_data: plot_data.as_deref() },
            record("windows"),
        )?,
        Command::Discrete { family, analysis } => discrete(family, g, analysis, &config, record("discrete"))?,
        Command::Taxonomy { family, alpha, family_wide } => {
            taxonomy(family, g, alpha.as_ref(), *family_wide, &config, record("taxonomy"))?
        }
    };
    match &g.out {
        Some(p) => {
            outcome.report.write_atomic(p)?;
            writeln!(stdout, "{}", outcome.summary)?;
        }
        None => stdout.write_all(&outcome.report.to_bytes()?)?,
    }
    Ok(if outcome.definitive { EXIT_OK } else { EXIT_INCONCLUSIVE })
}

fn list(kind: Option<ListKind>, json: bool, stdout: &mut dyn Write) -> Result<()> {
    let mut entries = Vec::new();
    if kind != Some(ListKind::Discrete) {
        for f in builtin_catalog() {
            entries.push(ListEntry {
                id: f.id.clone(),
                kind: "continuous",
                omega: f.omega,
                theta: Some(f.theta),
                notes: f.notes.clone(),
            });
        }
    }
    if kind != Some(ListKind::Continuous) {
        for f in crate::discrete::builtin_sequences() {
            entries.push(ListEntry { id: f.id.clone(), kind: "discrete", omega: f.omega, theta: None, notes: f.notes });
        }
    }
    if json {
        writeln!(stdout, "{}", to_json_line(&entries)?)?;
    } else {
        for e in &entries {
            let theta = e.theta.map(|t| format!("  Θ = {t}")).unwrap_or_default();
            writeln!(stdout, "{:<24} {:<10} Ω = {}{theta}\n    {}", e.id, e.kind, e.omega, e.notes)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ClassifySummary {
    label: Label,
    strength: Strength,
    range: RealInterval,
    cross_holds: bool,
    disjoint_holds: bool,
    sensitive: bool,
    mu_estimate: Option<f64>,
    lambda_estimate: f64,
}

fn classify(family: &str, g: &GlobalOpts, config: &ScanConfig, cmd: CommandRecord) -> Result<Outcome> {
    let spec = function_family(family, g, config.seed)?;
    let range = scan_range(&spec, g)?;
    let v = classify_kind(&spec, config, &range)?;
    let mu = match (v.cross.mu_estimate, v.disjoint.mu_estimate) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    let mut warnings = Vec::new();
    if v.label == Label::Inconclusive {
        warnings.push("a chain search failed only at grid resolution; verdict left inconclusive".to_string());
    }
    if config.commensurable_pairs {
        warnings.push("pairs forced commensurable: periodic differences are expected to defeat chains".to_string());
    }
    if v.range != range {
        warnings.push(format!("scan range widened from {range} to {}", v.range));
    }
    let summary = format!("{}: {} ({} reading)", spec.id, v.label, strength_name(v.strength));
    let result = ClassifySummary {
        label: v.label,
        strength: v.strength,
        range: v.range,
        cross_holds: v.cross.holds,
        disjoint_holds: v.disjoint.holds,
        sensitive: v.sensitive.holds,
        mu_estimate: mu,
        lambda_estimate: v.sensitive.lambda_estimate,
    };
    let definitive = v.label != Label::Inconclusive;
    let report = Report::new(spec.summary(), config, cmd, result, &v, warnings)?;
    Ok(Outcome { report, definitive, summary })
}

fn strength_name(s: Strength) -> &'static str {
    match s {
        Strength::Strong => "strong",
        Strength::Weak => "weak",
    }
}

struct WindowsArgs<'a> {
    alpha: &'a Parameter,
    beta: &'a Parameter,
    kind: WindowKind,
    eps: Option<f64>,
    plot_data: Option<&'a Path>,
}

#[derive(Serialize)]
struct WindowsResult {
    alpha: Parameter,
    beta: Parameter,
    kind: WindowKind,
    eps: f64,
    range: RealInterval,
    window_count: usize,
    crossing_count: usize,
    chain_found: bool,
    chain_depth: usize,
}

#[derive(Serialize)]
struct WindowsEvidence {
    windows: Vec<crate::model::Window>,
    crossings: Vec<crate::scanner::Crossing>,
    chain: crate::scanner::ChainOutcome,
}

fn windows(family: &str, g: &GlobalOpts, config: &ScanConfig, w: WindowsArgs, cmd: CommandRecord) -> Result<Outcome> {
    let spec = function_family(family, g, config.seed)?;
    let range = scan_range(&spec, g)?;
    check_param(&spec, w.alpha, "--alpha")?;
    check_param(&spec, w.beta, "--beta")?;
    if w.alpha == w.beta {
        return Err(Error::Precondition("--alpha and --beta must differ".into()));
    }
    let eps = w.eps.unwrap_or(config.eps_top);
    let found = find_windows(&spec, w.alpha, w.beta, eps, w.kind, &range, config)?;
    let crossings = scan_crossings(&spec, w.alpha, w.beta, &range, config)?;
    let chain = build_chain(&spec, w.alpha, w.beta, w.kind, &range, config)?;
    if let Some(path) = w.plot_data {
        let xs = scan_grid(spec.scale, &range, config.grid_points);
        let pa = eval_grid(&spec, w.alpha, &xs)?;
        let pb = eval_grid(&spec, w.beta, &xs)?;
        let mut csv = String::from("z,psi_alpha,psi_beta,abs_d\n");
        for ((z, a), b) in xs.iter().zip(&pa).zip(&pb) {
            csv.push_str(&format!("{z:.16e},{a:.16e},{b:.16e},{:.16e}\n", (a - b).abs()));
        }
        write_atomic(path, csv.as_bytes())?;
    }
    let result = WindowsResult {
        alpha: *w.alpha,
        beta: *w.beta,
        kind: w.kind,
        eps,
        range,
        window_count: found.len(),
        crossing_count: crossings.len(),
        chain_found: chain.is_chain(),
        chain_depth: chain.depth(),
    };
    let summary = format!(
        "{}: {} {} windows at ε = {eps}, {} crossings, chain depth {}",
        spec.id,
        found.len(),
        w.kind,
        crossings.len(),
        chain.depth()
    );
    let evidence = WindowsEvidence { windows: found, crossings, chain };
    let report = Report::new(spec.summary(), config, cmd, result, evidence, Vec::new())?;
    Ok(Outcome { report, definitive: true, summary })
}

fn discrete(family: &str, g: &GlobalOpts, cmd_kind: &DiscreteCmd, config: &ScanConfig, cmd: CommandRecord) -> Result<Outcome> {
    if g.expr.is_some() {
        return Err(Error::Precondition("--expr defines function families, not sequences".into()));
    }
    let fam = find_sequence(family)?;
    let (result, evidence, holds, what) = match cmd_kind {
        DiscreteCmd::Du { lambda } => {
            let r = check_du(&fam, *lambda, config)?;
            let result = serde_json::json!({ "analysis": "du", "lambda": r.lambda, "holds": r.holds });
            (result, serde_json::to_value(&r)?, r.holds, format!("Du criterion with λ = {lambda}"))
        }
        DiscreteCmd::Cond41 { eps_div } => {
            let r = check_41(&fam, *eps_div, config)?;
            let result = serde_json::json!({
                "analysis": "cond41",
                "eps_div": r.eps_div,
                "eps_min": r.eps_min,
                "holds": r.holds,
                "condition1_failures": r.condition1_failures,
                "condition2_failures": r.condition2_failures,
            });
            (result, serde_json::to_value(&r)?, r.holds, format!("two-condition check with ε_div = {eps_div}"))
        }
        DiscreteCmd::Tail { x, y } => {
            let study = tail_study(&fam, x, y, config)?;
            let full = *study.last().expect("three tail windows");
            let result = serde_json::json!({ "analysis": "tail", "x": x, "y": y, "stats": full });
            (result, serde_json::json!({ "study": study }), true, format!("tail of |u_{x} − u_{y}|"))
        }
    };
    let summary = match cmd_kind {
        DiscreteCmd::Tail { .. } => format!("{}: {what} computed", fam.id),
        _ => format!("{}: {what} {}", fam.id, if holds { "holds" } else { "fails" }),
    };
    let report = Report::new(sequence_summary(&fam), config, cmd, result, evidence, Vec::new())?;
    Ok(Outcome { report, definitive: true, summary })
}

fn taxonomy(
    family: &str,
    g: &GlobalOpts,
    alpha: Option<&Parameter>,
    family_wide: bool,
    config: &ScanConfig,
    cmd: CommandRecord,
) -> Result<Outcome> {
    let spec = function_family(family, g, config.seed)?;
    let warnings = vec!["labels are relative to the fixed sequence battery".to_string()];
    if family_wide {
        let r = classify_family(&spec, config)?;
        let points: Vec<_> = r.points.iter().map(|p| serde_json::json!({ "alpha": p.alpha, "label": p.label })).collect();
        let result = serde_json::json!({ "scope": "family", "label": r.label, "points": points });
        let summary = format!("{}: {}", spec.id, serde_json::to_value(r.label)?.as_str().unwrap_or("?"));
        let definitive = r.label != FamilyLabel::Mixed;
        let report = Report::new(spec.summary(), config, cmd, result, &r, warnings)?;
        return Ok(Outcome { report, definitive, summary });
    }
    let a = alpha.ok_or_else(|| Error::Precondition("taxonomy needs --alpha or --family".into()))?;
    let r = classify_point(&spec, a, config)?;
    let result = serde_json::json!({
        "scope": "point",
        "alpha": r.alpha,
        "label": r.label,
        "exceptional_class": r.exceptional_class,
        "divergent_fraction": r.divergent_fraction,
    });
    let summary = format!("{} at {a}: {}", spec.id, serde_json::to_value(r.label)?.as_str().unwrap_or("?"));
    let definitive = r.label != PointLabel::Inconclusive;
    let report = Report::new(spec.summary(), config, cmd, result, &r, warnings)?;
    Ok(Outcome { report, definitive, summary })
}

/// Result of re-running a stored report's command with its embedded config.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayOutcome {
    pub exit_code: i32,
    pub identical: bool,
    pub replayed: Vec<u8>,
}

/// Re-runs the command recorded in `report_path` with `--config report_path`
/// and compares the new report byte-for-byte.
pub fn replay_report(report_path: &Path) -> Result<ReplayOutcome> {
    let original = std::fs::read(report_path)?;
    let report = Report::from_bytes(&original)?;
    let mut argv = vec!["chaoscope".to_string()];
    argv.extend(report.command.args.iter().cloned());
    argv.push("--config".into());
    argv.push(report_path.to_string_lossy().into_owned());
    let mut out = Vec::new();
    let mut err = Vec::new();
    let exit_code = run(&argv, &mut out, &mut err);
    if exit_code == EXIT_USAGE || exit_code == EXIT_EVAL {
        return Err(Error::Precondition(format!(
            "replay failed with exit code {exit_code}: {}",
            String::from_utf8_lossy(&err).trim()
        )));
    }
    Ok(ReplayOutcome { exit_code, identical: out == original, replayed: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["chaoscope"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn list_variants() {
        let (code, out, _) = run_str(&["list"]);
        assert_eq!(code, 0);
        assert!(out.contains("sin_ax") && out.contains("logistic_357"));
        let (_, out, _) = run_str(&["list", "--json"]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v.as_array().unwrap().len() >= 14);
        let (_, out, _) = run_str(&["list", "--kind", "discrete", "--json"]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v.as_array().unwrap().iter().all(|e| e["kind"] == "discrete"));
    }

    #[test]
    fn usage_errors_exit_1() {
        assert_eq!(run_str(&["classify", "no_such_family", "--range", "0:1"]).0, 1);
        assert_eq!(run_str(&["classify", "sin_ax"]).0, 1);
        assert_eq!(run_str(&["bogus"]).0, 1);
        assert_eq!(run_str(&["windows", "sin_ax", "--alpha", "1", "--beta", "1", "--range", "0:1"]).0, 1);
        assert_eq!(run_str(&["classify", "sin_ax", "--range", "0:500", "--config", "/nonexistent/c.json"]).0, 1);
    }

    #[test]
    fn evaluation_error_exits_2() {
        let (code, _, err) = run_str(&["windows", "ln_user", "--expr", "ln(x - a)", "--alpha", "1", "--beta", "2", "--range", "0:3"]);
        assert_eq!(code, 2, "{err}");
    }

    #[test]
    fn replay_args_strip_paths() {
        let a: Vec<String> = ["classify", "x", "--out", "r.json", "--config=c.json", "--range", "-1:1"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(replay_args(&a), vec!["classify", "x", "--range", "-1:1"]);
    }

    #[test]
    fn negative_range_parses() {
        let (code, out, err) = run_str(&[
            "windows", "sin_ax", "--alpha", "1", "--beta", "2", "--range", "-3:3", "--kind", "cross", "--eps", "0.5",
        ]);
        assert_eq!(code, 0, "{err}");
        let r: Report = Report::from_bytes(out.as_bytes()).unwrap();
        assert!(r.result["crossing_count"].as_u64().unwrap() >= 3);
    }
}
