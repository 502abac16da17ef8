//! Flat `section.key = value` experiment configuration.
//!
//! Every key is declared in [`SCHEMA`] with its type and default. Parsing
//! collects every problem it finds instead of stopping at the first one, and
//! the resolved config lists each key with its final value so that a run
//! manifest never hides a default.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{ConfigIssue, QhdError, Result};
use crate::potential::REGISTRY;

/// Subcommands of the batch runner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Optimize,
    Estimate,
    Bounds,
    Sweep,
    BaselineTable,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Simulate,
        Command::Optimize,
        Command::Estimate,
        Command::Bounds,
        Command::Sweep,
        Command::BaselineTable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Optimize => "optimize",
            Command::Estimate => "estimate",
            Command::Bounds => "bounds",
            Command::Sweep => "sweep",
            Command::BaselineTable => "baseline-table",
        }
    }

    pub fn parse(s: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    Float,
    Int,
    Bool,
    Choice(&'static [&'static str]),
    Text,
    FloatList,
    IntList,
    /// A float or the word `auto`.
    FloatOrAuto,
    /// An integer or the word `auto`.
    IntOrAuto,
}

impl Kind {
    fn describe(self) -> String {
        match self {
            Kind::Float => "a number".into(),
            Kind::Int => "an integer".into(),
            Kind::Bool => "true or false".into(),
            Kind::Choice(c) => format!("one of {}", c.join(", ")),
            Kind::Text => "text".into(),
            Kind::FloatList => "a comma-separated list of numbers".into(),
            Kind::IntList => "a comma-separated list of integers".into(),
            Kind::FloatOrAuto => "a number or 'auto'".into(),
            Kind::IntOrAuto => "an integer or 'auto'".into(),
        }
    }

    pub fn is_numeric(self) -> bool {
        matches!(self, Kind::Float | Kind::Int | Kind::FloatOrAuto | Kind::IntOrAuto)
    }
}

pub struct KeySpec {
    pub key: &'static str,
    pub kind: Kind,
    /// `None` means the key has no default (required where used, or unset).
    pub default: Option<&'static str>,
    pub help: &'static str,
}

const POTENTIALS: &[&str] = &[
    "quadratic",
    "abs_l1",
    "max_abs",
    "huber",
    "rosenbrock_convexified",
    "free",
];

const COMMANDS: &[&str] = &[
    "simulate",
    "optimize",
    "estimate",
    "bounds",
    "sweep",
    "baseline-table",
];

const fn k(key: &'static str, kind: Kind, default: Option<&'static str>, help: &'static str) -> KeySpec {
    KeySpec {
        key,
        kind,
        default,
        help,
    }
}

/// All recognised keys.
pub const SCHEMA: &[KeySpec] = &[
    k("command", Kind::Choice(COMMANDS), None, "subcommand; normally given on the command line"),
    k("seed", Kind::Int, None, "master seed; required for optimize and noisy runs"),
    k("potential.name", Kind::Choice(POTENTIALS), None, "registry potential, or 'free' for f = 0"),
    k("potential.dim", Kind::Int, Some("1"), "dimension d"),
    k("potential.scale", Kind::Float, Some("1"), "multiplier a of the registry function"),
    k("potential.shift", Kind::FloatList, None, "minimizer location (default origin)"),
    k("potential.delta", Kind::Float, Some("0.1"), "huber threshold"),
    k("potential.kappa", Kind::Float, Some("4"), "valley weight of rosenbrock_convexified"),
    k("schedule.kind", Kind::Choice(&["exponential", "polynomial"]), None, "schedule family"),
    k("schedule.c", Kind::Float, Some("1"), "exponential rate c"),
    k("schedule.k", Kind::Float, None, "polynomial degree k"),
    k("schedule.t0", Kind::Float, None, "polynomial reference time t0"),
    k("schedule.m0", Kind::Float, Some("1"), "initial mass"),
    k("schedule.omega0", Kind::Float, Some("1"), "initial frequency"),
    k("schedule.lambda", Kind::Float, Some("1"), "scaling constant lambda"),
    k("grid.N", Kind::IntOrAuto, None, "half grid size N (power of two) or auto"),
    k("grid.R", Kind::Float, Some("4"), "half-width of the simulation box"),
    k("grid.center", Kind::FloatList, None, "box center (default origin)"),
    k("init.kind", Kind::Choice(&["gaussian", "plane_wave"]), Some("gaussian"), "initial state"),
    k("init.x0", Kind::FloatList, None, "Gaussian center (default box center)"),
    k("init.sigma", Kind::Float, Some("0.5"), "Gaussian width"),
    k("init.mode", Kind::IntList, None, "plane-wave mode n (default all ones)"),
    k("evolve.T", Kind::Float, None, "final time"),
    k("evolve.t_start", Kind::FloatOrAuto, Some("auto"), "start time (auto: schedule start)"),
    k("evolve.dt", Kind::Float, Some("0.001"), "initial (or fixed) step"),
    k("evolve.tol", Kind::Float, Some("1e-6"), "local error tolerance per unit time"),
    k("evolve.max_steps", Kind::Int, Some("5000000"), "step budget"),
    k("evolve.record_every", Kind::Int, Some("100"), "record cadence in accepted steps"),
    k("evolve.adaptive", Kind::Bool, Some("true"), "step-doubling control"),
    k("diagnostics.full", Kind::Bool, Some("true"), "record Lyapunov terms and leakage"),
    k("diagnostics.leakage_delta", Kind::Float, Some("0.05"), "inner-box margin for leakage"),
    k("fit.window", Kind::FloatList, None, "decay fit window (default last two thirds)"),
    k("optimize.eps", Kind::Float, None, "target accuracy"),
    k("optimize.repeats", Kind::Int, Some("1"), "best-of-K repeats"),
    k("optimize.potential", Kind::Choice(POTENTIALS), None, "objective (default potential.name)"),
    k("optimize.x0", Kind::FloatList, None, "center of the search ball"),
    k("optimize.R", Kind::Float, None, "radius of the search ball"),
    k("optimize.noise_mode", Kind::Choice(&["exact", "binary"]), Some("exact"), "oracle model"),
    k("optimize.eps_f", Kind::FloatOrAuto, Some("auto"), "oracle error (auto: half the budget)"),
    k("optimize.seed", Kind::Int, None, "seed for this block (default: seed)"),
    k("optimize.N", Kind::IntOrAuto, Some("auto"), "grid size (auto: error-analysis rule)"),
    k("optimize.memory_budget", Kind::Int, Some("16777216"), "cap on (2N)^d"),
    k("optimize.sigma", Kind::FloatOrAuto, Some("auto"), "initial width (auto: R/sqrt(d))"),
    k("optimize.tol", Kind::Float, Some("1e-6"), "evolution tolerance"),
    k("estimate.d", Kind::Int, Some("2"), "dimension"),
    k("estimate.N", Kind::Int, Some("64"), "half grid size"),
    k("estimate.a_l1", Kind::Float, Some("1"), "integral of the kinetic coefficient"),
    k("estimate.b_l1", Kind::Float, Some("100"), "integral of the potential coefficient"),
    k("estimate.Lambda", Kind::Float, Some("10"), "bound on |f| over the box"),
    k("estimate.eps", Kind::Float, Some("0.001"), "simulation accuracy"),
    k("estimate.G", Kind::Float, Some("1"), "Lipschitz constant"),
    k("estimate.R", Kind::Float, Some("1"), "search radius"),
    k("estimate.eps_opt", Kind::Float, Some("0.1"), "optimization accuracy for the query table"),
    k("bounds.d", Kind::Int, Some("1"), "dimension"),
    k("bounds.N", Kind::Int, Some("64"), "half grid size"),
    k("bounds.m", Kind::Int, Some("3"), "Sobolev order"),
    k("bounds.sobolev", Kind::Float, Some("1"), "Sobolev seminorm of the state"),
    k("bounds.a_l1", Kind::Float, Some("1"), "integral of the kinetic coefficient"),
    k("bounds.b_l1", Kind::Float, Some("10"), "integral of the potential coefficient"),
    k("bounds.G", Kind::Float, Some("1"), "Lipschitz constant"),
    k("bounds.R", Kind::Float, Some("1"), "search radius"),
    k("bounds.eps", Kind::Float, Some("0.1"), "accuracy"),
    k("bounds.Lambda_f", Kind::FloatOrAuto, Some("auto"), "lower-bound parameter (auto: sqrt(d))"),
    k("baseline.d", Kind::IntList, Some("16,32,64,128,256,512,1024"), "dimensions"),
    k("baseline.G", Kind::Float, Some("1"), "Lipschitz constant"),
    k("baseline.R", Kind::Float, Some("1"), "search radius"),
    k("baseline.eps", Kind::FloatOrAuto, Some("auto"), "accuracy (auto: 1/sqrt(d))"),
    k("sweep.command", Kind::Choice(&["simulate", "optimize", "estimate", "bounds"]), Some("simulate"), "experiment per row"),
    k("sweep.key", Kind::Text, None, "numeric key to vary"),
    k("sweep.values", Kind::FloatList, None, "values of the swept key"),
    k("output.dir", Kind::Text, Some("out"), "artifact directory"),
];

pub fn key_spec(key: &str) -> Option<&'static KeySpec> {
    SCHEMA.iter().find(|s| s.key == key)
}

/// A typed config value.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    FloatList(Vec<f64>),
    IntList(Vec<i64>),
    Auto,
}

/// Shortest round-trip text of `v`, in exponent form when the plain decimal
/// would be very long.
pub fn format_float(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e16).contains(&a) || !a.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join(v: impl Iterator<Item = String>) -> String {
            v.collect::<Vec<_>>().join(",")
        }
        match self {
            Value::Float(v) => write!(f, "{}", format_float(*v)),
            Value::Int(v) => write!(f, "{v}"),
            Value::Bool(v) => write!(f, "{v}"),
            Value::Text(v) => write!(f, "{v}"),
            Value::FloatList(v) => write!(f, "{}", join(v.iter().map(|x| format_float(*x)))),
            Value::IntList(v) => write!(f, "{}", join(v.iter().map(|x| x.to_string()))),
            Value::Auto => write!(f, "auto"),
        }
    }
}

fn parse_value(kind: Kind, raw: &str) -> std::result::Result<Value, String> {
    let bad = || format!("expected {}, got '{raw}'", kind.describe());
    let float = |s: &str| s.trim().parse::<f64>().ok().filter(|v| v.is_finite());
    let int = |s: &str| s.trim().parse::<i64>().ok();
    match kind {
        Kind::Float => float(raw).map(Value::Float).ok_or_else(bad),
        Kind::Int => int(raw).map(Value::Int).ok_or_else(bad),
        Kind::Bool => match raw {
            "true" => Ok(Value::Bool(true)),
            "false" => Ok(Value::Bool(false)),
            _ => Err(bad()),
        },
        Kind::Choice(options) => {
            if options.contains(&raw) {
                Ok(Value::Text(raw.to_string()))
            } else {
                Err(bad())
            }
        }
        Kind::Text => Ok(Value::Text(raw.to_string())),
        Kind::FloatList => {
            if raw.is_empty() {
                return Ok(Value::FloatList(Vec::new()));
            }
            raw.split(',')
                .map(|s| float(s))
                .collect::<Option<Vec<_>>>()
                .map(Value::FloatList)
                .ok_or_else(bad)
        }
        Kind::IntList => {
            if raw.is_empty() {
                return Ok(Value::IntList(Vec::new()));
            }
            raw.split(',')
                .map(|s| int(s))
                .collect::<Option<Vec<_>>>()
                .map(Value::IntList)
                .ok_or_else(bad)
        }
        Kind::FloatOrAuto if raw == "auto" => Ok(Value::Auto),
        Kind::FloatOrAuto => float(raw).map(Value::Float).ok_or_else(bad),
        Kind::IntOrAuto if raw == "auto" => Ok(Value::Auto),
        Kind::IntOrAuto => int(raw).map(Value::Int).ok_or_else(bad),
    }
}

/// A validated configuration: every schema key with a default or an
/// explicit value is present.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Option<Command>,
    values: BTreeMap<&'static str, Value>,
    explicit: BTreeSet<&'static str>,
}

impl ExperimentConfig {
    pub fn get(&self, key: &str) -> Option<&Value> {
        self.values.get(key)
    }

    pub fn is_explicit(&self, key: &str) -> bool {
        self.explicit.contains(key)
    }

    fn missing(key: &str) -> QhdError {
        QhdError::Config(vec![ConfigIssue {
            line: None,
            key: key.to_string(),
            message: "required key is missing".into(),
        }])
    }

    fn wrong(key: &str, want: &str) -> QhdError {
        QhdError::Config(vec![ConfigIssue {
            line: None,
            key: key.to_string(),
            message: format!("expected {want}"),
        }])
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        match self.get(key) {
            Some(Value::Float(v)) => Ok(*v),
            Some(Value::Int(v)) => Ok(*v as f64),
            Some(_) => Err(Self::wrong(key, "a number")),
            None => Err(Self::missing(key)),
        }
    }

    /// `None` for `auto` or an unset key.
    pub fn f64_or_auto(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            Some(Value::Auto) | None => Ok(None),
            _ => self.f64(key).map(Some),
        }
    }

    pub fn int(&self, key: &str) -> Result<i64> {
        match self.get(key) {
            Some(Value::Int(v)) => Ok(*v),
            Some(_) => Err(Self::wrong(key, "an integer")),
            None => Err(Self::missing(key)),
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        let v = self.int(key)?;
        usize::try_from(v).map_err(|_| Self::wrong(key, "a nonnegative integer"))
    }

    pub fn usize_or_auto(&self, key: &str) -> Result<Option<usize>> {
        match self.get(key) {
            Some(Value::Auto) | None => Ok(None),
            _ => self.usize(key).map(Some),
        }
    }

    pub fn bool(&self, key: &str) -> Result<bool> {
        match self.get(key) {
            Some(Value::Bool(v)) => Ok(*v),
            Some(_) => Err(Self::wrong(key, "a boolean")),
            None => Err(Self::missing(key)),
        }
    }

    pub fn text(&self, key: &str) -> Result<&str> {
        match self.get(key) {
            Some(Value::Text(v)) => Ok(v),
            Some(_) => Err(Self::wrong(key, "text")),
            None => Err(Self::missing(key)),
        }
    }

    pub fn opt_text(&self, key: &str) -> Option<&str> {
        match self.get(key) {
            Some(Value::Text(v)) => Some(v),
            _ => None,
        }
    }

    pub fn floats(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.get(key) {
            Some(Value::FloatList(v)) => Ok(Some(v.clone())),
            Some(_) => Err(Self::wrong(key, "a list of numbers")),
            None => Ok(None),
        }
    }

    pub fn ints(&self, key: &str) -> Result<Option<Vec<i64>>> {
        match self.get(key) {
            Some(Value::IntList(v)) => Ok(Some(v.clone())),
            Some(_) => Err(Self::wrong(key, "a list of integers")),
            None => Ok(None),
        }
    }

    /// Replaces one value, re-validating the whole config.
    pub fn with_override(&self, key: &str, raw: &str) -> Result<ExperimentConfig> {
        parse_config_with(&self.to_text(), &[format!("{key}={raw}")]).map_err(QhdError::Config)
    }

    /// Explicitly set keys as config text (defaults are re-derived on parse).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for key in &self.explicit {
            out.push_str(&format!("{key} = {}\n", self.values[key]));
        }
        out
    }

    /// Every resolved key, sorted, as `key = value` lines. Keys without a
    /// value are listed as `unset`.
    pub fn resolved_lines(&self) -> Vec<String> {
        let mut keys: Vec<&str> = SCHEMA.iter().map(|s| s.key).collect();
        keys.sort_unstable();
        keys.into_iter()
            .map(|key| match self.values.get(key) {
                Some(v) => {
                    let origin = if self.explicit.contains(key) { "" } else { "  # default" };
                    format!("{key} = {v}{origin}")
                }
                None => format!("{key} = unset"),
            })
            .collect()
    }
}

/// Parses config text. Returns every problem found.
pub fn parse_config(text: &str) -> std::result::Result<ExperimentConfig, Vec<ConfigIssue>> {
    parse_config_with(text, &[])
}

/// Parses config text followed by `key=value` overrides (which may replace
/// keys from the text).
pub fn parse_config_with(
    text: &str,
    overrides: &[String],
) -> std::result::Result<ExperimentConfig, Vec<ConfigIssue>> {
    let mut issues = Vec::new();
    let mut raw: BTreeMap<&'static str, (Option<usize>, String)> = BTreeMap::new();
    let mut issue = |line: Option<usize>, key: &str, message: String| {
        issues.push(ConfigIssue {
            line,
            key: key.to_string(),
            message,
        })
    };

    for (idx, line) in text.lines().enumerate() {
        let lineno = Some(idx + 1);
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            issue(lineno, "", format!("expected 'key = value', got '{content}'"));
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        match key_spec(key) {
            None => issue(lineno, key, "unknown key".into()),
            Some(spec) => {
                if raw.insert(spec.key, (lineno, value.to_string())).is_some() {
                    issue(lineno, key, "duplicate key".into());
                }
            }
        }
    }
    for o in overrides {
        let Some((key, value)) = o.split_once('=') else {
            issue(None, o, "override must look like key=value".into());
            continue;
        };
        match key_spec(key.trim()) {
            None => issue(None, key.trim(), "unknown key".into()),
            Some(spec) => {
                raw.insert(spec.key, (None, value.trim().to_string()));
            }
        }
    }

    let mut values = BTreeMap::new();
    let mut explicit = BTreeSet::new();
    for spec in SCHEMA {
        if let Some((line, text)) = raw.get(spec.key) {
            match parse_value(spec.kind, text) {
                Ok(v) => {
                    values.insert(spec.key, v);
                    explicit.insert(spec.key);
                }
                Err(msg) => issue(*line, spec.key, msg),
            }
        } else if let Some(d) = spec.default {
            values.insert(spec.key, parse_value(spec.kind, d).expect("schema defaults parse"));
        }
    }
    let line_of = |key: &str| raw.get(key).and_then(|(l, _)| *l);

    let command = match values.get("command") {
        Some(Value::Text(c)) => Command::parse(c),
        _ => None,
    };
    let has = |key: &str| values.contains_key(key);
    let require = |key: &str, why: &str, issues: &mut Vec<ConfigIssue>| {
        if !has(key) {
            issues.push(ConfigIssue {
                line: None,
                key: key.to_string(),
                message: format!("required {why}"),
            });
        }
    };

    // Schedule family requirements apply whenever a schedule is given.
    if let Some(Value::Text(kind)) = values.get("schedule.kind") {
        if kind == "polynomial" {
            require("schedule.t0", "for schedule.kind = polynomial", &mut issues);
            require("schedule.k", "for schedule.kind = polynomial", &mut issues);
        }
    }
    let sweep_command = match values.get("sweep.command") {
        Some(Value::Text(c)) => Command::parse(c),
        _ => None,
    };
    let effective = match command {
        Some(Command::Sweep) => sweep_command,
        c => c,
    };
    match effective {
        Some(Command::Simulate) => {
            for key in ["potential.name", "schedule.kind", "grid.N", "evolve.T"] {
                require(key, "by simulate", &mut issues);
            }
        }
        Some(Command::Optimize) => {
            if !has("optimize.potential") && !has("potential.name") {
                require("optimize.potential", "by optimize", &mut issues);
            }
            for key in ["optimize.eps", "optimize.x0", "optimize.R"] {
                require(key, "by optimize", &mut issues);
            }
            if !has("seed") && !has("optimize.seed") {
                require("seed", "for optimize (measurement is random)", &mut issues);
            }
        }
        _ => {}
    }
    if command == Some(Command::Sweep) {
        require("sweep.key", "by sweep", &mut issues);
        require("sweep.values", "by sweep", &mut issues);
        if let Some(Value::Text(key)) = values.get("sweep.key") {
            match key_spec(key) {
                Some(spec) if spec.kind.is_numeric() => {}
                Some(_) => issues.push(ConfigIssue {
                    line: line_of("sweep.key"),
                    key: "sweep.key".into(),
                    message: format!("'{key}' is not a numeric key"),
                }),
                None => issues.push(ConfigIssue {
                    line: line_of("sweep.key"),
                    key: "sweep.key".into(),
                    message: format!("'{key}' is not a known key"),
                }),
            }
        }
    }

    // Cross-field checks.
    let dim = match values.get("potential.dim") {
        Some(Value::Int(d)) => *d,
        _ => 1,
    };
    if !(1..=4).contains(&dim) {
        issues.push(ConfigIssue {
            line: line_of("potential.dim"),
            key: "potential.dim".into(),
            message: format!("dimension must be between 1 and 4, got {dim}"),
        });
    }
    for key in ["potential.shift", "grid.center", "init.x0"] {
        if let Some(Value::FloatList(v)) = values.get(key) {
            if v.len() as i64 != dim {
                issues.push(ConfigIssue {
                    line: line_of(key),
                    key: key.into(),
                    message: format!("expected {dim} coordinates, got {}", v.len()),
                });
            }
        }
    }
    if let Some(Value::IntList(v)) = values.get("init.mode") {
        if v.len() as i64 != dim {
            issues.push(ConfigIssue {
                line: line_of("init.mode"),
                key: "init.mode".into(),
                message: format!("expected {dim} mode indices, got {}", v.len()),
            });
        }
    }
    if let Some(Value::Int(n)) = values.get("grid.N") {
        if *n < 1 || !(*n as u64).is_power_of_two() {
            issues.push(ConfigIssue {
                line: line_of("grid.N"),
                key: "grid.N".into(),
                message: format!("N must be a positive power of two, got {n}"),
            });
        }
    }
    if let Some(Value::FloatList(w)) = values.get("fit.window") {
        if w.len() != 2 || !(w[0] < w[1]) {
            issues.push(ConfigIssue {
                line: line_of("fit.window"),
                key: "fit.window".into(),
                message: "expected two increasing times".into(),
            });
        }
    }
    if let Some(Value::Text(name)) = values.get("optimize.potential") {
        debug_assert!(name == "free" || REGISTRY.contains(&name.as_str()));
    }

    if issues.is_empty() {
        Ok(ExperimentConfig {
            command,
            values,
            explicit,
        })
    } else {
        issues.sort_by_key(|i| (i.line.unwrap_or(usize::MAX), i.key.clone()));
        Err(issues)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "command = simulate\npotential.name = quadratic\nschedule.kind = exponential\nschedule.c = 1\ngrid.N = 64\nevolve.T = 3\n";

    #[test]
    fn minimal_simulate_is_valid() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.command, Some(Command::Simulate));
        assert_eq!(c.usize_or_auto("grid.N").unwrap(), Some(64));
        assert_eq!(c.f64("evolve.tol").unwrap(), 1e-6);
        assert!(c.is_explicit("evolve.T"));
        assert!(!c.is_explicit("evolve.tol"));
        assert!(c.resolved_lines().iter().any(|l| l == "evolve.tol = 1e-6  # default"));
    }

    #[test]
    fn polynomial_needs_t0() {
        let text = MINIMAL.replace("schedule.kind = exponential", "schedule.kind = polynomial\nschedule.k = 2");
        let issues = parse_config(&text).unwrap_err();
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].key, "schedule.t0");
    }

    #[test]
    fn errors_accumulate() {
        let text = format!("{MINIMAL}bogus.key = 1\nevolve.dt = fast\n");
        let issues = parse_config(&text).unwrap_err();
        assert_eq!(issues.len(), 2);
        assert_eq!(issues[0].line, Some(7));
        assert_eq!(issues[0].key, "bogus.key");
        assert_eq!(issues[1].key, "evolve.dt");
        assert_eq!(issues[1].line, Some(8));
    }

    #[test]
    fn overrides_replace_values() {
        let c = parse_config_with(MINIMAL, &["grid.N=32".into()]).unwrap();
        assert_eq!(c.usize_or_auto("grid.N").unwrap(), Some(32));
        let c2 = c.with_override("evolve.T", "1.5").unwrap();
        assert_eq!(c2.f64("evolve.T").unwrap(), 1.5);
        assert!(c.with_override("grid.N", "12").is_err());
    }

    #[test]
    fn optimize_requires_seed() {
        let text = "command = optimize\npotential.name = quadratic\noptimize.eps = 0.1\noptimize.x0 = 0.5\noptimize.R = 1\n";
        let issues = parse_config(text).unwrap_err();
        assert!(issues.iter().any(|i| i.key == "seed"));
        assert!(parse_config(&format!("{text}seed = 3\n")).is_ok());
    }

    #[test]
    fn sweep_key_must_be_numeric() {
        let text = format!("{MINIMAL}sweep.key = potential.name\nsweep.values = 1,2\n").replace("command = simulate", "command = sweep");
        let issues = parse_config(&text).unwrap_err();
        assert!(issues.iter().any(|i| i.key == "sweep.key"));
    }
}
