//! Experiment configuration: the flag set every subcommand shares, the text
//! forms for symbols and test functions, and the validation that turns a
//! config into typed inputs.

use serde::{Deserialize, Serialize};

use tzl_core::basis::P_MAX;
use tzl_core::geometry::ChartPoint;
use tzl_core::spectra::Symbol;
use tzl_core::stats::TestFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Spectrum,
    SampleZeros,
    Histogram,
    Clt,
    Variance,
    Expectation,
    Hole,
    Mass,
    KernelCheck,
    Selftest,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Spectrum => "spectrum",
            CommandKind::SampleZeros => "sample-zeros",
            CommandKind::Histogram => "histogram",
            CommandKind::Clt => "clt",
            CommandKind::Variance => "variance",
            CommandKind::Expectation => "expectation",
            CommandKind::Hole => "hole",
            CommandKind::Mass => "mass",
            CommandKind::KernelCheck => "kernel-check",
            CommandKind::Selftest => "selftest",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

fn default_symbol() -> String {
    "const:1".into()
}
fn default_bins() -> usize {
    50
}
fn default_phi() -> String {
    "bump:1:1".into()
}
fn default_out() -> String {
    ".".into()
}
fn default_threads() -> usize {
    1
}

/// One experiment, fully determined. Rerunning an identical config under
/// `--threads 1` reproduces every artifact byte for byte; the manifest holds
/// exactly this struct, so a run can be replayed from its own run.json.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    #[serde(default = "default_symbol")]
    pub symbol: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_list: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Repetition count, named after the repeat loop of the histogram
    /// experiments; interchangeable with `trials`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rn: Option<usize>,
    /// Target total zero count; resolves to rn = total/p and must divide.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_zeros: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default = "default_phi")]
    pub phi: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart_radius: Option<f64>,
    /// Kernel probe base point as "re,im".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    /// Kernel near-diagonal offsets c (probe at c/sqrt(p)), comma separated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offsets: Option<String>,
    #[serde(default = "default_out")]
    pub out: String,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default = "default_threads")]
    pub threads: usize,
}

/// `disc:1.0`, `power:3`, `expinv`, `const:1`.
pub fn parse_symbol(text: &str) -> Result<Symbol, String> {
    let (name, arg) = match text.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (text, None),
    };
    let sym = match (name, arg) {
        ("const", Some(a)) => Symbol::Constant(parse_f64(a, "const level")?),
        ("power", Some(a)) => Symbol::PowerVanish(
            a.parse::<u32>()
                .map_err(|_| format!("bad vanishing order '{a}'"))?,
        ),
        ("expinv", None) => Symbol::ExpInverse,
        ("disc", Some(a)) => Symbol::DiscIndicator(parse_f64(a, "disc radius")?),
        _ => {
            return Err(format!(
                "unknown symbol '{text}' (expected const:C, power:K, expinv, or disc:R)"
            ))
        }
    };
    sym.validate().map_err(|e| e.to_string())?;
    Ok(sym)
}

/// `bump`, `bump:RHO0`, `bump:RHO0:AMP`, `log`, `const:C`.
pub fn parse_phi(text: &str) -> Result<TestFunction, String> {
    let mut parts = text.split(':');
    let phi = match parts.next() {
        Some("bump") => {
            let rho0 = match parts.next() {
                Some(a) => parse_f64(a, "bump radius")?,
                None => 1.0,
            };
            let amplitude = match parts.next() {
                Some(a) => parse_f64(a, "bump amplitude")?,
                None => 1.0,
            };
            TestFunction::RadialBump { rho0, amplitude }
        }
        Some("log") => TestFunction::LogProfile,
        Some("const") => {
            let c = parts
                .next()
                .ok_or_else(|| "const test function needs a level, e.g. const:0.7".to_string())?;
            TestFunction::Constant(parse_f64(c, "const level")?)
        }
        _ => {
            return Err(format!(
                "unknown test function '{text}' (expected bump[:RHO0[:AMP]], log, or const:C)"
            ))
        }
    };
    if parts.next().is_some() {
        return Err(format!("trailing fields in test function '{text}'"));
    }
    phi.validate().map_err(|e| e.to_string())?;
    Ok(phi)
}

fn parse_f64(text: &str, what: &str) -> Result<f64, String> {
    let v = text
        .parse::<f64>()
        .map_err(|_| format!("bad {what} '{text}'"))?;
    if !v.is_finite() {
        return Err(format!("{what} must be finite, got '{text}'"));
    }
    Ok(v)
}

/// Typed inputs after validation. `degrees` is a singleton for single-p
/// commands.
#[derive(Clone, Debug)]
pub struct ResolvedInputs {
    pub symbol: Symbol,
    pub phi: TestFunction,
    pub degrees: Vec<usize>,
    pub trials: Option<usize>,
    pub chart_radius: f64,
    pub base: ChartPoint,
    pub offsets: Vec<f64>,
}

pub fn resolve(config: &ExperimentConfig) -> Result<ResolvedInputs, String> {
    let symbol = parse_symbol(&config.symbol)?;
    let phi = parse_phi(&config.phi)?;

    let degrees = resolve_degrees(config)?;
    for &p in &degrees {
        if p > P_MAX {
            return Err(format!("p = {p} exceeds the degree cap {P_MAX}"));
        }
    }

    let trials = resolve_trials(config, &degrees)?;
    match config.command {
        CommandKind::SampleZeros | CommandKind::Histogram | CommandKind::Hole => {
            if trials.is_none() {
                return Err("this command needs --trials, --rn, or --total-zeros".into());
            }
        }
        CommandKind::Clt | CommandKind::Variance | CommandKind::Expectation => match trials {
            None => return Err("this command needs --trials, --rn, or --total-zeros".into()),
            Some(t) if t < 2 => return Err("need at least 2 trials for sample moments".into()),
            _ => {}
        },
        _ => {}
    }
    if config.command == CommandKind::Histogram && config.bins == 0 {
        return Err("--bins must be positive".into());
    }
    if config.command == CommandKind::Mass && degrees[0] == 0 {
        return Err("mass runs need p >= 1".into());
    }

    let chart_radius = match config.chart_radius {
        Some(r) if r > 0.0 => r,
        Some(r) => return Err(format!("chart radius must be positive, got {r}")),
        None => 0.3,
    };
    let base = match &config.base {
        Some(text) => parse_base(text)?,
        None => ChartPoint::new(0.0, 0.0),
    };
    let offsets = match &config.offsets {
        Some(text) => parse_offsets(text)?,
        None => vec![0.5, 1.0, 2.0],
    };

    Ok(ResolvedInputs {
        symbol,
        phi,
        degrees,
        trials,
        chart_radius,
        base,
        offsets,
    })
}

fn resolve_degrees(config: &ExperimentConfig) -> Result<Vec<usize>, String> {
    let multi = matches!(config.command, CommandKind::Hole | CommandKind::KernelCheck);
    match (&config.p, &config.p_list) {
        (Some(_), Some(_)) => Err("give --p or --p-list, not both".into()),
        (Some(p), None) => Ok(vec![*p]),
        (None, Some(list)) if multi => {
            if list.is_empty() {
                Err("--p-list is empty".into())
            } else {
                Ok(list.clone())
            }
        }
        (None, Some(_)) => Err("this command takes a single --p".into()),
        (None, None) => {
            if config.command == CommandKind::Selftest {
                Ok(vec![0])
            } else {
                Err("missing --p".into())
            }
        }
    }
}

fn resolve_trials(config: &ExperimentConfig, degrees: &[usize]) -> Result<Option<usize>, String> {
    let given = [config.trials, config.rn, config.total_zeros]
        .iter()
        .flatten()
        .count();
    if given > 1 {
        return Err("give at most one of --trials, --rn, --total-zeros".into());
    }
    if let Some(t) = config.trials.or(config.rn) {
        return Ok(Some(t));
    }
    if let Some(total) = config.total_zeros {
        if degrees.len() != 1 {
            return Err("--total-zeros needs a single --p".into());
        }
        let p = degrees[0];
        if p == 0 {
            return Err("--total-zeros needs p >= 1".into());
        }
        if total == 0 || total % p != 0 {
            return Err(format!(
                "total zeros {total} is not a positive multiple of p = {p}"
            ));
        }
        return Ok(Some(total / p));
    }
    Ok(None)
}

fn parse_base(text: &str) -> Result<ChartPoint, String> {
    let (re, im) = text
        .split_once(',')
        .ok_or_else(|| format!("base point '{text}' should be 're,im'"))?;
    Ok(ChartPoint::new(
        parse_f64(re.trim(), "base re")?,
        parse_f64(im.trim(), "base im")?,
    ))
}

fn parse_offsets(text: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let c = parse_f64(part.trim(), "offset")?;
        if c <= 0.0 {
            return Err(format!("offsets must be positive, got {c}"));
        }
        out.push(c);
    }
    if out.is_empty() {
        return Err("empty offset list".into());
    }
    Ok(out)
}

/// `--seed` accepts a 64-bit integer or `random`, which draws the seed from
/// OS entropy once so the manifest still records a concrete value.
pub fn parse_seed(text: &str) -> Result<u64, String> {
    if text == "random" {
        return Ok(entropy_seed());
    }
    text.parse::<u64>()
        .map_err(|_| format!("bad seed '{text}' (expected a 64-bit integer or 'random')"))
}

fn entropy_seed() -> u64 {
    use std::hash::{BuildHasher, Hasher};
    let nanos = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0);
    let mut h = std::collections::hash_map::RandomState::new().build_hasher();
    h.write_u64(nanos);
    h.write_u32(std::process::id());
    h.finish()
}

/// Flag > environment > 1. `TZL_THREADS` must be a positive integer.
pub fn resolve_threads(flag: Option<usize>) -> Result<usize, String> {
    if let Some(t) = flag {
        if t == 0 {
            return Err("--threads must be positive".into());
        }
        return Ok(t);
    }
    match std::env::var("TZL_THREADS") {
        Ok(v) => match v.parse::<usize>() {
            Ok(t) if t > 0 => Ok(t),
            _ => Err(format!("bad TZL_THREADS value '{v}'")),
        },
        Err(_) => Ok(1),
    }
}
