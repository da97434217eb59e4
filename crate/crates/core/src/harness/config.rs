//! Experiment configuration: a flat `key = value` file overlaid by command-line
//! flags.
//!
//! Recognized keys (case-insensitive, `-` and `_` interchangeable):
//!
//! | key | value |
//! |---|---|
//! | `delta_e`, `delta_eps`, `lambda`, `beta` | real numbers |
//! | `n` | comma list of environment sizes, each `>= 2` |
//! | `seed` | unsigned 64-bit integer |
//! | `env_init` | `superposition`, `thermal` or `both` |
//! | `trace` | `perez`, `staircase` or `both` |
//! | `times` | comma list of times or `start:stop:step` ranges |
//! | `system_source` | `true` or `fragment` |
//! | `search_samples`, `refine_iters`, `restarts` | axis search budget |
//! | `fragment_samples` | fragments drawn per size when enumeration is too large |
//! | `ensemble` | number of coupling realizations to average over |
//! | `format` | `csv` or `json` |
//! | `output` | output path |
//! | `jobs` | worker thread cap |

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fragment::{TraceMethod, DEFAULT_FRAGMENT_SAMPLES};
use crate::infometrics::SystemSource;
use crate::model::{EnvInit, ModelParams};
use crate::search::SearchBudget;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Evolution,
    MiSweep,
    InfoDecomposition,
    SbsSweep,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Evolution => "evolution",
            Experiment::MiSweep => "mi_sweep",
            Experiment::InfoDecomposition => "info_decomp",
            Experiment::SbsSweep => "sbs_sweep",
        }
    }

    /// Default time points: a unit-step grid on `[0, 500]` for the series,
    /// a few late snapshots for the mutual-information sweep, `t = 500` otherwise.
    pub fn default_times(self) -> Vec<f64> {
        match self {
            Experiment::Evolution => (0..=500).map(f64::from).collect(),
            Experiment::MiSweep => vec![300.0, 400.0, 500.0],
            Experiment::InfoDecomposition | Experiment::SbsSweep => vec![500.0],
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Base parameters; `n` and `env_init` hold the first entries of the lists below.
    pub params: ModelParams,
    pub env_sizes: Vec<usize>,
    pub env_inits: Vec<EnvInit>,
    pub trace_methods: Vec<TraceMethod>,
    pub times: Vec<f64>,
    pub system_source: SystemSource,
    pub search: SearchBudget,
    pub fragment_samples: usize,
    pub ensemble: usize,
    #[serde(skip)]
    pub format: OutputFormat,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[serde(skip)]
    pub jobs: Option<usize>,
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let params = ModelParams::default();
        Self {
            experiment,
            env_sizes: vec![params.n],
            env_inits: vec![params.env_init],
            params,
            trace_methods: vec![TraceMethod::Perez, TraceMethod::Staircase],
            times: experiment.default_times(),
            system_source: SystemSource::TrueSystem,
            search: SearchBudget::default(),
            fragment_samples: DEFAULT_FRAGMENT_SAMPLES,
            ensemble: 1,
            format: OutputFormat::Csv,
            output: None,
            jobs: None,
        }
    }

    /// Parameters for one `(N, env_init)` combination.
    pub fn params_for(&self, n: usize, env_init: EnvInit) -> ModelParams {
        ModelParams {
            n,
            env_init,
            ..self.params.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.env_sizes.is_empty() {
            return Err(Error::config("at least one environment size is required"));
        }
        for &n in &self.env_sizes {
            self.params_for(n, self.params.env_init).validate()?;
        }
        if self.env_inits.is_empty() {
            return Err(Error::config(
                "at least one environment initial state is required",
            ));
        }
        if self.trace_methods.is_empty() {
            return Err(Error::config("at least one trace method is required"));
        }
        if self.times.is_empty() {
            return Err(Error::config("times must be nonempty"));
        }
        if let Some(t) = self.times.iter().find(|t| !t.is_finite() || **t < 0.0) {
            return Err(Error::config(format!(
                "times must be finite and >= 0, got {t}"
            )));
        }
        if self.experiment == Experiment::Evolution && self.times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::config("evolution times must be nondecreasing"));
        }
        if self.search.samples == 0 && self.search.refine_iters == 0 {
            return Err(Error::config(
                "search budget must allow at least one evaluation",
            ));
        }
        if self.fragment_samples == 0 {
            return Err(Error::config("fragment_samples must be >= 1"));
        }
        if self.ensemble == 0 {
            return Err(Error::config("ensemble must be >= 1"));
        }
        if self.jobs == Some(0) {
            return Err(Error::config("jobs must be >= 1"));
        }
        Ok(())
    }
}

/// A single command-line setting, applied after the config file.
#[derive(Clone, Debug)]
pub struct Override {
    pub flag: String,
    pub value: String,
}

impl Override {
    pub fn new(flag: impl Into<String>, value: impl ToString) -> Self {
        Self {
            flag: flag.into(),
            value: value.to_string(),
        }
    }
}

/// Where a setting came from, for error messages.
#[derive(Clone, Debug)]
enum Origin {
    Line(usize),
    Flag(String),
}

impl std::fmt::Display for Origin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Flag(name) => write!(f, "flag {name}"),
        }
    }
}

const KEYS: &[&str] = &[
    "delta_e",
    "delta_eps",
    "lambda",
    "beta",
    "n",
    "seed",
    "env_init",
    "trace",
    "times",
    "system_source",
    "search_samples",
    "refine_iters",
    "restarts",
    "fragment_samples",
    "ensemble",
    "format",
    "output",
    "jobs",
];

fn normalize_key(raw: &str) -> String {
    raw.trim()
        .trim_start_matches("--")
        .replace('-', "_")
        .to_lowercase()
}

fn known_key(key: &str, origin: &Origin) -> Result<()> {
    if KEYS.contains(&key) {
        Ok(())
    } else {
        Err(Error::config(format!("{origin}: unknown key `{key}`")))
    }
}

/// Parses the text of a config file into `key -> (value, line)`.
fn parse_file(text: &str) -> Result<BTreeMap<String, (String, Origin)>> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let origin = Origin::Line(idx + 1);
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::config(format!(
                "{origin}: expected `key = value`, got `{line}`"
            )));
        };
        let key = normalize_key(key);
        known_key(&key, &origin)?;
        if out.contains_key(&key) {
            return Err(Error::config(format!("{origin}: duplicate key `{key}`")));
        }
        out.insert(key, (value.trim().to_string(), origin));
    }
    Ok(out)
}

fn bad(origin: &Origin, key: &str, value: &str, why: impl std::fmt::Display) -> Error {
    Error::config(format!(
        "{origin}: invalid value `{value}` for `{key}`: {why}"
    ))
}

fn parse_num<T: std::str::FromStr>(origin: &Origin, key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse::<T>().map_err(|e| bad(origin, key, value, e))
}

fn parse_list<T>(
    origin: &Origin,
    key: &str,
    value: &str,
    item: impl Fn(&str) -> Result<Vec<T>>,
) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for part in value.split(',').map(str::trim) {
        if part.is_empty() {
            return Err(bad(origin, key, value, "empty list entry"));
        }
        out.extend(item(part)?);
    }
    Ok(out)
}

fn parse_times(origin: &Origin, value: &str) -> Result<Vec<f64>> {
    parse_list(origin, "times", value, |part| {
        let fields: Vec<&str> = part.split(':').collect();
        match fields.as_slice() {
            [t] => Ok(vec![parse_num(origin, "times", t)?]),
            [a, b, s] => {
                let (a, b, s): (f64, f64, f64) = (
                    parse_num(origin, "times", a)?,
                    parse_num(origin, "times", b)?,
                    parse_num(origin, "times", s)?,
                );
                if !s.is_finite() || s <= 0.0 || b < a {
                    return Err(bad(
                        origin,
                        "times",
                        part,
                        "range needs start <= stop and step > 0",
                    ));
                }
                let count = ((b - a) / s + 1e-9).floor() as usize;
                Ok((0..=count).map(|i| a + i as f64 * s).collect())
            }
            _ => Err(bad(
                origin,
                "times",
                part,
                "expected a number or start:stop:step",
            )),
        }
    })
}

fn apply(cfg: &mut ExperimentConfig, key: &str, value: &str, origin: &Origin) -> Result<()> {
    match key {
        "delta_e" => cfg.params.delta_e = parse_num(origin, key, value)?,
        "delta_eps" => cfg.params.delta_eps = parse_num(origin, key, value)?,
        "lambda" => cfg.params.lambda = parse_num(origin, key, value)?,
        "beta" => cfg.params.beta = parse_num(origin, key, value)?,
        "seed" => cfg.params.seed = parse_num(origin, key, value)?,
        "n" => {
            cfg.env_sizes =
                parse_list(origin, key, value, |p| Ok(vec![parse_num(origin, key, p)?]))?;
            if let Some(&n) = cfg.env_sizes.iter().find(|&&n| n < 2) {
                return Err(bad(origin, key, value, format!("N must be >= 2, got {n}")));
            }
        }
        "env_init" => {
            cfg.env_inits = match value.to_lowercase().as_str() {
                "superposition" => vec![EnvInit::Superposition],
                "thermal" => vec![EnvInit::Thermal],
                "both" => vec![EnvInit::Superposition, EnvInit::Thermal],
                _ => {
                    return Err(bad(
                        origin,
                        key,
                        value,
                        "expected superposition, thermal or both",
                    ))
                }
            }
        }
        "trace" => {
            cfg.trace_methods = match value.to_lowercase().as_str() {
                "perez" => vec![TraceMethod::Perez],
                "staircase" => vec![TraceMethod::Staircase],
                "both" => vec![TraceMethod::Perez, TraceMethod::Staircase],
                _ => return Err(bad(origin, key, value, "expected perez, staircase or both")),
            }
        }
        "times" => cfg.times = parse_times(origin, value)?,
        "system_source" => {
            cfg.system_source = match value.to_lowercase().as_str() {
                "true" => SystemSource::TrueSystem,
                "fragment" => SystemSource::FragmentDerived,
                _ => return Err(bad(origin, key, value, "expected true or fragment")),
            }
        }
        "search_samples" => cfg.search.samples = parse_num(origin, key, value)?,
        "refine_iters" => cfg.search.refine_iters = parse_num(origin, key, value)?,
        "restarts" => cfg.search.restarts = parse_num(origin, key, value)?,
        "fragment_samples" => cfg.fragment_samples = parse_num(origin, key, value)?,
        "ensemble" => cfg.ensemble = parse_num(origin, key, value)?,
        "format" => {
            cfg.format = match value.to_lowercase().as_str() {
                "csv" => OutputFormat::Csv,
                "json" => OutputFormat::Json,
                _ => return Err(bad(origin, key, value, "expected csv or json")),
            }
        }
        "output" => cfg.output = Some(PathBuf::from(value)),
        "jobs" => cfg.jobs = Some(parse_num(origin, key, value)?),
        _ => unreachable!("keys are checked before applying"),
    }
    Ok(())
}

/// Resolves a configuration from optional file text and flag overrides.
/// Flags win over file values; a conflict is logged as a warning.
pub fn resolve_config(
    experiment: Experiment,
    file_text: Option<&str>,
    overrides: &[Override],
) -> Result<ExperimentConfig> {
    let mut settings = match file_text {
        Some(text) => parse_file(text)?,
        None => BTreeMap::new(),
    };
    for o in overrides {
        let key = normalize_key(&o.flag);
        let origin = Origin::Flag(o.flag.clone());
        known_key(&key, &origin)?;
        if let Some((old, line)) = settings.get(&key) {
            if *old != o.value {
                log::warn!(
                    "{} = {} overrides `{key} = {old}` from config {line}",
                    o.flag,
                    o.value
                );
            }
        }
        settings.insert(key, (o.value.clone(), origin));
    }

    let mut cfg = ExperimentConfig::defaults(experiment);
    for (key, (value, origin)) in &settings {
        apply(&mut cfg, key, value, origin)?;
    }
    cfg.params.n = cfg.env_sizes[0];
    cfg.params.env_init = cfg.env_inits[0];
    cfg.validate()?;
    Ok(cfg)
}

/// Reads the config file at `path` (if any) and resolves it with `overrides`.
pub fn load_config(
    experiment: Experiment,
    path: Option<&Path>,
    overrides: &[Override],
) -> Result<ExperimentConfig> {
    let text = match path {
        Some(p) => Some(std::fs::read_to_string(p).map_err(|source| Error::Io {
            path: p.to_path_buf(),
            source,
        })?),
        None => None,
    };
    resolve_config(experiment, text.as_deref(), overrides)
}
