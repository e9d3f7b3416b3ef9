use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::CliError;
use crate::detectors::{Constellation, DetectorKind, LinearFallback};
use crate::distributions::NoiseModel;
use crate::numerics::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Diversity,
    Simulate,
    Tables,
    Threshold,
    Unimodal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Inclusive particle-count grid `a..b[:step]`, or a single count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MGrid {
    pub start: usize,
    pub end: usize,
    pub step: usize,
}

impl MGrid {
    pub fn values(&self) -> Vec<usize> {
        (self.start..=self.end).step_by(self.step).collect()
    }
}

impl FromStr for MGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let count = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("`{t}` is not a particle count"))
        };
        let (range, step) = match s.split_once(':') {
            Some((r, st)) => (r, count(st)?),
            None => (s, 1),
        };
        let (start, end) = match range.split_once("..") {
            Some((a, b)) => (count(a)?, count(b)?),
            None => {
                let m = count(range)?;
                (m, m)
            }
        };
        if start == 0 {
            return Err("M must be at least 1".into());
        }
        if end < start {
            return Err(format!("empty M grid {start}..{end}"));
        }
        if step == 0 {
            return Err("grid step must be positive".into());
        }
        Ok(Self { start, end, step })
    }
}

impl fmt::Display for MGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.start == self.end {
            write!(f, "{}", self.start)
        } else if self.step == 1 {
            write!(f, "{}..{}", self.start, self.end)
        } else {
            write!(f, "{}..{}:{}", self.start, self.end, self.step)
        }
    }
}

impl Serialize for MGrid {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MGrid {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a trial count, accepting scientific notation such as `1e7`.
pub fn parse_trials(s: &str) -> Result<u64, String> {
    let s = s.trim();
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a trial count"))?;
    if x.is_finite() && x >= 0.0 && x.fract() == 0.0 && x <= 9.007_199_254_740_992e15 {
        Ok(x as u64)
    } else {
        Err(format!("`{s}` is not a whole number of trials"))
    }
}

/// Trial count that deserializes from an integer or a string like `"1e6"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Trials(pub u64);

impl Default for Trials {
    fn default() -> Self {
        Trials(100_000)
    }
}

impl FromStr for Trials {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_trials(s).map(Trials)
    }
}

impl Serialize for Trials {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(self.0)
    }
}

impl<'de> Deserialize<'de> for Trials {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Float(f64),
            Text(String),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Int(n) => return Ok(Trials(n)),
            Raw::Float(x) => x.to_string(),
            Raw::Text(s) => s,
        };
        parse_trials(&text).map(Trials).map_err(serde::de::Error::custom)
    }
}

fn all_detectors() -> Vec<DetectorKind> {
    DetectorKind::ALL.to_vec()
}

/// Everything one invocation needs. Every subcommand builds one of these
/// from its flags; `run --config` reads it from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<f64>>,
    #[serde(default = "all_detectors")]
    pub detectors: Vec<DetectorKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<MGrid>,
    #[serde(default)]
    pub trials: Trials,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Explicit sample-mean thresholds for noise without a finite mean.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lin_threshold: Option<Vec<f64>>,
}

impl RunConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            noise: None,
            delta: None,
            points: None,
            detectors: all_detectors(),
            m: None,
            trials: Trials::default(),
            seed: 0,
            workers: None,
            out: None,
            format: Format::Csv,
            tolerances: Tolerances::default(),
            lin_threshold: None,
        }
    }

    /// Reads a JSON config; syntax and schema errors carry line and column.
    pub fn from_json(text: &str, origin: &Path) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config {
            path: origin.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text, path)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn noise(&self) -> Result<&NoiseModel, CliError> {
        self.noise
            .as_ref()
            .ok_or_else(|| CliError::Usage("--noise is required".into()))
    }

    pub fn constellation(&self) -> Result<Constellation, CliError> {
        let built = match (&self.delta, &self.points) {
            (Some(_), Some(_)) => return Err(CliError::Usage("give either --delta or --points, not both".into())),
            (Some(d), None) => Constellation::binary(*d),
            (None, Some(p)) => Constellation::new(p.clone()),
            (None, None) => return Err(CliError::Usage("--delta or --points is required".into())),
        };
        built.map_err(|e| CliError::Usage(e.to_string()))
    }

    /// The gap of a binary constellation `{0, Δ}`.
    pub fn binary_delta(&self) -> Result<f64, CliError> {
        let c = self.constellation()?;
        match c.points() {
            [0.0, d] => Ok(*d),
            _ => Err(CliError::Usage(
                "analytic exponents are defined for binary constellations {0, Δ}; use --delta".into(),
            )),
        }
    }

    pub fn m_values(&self) -> Result<Vec<usize>, CliError> {
        self.m
            .map(|g| g.values())
            .ok_or_else(|| CliError::Usage("--m is required".into()))
    }

    pub fn linear_fallback(&self) -> LinearFallback {
        match &self.lin_threshold {
            Some(cuts) => LinearFallback::Explicit(cuts.clone()),
            None => LinearFallback::MidpointOfMedians,
        }
    }

    pub fn workers(&self) -> usize {
        self.workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}
