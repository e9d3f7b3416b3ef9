//! File formats. CSV columns are fixed; JSON objects carry the same
//! fields under the same names.

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::detectors::{Constellation, DetectorKind};
use crate::distributions::{NoiseModel, UnimodalClass};
use crate::diversity::{Exponent, FaThreshold, UnimodalityReport};
use crate::simulation::CellEstimate;

/// `%g`-style rendering with 6 significant digits.
pub fn fmt_g(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let fixed = format!("{:.*}", (5 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn fmt_exponent(e: Exponent) -> String {
    match e {
        Exponent::Finite(v) => fmt_g(v),
        Exponent::Infinite => "inf".into(),
    }
}

fn fmt_opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

fn parse_f64(field: &str, name: &str) -> Result<f64, CliError> {
    field
        .parse()
        .map_err(|_| CliError::Format(format!("column {name}: `{field}` is not a number")))
}

fn parse_opt_f64(field: &str, name: &str) -> Result<Option<f64>, CliError> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse_f64(field, name).map(Some)
    }
}

fn parse_exponent(field: &str, name: &str) -> Result<Exponent, CliError> {
    if field == "inf" {
        Ok(Exponent::Infinite)
    } else {
        parse_f64(field, name).map(Exponent::Finite)
    }
}

fn parse_opt_exponent(field: &str, name: &str) -> Result<Option<Exponent>, CliError> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse_exponent(field, name).map(Some)
    }
}

fn parse_int<T: std::str::FromStr>(field: &str, name: &str) -> Result<T, CliError> {
    field
        .parse()
        .map_err(|_| CliError::Format(format!("column {name}: `{field}` is not an integer")))
}

fn parse_bool(field: &str, name: &str) -> Result<bool, CliError> {
    field
        .parse()
        .map_err(|_| CliError::Format(format!("column {name}: `{field}` is not true/false")))
}

fn parse_with<T: std::str::FromStr>(field: &str, name: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    field
        .parse()
        .map_err(|e| CliError::Format(format!("column {name}: {e}")))
}

/// A record with a fixed CSV layout.
pub trait CsvRow: Sized {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
    fn parse(record: &csv::StringRecord) -> Result<Self, CliError>;
}

pub fn write_csv<T: CsvRow>(rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(T::HEADER)?;
    for row in rows {
        w.write_record(row.fields())?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Format(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn read_csv<T: CsvRow>(text: &str) -> Result<Vec<T>, CliError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers()?.clone();
    if header.iter().ne(T::HEADER.iter().copied()) {
        return Err(CliError::Format(format!(
            "unexpected CSV header {:?}, expected {:?}",
            header.iter().collect::<Vec<_>>(),
            T::HEADER
        )));
    }
    r.records().map(|rec| T::parse(&rec?)).collect()
}

pub fn write_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityRow {
    pub noise: NoiseModel,
    pub delta: f64,
    pub d_ml: Exponent,
    pub d_fa: Exponent,
    pub d_lin: Exponent,
    pub s_star: f64,
    pub alpha: Option<f64>,
}

impl CsvRow for DiversityRow {
    const HEADER: &'static [&'static str] = &["noise", "delta", "d_ml", "d_fa", "d_lin", "s_star", "alpha"];

    fn fields(&self) -> Vec<String> {
        vec![
            self.noise.to_string(),
            fmt_g(self.delta),
            fmt_exponent(self.d_ml),
            fmt_exponent(self.d_fa),
            fmt_exponent(self.d_lin),
            fmt_g(self.s_star),
            fmt_opt(self.alpha, fmt_g),
        ]
    }

    fn parse(r: &csv::StringRecord) -> Result<Self, CliError> {
        Ok(Self {
            noise: parse_with(&r[0], "noise")?,
            delta: parse_f64(&r[1], "delta")?,
            d_ml: parse_exponent(&r[2], "d_ml")?,
            d_fa: parse_exponent(&r[3], "d_fa")?,
            d_lin: parse_exponent(&r[4], "d_lin")?,
            s_star: parse_f64(&r[5], "s_star")?,
            alpha: parse_opt_f64(&r[6], "alpha")?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    #[serde(rename = "M")]
    pub m: usize,
    pub theta: f64,
    pub boundary: bool,
}

impl From<FaThreshold> for ThresholdRow {
    fn from(t: FaThreshold) -> Self {
        Self {
            m: t.m,
            theta: t.theta,
            boundary: t.boundary,
        }
    }
}

impl CsvRow for ThresholdRow {
    const HEADER: &'static [&'static str] = &["M", "theta", "boundary"];

    fn fields(&self) -> Vec<String> {
        vec![self.m.to_string(), fmt_g(self.theta), self.boundary.to_string()]
    }

    fn parse(r: &csv::StringRecord) -> Result<Self, CliError> {
        Ok(Self {
            m: parse_int(&r[0], "M")?,
            theta: parse_f64(&r[1], "theta")?,
            boundary: parse_bool(&r[2], "boundary")?,
        })
    }
}

fn parse_class(field: &str) -> Result<UnimodalClass, CliError> {
    [
        UnimodalClass::ZeroMode,
        UnimodalClass::PositiveModePositiveLimit,
        UnimodalClass::PositiveModeZeroLimit,
    ]
    .into_iter()
    .find(|c| c.to_string() == field)
    .ok_or_else(|| CliError::Format(format!("column class: unknown class `{field}`")))
}

impl CsvRow for UnimodalityReport {
    const HEADER: &'static [&'static str] = &["class", "epsilon", "xi", "m0", "certified", "violation"];

    fn fields(&self) -> Vec<String> {
        vec![
            self.class.to_string(),
            fmt_g(self.epsilon),
            fmt_g(self.xi),
            self.m0.to_string(),
            self.certified.to_string(),
            fmt_opt(self.violation, fmt_g),
        ]
    }

    fn parse(r: &csv::StringRecord) -> Result<Self, CliError> {
        Ok(Self {
            class: parse_class(&r[0])?,
            epsilon: parse_f64(&r[1], "epsilon")?,
            xi: parse_f64(&r[2], "xi")?,
            m0: parse_int(&r[3], "m0")?,
            certified: parse_bool(&r[4], "certified")?,
            violation: parse_opt_f64(&r[5], "violation")?,
        })
    }
}

/// One row of a reproduced exponent table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub delta: f64,
    pub d_ml: Option<Exponent>,
    pub d_ml_closed: Option<Exponent>,
    pub d_ml_dev: Option<f64>,
    pub d_fa: Option<Exponent>,
    pub d_fa_closed: Option<Exponent>,
    pub d_fa_dev: Option<f64>,
    pub d_lin: Option<Exponent>,
    pub d_lin_closed: Option<Exponent>,
    pub d_lin_dev: Option<f64>,
    /// `ok`, or the solver diagnostic for a failed cell.
    pub status: String,
}

impl CsvRow for TableRow {
    const HEADER: &'static [&'static str] = &[
        "delta",
        "d_ml",
        "d_ml_closed",
        "d_ml_dev",
        "d_fa",
        "d_fa_closed",
        "d_fa_dev",
        "d_lin",
        "d_lin_closed",
        "d_lin_dev",
        "status",
    ];

    fn fields(&self) -> Vec<String> {
        vec![
            fmt_g(self.delta),
            fmt_opt(self.d_ml, fmt_exponent),
            fmt_opt(self.d_ml_closed, fmt_exponent),
            fmt_opt(self.d_ml_dev, fmt_g),
            fmt_opt(self.d_fa, fmt_exponent),
            fmt_opt(self.d_fa_closed, fmt_exponent),
            fmt_opt(self.d_fa_dev, fmt_g),
            fmt_opt(self.d_lin, fmt_exponent),
            fmt_opt(self.d_lin_closed, fmt_exponent),
            fmt_opt(self.d_lin_dev, fmt_g),
            self.status.clone(),
        ]
    }

    fn parse(r: &csv::StringRecord) -> Result<Self, CliError> {
        Ok(Self {
            delta: parse_f64(&r[0], "delta")?,
            d_ml: parse_opt_exponent(&r[1], "d_ml")?,
            d_ml_closed: parse_opt_exponent(&r[2], "d_ml_closed")?,
            d_ml_dev: parse_opt_f64(&r[3], "d_ml_dev")?,
            d_fa: parse_opt_exponent(&r[4], "d_fa")?,
            d_fa_closed: parse_opt_exponent(&r[5], "d_fa_closed")?,
            d_fa_dev: parse_opt_f64(&r[6], "d_fa_dev")?,
            d_lin: parse_opt_exponent(&r[7], "d_lin")?,
            d_lin_closed: parse_opt_exponent(&r[8], "d_lin_closed")?,
            d_lin_dev: parse_opt_f64(&r[9], "d_lin_dev")?,
            status: r[10].to_string(),
        })
    }
}

/// Fitted exponent of one detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub detector: DetectorKind,
    pub d_hat: Option<f64>,
    pub stderr: Option<f64>,
    pub d_analytic: Option<Exponent>,
    /// `insufficient_errors`, `truncated` and/or `no_diversity`
    /// (`D̂ < 2·stderr`).
    pub flags: Vec<String>,
}

/// Simulation output: per-`M` error rates plus one summary per detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub noise: NoiseModel,
    pub constellation: Constellation,
    pub seed: u64,
    pub trials: u64,
    pub cells: Vec<CellEstimate>,
    pub summary: Vec<SummaryRow>,
}

/// Flat CSV line of a simulation report; `record` is `cell` or `summary`.
#[derive(Debug, Clone, PartialEq)]
pub enum SimulationLine {
    Cell(CellEstimate),
    Summary(SummaryRow),
}

impl CsvRow for SimulationLine {
    const HEADER: &'static [&'static str] = &[
        "record",
        "detector",
        "M",
        "p_hat",
        "ci_lo",
        "ci_hi",
        "n_errors",
        "n_trials",
        "D_hat",
        "stderr",
        "D_analytic",
        "flags",
    ];

    fn fields(&self) -> Vec<String> {
        match self {
            SimulationLine::Cell(c) => vec![
                "cell".into(),
                c.detector.to_string(),
                c.m.to_string(),
                fmt_g(c.p_hat),
                fmt_g(c.ci_lo),
                fmt_g(c.ci_hi),
                c.n_errors.to_string(),
                c.n_trials.to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ],
            SimulationLine::Summary(s) => vec![
                "summary".into(),
                s.detector.to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                fmt_opt(s.d_hat, fmt_g),
                fmt_opt(s.stderr, fmt_g),
                fmt_opt(s.d_analytic, fmt_exponent),
                s.flags.join(";"),
            ],
        }
    }

    fn parse(r: &csv::StringRecord) -> Result<Self, CliError> {
        let detector: DetectorKind = parse_with(&r[1], "detector")?;
        match &r[0] {
            "cell" => Ok(SimulationLine::Cell(CellEstimate {
                detector,
                m: parse_int(&r[2], "M")?,
                p_hat: parse_f64(&r[3], "p_hat")?,
                ci_lo: parse_f64(&r[4], "ci_lo")?,
                ci_hi: parse_f64(&r[5], "ci_hi")?,
                n_errors: parse_int(&r[6], "n_errors")?,
                n_trials: parse_int(&r[7], "n_trials")?,
            })),
            "summary" => Ok(SimulationLine::Summary(SummaryRow {
                detector,
                d_hat: parse_opt_f64(&r[8], "D_hat")?,
                stderr: parse_opt_f64(&r[9], "stderr")?,
                d_analytic: parse_opt_exponent(&r[10], "D_analytic")?,
                flags: r[11]
                    .split(';')
                    .filter(|f| !f.is_empty())
                    .map(str::to_string)
                    .collect(),
            })),
            other => Err(CliError::Format(format!("column record: unknown record `{other}`"))),
        }
    }
}

impl SimulationReport {
    pub fn lines(&self) -> Vec<SimulationLine> {
        self.cells
            .iter()
            .cloned()
            .map(SimulationLine::Cell)
            .chain(self.summary.iter().cloned().map(SimulationLine::Summary))
            .collect()
    }
}
