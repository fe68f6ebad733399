use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use super::RunConfig;
use crate::analytic::{Clustering, ExtinctionReport, SurvivalCriterion};
use crate::dist::{ModelParams, ThresholdQ};
use crate::matrix::{MeanMatrix, Verdict};
use crate::sim::{SimConfig, SimReport};
use crate::verify::CheckResult;

/// Echo of the model a report was computed for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEcho {
    pub p: Vec<(usize, f64)>,
    pub q: Vec<(usize, f64)>,
    pub theta: ThresholdQ,
}

impl From<&ModelParams> for ModelEcho {
    fn from(params: &ModelParams) -> Self {
        Self {
            p: params.p().to_pairs(),
            q: params.q().to_pairs(),
            theta: params.theta(),
        }
    }
}

impl From<&RunConfig> for ModelEcho {
    fn from(config: &RunConfig) -> Self {
        Self {
            p: config.p.clone(),
            q: config.q.clone(),
            theta: config.theta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    /// `E[D]`
    pub lambda: f64,
    /// `E[W]`
    pub mu: f64,
    pub d_factorial_2: f64,
    pub w_factorial_2: f64,
    pub w_factorial_3: f64,
    /// Mean child count of a non-root vertex.
    pub child_count_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub model: ModelEcho,
    pub moments: Moments,
    pub survival_criterion: SurvivalCriterion,
    pub extinction: ExtinctionReport,
    pub root_degree_pmf: Vec<(usize, f64)>,
    pub clustering: Clustering,
    pub child_count_pmf: Vec<(usize, f64)>,
    pub mean_matrix: MeanMatrix,
    /// Spectral radius of `mean_matrix`, reported whichever rule decides.
    pub rho: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub model: ModelEcho,
    pub config: SimConfig,
    pub result: SimReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub model: ModelEcho,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub theta: ThresholdQ,
    pub rho: f64,
    pub verdict: Verdict,
}

/// Formats a float with 17 significant digits, enough to round-trip.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty JSON whose floats carry 17 significant digits.
struct FullPrecision<'a>(PrettyFormatter<'a>);

impl Formatter for FullPrecision<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_float(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

/// Serializes a report document as pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(report: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision(PrettyFormatter::new()));
    report.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

/// Sweep table with header `theta,rho,verdict,boundary`.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("theta,rho,verdict,boundary\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{:?},{}\n",
            row.theta,
            format_float(row.rho),
            row.verdict.kind,
            row.verdict.boundary
        ));
    }
    out
}
