use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::noise::NoiseModel;
use super::scenario::StateSpec;
use super::HarnessError;
use crate::gates::TuningReport;
use crate::phase::{GammaOmegaReport, PhaseDecomposition, RelativePhase, StateDynamicalPhase};
use crate::propagator::IntegratorConfig;
use crate::su2::wrap_angle;

/// Output of one scenario run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario_id: String,
    pub tool_version: String,
    /// RFC 3339 creation time; the only field that varies between identical runs.
    pub generated_at: String,
    pub seed: Option<u64>,
    pub integrator: IntegratorConfig,
    pub duration: f64,
    pub total_steps: usize,
    pub quadrature_error: f64,
    pub refinement_converged: Option<bool>,
    pub warnings: Vec<String>,
    pub tuning: Option<TuningReport>,
    pub decomposition: Option<PhaseDecomposition>,
    pub relative_phase: Option<RelativePhase>,
    pub gamma_omega: Option<Vec<GammaOmegaReport>>,
    pub delta: Option<Vec<DeltaReport>>,
    pub noise: Option<NoiseReport>,
}

/// Dynamical and Pancharatnam phase of one input state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub state: StateSpec,
    pub dynamical: StateDynamicalPhase,
    /// `None` when the output state is orthogonal to the input.
    pub pancharatnam: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseReport {
    pub model: NoiseModel,
    pub relative_phase: QuantitySamples,
    /// One entry per input state, `Δ` from the defining integral.
    pub delta: Vec<QuantitySamples>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantitySamples {
    pub baseline: f64,
    pub values: Vec<f64>,
    pub stats: Stats,
}

impl QuantitySamples {
    pub fn new(baseline: f64, values: Vec<f64>) -> Self {
        let stats = stats(baseline, &values);
        QuantitySamples { baseline, values, stats }
    }
}

/// Sample statistics of an angle, computed after unwrapping every value to
/// the branch nearest the baseline. `std` uses the `n − 1` denominator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

pub fn stats(reference: f64, values: &[f64]) -> Stats {
    let unwrapped: Vec<f64> = values.iter().map(|v| reference + wrap_angle(v - reference)).collect();
    let n = unwrapped.len();
    let mean = unwrapped.iter().sum::<f64>() / n.max(1) as f64;
    let var = if n > 1 { unwrapped.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
    Stats {
        count: n,
        mean,
        std: var.sqrt(),
        min: unwrapped.iter().copied().fold(f64::INFINITY, f64::min),
        max: unwrapped.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl OutputFormat {
    /// CSV for a `.csv` extension, JSON otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => OutputFormat::Csv,
            _ => OutputFormat::Json,
        }
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    scenario_id: &'a str,
    analysis: &'a str,
    label: String,
    quantity: &'a str,
    sample: Option<usize>,
    value_radians: String,
    seed: Option<u64>,
}

fn number(v: f64) -> String {
    format!("{v:.16e}")
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    fn csv_rows(&self) -> Vec<CsvRow<'_>> {
        let id = self.scenario_id.as_str();
        let row = |analysis: &'static str, label: String, quantity: &'static str, sample, value: f64, seed| CsvRow {
            scenario_id: id,
            analysis,
            label,
            quantity,
            sample,
            value_radians: number(value),
            seed,
        };
        let mut rows = Vec::new();
        if let Some(d) = &self.decomposition {
            for (x, l) in d.labels.iter().enumerate() {
                rows.push(row("decompose", x.to_string(), "total", None, l.total, None));
                rows.push(row("decompose", x.to_string(), "dynamical", None, l.dynamical, None));
                rows.push(row("decompose", x.to_string(), "geometric", None, l.geometric, None));
                let omega = if x == 0 { d.solid_angle.full() } else { -d.solid_angle.full() };
                rows.push(row("decompose", x.to_string(), "solid_angle", None, omega, None));
            }
        }
        if let Some(r) = &self.relative_phase {
            rows.push(row("relative-phase", "gate".into(), "relative_phase", None, r.value, None));
        }
        for g in self.gamma_omega.iter().flatten() {
            let x = g.label.index().to_string();
            rows.push(row("gamma-omega", x.clone(), "geometric", None, g.geometric, None));
            rows.push(row("gamma-omega", x.clone(), "predicted", None, g.predicted, None));
            rows.push(row("gamma-omega", x, "discrepancy", None, g.discrepancy, None));
        }
        for (i, d) in self.delta.iter().flatten().enumerate() {
            let label = format!("state{i}");
            rows.push(row("delta", label.clone(), "direct", None, d.dynamical.direct, None));
            rows.push(row("delta", label.clone(), "decomposed", None, d.dynamical.decomposed, None));
            rows.push(row("delta", label.clone(), "diagonal_term", None, d.dynamical.diagonal_term, None));
            rows.push(row("delta", label.clone(), "cross_term", None, d.dynamical.cross_term, None));
            if let Some(p) = d.pancharatnam {
                rows.push(row("delta", label, "pancharatnam", None, p, None));
            }
        }
        if let Some(n) = &self.noise {
            let seed = Some(n.model.seed);
            for (k, v) in n.relative_phase.values.iter().enumerate() {
                rows.push(row("noise", "gate".into(), "relative_phase", Some(k), *v, seed));
            }
            for (i, q) in n.delta.iter().enumerate() {
                for (k, v) in q.values.iter().enumerate() {
                    rows.push(row("noise", format!("state{i}"), "delta", Some(k), *v, seed));
                }
            }
        }
        rows
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in self.csv_rows() {
            w.serialize(r).expect("in-memory CSV write");
        }
        String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV is UTF-8")
    }
}

/// Writes the report as JSON or long-format CSV.
pub fn emit(report: &RunReport, format: OutputFormat, path: &Path) -> Result<(), HarnessError> {
    let io = |source| HarnessError::Io { path: path.to_path_buf(), source };
    let body = match format {
        OutputFormat::Json => report.to_json(),
        OutputFormat::Csv => report.to_csv(),
    };
    let mut f = BufWriter::new(File::create(path).map_err(io)?);
    f.write_all(body.as_bytes()).map_err(io)?;
    f.flush().map_err(io)
}

/// Reads a JSON report back.
pub fn parse_report(text: &str) -> Result<RunReport, HarnessError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de)
        .map_err(|e| HarnessError::schema(e.path().to_string(), e.into_inner().to_string()))
}
