//! On-disk formats: survival curves as CSV (`t,mean,stderr`) and one JSON
//! record per cell.

use std::io::{Read, Write};
use std::path::Path;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use trapwalk_core::analysis::{
    AnalyticPrediction, ClassicalReferences, ExponentErrors, PiecewiseFit, StretchFit,
};
use trapwalk_core::ensemble::EnsembleSpec;

use crate::spec::{ExperimentSpec, Scaling};

pub const CELL_FORMAT: &str = "trapwalk-cell/1";
pub const CSV_HEADER: [&str; 3] = ["t", "mean", "stderr"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Row {
    t: usize,
    mean: f64,
    stderr: f64,
}

/// A survival curve as read back from CSV.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Curve {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

pub fn write_curve<W: Write>(out: W, mean: &[f64], stderr: &[f64]) -> anyhow::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    for (t, (&mean, &stderr)) in mean.iter().zip(stderr).enumerate() {
        w.serialize(Row { t, mean, stderr })?;
    }
    w.flush()?;
    Ok(())
}

pub fn curve_to_string(mean: &[f64], stderr: &[f64]) -> String {
    let mut buf = Vec::new();
    write_curve(&mut buf, mean, stderr).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv output is ASCII")
}

/// Reads a curve. Rows must be consecutive from `t = 0`.
pub fn read_curve<R: Read>(input: R) -> anyhow::Result<Curve> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        bail!(
            "expected header `t,mean,stderr`, found `{}`",
            header.join(",")
        );
    }
    let mut curve = Curve::default();
    for (i, row) in r.deserialize::<Row>().enumerate() {
        let row = row.with_context(|| format!("row {}", i + 2))?;
        if row.t != i {
            bail!("row {} has t = {}, expected {i}", i + 2, row.t);
        }
        curve.mean.push(row.mean);
        curve.stderr.push(row.stderr);
    }
    if curve.mean.is_empty() {
        bail!("curve has no rows");
    }
    Ok(curve)
}

pub fn read_curve_file(path: &Path) -> anyhow::Result<Curve> {
    let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_curve(std::io::BufReader::new(file)).with_context(|| format!("reading {}", path.display()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub t_min: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub t_c: usize,
    pub crossover: bool,
}

/// Fits of one survival curve. Fields the data cannot support are `None`,
/// with the reason in `notes`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellAnalysis {
    pub options: crate::spec::AnalysisOptions,
    pub single: Option<StretchFit>,
    pub crossover: Option<PiecewiseFit>,
    pub errors: Option<ExponentErrors>,
    pub t_min_sensitivity: Vec<SensitivityRow>,
    pub prediction: Option<AnalyticPrediction>,
    pub references: ClassicalReferences,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFiles {
    pub survival: Option<String>,
}

/// Everything needed to reproduce and interpret one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub format: String,
    pub code_version: String,
    pub cell: String,
    /// The experiment restricted to this cell; running it reproduces the
    /// curve exactly.
    pub experiment: ExperimentSpec,
    pub ensemble: EnsembleSpec,
    pub traps: usize,
    pub rho_actual: f64,
    pub scaling: Option<Scaling>,
    pub analysis: CellAnalysis,
    pub files: CellFiles,
}

/// Accepts either an experiment spec or a cell record; the latter yields
/// its embedded experiment.
pub fn parse_experiment(text: &str) -> anyhow::Result<ExperimentSpec> {
    let value: serde_json::Value = serde_json::from_str(text).context("parsing JSON")?;
    if let Some(format) = value.get("format").and_then(|f| f.as_str()) {
        if format != CELL_FORMAT {
            bail!("unsupported record format {format:?}");
        }
        let experiment = value
            .get("experiment")
            .context("cell record has no `experiment` field")?;
        return Ok(ExperimentSpec::from_json(&experiment.to_string())?);
    }
    Ok(ExperimentSpec::from_json(text)?)
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))?;
    Ok(())
}
