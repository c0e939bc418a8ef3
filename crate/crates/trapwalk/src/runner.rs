//! Sweep execution. Cells run concurrently on one pool; files are written
//! by the calling thread once every cell has been reduced.

use std::path::{Path, PathBuf};

use anyhow::Context;
use rayon::prelude::*;
use trapwalk_core::analysis::{
    classical_references, detect_crossover, fit_stretch_exponent, fit_stretch_exponent_weighted,
    jackknife_errors, predict,
};
use trapwalk_core::ensemble::{reduce, SurvivalSeries};
use trapwalk_core::traps::trap_count;

use crate::output::{self, CellAnalysis, CellFiles, CellRecord, SensitivityRow, CELL_FORMAT};
use crate::parallel;
use crate::spec::{AnalysisOptions, Cell, ExperimentSpec, Format};

/// `t_min` values tried for the sensitivity table.
pub const SENSITIVITY_T_MIN: [usize; 4] = [2, 4, 8, 16];

/// A finished cell: its curve and its metadata record.
#[derive(Debug, Clone)]
pub struct CellOutput {
    pub cell: Cell,
    pub series: SurvivalSeries,
    pub record: CellRecord,
}

#[derive(Debug)]
pub struct CellFailure {
    pub cell: Cell,
    pub error: anyhow::Error,
}

#[derive(Debug, Default)]
pub struct RunReport {
    pub outputs: Vec<CellOutput>,
    pub failures: Vec<CellFailure>,
    pub written: Vec<PathBuf>,
}

/// Fits a curve with the given options. Fit failures are recorded as notes
/// rather than errors, since a fully decayed curve is a valid result.
pub fn analyze(
    mean: &[f64],
    stderr: &[f64],
    runs: Option<&[Vec<f64>]>,
    options: &AnalysisOptions,
    prediction_for: Option<(f64, trapwalk_core::ensemble::InitKind)>,
) -> CellAnalysis {
    let mut notes = Vec::new();
    let steps = mean.len().saturating_sub(1);
    let window = (options.t_min, steps);
    let single = if options.weighted {
        fit_stretch_exponent_weighted(mean, stderr, window)
    } else {
        fit_stretch_exponent(mean, window)
    }
    .map_err(|e| notes.push(format!("single fit: {e}")))
    .ok();
    let crossover = detect_crossover(mean, Some(stderr), &options.crossover())
        .map_err(|e| notes.push(format!("crossover: {e}")))
        .ok();
    let errors = match (runs, &crossover) {
        (Some(runs), Some(fit)) if runs.len() > 1 => jackknife_errors(runs, fit)
            .map_err(|e| notes.push(format!("jackknife: {e}")))
            .ok(),
        _ => None,
    };
    let t_min_sensitivity = SENSITIVITY_T_MIN
        .iter()
        .filter(|&&t| t < steps)
        .filter_map(|&t_min| {
            let opts = AnalysisOptions { t_min, ..*options }.crossover();
            detect_crossover(mean, Some(stderr), &opts)
                .ok()
                .map(|f| SensitivityRow {
                    t_min,
                    beta1: f.beta1,
                    beta2: f.beta2,
                    t_c: f.t_c,
                    crossover: f.crossover,
                })
        })
        .collect();
    let prediction = prediction_for.and_then(|(rho, init)| predict(rho, init).ok());
    CellAnalysis {
        options: *options,
        single,
        crossover,
        errors,
        t_min_sensitivity,
        prediction,
        references: classical_references(),
        notes,
    }
}

fn compute_cell(spec: &ExperimentSpec, cell: Cell) -> anyhow::Result<CellOutput> {
    let ensemble = spec.ensemble(&cell);
    let runs = parallel::run_configurations(&ensemble)?;
    let series = reduce(&ensemble, &runs)?;
    let traps = trap_count(cell.size, cell.rho)?;
    let analysis = analyze(
        &series.mean,
        &series.stderr,
        Some(&runs),
        &spec.analysis,
        Some((cell.rho, cell.init)),
    );
    let name = cell.name();
    let record = CellRecord {
        format: CELL_FORMAT.to_string(),
        code_version: crate::CODE_VERSION.to_string(),
        cell: name.clone(),
        experiment: spec.single(&cell),
        ensemble,
        traps,
        rho_actual: traps as f64 / cell.size as f64,
        scaling: spec.scaling,
        analysis,
        files: CellFiles {
            survival: spec
                .output
                .formats
                .contains(&Format::Csv)
                .then(|| format!("{name}.csv")),
        },
    };
    Ok(CellOutput {
        cell,
        series,
        record,
    })
}

/// Evaluates every cell on a pool of `workers` threads. Nothing is written.
pub fn compute(spec: &ExperimentSpec, workers: usize) -> anyhow::Result<RunReport> {
    spec.validate()?;
    let cells = spec.cells();
    let results: Vec<_> = parallel::pool(workers)?.install(|| {
        cells
            .par_iter()
            .map(|&cell| (cell, compute_cell(spec, cell)))
            .collect()
    });
    let mut report = RunReport::default();
    for (cell, result) in results {
        match result {
            Ok(out) => report.outputs.push(out),
            Err(error) => report.failures.push(CellFailure { cell, error }),
        }
    }
    Ok(report)
}

/// Writes the report's files under `dir` and records their paths.
pub fn write(spec: &ExperimentSpec, report: &mut RunReport, dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let formats = &spec.output.formats;
    for out in &report.outputs {
        let name = out.cell.name();
        if formats.contains(&Format::Csv) {
            let path = dir.join(format!("{name}.csv"));
            let text = output::curve_to_string(&out.series.mean, &out.series.stderr);
            output::write_atomic(&path, text.as_bytes())?;
            report.written.push(path);
        }
        if formats.contains(&Format::Json) {
            let path = dir.join(format!("{name}.json"));
            let mut text = serde_json::to_string_pretty(&out.record)?;
            text.push('\n');
            output::write_atomic(&path, text.as_bytes())?;
            report.written.push(path);
        }
    }
    if report.outputs.len() > 1 && formats.contains(&Format::Csv) {
        let path = dir.join("summary.csv");
        output::write_atomic(&path, summary_csv(&report.outputs)?.as_bytes())?;
        report.written.push(path);
    }
    Ok(())
}

/// One row per cell with the fitted exponents, for β-versus-ρ plots.
pub fn summary_csv(outputs: &[CellOutput]) -> anyhow::Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record([
        "engine",
        "init",
        "size",
        "rho",
        "beta",
        "beta1",
        "beta2",
        "t_c",
        "crossover",
    ])?;
    for out in outputs {
        let a = &out.record.analysis;
        let opt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
        w.write_record([
            out.cell.engine.name().to_string(),
            out.cell.init.name().to_string(),
            out.cell.size.to_string(),
            out.cell.rho.to_string(),
            opt(a.single.map(|f| f.beta)),
            opt(a.crossover.map(|f| f.beta1)),
            opt(a.crossover.map(|f| f.beta2)),
            a.crossover.map_or(String::new(), |f| f.t_c.to_string()),
            a.crossover
                .map_or(String::new(), |f| f.crossover.to_string()),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Computes and writes a whole experiment. The output directory is
/// `out` when given, else the spec's own.
pub fn run(spec: &ExperimentSpec, workers: usize, out: Option<&Path>) -> anyhow::Result<RunReport> {
    let mut report = compute(spec, workers)?;
    let dir = out.map_or_else(|| spec.output.dir.clone(), Path::to_path_buf);
    write(spec, &mut report, &dir)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentSpec {
        ExperimentSpec::from_json(
            r#"{"size": 41, "rho": [0.1, 0.2], "engine": ["qw", "crw"],
                "steps": 120, "configurations": 6}"#,
        )
        .unwrap()
    }

    #[test]
    fn cells_come_back_in_sweep_order() {
        let report = compute(&small(), 2).unwrap();
        assert!(report.failures.is_empty());
        let names: Vec<_> = report.outputs.iter().map(|o| o.cell.name()).collect();
        let expected: Vec<_> = small().cells().iter().map(Cell::name).collect();
        assert_eq!(names, expected);
    }

    #[test]
    fn record_reproduces_its_curve() {
        let report = compute(&small(), 1).unwrap();
        let out = &report.outputs[1];
        let again = compute(&out.record.experiment, 1).unwrap();
        assert_eq!(again.outputs.len(), 1);
        assert_eq!(again.outputs[0].series, out.series);
        assert_eq!(out.record.traps, 4);
        assert!((out.record.rho_actual - 4.0 / 41.0).abs() < 1e-15);
    }

    #[test]
    fn analysis_reports_sensitivity_and_prediction() {
        let report = compute(&small(), 1).unwrap();
        let a = &report.outputs[0].record.analysis;
        assert!(a.single.is_some());
        assert_eq!(a.t_min_sensitivity.len(), 4);
        assert!((a.prediction.unwrap().beta1_pred - 0.95).abs() < 1e-15);
    }
}
