use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use trapwalk_core::analysis::CrossoverOptions;
use trapwalk_core::ensemble::{Engine, EnsembleSpec, InitKind};
use trapwalk_core::traps::trap_count;
use trapwalk_core::CoinSpec;

pub const DEFAULT_JOB_CAP: usize = 1024;
pub const DEFAULT_MASTER_SEED: u64 = 2024;

/// A validation failure, tagged with the offending field.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid field `{field}`: {reason}")]
pub struct SpecError {
    pub field: String,
    pub reason: String,
}

impl SpecError {
    fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

/// A scalar or a list of values to sweep over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn values(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(vs) => vs.clone(),
        }
    }
}

impl<T> From<T> for OneOrMany<T> {
    fn from(v: T) -> Self {
        OneOrMany::One(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineKind {
    Qw,
    Crw,
}

impl EngineKind {
    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Qw => "qw",
            EngineKind::Crw => "crw",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisOptions {
    pub t_min: usize,
    pub crossover_margin: f64,
    pub weighted: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        let d = CrossoverOptions::default();
        Self {
            t_min: d.t_min,
            crossover_margin: d.margin,
            weighted: d.weighted,
        }
    }
}

impl AnalysisOptions {
    pub fn crossover(&self) -> CrossoverOptions {
        CrossoverOptions {
            t_min: self.t_min,
            margin: self.crossover_margin,
            weighted: self.weighted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputOptions {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputOptions {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            formats: vec![Format::Csv, Format::Json],
        }
    }
}

/// How far a run was reduced from the paper's ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scaling {
    pub paper_configurations: usize,
    pub paper_steps: usize,
    /// `configurations / paper_configurations`.
    pub m_factor: f64,
    /// `steps / paper_steps`.
    pub t_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub size: OneOrMany<usize>,
    pub rho: OneOrMany<f64>,
    #[serde(default = "default_init")]
    pub init: OneOrMany<InitKind>,
    #[serde(default = "default_engine")]
    pub engine: OneOrMany<EngineKind>,
    /// Quantum coin; Hadamard when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coin: Option<CoinSpec>,
    pub steps: usize,
    pub configurations: usize,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    #[serde(default)]
    pub analysis: AnalysisOptions,
    #[serde(default)]
    pub output: OutputOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<Scaling>,
    #[serde(default = "default_job_cap")]
    pub job_cap: usize,
}

fn default_init() -> OneOrMany<InitKind> {
    OneOrMany::One(InitKind::Up)
}

fn default_engine() -> OneOrMany<EngineKind> {
    OneOrMany::One(EngineKind::Qw)
}

fn default_seed() -> u64 {
    DEFAULT_MASTER_SEED
}

fn default_job_cap() -> usize {
    DEFAULT_JOB_CAP
}

/// One point of the sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub size: usize,
    pub rho: f64,
    pub init: InitKind,
    pub engine: EngineKind,
}

impl Cell {
    /// File stem, e.g. `qw_up_K101_rho0.2`.
    pub fn name(&self) -> String {
        format!(
            "{}_{}_K{}_rho{}",
            self.engine.name(),
            self.init.name(),
            self.size,
            self.rho
        )
    }
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let spec: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let field = field_of(&e);
            SpecError::new(field, e.into_inner().to_string())
        })?;
        spec.validate()?;
        Ok(spec)
    }

    /// Sweep cells in a fixed order: size, then ρ, then init, then engine.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for size in self.size.values() {
            for rho in self.rho.values() {
                for init in self.init.values() {
                    for engine in self.engine.values() {
                        cells.push(Cell {
                            size,
                            rho,
                            init,
                            engine,
                        });
                    }
                }
            }
        }
        cells
    }

    pub fn ensemble(&self, cell: &Cell) -> EnsembleSpec {
        EnsembleSpec {
            size: cell.size,
            rho: cell.rho,
            steps: self.steps,
            configurations: self.configurations,
            init: cell.init,
            engine: match cell.engine {
                EngineKind::Qw => Engine::Quantum {
                    coin: self.coin.unwrap_or_default(),
                },
                EngineKind::Crw => Engine::Classical,
            },
            master_seed: self.master_seed,
        }
    }

    /// The spec restricted to one cell, with every sweep axis a scalar.
    pub fn single(&self, cell: &Cell) -> Self {
        Self {
            size: cell.size.into(),
            rho: cell.rho.into(),
            init: cell.init.into(),
            engine: cell.engine.into(),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        for (field, len) in [
            ("size", self.size.values().len()),
            ("rho", self.rho.values().len()),
            ("init", self.init.values().len()),
            ("engine", self.engine.values().len()),
        ] {
            if len == 0 {
                return Err(SpecError::new(field, "list must not be empty"));
            }
        }
        for size in self.size.values() {
            if size == 0 {
                return Err(SpecError::new("size", "lattice size must be at least 1"));
            }
        }
        for rho in self.rho.values() {
            if !(0.0..1.0).contains(&rho) {
                return Err(SpecError::new("rho", format!("{rho} is outside [0, 1)")));
            }
            for size in self.size.values() {
                trap_count(size, rho)
                    .map_err(|e| SpecError::new("rho", format!("{e} (size {size})")))?;
            }
        }
        if self.steps == 0 {
            return Err(SpecError::new("steps", "must be at least 1"));
        }
        if self.configurations == 0 {
            return Err(SpecError::new("configurations", "must be at least 1"));
        }
        if self.analysis.t_min == 0 || self.analysis.t_min >= self.steps {
            return Err(SpecError::new(
                "analysis.t_min",
                "must satisfy 1 <= t_min < steps",
            ));
        }
        if !(0.0..1.0).contains(&self.analysis.crossover_margin) {
            return Err(SpecError::new(
                "analysis.crossover_margin",
                "must lie in [0, 1)",
            ));
        }
        if self.output.formats.is_empty() {
            return Err(SpecError::new(
                "output.formats",
                "at least one format is required",
            ));
        }
        if let Some(s) = &self.scaling {
            if !(s.m_factor > 0.0 && s.t_factor > 0.0) {
                return Err(SpecError::new("scaling", "factors must be positive"));
            }
        }
        let jobs = self.cells().len();
        if jobs > self.job_cap {
            return Err(SpecError::new(
                "job_cap",
                format!(
                    "sweep has {jobs} cells, more than the cap of {}",
                    self.job_cap
                ),
            ));
        }
        Ok(())
    }
}

/// Dotted path of the offending field. Unknown and missing field names
/// are appended to the path of the enclosing object.
fn field_of(e: &serde_path_to_error::Error<serde_json::Error>) -> String {
    let path = e.path().to_string();
    let msg = e.inner().to_string();
    for marker in ["unknown field `", "missing field `"] {
        if let Some(name) = msg.split(marker).nth(1).and_then(|r| r.split('`').next()) {
            return if path == "." {
                name.to_string()
            } else if path == name || path.ends_with(&format!(".{name}")) {
                path
            } else {
                format!("{path}.{name}")
            };
        }
    }
    if path == "." {
        "spec".to_string()
    } else {
        path
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"size": 101, "rho": 0.2, "steps": 100, "configurations": 4}"#;

    #[test]
    fn minimal_spec_fills_defaults() {
        let spec = ExperimentSpec::from_json(MINIMAL).unwrap();
        assert_eq!(spec.master_seed, DEFAULT_MASTER_SEED);
        assert_eq!(spec.analysis.t_min, 4);
        assert_eq!(spec.cells().len(), 1);
        assert_eq!(spec.cells()[0].name(), "qw_up_K101_rho0.2");
    }

    #[test]
    fn sweep_expands_in_fixed_order() {
        let spec = ExperimentSpec::from_json(
            r#"{"size": [81, 101], "rho": [0.1, 0.2], "init": ["up", "mixed"],
                "engine": ["qw", "crw"], "steps": 50, "configurations": 2}"#,
        )
        .unwrap();
        let cells = spec.cells();
        assert_eq!(cells.len(), 16);
        assert_eq!(cells[0].name(), "qw_up_K81_rho0.1");
        assert_eq!(cells[1].name(), "crw_up_K81_rho0.1");
        assert_eq!(cells[15].name(), "crw_mixed_K101_rho0.2");
    }

    #[test]
    fn bad_rho_names_the_field() {
        let err = ExperimentSpec::from_json(
            r#"{"size": 101, "rho": 1.0, "steps": 100, "configurations": 4}"#,
        )
        .unwrap_err();
        assert_eq!(err.field, "rho");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = ExperimentSpec::from_json(
            r#"{"size": 101, "rho": 0.2, "steps": 100, "configurations": 4, "colour": 1}"#,
        )
        .unwrap_err();
        assert_eq!(err.field, "colour");
        let err = ExperimentSpec::from_json(
            r#"{"size": 101, "rho": 0.2, "steps": 100, "configurations": 4,
                "analysis": {"tmin": 3}}"#,
        )
        .unwrap_err();
        assert_eq!(err.field, "analysis.tmin");
    }

    #[test]
    fn type_errors_name_the_field() {
        let err = ExperimentSpec::from_json(
            r#"{"size": 101, "rho": 0.2, "steps": 100, "configurations": 4, "init": "sideways"}"#,
        )
        .unwrap_err();
        assert_eq!(err.field, "init");
        let err =
            ExperimentSpec::from_json(r#"{"size": 101, "rho": 0.2, "steps": 100}"#).unwrap_err();
        assert_eq!(err.field, "configurations");
    }

    #[test]
    fn job_cap_is_enforced() {
        let err = ExperimentSpec::from_json(
            r#"{"size": [10, 20, 30], "rho": [0.1, 0.2], "steps": 10, "configurations": 1,
                "job_cap": 5}"#,
        )
        .unwrap_err();
        assert_eq!(err.field, "job_cap");
    }

    #[test]
    fn json_round_trip_is_stable() {
        let spec = ExperimentSpec::from_json(MINIMAL).unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(ExperimentSpec::from_json(&text).unwrap(), spec);
    }
}
