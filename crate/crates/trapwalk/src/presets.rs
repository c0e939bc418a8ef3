//! Figure presets at desk scale. Each preset keeps the paper's lattice and
//! trap densities and reduces the ensemble size (and for the long runs the
//! horizon); the reduction is recorded in [`Scaling`].

use std::path::PathBuf;

use trapwalk_core::ensemble::InitKind;

use crate::spec::{
    AnalysisOptions, EngineKind, ExperimentSpec, OneOrMany, OutputOptions, Scaling,
    DEFAULT_JOB_CAP, DEFAULT_MASTER_SEED,
};

pub const PRESET_NAMES: [&str; 11] = [
    "fig2a", "fig2b", "fig2c", "fig3", "fig4", "fig5a", "fig5b", "fig6a", "fig6b", "fig7", "fig8",
];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PresetError {
    #[error("unknown preset {0:?}; expected one of {names}", names = PRESET_NAMES.join(", "))]
    Unknown(String),
    #[error("scale factor must be positive and finite, got {0}")]
    BadScale(f64),
}

struct Paper {
    sizes: &'static [usize],
    rhos: &'static [f64],
    inits: &'static [InitKind],
    engines: &'static [EngineKind],
    paper_steps: usize,
    paper_configurations: usize,
    steps: usize,
    m_factor: f64,
}

const LOW_RHO: &[f64] = &[0.05, 0.1, 0.2, 0.3];
const FIG4_RHO: &[f64] = &[0.05, 0.1, 0.15, 0.2, 0.25, 0.3];
const WIDE_RHO: &[f64] = &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6];
const ALL_INITS: &[InitKind] = &[InitKind::Up, InitKind::Mixed, InitKind::Symmetric];
const UP: &[InitKind] = &[InitKind::Up];
const QW: &[EngineKind] = &[EngineKind::Qw];
const CRW: &[EngineKind] = &[EngineKind::Crw];

fn table(name: &str) -> Option<Paper> {
    let long_qw = |rhos, inits| Paper {
        sizes: &[101],
        rhos,
        inits,
        engines: QW,
        paper_steps: 20_000,
        paper_configurations: 10_000,
        steps: 2_000,
        m_factor: 0.01,
    };
    let classical = |rhos| Paper {
        sizes: &[50_000],
        rhos,
        inits: UP,
        engines: CRW,
        paper_steps: 2_000,
        paper_configurations: 100,
        steps: 2_000,
        m_factor: 0.5,
    };
    let short = |sizes, rhos, engines| Paper {
        sizes,
        rhos,
        inits: UP,
        engines,
        paper_steps: 1_000,
        paper_configurations: 100_000,
        steps: 1_000,
        m_factor: 0.002,
    };
    Some(match name {
        "fig2a" => long_qw(LOW_RHO, &[InitKind::Up]),
        "fig2b" => long_qw(LOW_RHO, &[InitKind::Mixed]),
        "fig2c" => long_qw(LOW_RHO, &[InitKind::Symmetric]),
        "fig3" => long_qw(&[0.2], ALL_INITS),
        "fig4" => long_qw(FIG4_RHO, ALL_INITS),
        "fig5a" => classical(&[0.01, 0.005]),
        "fig5b" => classical(&[0.2, 0.5]),
        "fig6a" => short(&[101], &[0.1, 0.2, 0.3], CRW),
        "fig6b" => short(&[101], &[0.1, 0.2, 0.3], QW),
        "fig7" => short(&[101], WIDE_RHO, &[EngineKind::Qw, EngineKind::Crw]),
        "fig8" => short(&[81, 101, 201], WIDE_RHO, QW),
        _ => return None,
    })
}

/// The desk-scale experiment for a figure. `scale_m` replaces the default
/// ensemble reduction (`M = round(scale_m · M_paper)`, at least 1).
pub fn preset(name: &str, scale_m: Option<f64>) -> Result<ExperimentSpec, PresetError> {
    let paper = table(name).ok_or_else(|| PresetError::Unknown(name.to_string()))?;
    let factor = scale_m.unwrap_or(paper.m_factor);
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(PresetError::BadScale(factor));
    }
    let configurations = ((paper.paper_configurations as f64 * factor).round() as usize).max(1);
    let many = |v: &[_]| OneOrMany::Many(v.to_vec());
    Ok(ExperimentSpec {
        name: Some(name.to_string()),
        size: OneOrMany::Many(paper.sizes.to_vec()),
        rho: many(paper.rhos),
        init: OneOrMany::Many(paper.inits.to_vec()),
        engine: OneOrMany::Many(paper.engines.to_vec()),
        coin: None,
        steps: paper.steps,
        configurations,
        master_seed: DEFAULT_MASTER_SEED,
        analysis: AnalysisOptions::default(),
        output: OutputOptions {
            dir: PathBuf::from("out").join(name),
            ..OutputOptions::default()
        },
        scaling: Some(Scaling {
            paper_configurations: paper.paper_configurations,
            paper_steps: paper.paper_steps,
            m_factor: configurations as f64 / paper.paper_configurations as f64,
            t_factor: paper.steps as f64 / paper.paper_steps as f64,
        }),
        job_cap: DEFAULT_JOB_CAP,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_validates() {
        for name in PRESET_NAMES {
            let spec = preset(name, None).unwrap();
            spec.validate().unwrap();
            assert!(spec.scaling.is_some());
        }
    }

    #[test]
    fn fig5a_matches_caption() {
        let spec = preset("fig5a", None).unwrap();
        assert_eq!(spec.size.values(), vec![50_000]);
        assert_eq!(spec.rho.values(), vec![0.01, 0.005]);
        assert_eq!(spec.engine.values(), vec![EngineKind::Crw]);
        assert_eq!(spec.steps, 2000);
        assert_eq!(spec.configurations, 50);
        assert_eq!(spec.scaling.unwrap().paper_configurations, 100);
    }

    #[test]
    fn fig6b_and_fig8_shapes() {
        let b = preset("fig6b", None).unwrap();
        assert_eq!((b.size.values(), b.steps), (vec![101], 1000));
        assert_eq!(b.init.values(), vec![InitKind::Up]);
        assert_eq!(b.engine.values(), vec![EngineKind::Qw]);
        let f8 = preset("fig8", None).unwrap();
        assert_eq!(f8.size.values(), vec![81, 101, 201]);
        assert_eq!(f8.steps, 1000);
    }

    #[test]
    fn scale_override_is_recorded() {
        let spec = preset("fig2a", Some(0.001)).unwrap();
        assert_eq!(spec.configurations, 10);
        assert_eq!(spec.scaling.unwrap().m_factor, 0.001);
        assert_eq!(spec.scaling.unwrap().t_factor, 0.1);
        assert!(preset("fig2a", Some(0.0)).is_err());
        assert!(matches!(preset("fig9", None), Err(PresetError::Unknown(_))));
    }
}
