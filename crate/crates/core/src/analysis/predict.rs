use crate::ensemble::InitKind;
use crate::error::{Error, Result};

/// Closed-form exponents and crossover scales for a trap density.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnalyticPrediction {
    pub rho: f64,
    pub init: InitKind,
    /// Early-regime exponent `1 − ρ/2`.
    pub beta1_pred: f64,
    /// Late-regime exponent `ρ/2`.
    pub beta2_pred: f64,
    /// `25/ρ`
    pub tc_up_symmetric: f64,
    /// `8/ρ`
    pub tc_mixed: f64,
    /// Crossover scale for `init`.
    pub tc_pred: f64,
    /// `−ln(1 − ρ)`, the per-visit absorption rate.
    pub lambda: f64,
    /// Growth exponent of the trapped-walk mean free path, `1 − ρ/2`.
    pub trapped_path_exponent: f64,
    /// Growth exponent of the trap-free mean free path (ballistic).
    pub free_path_exponent: f64,
}

pub fn predict(rho: f64, init: InitKind) -> Result<AnalyticPrediction> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::invalid("rho", "prediction needs 0 < rho < 1"));
    }
    let tc_up_symmetric = 25.0 / rho;
    let tc_mixed = 8.0 / rho;
    Ok(AnalyticPrediction {
        rho,
        init,
        beta1_pred: 1.0 - rho / 2.0,
        beta2_pred: rho / 2.0,
        tc_up_symmetric,
        tc_mixed,
        tc_pred: match init {
            InitKind::Mixed => tc_mixed,
            InitKind::Up | InitKind::Symmetric => tc_up_symmetric,
        },
        lambda: -libm::log1p(-rho),
        trapped_path_exponent: 1.0 - rho / 2.0,
        free_path_exponent: 1.0,
    })
}

/// Reference stretching exponents from known limits.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassicalReferences {
    /// Early-time classical decay, `exp(−c·t^{1/2})`.
    pub rosenstock: f64,
    /// Asymptotic classical decay in one dimension, `exp(−c·t^{1/3})`.
    pub donsker_varadhan: f64,
    /// Continuous-time coherent transport, `exp(−c·t^{1/4})`.
    pub continuous_time_quantum: f64,
}

pub fn classical_references() -> ClassicalReferences {
    ClassicalReferences {
        rosenstock: 0.5,
        donsker_varadhan: 1.0 / 3.0,
        continuous_time_quantum: 0.25,
    }
}
