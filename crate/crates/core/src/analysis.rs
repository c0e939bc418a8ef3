//! Stretched-exponential analysis of survival curves.
//!
//! Curves are fitted in the space `y = ln(−ln⟨P⟩)` against `x = ln t`, where a
//! decay `⟨P⟩ = exp(−a·t^β)` is exactly the line `y = ln a + β x`.

mod crossover;
mod fit;
mod predict;

pub use crossover::{
    detect_crossover, jackknife_errors, jackknife_window_errors, CrossoverOptions, ExponentErrors,
    PiecewiseFit,
};
pub use fit::{
    fit_stretch_exponent, fit_stretch_exponent_weighted, is_usable, usable_count, StretchFit,
    LOG_FLOOR,
};
pub use predict::{classical_references, predict, AnalyticPrediction, ClassicalReferences};

/// Combined standard error of two independent estimates.
pub fn pooled_stderr(a: f64, b: f64) -> f64 {
    libm::sqrt(a * a + b * b)
}
