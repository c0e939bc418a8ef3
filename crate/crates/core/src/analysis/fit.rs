use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Survival values below this are too close to round-off to take `ln(−ln ·)` of.
pub const LOG_FLOOR: f64 = 10.0 * f64::EPSILON;

/// Minimum number of usable points for a line fit.
pub const MIN_FIT_POINTS: usize = 5;

/// Least-squares line `ln(−ln⟨P⟩) = intercept + beta · ln t`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StretchFit {
    pub beta: f64,
    pub intercept: f64,
    /// Residual sum of squares in fit space (weighted when the fit is).
    pub sse: f64,
    pub points: usize,
    /// Inclusive time range the fit was restricted to.
    pub window: (usize, usize),
}

impl StretchFit {
    /// `a` in `exp(−a·t^β)`.
    pub fn prefactor(&self) -> f64 {
        libm::exp(self.intercept)
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Point {
    pub t: usize,
    pub x: f64,
    pub y: f64,
    pub w: f64,
}

/// A survival value can be fitted when `−ln v` is positive and well resolved.
pub fn is_usable(v: f64) -> bool {
    (LOG_FLOOR..1.0).contains(&v)
}

pub fn usable_count(mean: &[f64], window: (usize, usize)) -> usize {
    window_range(mean.len(), window)
        .filter(|&t| is_usable(mean[t]))
        .count()
}

fn window_range(len: usize, (lo, hi): (usize, usize)) -> core::ops::RangeInclusive<usize> {
    let lo = lo.max(1);
    let hi = hi.min(len.saturating_sub(1));
    #[allow(clippy::reversed_empty_ranges)]
    if lo > hi {
        1..=0
    } else {
        lo..=hi
    }
}

pub(crate) fn collect_points(
    mean: &[f64],
    stderr: Option<&[f64]>,
    window: (usize, usize),
) -> Result<Vec<Point>> {
    if let Some(se) = stderr {
        if se.len() != mean.len() {
            return Err(Error::Fit(format!(
                "stderr has {} entries but mean has {}",
                se.len(),
                mean.len()
            )));
        }
    }
    let mut points = Vec::new();
    for t in window_range(mean.len(), window) {
        let v = mean[t];
        if !is_usable(v) {
            continue;
        }
        let minus_log = -libm::log(v);
        let w = match stderr {
            None => 1.0,
            Some(se) => {
                // delta method: σ_y = σ_P / (P · (−ln P))
                let sigma_y = se[t] / (v * minus_log);
                if !(sigma_y.is_finite() && sigma_y > 0.0) {
                    return Err(Error::Fit(format!(
                        "weighted fit needs a positive finite stderr at t = {t}"
                    )));
                }
                1.0 / (sigma_y * sigma_y)
            }
        };
        points.push(Point {
            t,
            x: libm::log(t as f64),
            y: libm::log(minus_log),
            w,
        });
    }
    Ok(points)
}

pub(crate) fn fit_points(points: &[Point], window: (usize, usize)) -> Result<StretchFit> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::Fit(format!(
            "window {}..={} has {} usable points, need at least {MIN_FIT_POINTS}",
            window.0,
            window.1,
            points.len()
        )));
    }
    let sw: f64 = points.iter().map(|p| p.w).sum();
    let xbar = points.iter().map(|p| p.w * p.x).sum::<f64>() / sw;
    let ybar = points.iter().map(|p| p.w * p.y).sum::<f64>() / sw;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for p in points {
        let dx = p.x - xbar;
        sxx += p.w * dx * dx;
        sxy += p.w * dx * (p.y - ybar);
    }
    let beta = sxy / sxx;
    let intercept = ybar - beta * xbar;
    let sse = points
        .iter()
        .map(|p| {
            let r = p.y - intercept - beta * p.x;
            p.w * r * r
        })
        .sum();
    Ok(StretchFit {
        beta,
        intercept,
        sse,
        points: points.len(),
        window,
    })
}

/// Unweighted fit of the stretching exponent over the inclusive time window.
/// Points with `⟨P⟩ ≥ 1` or below [`LOG_FLOOR`] are skipped.
pub fn fit_stretch_exponent(mean: &[f64], window: (usize, usize)) -> Result<StretchFit> {
    fit_points(&collect_points(mean, None, window)?, window)
}

/// Like [`fit_stretch_exponent`], weighting each point by the inverse variance
/// of `ln(−ln⟨P⟩)` propagated from `stderr`.
pub fn fit_stretch_exponent_weighted(
    mean: &[f64],
    stderr: &[f64],
    window: (usize, usize),
) -> Result<StretchFit> {
    fit_points(&collect_points(mean, Some(stderr), window)?, window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn synthetic(a: f64, beta: f64, steps: usize) -> Vec<f64> {
        (0..=steps)
            .map(|t| libm::exp(-a * libm::pow(t as f64, beta)))
            .collect()
    }

    #[test]
    fn recovers_square_root() {
        let f = fit_stretch_exponent(&synthetic(1.0, 0.5, 200), (1, 200)).unwrap();
        assert!((f.beta - 0.5).abs() < 1e-9);
        assert!(f.intercept.abs() < 1e-9);
    }

    #[test]
    fn prefactor_moves_intercept_only() {
        let f = fit_stretch_exponent(&synthetic(2.0, 0.3, 200), (1, 200)).unwrap();
        assert!((f.beta - 0.3).abs() < 1e-9);
        assert!((f.prefactor() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn drops_unusable_points() {
        let mut mean = synthetic(0.1, 0.5, 30);
        mean[10] = 1.0;
        mean[11] = 1.5;
        mean[12] = 0.0;
        let f = fit_stretch_exponent(&mean, (1, 30)).unwrap();
        assert_eq!(f.points, 27);
        assert!((f.beta - 0.5).abs() < 1e-9);
    }

    #[test]
    fn too_few_points_is_an_error() {
        let mean = vec![1.0, 0.9, 0.8, 0.7, 0.6, 1.0, 1.0];
        assert!(matches!(
            fit_stretch_exponent(&mean, (1, 6)),
            Err(Error::Fit(_))
        ));
        assert!(fit_stretch_exponent(&mean, (20, 30)).is_err());
    }

    #[test]
    fn weighted_fit_recovers_exact_curve() {
        let mean = synthetic(0.5, 0.9, 40);
        let stderr: Vec<f64> = (0..=40).map(|t| 1e-3 / (1.0 + t as f64)).collect();
        let f = fit_stretch_exponent_weighted(&mean, &stderr, (1, 40)).unwrap();
        assert!((f.beta - 0.9).abs() < 1e-9);
        let zero = vec![0.0; 41];
        assert!(fit_stretch_exponent_weighted(&mean, &zero, (1, 40)).is_err());
    }
}
