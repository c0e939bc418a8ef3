use alloc::format;
use alloc::vec::Vec;

use super::fit::{
    collect_points, fit_points, fit_stretch_exponent, Point, StretchFit, MIN_FIT_POINTS,
};
use crate::error::{Error, Result};

/// Minimum usable points past `t_min` for a breakpoint scan.
pub const MIN_CROSSOVER_POINTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CrossoverOptions {
    /// Earliest time included in any fit; the first steps are transient.
    pub t_min: usize,
    /// Relative SSE reduction the two-segment model must achieve over a
    /// single line to count as a crossover.
    pub margin: f64,
    /// Weight points by the propagated inverse variance of the ensemble mean.
    pub weighted: bool,
}

impl Default for CrossoverOptions {
    fn default() -> Self {
        Self {
            t_min: 4,
            margin: 0.05,
            weighted: false,
        }
    }
}

/// Two stretched-exponential segments joined at `t_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PiecewiseFit {
    pub beta1: f64,
    pub beta2: f64,
    pub t_c: usize,
    pub a1: f64,
    pub a2: f64,
    /// Total residual of the reported model (two segments, or the single
    /// line when no crossover was found).
    pub sse: f64,
    /// The single-line fit over the whole window. For a classical curve its
    /// `beta` is the classical exponent.
    pub single: StretchFit,
    pub crossover: bool,
    /// `[t_min, last usable t]`.
    pub window: (usize, usize),
    pub options: CrossoverOptions,
}

/// Scans every usable time as a breakpoint, fitting a line on each side
/// (both segments include the breakpoint), and keeps the split with the
/// smallest total SSE.
pub fn detect_crossover(
    mean: &[f64],
    stderr: Option<&[f64]>,
    options: &CrossoverOptions,
) -> Result<PiecewiseFit> {
    if !(0.0..1.0).contains(&options.margin) {
        return Err(Error::invalid("margin", "must satisfy 0 <= margin < 1"));
    }
    let stderr = if options.weighted {
        Some(stderr.ok_or_else(|| Error::Fit("weighted fit requested without stderr".into()))?)
    } else {
        None
    };
    let full = (options.t_min, mean.len().saturating_sub(1));
    let points = collect_points(mean, stderr, full)?;
    let n = points.len();
    if n < MIN_CROSSOVER_POINTS {
        return Err(Error::Fit(format!(
            "{n} usable points past t_min = {}, need at least {MIN_CROSSOVER_POINTS}",
            options.t_min
        )));
    }
    let window = (options.t_min, points[n - 1].t);
    let single = fit_points(&points, window)?;

    let sums = PrefixSums::new(&points);
    let mut best: Option<(usize, f64)> = None;
    for b in MIN_FIT_POINTS - 1..=n - MIN_FIT_POINTS {
        let total = sums.sse(0, b + 1) + sums.sse(b, n);
        if best.map_or(true, |(_, s)| total < s) {
            best = Some((b, total));
        }
    }
    let (b, _) = best.expect("n >= 20 leaves at least one breakpoint");
    let t_c = points[b].t;
    let early = fit_points(&points[..=b], (options.t_min, t_c))?;
    let late = fit_points(&points[b..], (t_c, window.1))?;
    let two = early.sse + late.sse;

    let floor = 1e-18 * n as f64;
    let crossover = single.sse > floor && two <= (1.0 - options.margin) * single.sse;
    Ok(if crossover {
        PiecewiseFit {
            beta1: early.beta,
            beta2: late.beta,
            t_c,
            a1: early.prefactor(),
            a2: late.prefactor(),
            sse: two,
            single,
            crossover,
            window,
            options: *options,
        }
    } else {
        PiecewiseFit {
            beta1: single.beta,
            beta2: single.beta,
            t_c: window.1,
            a1: single.prefactor(),
            a2: single.prefactor(),
            sse: single.sse,
            single,
            crossover,
            window,
            options: *options,
        }
    })
}

/// Weighted running sums of centred coordinates, so any contiguous
/// segment's least-squares SSE is available in O(1).
struct PrefixSums {
    w: Vec<f64>,
    x: Vec<f64>,
    y: Vec<f64>,
    xx: Vec<f64>,
    xy: Vec<f64>,
    yy: Vec<f64>,
}

impl PrefixSums {
    fn new(points: &[Point]) -> Self {
        let sw: f64 = points.iter().map(|p| p.w).sum();
        let xc = points.iter().map(|p| p.w * p.x).sum::<f64>() / sw;
        let yc = points.iter().map(|p| p.w * p.y).sum::<f64>() / sw;
        let n = points.len();
        let mut s = Self {
            w: Vec::with_capacity(n + 1),
            x: Vec::with_capacity(n + 1),
            y: Vec::with_capacity(n + 1),
            xx: Vec::with_capacity(n + 1),
            xy: Vec::with_capacity(n + 1),
            yy: Vec::with_capacity(n + 1),
        };
        let mut acc = [0.0f64; 6];
        s.push(&acc);
        for p in points {
            let (dx, dy) = (p.x - xc, p.y - yc);
            acc[0] += p.w;
            acc[1] += p.w * dx;
            acc[2] += p.w * dy;
            acc[3] += p.w * dx * dx;
            acc[4] += p.w * dx * dy;
            acc[5] += p.w * dy * dy;
            s.push(&acc);
        }
        s
    }

    fn push(&mut self, acc: &[f64; 6]) {
        self.w.push(acc[0]);
        self.x.push(acc[1]);
        self.y.push(acc[2]);
        self.xx.push(acc[3]);
        self.xy.push(acc[4]);
        self.yy.push(acc[5]);
    }

    /// SSE of the best line through points `lo..hi`.
    fn sse(&self, lo: usize, hi: usize) -> f64 {
        let d = |v: &[f64]| v[hi] - v[lo];
        let (w, x, y) = (d(&self.w), d(&self.x), d(&self.y));
        let sxx = d(&self.xx) - x * x / w;
        let sxy = d(&self.xy) - x * y / w;
        let syy = d(&self.yy) - y * y / w;
        (syy - sxy * sxy / sxx).max(0.0)
    }
}

/// Leave-one-configuration-out standard errors of the fitted exponents.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExponentErrors {
    pub beta1: f64,
    pub beta2: f64,
    pub single: f64,
}

/// Jackknife over configurations with the segment windows held at the
/// breakpoint found on the full ensemble. `runs` are the per-configuration
/// series whose mean produced `fit`.
pub fn jackknife_errors(runs: &[Vec<f64>], fit: &PiecewiseFit) -> Result<ExponentErrors> {
    let early = (fit.window.0, fit.t_c);
    let late = (fit.t_c, fit.window.1);
    if fit.crossover {
        let se = jackknife_window_errors(runs, &[early, late, fit.window])?;
        Ok(ExponentErrors {
            beta1: se[0],
            beta2: se[1],
            single: se[2],
        })
    } else {
        let se = jackknife_window_errors(runs, &[fit.window])?[0];
        Ok(ExponentErrors {
            beta1: se,
            beta2: se,
            single: se,
        })
    }
}

/// Leave-one-configuration-out standard error of the stretching exponent
/// fitted over each window.
pub fn jackknife_window_errors(runs: &[Vec<f64>], windows: &[(usize, usize)]) -> Result<Vec<f64>> {
    let m = runs.len();
    if m < 2 {
        return Err(Error::Fit(
            "jackknife needs at least two configurations".into(),
        ));
    }
    let len = runs[0].len();
    let mut total = alloc::vec![0.0; len];
    for run in runs {
        if run.len() != len {
            return Err(Error::Fit("series lengths differ".into()));
        }
        for (acc, v) in total.iter_mut().zip(run) {
            *acc += v;
        }
    }

    let mut samples: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut loo = alloc::vec![0.0; len];
    for run in runs {
        for ((slot, tot), v) in loo.iter_mut().zip(&total).zip(run) {
            *slot = (tot - v) / (m - 1) as f64;
        }
        samples.push(
            windows
                .iter()
                .map(|&w| fit_stretch_exponent(&loo, w).map(|f| f.beta))
                .collect::<Result<_>>()?,
        );
    }

    Ok((0..windows.len())
        .map(|k| {
            let mean = samples.iter().map(|s| s[k]).sum::<f64>() / m as f64;
            let var: f64 = samples.iter().map(|s| (s[k] - mean) * (s[k] - mean)).sum();
            libm::sqrt(var * (m - 1) as f64 / m as f64)
        })
        .collect())
}
