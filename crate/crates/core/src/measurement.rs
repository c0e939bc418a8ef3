//! Single-walker coined walk on a finite line window with a probabilistic
//! position-measurement channel, evolved as a density operator.
//!
//! Each step applies `Φ ↦ (1 − p)·UΦU† + p·|χ⟩⟨χ| ⊗ M(UΦU†)`. Under the
//! default [`MeasurementReading::PositionDiagonal`], `M` keeps only the
//! position populations of the coin-traced operator (a projective position
//! measurement followed by a coin reset to `|χ⟩`). The
//! [`MeasurementReading::FullCoinTrace`] variant keeps the whole coin-traced
//! position operator, coherences included.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::coin::CoinSpec;
use crate::error::{Error, Result};
use crate::walk::Chirality;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Mass allowed within one site of the window edge before a step.
pub const EDGE_MASS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MeasurementReading {
    /// Measured branch is diagonal in position.
    #[default]
    PositionDiagonal,
    /// Measured branch keeps the full coin-traced position operator.
    FullCoinTrace,
}

/// Measurement probability per step, `t = 1, 2, ...`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MeasurementSchedule {
    Constant(f64),
    /// `p(t) = t^(−γ)`, so `p(1) = 1`.
    PowerLaw {
        gamma: f64,
    },
}

impl MeasurementSchedule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            MeasurementSchedule::Constant(p) if !(0.0..=1.0).contains(&p) => Err(Error::invalid(
                "p",
                "measurement probability must lie in [0, 1]",
            )),
            MeasurementSchedule::PowerLaw { gamma } if !(0.0..=1.0).contains(&gamma) => {
                Err(Error::invalid("gamma", "must lie in [0, 1]"))
            }
            _ => Ok(()),
        }
    }

    pub fn probability(&self, t: usize) -> f64 {
        match *self {
            MeasurementSchedule::Constant(p) => p,
            MeasurementSchedule::PowerLaw { gamma } => libm::pow(t.max(1) as f64, -gamma),
        }
    }
}

/// Hermitian operator on `C² ⊗ span{|z⟩ : −W ≤ z ≤ W}`, row-major, with basis
/// index `2·(z + W) + c` (`c = 0` for ↑, `1` for ↓).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    half_width: usize,
    data: Vec<Complex64>,
}

impl DensityOperator {
    pub fn zeros(half_width: usize) -> Self {
        let dim = 2 * (2 * half_width + 1);
        Self {
            half_width,
            data: vec![ZERO; dim * dim],
        }
    }

    /// `|χ, 0⟩⟨χ, 0|`.
    pub fn localized(half_width: usize, chirality: &Chirality) -> Result<Self> {
        let mut amps = vec![[ZERO; 2]; 2 * half_width + 1];
        amps[half_width] = chirality.amplitudes()?;
        Ok(Self::from_pure_state(half_width, &amps))
    }

    /// `|ψ⟩⟨ψ|` for amplitudes indexed by `z + W`.
    pub fn from_pure_state(half_width: usize, amps: &[[Complex64; 2]]) -> Self {
        assert_eq!(
            amps.len(),
            2 * half_width + 1,
            "amplitude length must be 2W + 1"
        );
        let mut op = Self::zeros(half_width);
        let dim = op.dim();
        let flat: Vec<Complex64> = amps.iter().flatten().copied().collect();
        for (i, a) in flat.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            for (j, b) in flat.iter().enumerate() {
                op.data[i * dim + j] = a * b.conj();
            }
        }
        op
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn dim(&self) -> usize {
        2 * (2 * self.half_width + 1)
    }

    pub fn index(&self, z: isize, c: usize) -> usize {
        debug_assert!(z.unsigned_abs() <= self.half_width && c < 2);
        2 * (z + self.half_width as isize) as usize + c
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim() + j]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        let dim = self.dim();
        (0..dim).map(|i| self.data[i * dim + i]).sum()
    }

    /// Largest `|Φ_ij − conj(Φ_ji)|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in i..dim {
                worst = worst.max((self.data[i * dim + j] - self.data[j * dim + i].conj()).norm());
            }
        }
        worst
    }

    /// Position populations `P(z)`, indexed by `z + W`.
    pub fn position_marginal(&self) -> Vec<f64> {
        let dim = self.dim();
        (0..2 * self.half_width + 1)
            .map(|s| self.data[2 * s * dim + 2 * s].re + self.data[(2 * s + 1) * (dim + 1)].re)
            .collect()
    }

    /// Standard deviation of the position marginal.
    pub fn position_std(&self) -> f64 {
        let w = self.half_width as f64;
        let marginal = self.position_marginal();
        let mass: f64 = marginal.iter().sum();
        let mean = marginal
            .iter()
            .enumerate()
            .map(|(s, p)| (s as f64 - w) * p)
            .sum::<f64>()
            / mass;
        let var = marginal
            .iter()
            .enumerate()
            .map(|(s, p)| {
                let d = s as f64 - w - mean;
                d * d * p
            })
            .sum::<f64>()
            / mass;
        libm::sqrt(var.max(0.0))
    }

    /// Whether `Φ + tol·I` admits a Cholesky factorization, i.e. the smallest
    /// eigenvalue is at least `−tol` (up to round-off). `O(dim³)`.
    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        let n = self.dim();
        let mut l = vec![ZERO; n * n];
        for j in 0..n {
            let mut d = self.data[j * n + j].re + tol;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if d.is_nan() || d <= 0.0 {
                return false;
            }
            let d = libm::sqrt(d);
            l[j * n + j] = Complex64::new(d, 0.0);
            for i in j + 1..n {
                let mut s = self.data[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / d;
            }
        }
        true
    }

    /// Largest `|z|` carrying any population.
    fn support_radius(&self) -> usize {
        let marginal = self.position_marginal();
        let w = self.half_width;
        marginal
            .iter()
            .enumerate()
            .filter(|(_, p)| **p != 0.0)
            .map(|(s, _)| s.abs_diff(w))
            .max()
            .unwrap_or(0)
    }

    fn edge_mass(&self) -> f64 {
        let marginal = self.position_marginal();
        let w = self.half_width;
        marginal
            .iter()
            .enumerate()
            .filter(|(s, _)| s.abs_diff(w) + 1 >= w)
            .map(|(_, p)| p.abs())
            .sum()
    }
}

/// A density-operator walk that reuses its buffers between steps.
#[derive(Debug, Clone)]
pub struct ChannelWalk {
    phi: DensityOperator,
    scratch: Vec<Complex64>,
    coin: CoinSpec,
    reset: [Complex64; 2],
    reading: MeasurementReading,
    steps_taken: usize,
}

impl ChannelWalk {
    pub fn new(
        phi: DensityOperator,
        coin: CoinSpec,
        reset: &Chirality,
        reading: MeasurementReading,
    ) -> Result<Self> {
        let scratch = vec![ZERO; phi.data.len()];
        Ok(Self {
            phi,
            scratch,
            coin,
            reset: reset.amplitudes()?,
            reading,
            steps_taken: 0,
        })
    }

    pub fn state(&self) -> &DensityOperator {
        &self.phi
    }

    pub fn into_state(self) -> DensityOperator {
        self.phi
    }

    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    /// Advances one step, measuring with probability `p`.
    pub fn step(&mut self, p: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(
                "p",
                "measurement probability must lie in [0, 1]",
            ));
        }
        let mass = self.phi.edge_mass();
        if mass > EDGE_MASS_TOLERANCE {
            return Err(Error::WindowOverflow { mass });
        }
        let w = self.phi.half_width;
        let dim = self.phi.dim();
        let r = self.phi.support_radius();
        // Source positions lie in [−r, r]; targets in [−r−1, r+1] ⊂ window.
        let reach = (r + 1).min(w);
        let lo = 2 * (w - reach);
        let hi = 2 * (w + reach) + 2;
        let src_lo = 2 * (w - r);
        let src_hi = 2 * (w + r) + 2;
        let m = *self.coin.matrix();

        // B = U Φ on the rows (row-major: whole-row combinations).
        let phi = &self.phi.data;
        let b = &mut self.scratch;
        for i in lo..hi {
            b[i * dim + lo..i * dim + hi].fill(ZERO);
        }
        for s in (src_lo..src_hi).step_by(2) {
            let (row_up, row_down) = (s * dim, (s + 1) * dim);
            let up_target = (s + 2) * dim;
            let down_target = (s - 1) * dim;
            for j in lo..hi {
                let (u, d) = (phi[row_up + j], phi[row_down + j]);
                b[up_target + j] = m[0][0] * u + m[0][1] * d;
                b[down_target + j] = m[1][0] * u + m[1][1] * d;
            }
        }

        // A = B U† on the columns.
        let conj = [
            [m[0][0].conj(), m[0][1].conj()],
            [m[1][0].conj(), m[1][1].conj()],
        ];
        let a = &mut self.phi.data;
        for i in lo..hi {
            let row = i * dim;
            a[row + lo..row + hi].fill(ZERO);
            for s in (src_lo..src_hi).step_by(2) {
                let (u, d) = (b[row + s], b[row + s + 1]);
                a[row + s + 2] = conj[0][0] * u + conj[0][1] * d;
                a[row + s - 1] = conj[1][0] * u + conj[1][1] * d;
            }
        }

        if p > 0.0 {
            self.apply_measurement(p, lo, hi);
        }
        self.steps_taken += 1;
        Ok(())
    }

    fn apply_measurement(&mut self, p: f64, lo: usize, hi: usize) {
        let dim = self.phi.dim();
        let chi = self.reset;
        let proj = [
            [chi[0] * chi[0].conj(), chi[0] * chi[1].conj()],
            [chi[1] * chi[0].conj(), chi[1] * chi[1].conj()],
        ];
        let a = &mut self.phi.data;
        let positions = (hi - lo) / 2;
        // Coin trace of A over the active block, position-indexed.
        let mut traced = vec![ZERO; positions * positions];
        for zi in 0..positions {
            let i = lo + 2 * zi;
            for zj in 0..positions {
                let j = lo + 2 * zj;
                let keep = match self.reading {
                    MeasurementReading::PositionDiagonal => zi == zj,
                    MeasurementReading::FullCoinTrace => true,
                };
                if keep {
                    traced[zi * positions + zj] = a[i * dim + j] + a[(i + 1) * dim + j + 1];
                }
            }
        }
        let keep = 1.0 - p;
        for i in lo..hi {
            for v in &mut a[i * dim + lo..i * dim + hi] {
                *v *= keep;
            }
        }
        for zi in 0..positions {
            for zj in 0..positions {
                let t = traced[zi * positions + zj];
                if t == ZERO {
                    continue;
                }
                let (i, j) = (lo + 2 * zi, lo + 2 * zj);
                for (ci, proj_row) in proj.iter().enumerate() {
                    for (cj, pr) in proj_row.iter().enumerate() {
                        a[(i + ci) * dim + j + cj] += t * pr * p;
                    }
                }
            }
        }
    }
}

/// One channel step on a copy of `phi`.
pub fn measurement_step(
    phi: &DensityOperator,
    p: f64,
    reset: &Chirality,
    coin: &CoinSpec,
    reading: MeasurementReading,
) -> Result<DensityOperator> {
    let mut walk = ChannelWalk::new(phi.clone(), *coin, reset, reading)?;
    walk.step(p)?;
    Ok(walk.into_state())
}

/// Position standard deviation `σ(t)` for `t = 0..=steps`, starting from
/// `|χ, 0⟩` with the coin reset to `|χ⟩` on measurement. The window is
/// `W = steps + 2`, which the walk cannot outrun.
pub fn spread_series(
    schedule: &MeasurementSchedule,
    steps: usize,
    chirality: &Chirality,
    coin: &CoinSpec,
    reading: MeasurementReading,
) -> Result<Vec<f64>> {
    schedule.validate()?;
    let phi = DensityOperator::localized(steps + 2, chirality)?;
    let mut walk = ChannelWalk::new(phi, *coin, chirality, reading)?;
    let mut sigma = Vec::with_capacity(steps + 1);
    sigma.push(walk.state().position_std());
    for t in 1..=steps {
        walk.step(schedule.probability(t))?;
        sigma.push(walk.state().position_std());
    }
    Ok(sigma)
}

/// Least-squares slope of `ln σ(t)` against `ln t` over `t ∈ [⌈T/4⌉, T]`
/// for the Hadamard walk.
pub fn spread_exponent(
    schedule: &MeasurementSchedule,
    steps: usize,
    chirality: &Chirality,
) -> Result<f64> {
    if steps < 50 {
        return Err(Error::invalid(
            "steps",
            "spread exponent needs at least 50 steps",
        ));
    }
    let sigma = spread_series(
        schedule,
        steps,
        chirality,
        &CoinSpec::hadamard(),
        MeasurementReading::PositionDiagonal,
    )?;
    log_log_slope(&sigma, steps.div_ceil(4), steps)
}

fn log_log_slope(values: &[f64], lo: usize, hi: usize) -> Result<f64> {
    let mut xs = Vec::with_capacity(hi - lo + 1);
    let mut ys = Vec::with_capacity(hi - lo + 1);
    for (t, &v) in values.iter().enumerate().take(hi + 1).skip(lo.max(1)) {
        if v.is_nan() || v <= 0.0 {
            return Err(Error::Fit(alloc::format!(
                "zero spread at t = {t}; the distribution is degenerate"
            )));
        }
        xs.push(libm::log(t as f64));
        ys.push(libm::log(v));
    }
    if xs.len() < 2 {
        return Err(Error::Fit(
            "fewer than two points for the spread fit".into(),
        ));
    }
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - xbar) * (x - xbar);
        sxy += (x - xbar) * (y - ybar);
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_measurement_after_one_step() {
        let phi = DensityOperator::localized(4, &Chirality::Up).unwrap();
        let out = measurement_step(
            &phi,
            1.0,
            &Chirality::Up,
            &CoinSpec::hadamard(),
            MeasurementReading::PositionDiagonal,
        )
        .unwrap();
        let dim = out.dim();
        for i in 0..dim {
            for j in 0..dim {
                let expect = if i == j && (i == out.index(1, 0) || i == out.index(-1, 0)) {
                    0.5
                } else {
                    0.0
                };
                assert!((out.get(i, j) - Complex64::new(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn trace_and_hermiticity_survive_partial_measurement() {
        let coin = CoinSpec::hadamard();
        for reading in [
            MeasurementReading::PositionDiagonal,
            MeasurementReading::FullCoinTrace,
        ] {
            let mut walk = ChannelWalk::new(
                DensityOperator::localized(8, &Chirality::Symmetric).unwrap(),
                coin,
                &Chirality::Symmetric,
                reading,
            )
            .unwrap();
            for _ in 0..6 {
                walk.step(0.3).unwrap();
                let tr = walk.state().trace();
                assert!((tr.re - 1.0).abs() < 1e-12 && tr.im.abs() < 1e-12);
                assert!(walk.state().hermiticity_deviation() < 1e-12);
            }
            assert!(walk.state().is_positive_semidefinite(1e-10));
        }
    }

    #[test]
    fn window_overflow_detected() {
        let mut walk = ChannelWalk::new(
            DensityOperator::localized(3, &Chirality::Up).unwrap(),
            CoinSpec::hadamard(),
            &Chirality::Up,
            MeasurementReading::PositionDiagonal,
        )
        .unwrap();
        walk.step(0.0).unwrap();
        walk.step(0.0).unwrap();
        // support now reaches |z| = 2 = W − 1
        assert!(matches!(walk.step(0.0), Err(Error::WindowOverflow { .. })));
    }

    #[test]
    fn schedule_values() {
        let s = MeasurementSchedule::PowerLaw { gamma: 1.0 };
        assert_eq!(s.probability(1), 1.0);
        assert_eq!(s.probability(4), 0.25);
        assert!(MeasurementSchedule::Constant(1.5).validate().is_err());
        assert!(MeasurementSchedule::PowerLaw { gamma: 2.0 }
            .validate()
            .is_err());
        assert!(MeasurementSchedule::PowerLaw { gamma: 0.0 }
            .validate()
            .is_ok());
    }

    #[test]
    fn spread_exponent_needs_enough_steps() {
        assert!(spread_exponent(&MeasurementSchedule::Constant(0.0), 10, &Chirality::Up).is_err());
    }

    #[test]
    fn diffusive_limit_is_exactly_half() {
        let e = spread_exponent(&MeasurementSchedule::Constant(1.0), 60, &Chirality::Up).unwrap();
        assert!((e - 0.5).abs() < 1e-9, "{e}");
    }
}
