//! Single-walker coined quantum walk on the trapped `K`-cycle.
//!
//! One time step is: coin on every site, then the chirality-conditioned
//! shift (↑ moves to `k + 1`, ↓ moves to `k − 1`, cyclically), then every
//! trap site is zeroed. Survival is the remaining norm after absorption.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::coin::CoinSpec;
use crate::error::{Error, Result};
use crate::traps::TrapConfiguration;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Accepted deviation of a user-supplied coin state from unit norm.
pub const CHIRALITY_NORM_TOLERANCE: f64 = 1e-12;

/// Initial coin state of a walker.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Chirality {
    Up,
    Down,
    /// `(|↑⟩ + i|↓⟩)/√2`
    Symmetric,
    /// Arbitrary normalized `(ψ↑, ψ↓)`.
    State([Complex64; 2]),
}

impl Chirality {
    pub fn amplitudes(&self) -> Result<[Complex64; 2]> {
        let amps = match *self {
            Chirality::Up => [Complex64::new(1.0, 0.0), ZERO],
            Chirality::Down => [ZERO, Complex64::new(1.0, 0.0)],
            Chirality::Symmetric => [
                Complex64::new(FRAC_1_SQRT_2, 0.0),
                Complex64::new(0.0, FRAC_1_SQRT_2),
            ],
            Chirality::State(s) => {
                let norm_sqr = s[0].norm_sqr() + s[1].norm_sqr();
                if norm_sqr.is_nan() || (norm_sqr - 1.0).abs() > CHIRALITY_NORM_TOLERANCE {
                    return Err(Error::UnnormalizedChirality { norm_sqr });
                }
                s
            }
        };
        Ok(amps)
    }
}

/// A walker placed on a single site with a given coin state.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InitialCondition {
    /// 1-based site label.
    pub start_site: usize,
    pub chirality: Chirality,
}

impl InitialCondition {
    pub fn new(start_site: usize, chirality: Chirality) -> Self {
        Self {
            start_site,
            chirality,
        }
    }
}

/// Per-site `(ψ↑, ψ↓)` amplitudes of one walker, stored site-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiralAmplitudeField {
    amps: Vec<[Complex64; 2]>,
}

impl ChiralAmplitudeField {
    pub fn zeros(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::invalid("lattice size", "must be at least 1"));
        }
        Ok(Self {
            amps: vec![[ZERO; 2]; size],
        })
    }

    pub fn localized(size: usize, init: &InitialCondition) -> Result<Self> {
        let mut field = Self::zeros(size)?;
        let idx = site_index(init.start_site, size)?;
        field.amps[idx] = init.chirality.amplitudes()?;
        Ok(field)
    }

    /// Builds a field from raw amplitudes; index `i` holds site `i + 1`.
    pub fn from_amplitudes(amps: Vec<[Complex64; 2]>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::invalid("lattice size", "must be at least 1"));
        }
        Ok(Self { amps })
    }

    pub fn size(&self) -> usize {
        self.amps.len()
    }

    /// Amplitudes indexed by `site − 1`.
    pub fn amplitudes(&self) -> &[[Complex64; 2]] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [[Complex64; 2]] {
        &mut self.amps
    }

    pub fn at(&self, site: usize) -> Result<[Complex64; 2]> {
        Ok(self.amps[site_index(site, self.size())?])
    }

    /// `P(x) = |ψ↑(x)|² + |ψ↓(x)|²` for a 1-based site.
    pub fn probability(&self, site: usize) -> Result<f64> {
        let [u, d] = self.at(site)?;
        Ok(u.norm_sqr() + d.norm_sqr())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps
            .iter()
            .map(|[u, d]| u.norm_sqr() + d.norm_sqr())
            .collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps
            .iter()
            .map(|[u, d]| u.norm_sqr() + d.norm_sqr())
            .sum()
    }
}

pub(crate) fn site_index(site: usize, size: usize) -> Result<usize> {
    if site == 0 || site > size {
        return Err(Error::SiteOutOfRange { site, size });
    }
    Ok(site - 1)
}

/// Applies the coin to every site.
pub fn coin_step(field: &mut ChiralAmplitudeField, coin: &CoinSpec) {
    for pair in &mut field.amps {
        *pair = coin.apply(*pair);
    }
}

/// Moves every ↑ amplitude one site forward and every ↓ amplitude one site
/// back, with periodic wraparound.
pub fn shift_step(field: &mut ChiralAmplitudeField) {
    let amps = &mut field.amps;
    let k = amps.len();
    let last_up = amps[k - 1][0];
    for i in (1..k).rev() {
        amps[i][0] = amps[i - 1][0];
    }
    amps[0][0] = last_up;

    let first_down = amps[0][1];
    for i in 0..k - 1 {
        amps[i][1] = amps[i + 1][1];
    }
    amps[k - 1][1] = first_down;
}

/// Zeroes every trap site and returns the probability mass removed.
pub fn absorb(field: &mut ChiralAmplitudeField, traps: &TrapConfiguration) -> Result<f64> {
    if traps.size() != field.size() {
        return Err(Error::SizeMismatch {
            field: field.size(),
            traps: traps.size(),
        });
    }
    let mut absorbed = 0.0;
    for &site in traps.sites() {
        let pair = &mut field.amps[site - 1];
        absorbed += pair[0].norm_sqr() + pair[1].norm_sqr();
        *pair = [ZERO; 2];
    }
    Ok(absorbed)
}

/// One full step: coin, shift, absorb. Returns the absorbed mass.
pub fn step(
    field: &mut ChiralAmplitudeField,
    coin: &CoinSpec,
    traps: &TrapConfiguration,
) -> Result<f64> {
    coin_step(field, coin);
    shift_step(field);
    absorb(field, traps)
}

/// Survival probability `Σ_x P(x, t)` for `t = 0..=steps` of one walker on
/// the full ring.
pub fn evolve_survival(
    init: &InitialCondition,
    traps: &TrapConfiguration,
    coin: &CoinSpec,
    steps: usize,
) -> Result<Vec<f64>> {
    let size = traps.size();
    let idx = site_index(init.start_site, size)?;
    if traps.is_trap_index(idx) {
        return Err(Error::StartOnTrap(init.start_site));
    }
    let mut field = ChiralAmplitudeField::localized(size, init)?;
    let mut survival = Vec::with_capacity(steps + 1);
    survival.push(field.norm_sqr());
    for _ in 0..steps {
        step(&mut field, coin, traps)?;
        survival.push(field.norm_sqr());
    }
    Ok(survival)
}

/// Survival of a walker confined to a run of `len` consecutive untrapped
/// sites with traps immediately beyond both ends.
///
/// Amplitude can never cross a trap, so on a trapped ring this equals
/// [`evolve_survival`] for any start inside the run while costing
/// `O(len · steps)` instead of `O(K · steps)`. `offset` is 0-based within
/// the run. The loop exits early once the walker is fully absorbed.
pub fn void_survival(
    len: usize,
    offset: usize,
    chirality: [Complex64; 2],
    coin: &CoinSpec,
    steps: usize,
) -> Vec<f64> {
    assert!(
        offset < len,
        "start offset {offset} outside run of {len} sites"
    );
    let mut up = vec![ZERO; len];
    let mut down = vec![ZERO; len];
    up[offset] = chirality[0];
    down[offset] = chirality[1];
    let mut next_up = vec![ZERO; len];
    let mut next_down = vec![ZERO; len];

    let mut survival = Vec::with_capacity(steps + 1);
    survival.push(chirality[0].norm_sqr() + chirality[1].norm_sqr());

    let m = coin.matrix();
    let real = coin.is_real();
    let (r00, r01, r10, r11) = (m[0][0].re, m[0][1].re, m[1][0].re, m[1][1].re);

    for _ in 0..steps {
        // ↑ from site j lands on j + 1; ↓ from site j lands on j − 1.
        // Whatever leaves the run is absorbed by the bounding traps.
        next_up[0] = ZERO;
        next_down[len - 1] = ZERO;
        if real {
            for j in 1..len {
                next_up[j] = up[j - 1] * r00 + down[j - 1] * r01;
            }
            for j in 0..len - 1 {
                next_down[j] = up[j + 1] * r10 + down[j + 1] * r11;
            }
        } else {
            for j in 1..len {
                next_up[j] = m[0][0] * up[j - 1] + m[0][1] * down[j - 1];
            }
            for j in 0..len - 1 {
                next_down[j] = m[1][0] * up[j + 1] + m[1][1] * down[j + 1];
            }
        }
        core::mem::swap(&mut up, &mut next_up);
        core::mem::swap(&mut down, &mut next_down);

        let mass: f64 = up
            .iter()
            .zip(&down)
            .map(|(u, d)| u.norm_sqr() + d.norm_sqr())
            .sum();
        survival.push(mass);
        if mass == 0.0 {
            survival.resize(steps + 1, 0.0);
            break;
        }
    }
    survival
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn single_site(pair: [Complex64; 2]) -> ChiralAmplitudeField {
        ChiralAmplitudeField::from_amplitudes(vec![pair]).unwrap()
    }

    #[test]
    fn hadamard_coin_on_up() {
        let mut f = single_site([c(1.0), ZERO]);
        coin_step(&mut f, &CoinSpec::hadamard());
        let [u, d] = f.amplitudes()[0];
        assert_abs_diff_eq!(u.re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(d.re, FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn hadamard_squares_to_identity() {
        let mut f = single_site([c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]);
        coin_step(&mut f, &CoinSpec::hadamard());
        let [u, d] = f.amplitudes()[0];
        assert_abs_diff_eq!(u.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn shift_moves_up_forward_and_down_back() {
        let up_at = |site| {
            ChiralAmplitudeField::localized(4, &InitialCondition::new(site, Chirality::Up)).unwrap()
        };
        let mut f = up_at(2);
        shift_step(&mut f);
        assert_eq!(f.at(3).unwrap(), [c(1.0), ZERO]);

        let mut f = up_at(4);
        shift_step(&mut f);
        assert_eq!(f.at(1).unwrap(), [c(1.0), ZERO]);

        let mut f =
            ChiralAmplitudeField::localized(4, &InitialCondition::new(1, Chirality::Down)).unwrap();
        shift_step(&mut f);
        assert_eq!(f.at(4).unwrap(), [ZERO, c(1.0)]);
    }

    #[test]
    fn shift_on_tiny_rings() {
        let mut f = single_site([c(0.6), c(0.8)]);
        shift_step(&mut f);
        assert_eq!(f.amplitudes()[0], [c(0.6), c(0.8)]);

        let mut f =
            ChiralAmplitudeField::from_amplitudes(vec![[c(0.6), c(0.8)], [ZERO; 2]]).unwrap();
        shift_step(&mut f);
        assert_eq!(f.amplitudes()[1], [c(0.6), c(0.8)]);
    }

    #[test]
    fn absorb_without_traps_is_identity() {
        let mut f =
            ChiralAmplitudeField::localized(5, &InitialCondition::new(2, Chirality::Symmetric))
                .unwrap();
        let before = f.clone();
        let mass = absorb(&mut f, &TrapConfiguration::empty(5).unwrap()).unwrap();
        assert_eq!(mass, 0.0);
        assert_eq!(f, before);
    }

    #[test]
    fn absorb_whole_field() {
        let mut f =
            ChiralAmplitudeField::localized(5, &InitialCondition::new(3, Chirality::Symmetric))
                .unwrap();
        let traps = TrapConfiguration::new(5, [3]).unwrap();
        let mass = absorb(&mut f, &traps).unwrap();
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-15);
        assert_eq!(f.norm_sqr(), 0.0);
    }

    #[test]
    fn absorb_rejects_size_mismatch() {
        let mut f = ChiralAmplitudeField::zeros(4).unwrap();
        let err = absorb(&mut f, &TrapConfiguration::empty(5).unwrap()).unwrap_err();
        assert_eq!(err, Error::SizeMismatch { field: 4, traps: 5 });
    }

    #[test]
    fn absorbed_mass_after_two_steps() {
        let traps = TrapConfiguration::new(5, [3]).unwrap();
        let coin = CoinSpec::hadamard();
        let mut f =
            ChiralAmplitudeField::localized(5, &InitialCondition::new(1, Chirality::Up)).unwrap();
        assert_eq!(step(&mut f, &coin, &traps).unwrap(), 0.0);
        assert_abs_diff_eq!(step(&mut f, &coin, &traps).unwrap(), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn evolve_rejects_start_on_trap() {
        let traps = TrapConfiguration::new(5, [3]).unwrap();
        let err = evolve_survival(
            &InitialCondition::new(3, Chirality::Up),
            &traps,
            &CoinSpec::hadamard(),
            3,
        )
        .unwrap_err();
        assert_eq!(err, Error::StartOnTrap(3));
    }

    #[test]
    fn evolve_rejects_out_of_range_start() {
        let traps = TrapConfiguration::empty(5).unwrap();
        let err = evolve_survival(
            &InitialCondition::new(6, Chirality::Up),
            &traps,
            &CoinSpec::hadamard(),
            3,
        )
        .unwrap_err();
        assert_eq!(err, Error::SiteOutOfRange { site: 6, size: 5 });
    }

    #[test]
    fn two_adjacent_traps_kill_in_one_step() {
        let traps = TrapConfiguration::new(3, [2, 3]).unwrap();
        let s = evolve_survival(
            &InitialCondition::new(1, Chirality::Up),
            &traps,
            &CoinSpec::hadamard(),
            2,
        )
        .unwrap();
        assert_eq!(s[0], 1.0);
        assert_abs_diff_eq!(s[1], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn unnormalized_state_rejected() {
        let err = Chirality::State([c(1.0), c(1.0)]).amplitudes().unwrap_err();
        assert!(matches!(err, Error::UnnormalizedChirality { .. }));
    }

    #[test]
    fn void_survival_single_site_dies_immediately() {
        let s = void_survival(1, 0, [c(1.0), ZERO], &CoinSpec::hadamard(), 5);
        assert_eq!(s, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }
}
