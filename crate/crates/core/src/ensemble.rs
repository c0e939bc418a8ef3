//! Configurational averages of the survival probability.
//!
//! Each configuration `r` samples its traps from its own random stream,
//! places one walker on every free site and records the mean survival
//! `P_r(t)`. The ensemble mean is reduced in fixed `r` order, so callers may
//! compute the per-configuration series in any order or in parallel and
//! still get bit-identical output from [`reduce`].

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::coin::CoinSpec;
use crate::crw;
use crate::error::{Error, Result};
use crate::rng::ConfigSeed;
use crate::traps::{self, TrapConfiguration};
use crate::walk::{self, Chirality};

/// How the coin state of each walker is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum InitKind {
    Up,
    /// Each free site independently `|↑⟩` or `|↓⟩` with probability 1/2,
    /// redrawn for every configuration.
    Mixed,
    Symmetric,
}

impl InitKind {
    pub fn name(&self) -> &'static str {
        match self {
            InitKind::Up => "up",
            InitKind::Mixed => "mixed",
            InitKind::Symmetric => "symmetric",
        }
    }
}

impl core::str::FromStr for InitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "up" => Ok(InitKind::Up),
            "mixed" => Ok(InitKind::Mixed),
            "symmetric" => Ok(InitKind::Symmetric),
            other => Err(Error::invalid(
                "init",
                alloc::format!(
                    "unknown initialization {other:?} (expected up, mixed or symmetric)"
                ),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Engine {
    Quantum {
        coin: CoinSpec,
    },
    /// Chirality is ignored.
    Classical,
}

impl Engine {
    pub fn hadamard() -> Self {
        Engine::Quantum {
            coin: CoinSpec::hadamard(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Engine::Quantum { .. } => "qw",
            Engine::Classical => "crw",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnsembleSpec {
    /// Lattice size `K`.
    pub size: usize,
    /// Requested trap density; the realized count is `round(ρK)`.
    pub rho: f64,
    pub steps: usize,
    /// Number of trap configurations `M`.
    pub configurations: usize,
    pub init: InitKind,
    pub engine: Engine,
    pub master_seed: u64,
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return Err(Error::invalid("size", "lattice size must be at least 1"));
        }
        traps::trap_count(self.size, self.rho)?;
        if self.steps == 0 {
            return Err(Error::invalid("steps", "must be at least 1"));
        }
        if self.configurations == 0 {
            return Err(Error::invalid("configurations", "must be at least 1"));
        }
        Ok(())
    }

    pub fn seed(&self, configuration: usize) -> ConfigSeed {
        ConfigSeed::new(self.master_seed, configuration as u64)
    }
}

/// Ensemble-averaged survival `⟨P(t)⟩` for `t = 0..=steps`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SurvivalSeries {
    pub mean: Vec<f64>,
    /// Standard error of the mean across configurations; zero when `M = 1`.
    pub stderr: Vec<f64>,
    pub spec: EnsembleSpec,
}

impl SurvivalSeries {
    pub fn steps(&self) -> usize {
        self.mean.len() - 1
    }
}

/// Traps plus resolved per-site chiralities for configuration `r`.
pub fn configuration_setup(
    spec: &EnsembleSpec,
    configuration: usize,
) -> Result<(TrapConfiguration, Vec<Chirality>)> {
    let seed = spec.seed(configuration);
    let mut rng = seed.rng();
    let traps = traps::sample_traps_with(spec.size, spec.rho, seed, &mut rng)?;
    let chiralities = match spec.init {
        InitKind::Up => vec![Chirality::Up; spec.size],
        InitKind::Symmetric => vec![Chirality::Symmetric; spec.size],
        InitKind::Mixed => {
            let mut per_site = vec![Chirality::Up; spec.size];
            for site in traps.free_sites() {
                if rng.random::<bool>() {
                    per_site[site - 1] = Chirality::Down;
                }
            }
            per_site
        }
    };
    Ok((traps, chiralities))
}

/// `P_r(t)` for one configuration index (0-based).
pub fn run_configuration(spec: &EnsembleSpec, configuration: usize) -> Result<Vec<f64>> {
    spec.validate()?;
    let (traps, chiralities) = configuration_setup(spec, configuration)?;
    match &spec.engine {
        Engine::Quantum { coin } => quantum_survival(&traps, &chiralities, coin, spec.steps),
        Engine::Classical => crw::survival_aggregate(&traps, spec.steps),
    }
}

/// Mean quantum survival of one walker per free site. `chiralities` is
/// indexed by `site − 1`; entries on trap sites are ignored.
///
/// Walkers are evolved on the void that contains them, which is exact
/// because no amplitude crosses a trap.
pub fn quantum_survival(
    traps: &TrapConfiguration,
    chiralities: &[Chirality],
    coin: &CoinSpec,
    steps: usize,
) -> Result<Vec<f64>> {
    let size = traps.size();
    if chiralities.len() != size {
        return Err(Error::SizeMismatch {
            field: chiralities.len(),
            traps: size,
        });
    }
    let walkers = traps.free_count();
    if walkers == 0 {
        return Err(Error::NoWalkers);
    }
    let mut total = vec![0.0; steps + 1];
    let mut add = |series: &[f64]| {
        for (acc, v) in total.iter_mut().zip(series) {
            *acc += v;
        }
    };

    if traps.count() == 0 {
        for site in 1..=size {
            let init = walk::InitialCondition::new(site, chiralities[site - 1]);
            add(&walk::evolve_survival(&init, traps, coin, steps)?);
        }
    } else {
        for void in traps.voids() {
            for offset in 0..void.len {
                let site = (void.first_site - 1 + offset) % size + 1;
                let amps = chiralities[site - 1].amplitudes()?;
                add(&walk::void_survival(void.len, offset, amps, coin, steps));
            }
        }
    }

    let norm = walkers as f64;
    Ok(total.into_iter().map(|s| s / norm).collect())
}

/// Combines per-configuration series (in configuration order) into the
/// ensemble mean and its standard error.
pub fn reduce(spec: &EnsembleSpec, runs: &[Vec<f64>]) -> Result<SurvivalSeries> {
    let m = runs.len();
    if m == 0 {
        return Err(Error::invalid("configurations", "no runs to reduce"));
    }
    let len = runs[0].len();
    if runs.iter().any(|r| r.len() != len) {
        return Err(Error::invalid("runs", "series lengths differ"));
    }
    let mut mean = vec![0.0; len];
    for run in runs {
        for (acc, v) in mean.iter_mut().zip(run) {
            *acc += v;
        }
    }
    for v in &mut mean {
        *v /= m as f64;
    }
    let mut stderr = vec![0.0; len];
    if m > 1 {
        for run in runs {
            for ((acc, v), mu) in stderr.iter_mut().zip(run).zip(&mean) {
                *acc += (v - mu) * (v - mu);
            }
        }
        let scale = 1.0 / ((m - 1) as f64 * m as f64);
        for v in &mut stderr {
            *v = libm::sqrt(*v * scale);
        }
    }
    Ok(SurvivalSeries {
        mean,
        stderr,
        spec: *spec,
    })
}

/// Every per-configuration series, in configuration order.
pub fn run_all(spec: &EnsembleSpec) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    (0..spec.configurations)
        .map(|r| run_configuration(spec, r))
        .collect()
}

/// Sequential configurational average.
pub fn ensemble_average(spec: &EnsembleSpec) -> Result<SurvivalSeries> {
    reduce(spec, &run_all(spec)?)
}
