//! Quenched trap configurations on the `K`-cycle.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::ConfigSeed;

/// A fixed set of perfect absorbing traps on a ring of `size` sites.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrapConfiguration {
    size: usize,
    /// Sorted, distinct, 1-based.
    sites: Vec<usize>,
    /// Density requested when sampling; equals the realized density for
    /// hand-built configurations.
    target_rho: f64,
    seed: Option<ConfigSeed>,
    #[cfg_attr(feature = "serde", serde(skip))]
    mask: Vec<bool>,
}

/// A maximal run of consecutive untrapped sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Void {
    /// 1-based label of the first site in ring order.
    pub first_site: usize,
    pub len: usize,
}

impl TrapConfiguration {
    pub fn empty(size: usize) -> Result<Self> {
        Self::new(size, [])
    }

    /// A hand-placed configuration. Sites are 1-based and may be given in any
    /// order, but must be distinct. At least one site must stay free.
    pub fn new(size: usize, sites: impl IntoIterator<Item = usize>) -> Result<Self> {
        if size == 0 {
            return Err(Error::invalid("lattice size", "must be at least 1"));
        }
        let mut mask = vec![false; size];
        let mut list = Vec::new();
        for site in sites {
            if site == 0 || site > size {
                return Err(Error::SiteOutOfRange { site, size });
            }
            if core::mem::replace(&mut mask[site - 1], true) {
                return Err(Error::DuplicateTrap(site));
            }
            list.push(site);
        }
        if list.len() >= size {
            return Err(Error::NoWalkers);
        }
        list.sort_unstable();
        let target_rho = list.len() as f64 / size as f64;
        Ok(Self {
            size,
            sites: list,
            target_rho,
            seed: None,
            mask,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn count(&self) -> usize {
        self.sites.len()
    }

    /// Number of walkers `N = K − n`.
    pub fn free_count(&self) -> usize {
        self.size - self.sites.len()
    }

    /// Realized density `n / K`.
    pub fn rho(&self) -> f64 {
        self.sites.len() as f64 / self.size as f64
    }

    pub fn target_rho(&self) -> f64 {
        self.target_rho
    }

    pub fn seed(&self) -> Option<ConfigSeed> {
        self.seed
    }

    pub fn is_trap(&self, site: usize) -> bool {
        site >= 1 && site <= self.size && self.is_trap_index(site - 1)
    }

    pub(crate) fn is_trap_index(&self, idx: usize) -> bool {
        if self.mask.len() == self.size {
            self.mask[idx]
        } else {
            self.sites.binary_search(&(idx + 1)).is_ok()
        }
    }

    /// Trap indicator indexed by `site − 1`.
    pub fn mask(&self) -> Vec<bool> {
        (0..self.size).map(|i| self.is_trap_index(i)).collect()
    }

    /// Untrapped 1-based sites in increasing order.
    pub fn free_sites(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.size).filter(move |&s| !self.is_trap_index(s - 1))
    }

    /// Maximal untrapped runs, ordered by `first_site`. Empty when there are
    /// no traps (the ring has no boundary). A run may wrap past site `K`.
    pub fn voids(&self) -> Vec<Void> {
        let n = self.sites.len();
        let mut voids = Vec::with_capacity(n);
        for (i, &trap) in self.sites.iter().enumerate() {
            let next = if i + 1 < n {
                self.sites[i + 1]
            } else {
                self.sites[0] + self.size
            };
            let len = next - trap - 1;
            if len > 0 {
                let first_site = if trap == self.size { 1 } else { trap + 1 };
                voids.push(Void { first_site, len });
            }
        }
        voids.sort_unstable_by_key(|v| v.first_site);
        voids
    }
}

/// Number of traps realized for a requested density: `round(ρK)`.
pub fn trap_count(size: usize, rho: f64) -> Result<usize> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::invalid("rho", "must satisfy 0 <= rho < 1"));
    }
    let n = libm::round(rho * size as f64) as usize;
    if n >= size {
        return Err(Error::invalid(
            "rho",
            alloc::format!("round(rho*K) = {n} leaves no untrapped site on K = {size}"),
        ));
    }
    Ok(n)
}

/// Draws `round(ρK)` distinct trap sites uniformly without replacement from
/// the configuration's own random stream.
pub fn sample_traps(size: usize, rho: f64, seed: ConfigSeed) -> Result<TrapConfiguration> {
    let mut rng = seed.rng();
    sample_traps_with(size, rho, seed, &mut rng)
}

pub(crate) fn sample_traps_with<R: Rng + ?Sized>(
    size: usize,
    rho: f64,
    seed: ConfigSeed,
    rng: &mut R,
) -> Result<TrapConfiguration> {
    if size == 0 {
        return Err(Error::invalid("lattice size", "must be at least 1"));
    }
    let n = trap_count(size, rho)?;
    let picks = rand::seq::index::sample(rng, size, n);
    let mut config = TrapConfiguration::new(size, picks.into_iter().map(|i| i + 1))?;
    config.target_rho = rho;
    config.seed = Some(seed);
    Ok(config)
}
