//! Classical random walk on the trapped ring by exact enumeration.
//!
//! The occupation at each site is replaced by the average of its two
//! neighbours, then trap sites are zeroed. Because this map is linear, the
//! summed survival of one walker per free site equals the survival of a
//! single vector started from the free-site indicator, which is what
//! [`survival_aggregate`] propagates.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::traps::TrapConfiguration;

/// Non-negative occupation per site, indexed by `site − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityField {
    p: Vec<f64>,
}

impl ProbabilityField {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::invalid("lattice size", "must be at least 1"));
        }
        if let Some(bad) = p.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::invalid(
                "probability field",
                alloc::format!("entry {bad} is not a finite non-negative number"),
            ));
        }
        Ok(Self { p })
    }

    /// Unit mass on one 1-based site.
    pub fn delta(size: usize, site: usize) -> Result<Self> {
        let idx = crate::walk::site_index(site, size)?;
        let mut p = vec![0.0; size];
        p[idx] = 1.0;
        Ok(Self { p })
    }

    /// One unit of mass on every untrapped site.
    pub fn free_indicator(traps: &TrapConfiguration) -> Self {
        Self {
            p: traps
                .mask()
                .into_iter()
                .map(|trapped| if trapped { 0.0 } else { 1.0 })
                .collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.p.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.p
    }

    pub fn mass(&self) -> f64 {
        self.p.iter().sum()
    }
}

/// `p'(k) = (p(k−1) + p(k+1)) / 2` cyclically, then zero on traps.
pub fn crw_step(field: &ProbabilityField, traps: &TrapConfiguration) -> Result<ProbabilityField> {
    check_size(field.size(), traps)?;
    let mut out = vec![0.0; field.size()];
    step_into(&field.p, &mut out, traps.sites());
    Ok(ProbabilityField { p: out })
}

fn check_size(size: usize, traps: &TrapConfiguration) -> Result<()> {
    if traps.size() != size {
        return Err(Error::SizeMismatch {
            field: size,
            traps: traps.size(),
        });
    }
    Ok(())
}

#[inline]
fn step_into(p: &[f64], out: &mut [f64], traps: &[usize]) {
    let k = p.len();
    if k == 1 {
        out[0] = p[0];
    } else {
        out[0] = 0.5 * (p[k - 1] + p[1]);
        for i in 1..k - 1 {
            out[i] = 0.5 * (p[i - 1] + p[i + 1]);
        }
        out[k - 1] = 0.5 * (p[k - 2] + p[0]);
    }
    for &site in traps {
        out[site - 1] = 0.0;
    }
}

/// Mean survival of one walker per free site, `t = 0..=steps`, computed
/// from a single propagated vector in `O(K · steps)`.
pub fn survival_aggregate(traps: &TrapConfiguration, steps: usize) -> Result<Vec<f64>> {
    let walkers = traps.free_count();
    if walkers == 0 {
        return Err(Error::NoWalkers);
    }
    let norm = walkers as f64;
    let mut p = ProbabilityField::free_indicator(traps).p;
    let mut scratch = vec![0.0; p.len()];
    let mut survival = Vec::with_capacity(steps + 1);
    survival.push(p.iter().sum::<f64>() / norm);
    for _ in 0..steps {
        step_into(&p, &mut scratch, traps.sites());
        core::mem::swap(&mut p, &mut scratch);
        survival.push(p.iter().sum::<f64>() / norm);
    }
    Ok(survival)
}

/// Walker-by-walker enumeration: one delta per free site, each propagated on
/// its own, survivals averaged. `O(K² · steps)`; kept as the reference the
/// aggregate path is checked against.
pub fn survival_per_walker(traps: &TrapConfiguration, steps: usize) -> Result<Vec<f64>> {
    let walkers = traps.free_count();
    if walkers == 0 {
        return Err(Error::NoWalkers);
    }
    let mut total = vec![0.0; steps + 1];
    for site in traps.free_sites() {
        let mut field = ProbabilityField::delta(traps.size(), site)?;
        total[0] += field.mass();
        for slot in total.iter_mut().skip(1) {
            field = crw_step(&field, traps)?;
            *slot += field.mass();
        }
    }
    let norm = walkers as f64;
    Ok(total.into_iter().map(|s| s / norm).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_field_is_fixed_point() {
        let f = ProbabilityField::new(vec![0.25; 8]).unwrap();
        let g = crw_step(&f, &TrapConfiguration::empty(8).unwrap()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn delta_splits_to_neighbours() {
        let traps = TrapConfiguration::empty(6).unwrap();
        let g = crw_step(&ProbabilityField::delta(6, 1).unwrap(), &traps).unwrap();
        assert_eq!(g.values(), &[0.0, 0.5, 0.0, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn trap_zeroes_arriving_mass() {
        let traps = TrapConfiguration::new(5, [3]).unwrap();
        let g = crw_step(&ProbabilityField::delta(5, 2).unwrap(), &traps).unwrap();
        assert_eq!(g.values()[0], 0.5);
        assert_eq!(g.values()[2], 0.0);
        assert_eq!(g.mass(), 0.5);
    }

    #[test]
    fn aggregate_without_traps_conserves() {
        let s = survival_aggregate(&TrapConfiguration::empty(9).unwrap(), 100).unwrap();
        assert!(s.iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn both_neighbours_trapped() {
        let traps = TrapConfiguration::new(3, [2, 3]).unwrap();
        let s = survival_aggregate(&traps, 2).unwrap();
        assert_eq!(s, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn rejects_mismatched_field() {
        let err = crw_step(
            &ProbabilityField::delta(4, 1).unwrap(),
            &TrapConfiguration::empty(5).unwrap(),
        )
        .unwrap_err();
        assert_eq!(err, Error::SizeMismatch { field: 4, traps: 5 });
        assert!(ProbabilityField::new(vec![0.5, -0.1]).is_err());
    }
}
