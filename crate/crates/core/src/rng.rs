use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Counter-based seed: a master seed plus a configuration index.
///
/// Every configuration draws from its own ChaCha8 stream keyed by the master
/// seed, so any configuration can be regenerated in isolation and the result
/// does not depend on how configurations are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConfigSeed {
    pub master_seed: u64,
    pub configuration: u64,
}

impl ConfigSeed {
    pub fn new(master_seed: u64, configuration: u64) -> Self {
        Self {
            master_seed,
            configuration,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.configuration);
        rng
    }
}
