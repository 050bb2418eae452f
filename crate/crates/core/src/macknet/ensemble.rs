use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neural::{train, Sample, TrainConfig, TrainedNetwork};
use crate::rng::{substream, Domain};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnsembleConfig {
    pub members: usize,
    /// Master seed; member seeds are derived from it.
    pub seed: u64,
    /// Shared by every member except for its seed.
    pub train: TrainConfig,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            members: 20,
            seed: 0,
            train: TrainConfig::default(),
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.members == 0 {
            return Err(Error::invalid("ensemble needs at least one member"));
        }
        self.train.validate()
    }

    /// Seed of member `k` on its `attempt`-th training run.
    pub fn member_seed(&self, k: usize, attempt: usize) -> u64 {
        let mut rng = substream(self.seed, Domain::MemberSeed, k as u64);
        (0..attempt).for_each(|_| {
            rng.next_u64();
        });
        rng.next_u64()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub index: usize,
    /// Training runs used; 2 when the first diverged.
    pub attempts: usize,
    pub trained: TrainedNetwork,
}

/// Trains `cfg.members` networks on the same samples, in parallel. A member
/// whose training diverges is retrained once with a fresh derived seed.
pub fn train_ensemble(samples: &[Sample], validation: &[Sample], cfg: &EnsembleConfig) -> Result<Vec<Member>> {
    cfg.validate()?;
    (0..cfg.members)
        .into_par_iter()
        .map(|k| {
            let mut tc = cfg.train.clone();
            tc.seed = cfg.member_seed(k, 0);
            match train(samples, validation, &tc) {
                Ok(trained) => Ok(Member { index: k, attempts: 1, trained }),
                Err(Error::Divergence(msg)) => {
                    log::warn!("member {k} diverged ({msg}); retrying with a new seed");
                    tc.seed = cfg.member_seed(k, 1);
                    let trained = train(samples, validation, &tc)
                        .map_err(|e| Error::Divergence(format!("member {k} diverged twice: {e}")))?;
                    Ok(Member { index: k, attempts: 2, trained })
                }
                Err(e) => Err(e),
            }
        })
        .collect()
}
