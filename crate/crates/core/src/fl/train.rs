use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{ModelParams, Samples, Workspace};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seed::derive_seed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub local_epochs: usize,
    pub batch_size: usize,
    pub rounds: usize,
    pub clients_per_round: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            local_epochs: 1,
            batch_size: 32,
            rounds: 20,
            clients_per_round: 4,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!("learning rate {} is invalid", self.learning_rate)));
        }
        if self.local_epochs == 0 || self.batch_size == 0 || self.clients_per_round == 0 {
            return Err(Error::Config(
                "local_epochs, batch_size and clients_per_round must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Where a local training call sits in the global schedule. Epoch shuffles are
/// seeded from `(seed, client, first_epoch + e)`, so one call over `k` epochs is
/// identical to `k` consecutive one-epoch calls.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LocalSchedule {
    pub client: usize,
    pub round: usize,
    pub first_epoch: usize,
}

/// `config.local_epochs` epochs of shuffled mini-batch SGD on the mean squared error.
pub fn local_train<T: Scalar>(
    params: &ModelParams<T>,
    samples: &Samples<T>,
    config: &TrainConfig,
    schedule: LocalSchedule,
) -> Result<ModelParams<T>> {
    if samples.is_empty() {
        return Err(Error::Data(format!("client {} has no training samples", schedule.client)));
    }
    samples.check_width(&params.spec)?;
    config.validate()?;

    let mut out = params.clone();
    let mut ws = Workspace::new(&out.spec);
    let mut grad = vec![T::zero(); out.values.len()];
    let lr = T::of(config.learning_rate);
    let mut order: Vec<usize> = (0..samples.len()).collect();

    for e in 0..config.local_epochs {
        let epoch = schedule.first_epoch + e;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
            config.seed,
            &[schedule.client as u64, epoch as u64],
        ));
        order.sort_unstable();
        order.shuffle(&mut rng);

        for (batch, chunk) in order.chunks(config.batch_size).enumerate() {
            let n = T::of_usize(chunk.len());
            let mut loss = T::zero();
            grad.iter_mut().for_each(|g| *g = T::zero());
            for &i in chunk {
                let row = &samples.rows[i];
                let r = ws.forward(&out, row) - samples.targets[i];
                loss += r * r;
                ws.backward(&out, row, (r + r) / n, &mut grad);
            }
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss { round: schedule.round, epoch, batch });
            }
            for (p, &g) in out.values.iter_mut().zip(&grad) {
                *p -= lr * g;
            }
        }
    }
    Ok(out)
}
