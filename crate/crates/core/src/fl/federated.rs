use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::eval::{evaluate, EvalReport, RoundMetrics};
use super::fedavg::fed_avg;
use super::model::{init_model, ModelParams, ModelSpec, Samples};
use super::selection::{select_clients, Selection};
use super::train::{local_train, LocalSchedule, TrainConfig};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seed::derive_seed;

const SELECTION_STREAM: u64 = 0x005e_1ec7;

/// A data holder in federated training. Its samples are private: the only thing a
/// client hands back is a trained parameter vector and its sample count.
pub struct Client<T: Scalar> {
    id: usize,
    samples: Samples<T>,
}

/// What a client sends to the aggregator after a round.
#[derive(Clone, Debug)]
pub struct ClientUpdate<T: Scalar> {
    pub client: usize,
    pub params: ModelParams<T>,
    pub samples: usize,
}

impl<T: Scalar> Client<T> {
    pub fn new(id: usize, samples: Samples<T>) -> Self {
        Self { id, samples }
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn size(&self) -> usize {
        self.samples.len()
    }

    pub fn train(&self, global: &ModelParams<T>, config: &TrainConfig, round: usize) -> Result<ClientUpdate<T>> {
        let schedule = LocalSchedule {
            client: self.id,
            round,
            first_epoch: round * config.local_epochs,
        };
        let params = local_train(global, &self.samples, config, schedule)?;
        Ok(ClientUpdate { client: self.id, params, samples: self.samples.len() })
    }
}

/// Rounds of select, broadcast, local training and FedAvg, starting from
/// `init_model(spec, config.seed)`. History holds the test metrics of the initial
/// model (round 0) and of the global model after every round.
pub fn run_federated_training<T: Scalar>(
    clients: &[Client<T>],
    spec: &ModelSpec,
    config: &TrainConfig,
    selection: Selection,
    test: &Samples<T>,
) -> Result<(ModelParams<T>, EvalReport<T>)> {
    config.validate()?;
    spec.validate()?;
    if clients.iter().all(|c| c.size() == 0) {
        return Err(Error::Data("every client shard is empty".into()));
    }
    test.check_width(spec)?;
    let mut global = init_model(spec, config.seed);
    let sizes: Vec<usize> = clients.iter().map(Client::size).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &[SELECTION_STREAM]));
    let mut history = vec![metrics(0, &global, test)];
    for round in 0..config.rounds {
        let picked = select_clients(&sizes, config.clients_per_round, selection, &mut rng)?;
        let updates: Vec<ClientUpdate<T>> = picked
            .par_iter()
            .map(|&i| clients[i].train(&global, config, round))
            .collect::<Result<_>>()?;
        let refs: Vec<(&ModelParams<T>, usize)> = updates.iter().map(|u| (&u.params, u.samples)).collect();
        global = fed_avg(&refs)?;
        history.push(metrics(round + 1, &global, test));
    }
    let last = *history.last().unwrap();
    Ok((global, EvalReport { mse: last.mse, mae: last.mae, history }))
}

fn metrics<T: Scalar>(round: usize, params: &ModelParams<T>, test: &Samples<T>) -> RoundMetrics<T> {
    let r = evaluate(params, test);
    RoundMetrics { round, mse: r.mse, mae: r.mae }
}
