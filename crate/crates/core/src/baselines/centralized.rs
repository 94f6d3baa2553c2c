use crate::error::Result;
use crate::fl::{evaluate, init_model, local_train, EvalReport, LocalSchedule, ModelParams, ModelSpec, RoundMetrics, Samples, TrainConfig};
use crate::scalar::Scalar;

/// Non-federated reference: the same SGD schedule on all training data pooled in one
/// place, for `config.rounds` rounds of `config.local_epochs` epochs.
pub fn centralized_train<T: Scalar>(
    samples: &Samples<T>,
    spec: &ModelSpec,
    config: &TrainConfig,
    test: &Samples<T>,
) -> Result<(ModelParams<T>, EvalReport<T>)> {
    config.validate()?;
    spec.validate()?;
    let mut params = init_model(spec, config.seed);
    let metrics = |round, p: &ModelParams<T>| {
        let r = evaluate(p, test);
        RoundMetrics { round, mse: r.mse, mae: r.mae }
    };
    let mut history = vec![metrics(0, &params)];
    for round in 0..config.rounds {
        let schedule = LocalSchedule { client: 0, round, first_epoch: round * config.local_epochs };
        params = local_train(&params, samples, config, schedule)?;
        history.push(metrics(round + 1, &params));
    }
    let last = *history.last().unwrap();
    Ok((params, EvalReport { mse: last.mse, mae: last.mae, history }))
}
