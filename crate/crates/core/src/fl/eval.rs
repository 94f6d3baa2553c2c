use serde::{Deserialize, Serialize};

use super::model::{ModelParams, Samples, Workspace};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct RoundMetrics<T: Scalar> {
    pub round: usize,
    pub mse: T,
    pub mae: T,
}

/// Test error on normalized targets, with the per-round trajectory when produced by
/// training.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EvalReport<T: Scalar> {
    pub mse: T,
    pub mae: T,
    pub history: Vec<RoundMetrics<T>>,
}

pub fn evaluate<T: Scalar>(params: &ModelParams<T>, test: &Samples<T>) -> EvalReport<T> {
    let mut ws = Workspace::new(&params.spec);
    let (mut se, mut ae) = (T::zero(), T::zero());
    for (row, &y) in test.rows.iter().zip(&test.targets) {
        let r = ws.forward(params, row) - y;
        se += r * r;
        ae += r.abs();
    }
    let n = T::of_usize(test.len().max(1));
    EvalReport { mse: se / n, mae: ae / n, history: Vec::new() }
}
