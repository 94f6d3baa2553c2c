use serde::{Deserialize, Serialize};

use super::model::ModelParams;
use crate::data::{FeatureEncoder, Target, TargetScale};
use crate::domain::{Location, Qos, QosOracle, Server, User};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Smallest QoS value a predictor reports.
pub const MIN_PREDICTION: f64 = 1e-6;

/// A trained network together with everything needed to turn raw inputs into features
/// and its output back into physical units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TrainedModel<T: Scalar> {
    pub target: Target,
    pub params: ModelParams<T>,
    pub encoder: FeatureEncoder,
    pub scale: TargetScale,
}

impl<T: Scalar> TrainedModel<T> {
    pub fn new(target: Target, params: ModelParams<T>, encoder: FeatureEncoder, scale: TargetScale) -> Result<Self> {
        if params.spec.input_width() != encoder.width() {
            return Err(Error::Model(format!(
                "model input width {} does not match feature width {}",
                params.spec.input_width(),
                encoder.width()
            )));
        }
        Ok(Self { target, params, encoder, scale })
    }

    /// Normalized network output.
    pub fn predict_normalized(&self, user: Option<usize>, user_loc: Location, node: Option<usize>, node_loc: Location) -> T {
        let row = self
            .encoder
            .encode(user, (user_loc.lat, user_loc.lon), node, (node_loc.lat, node_loc.lon));
        self.params.predict(&row)
    }

    /// Prediction in physical units, clamped to at least [`MIN_PREDICTION`].
    pub fn predict(&self, user: Option<usize>, user_loc: Location, node: Option<usize>, node_loc: Location) -> T {
        let y = self.scale.denormalize(self.predict_normalized(user, user_loc, node, node_loc));
        let floor = T::of(MIN_PREDICTION);
        if y.is_finite() { y.max(floor) } else { floor }
    }
}

/// The response-time and throughput models used as a formation oracle. Scenario
/// user and server ids are the dataset's user and node ids; ids outside the trained
/// range fall back to coordinates only.
#[derive(Clone, Debug, PartialEq)]
pub struct QosPredictor<T: Scalar> {
    pub response_time: TrainedModel<T>,
    pub throughput: TrainedModel<T>,
}

impl<T: Scalar> QosPredictor<T> {
    pub fn new(response_time: TrainedModel<T>, throughput: TrainedModel<T>) -> Result<Self> {
        if response_time.target != Target::ResponseTime || throughput.target != Target::Throughput {
            return Err(Error::Model("predictor needs one rt and one tp model".into()));
        }
        Ok(Self { response_time, throughput })
    }

    pub fn predict_qos(&self, user: Option<usize>, user_loc: Location, node: Option<usize>, node_loc: Location) -> Qos<T> {
        Qos::new(
            self.response_time.predict(user, user_loc, node, node_loc),
            self.throughput.predict(user, user_loc, node, node_loc),
        )
    }
}

impl<T: Scalar> QosOracle<T> for QosPredictor<T> {
    fn predict(&self, user: &User, server: &Server) -> Qos<T> {
        self.predict_qos(Some(user.id), user.location, Some(server.id), server.location)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fl::ModelSpec;

    fn model(target: Target, bias: f64) -> TrainedModel<f64> {
        let encoder = FeatureEncoder { n_users: 2, n_nodes: 3 };
        let mut params = ModelParams::zeros(ModelSpec::linear(encoder.width()));
        *params.values.last_mut().unwrap() = bias;
        TrainedModel::new(target, params, encoder, TargetScale { min: 0.2, max: 1.2 }).unwrap()
    }

    #[test]
    fn zero_output_maps_to_training_minimum() {
        let m = model(Target::ResponseTime, 0.0);
        let here = Location::new(10.0, 20.0);
        assert_eq!(m.predict(Some(0), here, Some(1), here), 0.2);
        assert_eq!(model(Target::ResponseTime, 1.0).predict(Some(0), here, Some(1), here), 1.2);
    }

    #[test]
    fn unseen_ids_and_clamping() {
        let m = model(Target::Throughput, -5.0);
        let here = Location::new(0.0, 0.0);
        assert_eq!(m.predict(Some(99), here, None, here), MIN_PREDICTION);
        let p = QosPredictor::new(model(Target::ResponseTime, 0.5), model(Target::Throughput, 0.5)).unwrap();
        let q = p.predict_qos(Some(1000), here, Some(1000), here);
        assert!(q.response_time.is_finite() && q.throughput > 0.0);
        assert!(QosPredictor::new(model(Target::Throughput, 0.0), model(Target::Throughput, 0.0)).is_err());
    }

    #[test]
    fn width_mismatch_rejected() {
        let enc = FeatureEncoder { n_users: 2, n_nodes: 3 };
        let params = ModelParams::<f64>::zeros(ModelSpec::linear(4));
        assert!(TrainedModel::new(Target::ResponseTime, params, enc, TargetScale { min: 0.0, max: 1.0 }).is_err());
    }
}
