pub mod baselines;
pub mod data;
pub mod domain;
pub mod error;
pub mod evo;
pub mod experiment;
pub mod fixtures;
pub mod fl;
pub mod ga;
pub mod scalar;
pub mod seed;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision instantiations used by the pipeline and the CLI.
pub type Scenario = domain::Scenario<f64>;
pub type EconomicModel = domain::EconomicModel<f64>;
pub type ModelParams = fl::ModelParams<f64>;
pub type QosPredictor = fl::QosPredictor<f64>;
pub type QosTable = domain::QosTable<f64>;
