//! Feed-forward QoS regression trained by federated averaging.

mod eval;
mod federated;
mod fedavg;
mod io;
mod model;
mod predictor;
mod selection;
mod train;

pub use eval::{evaluate, EvalReport, RoundMetrics};
pub use federated::{run_federated_training, Client, ClientUpdate};
pub use fedavg::fed_avg;
pub use io::{load_model, save_model, write_history_csv};
pub use model::{init_model, loss_and_gradient, mse_loss, Activation, ModelParams, ModelSpec, Samples, SparseRow};
pub use predictor::{QosPredictor, TrainedModel, MIN_PREDICTION};
pub use selection::{select_clients, Selection};
pub use train::{local_train, LocalSchedule, TrainConfig};
