//! Comparison engines and initializers: k-means initial profiles, simultaneous greedy
//! best response, and centralized (pooled-data) training.

mod centralized;
mod greedy;
mod kmeans;

pub use centralized::centralized_train;
pub use greedy::{greedy_round, run_greedy, run_greedy_from, GreedyConfig, GreedyTrace};
pub use kmeans::{kmeans, kmeans_init};
