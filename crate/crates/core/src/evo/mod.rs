//! Replicator dynamics over a population of strategy profiles, with stationarity and
//! unilateral-deviation checks.

mod engine;
mod nash;
mod population;
mod replicator;

pub use engine::{run_evolution, EvoConfig, EvoGeneration, EvoOutcome, StabilityReport};
pub use nash::{check_strict_nash, churn, improving_moves, Deviation, DeviationCheck, STRICTNESS_MARGIN};
pub use population::{pick_donor, population_fitness, replicate_strategies, Imitation, Population};
pub use replicator::{average_fitness, normalize_fitness, replicator_step, share_entropy};
