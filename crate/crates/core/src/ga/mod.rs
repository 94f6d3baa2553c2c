//! Genetic search over integer-encoded strategy profiles.

mod chromosome;
mod engine;
mod fitness;
mod operators;

pub use chromosome::{decode, encode, Chromosome};
pub use engine::{run_ga, run_ga_open_ended, GaConfig, GaOutcome, GenerationRecord, OpenEndedRecord};
pub(crate) use engine::initial_population;
pub use fitness::{fitness, fitness_of_utilities, Evaluator, Scored};
pub use operators::{crossover, crossover_at, mutate, roulette_select, ROULETTE_EPSILON};
