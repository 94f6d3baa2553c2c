use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::nash::{check_strict_nash, churn, improving_moves, DeviationCheck};
use super::population::{replicate_strategies, Population};
use super::replicator::share_entropy;
use crate::domain::{validate_profile, QosOracle, Scenario, StrategyProfile};
use crate::error::{Error, Result};
use crate::ga::{initial_population, Evaluator};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvoConfig {
    pub population_size: usize,
    /// Largest per-generation share change still counted as stationary.
    pub epsilon_stationary: f64,
    pub stationary_window: usize,
    pub max_generations: usize,
    /// Euler step of the replicator equation.
    pub replication_strength: f64,
    pub exploration_rate: f64,
    /// Per-gene mutation rate used to build the initial variants of the seed.
    pub mutation_rate: f64,
    pub lambda_fairness: f64,
    /// Added to normalized fitness so the weakest individual keeps a positive weight.
    pub fitness_epsilon: f64,
    pub move_budget: usize,
    /// Generations observed after convergence.
    pub hold_generations: usize,
    /// Share given to a deviating profile injected when the dominant individual fails
    /// the deviation check.
    pub invasion_share: f64,
    pub seed: u64,
}

impl Default for EvoConfig {
    fn default() -> Self {
        Self {
            population_size: 16,
            epsilon_stationary: 1e-4,
            stationary_window: 10,
            max_generations: 500,
            replication_strength: 0.1,
            exploration_rate: 0.2,
            mutation_rate: 0.1,
            lambda_fairness: 0.5,
            fitness_epsilon: 0.01,
            move_budget: 100_000,
            hold_generations: 20,
            invasion_share: 0.1,
            seed: 0,
        }
    }
}

impl EvoConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("evo: {m}")));
        if self.population_size == 0 {
            return bad("population_size must be at least 1");
        }
        if !(self.epsilon_stationary > 0.0) {
            return bad("epsilon_stationary must be positive");
        }
        if self.stationary_window == 0 {
            return bad("stationary_window must be at least 1");
        }
        if !(self.replication_strength > 0.0) {
            return bad("replication_strength must be positive");
        }
        if !(0.0..=1.0).contains(&self.exploration_rate) || !(0.0..=1.0).contains(&self.mutation_rate) {
            return bad("rates must lie in [0, 1]");
        }
        if !(self.invasion_share > 0.0 && self.invasion_share < 1.0) {
            return bad("invasion_share must lie in (0, 1)");
        }
        if !(self.lambda_fairness >= 0.0 && self.fitness_epsilon > 0.0) {
            return bad("lambda_fairness must be non-negative and fitness_epsilon positive");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub converged: bool,
    pub generation_of_convergence: Option<usize>,
    pub deviation_check: DeviationCheck,
    /// Servers reassigned in the dominant individual at each generation (index 0 is
    /// generation 1).
    pub churn: Vec<usize>,
}

impl StabilityReport {
    /// Churn of the generations after convergence.
    pub fn post_convergence_churn(&self) -> &[usize] {
        match self.generation_of_convergence {
            Some(g) => &self.churn[g.min(self.churn.len())..],
            None => &[],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EvoGeneration<T: Scalar> {
    pub generation: usize,
    pub entropy: T,
    pub dominant_share: T,
    pub dominant_fitness: T,
    pub federation_utilities: Vec<T>,
    pub churn: usize,
    /// `-` when no check ran this generation, otherwise the check label.
    pub deviation: String,
}

#[derive(Clone, Debug)]
pub struct EvoOutcome<T: Scalar> {
    pub profile: StrategyProfile,
    pub report: StabilityReport,
    pub trace: Vec<EvoGeneration<T>>,
    pub population: Population<T>,
}

/// Replicator dynamics over a population of profiles seeded from `seed_profile`.
///
/// Each generation scores the population, applies the replicator step (with
/// occasional strategy imitation) and tracks the dominant individual. Once shares
/// have moved less than `epsilon_stationary` for `stationary_window` generations the
/// dominant profile is checked for profitable single-server deviations; if one
/// exists, the deviating profile is injected as an invader and the run continues.
/// After convergence the run is observed for `hold_generations` more generations.
pub fn run_evolution<T: Scalar, O: QosOracle<T> + ?Sized>(
    scenario: &Scenario<T>,
    oracle: &O,
    config: &EvoConfig,
    seed_profile: &StrategyProfile,
) -> Result<EvoOutcome<T>> {
    config.validate()?;
    validate_profile(seed_profile, scenario).map_err(Error::Profile)?;
    let mut eval = Evaluator::new(scenario, oracle, T::of(config.lambda_fairness));
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let start = initial_population(
        scenario,
        config.population_size,
        config.mutation_rate,
        std::slice::from_ref(seed_profile),
        &mut rng,
    )?;
    let mut population = Population::uniform(start)?;
    let dt = T::of(config.replication_strength);
    let fit_eps = T::of(config.fitness_epsilon);

    let mut dominant = population.individuals[population.dominant()].clone();
    let mut best = (eval.score(&dominant).fitness, dominant.clone());
    let mut stationary = 0;
    let mut converged_at: Option<(usize, StrategyProfile)> = None;
    let mut last_check = DeviationCheck::Pass { exhaustive: false, moves_checked: 0 };
    let mut churn_series = Vec::new();
    let mut trace = Vec::new();

    for generation in 1..=config.max_generations + config.hold_generations {
        if converged_at.is_none() && generation > config.max_generations {
            break;
        }
        let scores = eval.score_many(&population.individuals);
        let fitness: Vec<T> = scores.iter().map(|s| s.fitness).collect();
        let (next, _) = replicate_strategies(
            &population,
            &fitness,
            dt,
            fit_eps,
            config.exploration_rate,
            scenario,
            &mut rng,
        )?;
        let delta = population
            .shares
            .iter()
            .zip(&next.shares)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()));
        population = next;

        let mut deviation = "-".to_string();
        if converged_at.is_none() {
            stationary = if delta < T::of(config.epsilon_stationary) { stationary + 1 } else { 0 };
            if stationary >= config.stationary_window {
                let d = population.dominant();
                let check = check_strict_nash(&population.individuals[d], scenario, oracle, config.move_budget);
                deviation = check.label().to_string();
                if check.passed() {
                    converged_at = Some((generation, population.individuals[d].clone()));
                } else {
                    let moves = improving_moves(&population.individuals[d], scenario, oracle, config.move_budget);
                    if let Some(mv) = moves.choose(&mut rng) {
                        let pos = scenario.server_position(mv.server_id).expect("known server");
                        let invader = population.individuals[d].with_move(pos, mv.to);
                        population.invade(invader, T::of(config.invasion_share), d);
                    }
                    stationary = 0;
                }
                last_check = check;
            }
        }

        let d = population.dominant();
        let now = population.individuals[d].clone();
        let moved = churn(&dominant, &now);
        dominant = now;
        churn_series.push(moved);
        let score = eval.score(&dominant);
        if score.fitness > best.0 {
            best = (score.fitness, dominant.clone());
        }
        trace.push(EvoGeneration {
            generation,
            entropy: share_entropy(&population.shares),
            dominant_share: population.shares[d],
            dominant_fitness: score.fitness,
            federation_utilities: score.federation_utilities,
            churn: moved,
            deviation,
        });
        if let Some((g, _)) = &converged_at {
            if generation >= g + config.hold_generations {
                break;
            }
        }
    }

    let (profile, generation_of_convergence) = match converged_at {
        Some((g, p)) => (p, Some(g)),
        None => (best.1, None),
    };
    Ok(EvoOutcome {
        profile,
        report: StabilityReport {
            converged: generation_of_convergence.is_some(),
            generation_of_convergence,
            deviation_check: last_check,
            churn: churn_series,
        },
        trace,
        population,
    })
}
