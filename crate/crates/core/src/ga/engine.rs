use std::cmp::Ordering;
use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::chromosome::{encode, Chromosome};
use super::fitness::{Evaluator, Scored};
use super::operators::{crossover, mutate, roulette_select};
use crate::domain::{validate_profile, QosOracle, Scenario, StrategyProfile};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Mutation rate used to spread seed profiles into a full initial population.
const SEED_SPREAD_RATE: f64 = 0.2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population_size: usize,
    pub mutation_rate: f64,
    pub lambda_fairness: f64,
    pub max_generations: usize,
    pub stall_generations: usize,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 40,
            mutation_rate: 0.05,
            lambda_fairness: 0.5,
            max_generations: 200,
            stall_generations: 30,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::Config("GA population_size must be at least 2".into()));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::Config(format!("mutation rate {} outside [0, 1]", self.mutation_rate)));
        }
        if !(self.lambda_fairness >= 0.0) {
            return Err(Error::Config("lambda_fairness must be non-negative".into()));
        }
        if self.max_generations == 0 || self.stall_generations == 0 {
            return Err(Error::Config("max_generations and stall_generations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GenerationRecord<T: Scalar> {
    pub generation: usize,
    pub best_fitness: T,
    pub mean_fitness: T,
    /// Federation utilities of the generation's best individual.
    pub federation_utilities: Vec<T>,
}

#[derive(Clone, Debug)]
pub struct GaOutcome<T: Scalar> {
    pub best: StrategyProfile,
    pub best_fitness: T,
    /// Generation 0 is the initial population.
    pub history: Vec<GenerationRecord<T>>,
    /// Final population, fittest first.
    pub population: Vec<StrategyProfile>,
}

/// One epoch of the open-ended GA: the profile deployed that epoch is the best
/// member of the current population.
#[derive(Clone, Debug)]
pub struct OpenEndedRecord<T: Scalar> {
    pub epoch: usize,
    pub deployed: StrategyProfile,
    pub fitness: T,
    pub federation_utilities: Vec<T>,
    pub best_so_far: T,
}

struct Member<T> {
    profile: StrategyProfile,
    score: Scored<T>,
}

fn by_fitness_desc<T: Scalar>(a: &Member<T>, b: &Member<T>) -> Ordering {
    b.score
        .fitness
        .partial_cmp(&a.score.fitness)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.profile.assignment().cmp(b.profile.assignment()))
}

/// Elitist GA: roulette-chosen parents paired in fitness order, single-point
/// crossover, mutation, and truncation of parents plus offspring back to
/// `population_size` (distinct individuals preferred). Stops after
/// `max_generations` or when the best fitness has not improved for
/// `stall_generations` generations.
pub fn run_ga<T: Scalar, O: QosOracle<T> + ?Sized>(
    scenario: &Scenario<T>,
    oracle: &O,
    config: &GaConfig,
    initial: &[StrategyProfile],
) -> Result<GaOutcome<T>> {
    config.validate()?;
    let mut eval = Evaluator::new(scenario, oracle, T::of(config.lambda_fairness));
    run_ga_with(&mut eval, config, initial)
}

pub(crate) fn run_ga_with<T: Scalar, O: QosOracle<T> + ?Sized>(
    eval: &mut Evaluator<'_, T, O>,
    config: &GaConfig,
    initial: &[StrategyProfile],
) -> Result<GaOutcome<T>> {
    let scenario = eval.scenario();
    let m = scenario.federations();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let start = initial_population(scenario, config.population_size, config.mutation_rate, initial, &mut rng)?;
    let mut population = score_sorted(eval, start);
    let mut history = vec![record(0, &population)];
    let mut best = population[0].score.fitness;
    let mut stall = 0;

    for generation in 1..=config.max_generations {
        let offspring = breed(&population, config.population_size, config.mutation_rate, m, &mut rng)?;
        let mut union: Vec<StrategyProfile> = population.drain(..).map(|mb| mb.profile).collect();
        union.extend(offspring);
        let pool = score_sorted(eval, union);
        population = truncate_unique(pool, config.population_size);
        history.push(record(generation, &population));

        if population[0].score.fitness > best {
            best = population[0].score.fitness;
            stall = 0;
        } else {
            stall += 1;
            if stall >= config.stall_generations {
                break;
            }
        }
    }
    Ok(GaOutcome {
        best: population[0].profile.clone(),
        best_fitness: population[0].score.fitness,
        history,
        population: population.into_iter().map(|mb| mb.profile).collect(),
    })
}

/// Generational GA without elitism, run for `epochs` epochs. Offspring replace the
/// whole population every epoch, so the deployed profile keeps changing.
pub fn run_ga_open_ended<T: Scalar, O: QosOracle<T> + ?Sized>(
    scenario: &Scenario<T>,
    oracle: &O,
    config: &GaConfig,
    initial: &[StrategyProfile],
    epochs: usize,
) -> Result<Vec<OpenEndedRecord<T>>> {
    config.validate()?;
    let m = scenario.federations();
    let mut eval = Evaluator::new(scenario, oracle, T::of(config.lambda_fairness));
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let start = initial_population(scenario, config.population_size, config.mutation_rate, initial, &mut rng)?;
    let mut population = score_sorted(&mut eval, start);
    let mut best_so_far = population[0].score.fitness;
    let deploy = |epoch: usize, pop: &[Member<T>], best_so_far: T| OpenEndedRecord {
        epoch,
        deployed: pop[0].profile.clone(),
        fitness: pop[0].score.fitness,
        federation_utilities: pop[0].score.federation_utilities.clone(),
        best_so_far,
    };
    let mut trace = vec![deploy(0, &population, best_so_far)];
    for epoch in 1..=epochs {
        let offspring = breed(&population, config.population_size, config.mutation_rate, m, &mut rng)?;
        population = score_sorted(&mut eval, offspring);
        if population[0].score.fitness > best_so_far {
            best_so_far = population[0].score.fitness;
        }
        trace.push(deploy(epoch, &population, best_so_far));
    }
    Ok(trace)
}

/// Seeds (deduplicated, validated) followed by mutated copies of the seeds, or
/// uniformly random chromosomes when there are no seeds.
pub(crate) fn initial_population<T: Scalar, R: Rng + ?Sized>(
    scenario: &Scenario<T>,
    size: usize,
    mutation_rate: f64,
    seeds: &[StrategyProfile],
    rng: &mut R,
) -> Result<Vec<StrategyProfile>> {
    let (n, m) = (scenario.server_count(), scenario.federations());
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(size);
    for s in seeds {
        validate_profile(s, scenario).map_err(Error::Profile)?;
        if out.len() < size && seen.insert(s.assignment().to_vec()) {
            out.push(s.clone());
        }
    }
    let spread = SEED_SPREAD_RATE.max(mutation_rate);
    let mut attempts = 0;
    while out.len() < size {
        let genes = if out.is_empty() || seeds.is_empty() {
            (0..n).map(|_| rng.gen_range(1..=m)).collect()
        } else {
            let mut c = encode(&out[attempts % out.len()]);
            mutate(&mut c, spread, m, rng);
            c.genes
        };
        attempts += 1;
        // tiny search spaces cannot supply `size` distinct individuals
        if seen.insert(genes.clone()) || attempts > 20 * size {
            out.push(StrategyProfile::new(m, genes));
        }
    }
    Ok(out)
}

fn breed<T: Scalar, R: Rng + ?Sized>(
    population: &[Member<T>],
    count: usize,
    mutation_rate: f64,
    m: usize,
    rng: &mut R,
) -> Result<Vec<StrategyProfile>> {
    let fit: Vec<f64> = population.iter().map(|mb| mb.score.fitness.as_f64()).collect();
    // population is sorted, so sorting indices orders the mating pool by fitness
    let mut pool: Vec<usize> = (0..count).map(|_| roulette_select(&fit, rng)).collect();
    pool.sort_unstable();
    let mut children = Vec::with_capacity(count);
    for pair in pool.chunks(2) {
        let a = encode(&population[pair[0]].profile);
        if let [_, j] = *pair {
            let (x, y) = crossover(&a, &encode(&population[j].profile), rng)?;
            children.push(x);
            children.push(y);
        } else {
            children.push(a);
        }
    }
    Ok(children
        .into_iter()
        .map(|mut c: Chromosome| {
            mutate(&mut c, mutation_rate, m, rng);
            StrategyProfile::new(m, c.genes)
        })
        .collect())
}

fn score_sorted<T: Scalar, O: QosOracle<T> + ?Sized>(
    eval: &mut Evaluator<'_, T, O>,
    profiles: Vec<StrategyProfile>,
) -> Vec<Member<T>> {
    let scores = eval.score_many(&profiles);
    let mut members: Vec<Member<T>> = profiles
        .into_iter()
        .zip(scores)
        .map(|(profile, score)| Member { profile, score })
        .collect();
    members.sort_by(by_fitness_desc);
    members
}

fn truncate_unique<T: Scalar>(sorted: Vec<Member<T>>, size: usize) -> Vec<Member<T>> {
    let mut seen = HashSet::new();
    let (mut keep, mut dup) = (Vec::with_capacity(size), Vec::new());
    for mb in sorted {
        if seen.insert(mb.profile.assignment().to_vec()) {
            keep.push(mb);
        } else {
            dup.push(mb);
        }
    }
    keep.truncate(size);
    let short = size.saturating_sub(keep.len());
    keep.extend(dup.into_iter().take(short));
    keep.sort_by(by_fitness_desc);
    keep
}

fn record<T: Scalar>(generation: usize, population: &[Member<T>]) -> GenerationRecord<T> {
    let n = T::of_usize(population.len());
    let mean = population.iter().fold(T::zero(), |acc, mb| acc + mb.score.fitness) / n;
    GenerationRecord {
        generation,
        best_fitness: population[0].score.fitness,
        mean_fitness: mean,
        federation_utilities: population[0].score.federation_utilities.clone(),
    }
}
