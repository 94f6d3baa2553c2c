use std::collections::HashSet;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng;

use super::replicator::{average_fitness, normalize_fitness, replicator_step};
use crate::domain::{Scenario, StrategyProfile};
use crate::error::{Error, Result};
use crate::scalar::{ordered_sum, Scalar};

/// Distinct strategy profiles with their population shares.
#[derive(Clone, Debug, PartialEq)]
pub struct Population<T: Scalar> {
    pub individuals: Vec<StrategyProfile>,
    pub shares: Vec<T>,
}

/// Record of one strategy-level imitation: `learner` adopted the whole strategy of
/// provider `provider_pos` from `donor`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Imitation {
    pub learner: usize,
    pub donor: usize,
    pub provider_pos: usize,
    /// False when the copy would have duplicated an existing individual.
    pub applied: bool,
}

impl<T: Scalar> Population<T> {
    pub fn new(individuals: Vec<StrategyProfile>, shares: Vec<T>) -> Result<Self> {
        if individuals.is_empty() || individuals.len() != shares.len() {
            return Err(Error::Model("population needs one share per individual".into()));
        }
        if shares.iter().any(|&x| !(x >= T::zero())) {
            return Err(Error::Model("negative population share".into()));
        }
        if (ordered_sum(&shares) - T::one()).abs() > T::of(1e-9) {
            return Err(Error::Model("population shares do not sum to 1".into()));
        }
        let distinct: HashSet<&[usize]> = individuals.iter().map(|p| p.assignment()).collect();
        if distinct.len() != individuals.len() {
            return Err(Error::Model("population individuals are not distinct".into()));
        }
        Ok(Self { individuals, shares })
    }

    pub fn uniform(individuals: Vec<StrategyProfile>) -> Result<Self> {
        let n = T::of_usize(individuals.len().max(1));
        let shares = vec![T::one() / n; individuals.len()];
        Self::new(individuals, shares)
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    /// Index of the largest share, lowest index on ties.
    pub fn dominant(&self) -> usize {
        let mut best = 0;
        for (i, &x) in self.shares.iter().enumerate() {
            if x > self.shares[best] {
                best = i;
            }
        }
        best
    }

    fn contains(&self, profile: &StrategyProfile) -> bool {
        self.individuals.iter().any(|p| p == profile)
    }

    /// Adds `invader` with share `share`, scaling everyone else by `1 - share`. The
    /// lowest-share individual other than `keep` makes room; an invader already present
    /// just has its share reset.
    pub fn invade(&mut self, invader: StrategyProfile, share: T, keep: usize) {
        let rest = T::one() - share;
        if let Some(i) = self.individuals.iter().position(|p| *p == invader) {
            let others = ordered_sum(&self.shares) - self.shares[i];
            for (j, x) in self.shares.iter_mut().enumerate() {
                *x = if j == i { share } else if others > T::zero() { *x / others * rest } else { T::zero() };
            }
            return;
        }
        let slot = (0..self.len())
            .filter(|&j| j != keep)
            .min_by(|&a, &b| self.shares[a].partial_cmp(&self.shares[b]).unwrap().then(b.cmp(&a)));
        match slot {
            Some(j) => {
                self.individuals[j] = invader;
                let others = ordered_sum(&self.shares) - self.shares[j];
                for (k, x) in self.shares.iter_mut().enumerate() {
                    *x = if k == j { share } else { *x / others * rest };
                }
            }
            None => {
                for x in self.shares.iter_mut() {
                    *x *= rest;
                }
                self.individuals.push(invader);
                self.shares.push(share);
            }
        }
    }
}

/// Fitness of every individual and the share-weighted average.
pub fn population_fitness<T: Scalar>(population: &Population<T>, fitnesses: &[T]) -> T {
    average_fitness(&population.shares, fitnesses)
}

/// Picks an imitation donor with probability proportional to `weights`.
pub fn pick_donor<T: Scalar, R: Rng + ?Sized>(weights: &[T], rng: &mut R) -> usize {
    let w: Vec<f64> = weights.iter().map(|x| x.as_f64()).collect();
    WeightedIndex::new(w).expect("positive donor weights").sample(rng)
}

/// Replicator update of the shares on normalized fitness, then with probability
/// `exploration_rate` one below-average individual copies one provider's entire
/// strategy from a fitness-weighted donor.
pub fn replicate_strategies<T: Scalar, R: Rng + ?Sized>(
    population: &Population<T>,
    fitnesses: &[T],
    dt: T,
    fitness_epsilon: T,
    exploration_rate: f64,
    scenario: &Scenario<T>,
    rng: &mut R,
) -> Result<(Population<T>, Option<Imitation>)> {
    let norm = normalize_fitness(fitnesses, fitness_epsilon);
    let shares = replicator_step(&population.shares, &norm, dt)?;
    let mut next = Population { individuals: population.individuals.clone(), shares };
    if population.len() < 2 || exploration_rate <= 0.0 || !rng.gen_bool(exploration_rate.min(1.0)) {
        return Ok((next, None));
    }
    let v = population_fitness(population, fitnesses);
    let below: Vec<usize> = (0..population.len()).filter(|&i| fitnesses[i] < v).collect();
    let Some(&learner) = below.choose(rng) else {
        return Ok((next, None));
    };
    let donor = pick_donor(&norm, rng);
    let provider_pos = rng.gen_range(0..scenario.providers().len());
    let mut copy = next.individuals[learner].clone();
    for &pos in scenario.provider_server_positions(provider_pos) {
        copy.set(pos, population.individuals[donor].federation_at(pos));
    }
    let applied = !next.contains(&copy);
    if applied {
        next.individuals[learner] = copy;
    }
    Ok((next, Some(Imitation { learner, donor, provider_pos, applied })))
}
