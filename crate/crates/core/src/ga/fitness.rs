use std::collections::HashMap;

use rayon::prelude::*;

use crate::domain::{evaluate_profile, QosOracle, Scenario, StrategyProfile};
use crate::scalar::{ordered_sum, population_std, Scalar};

/// `Σ u(f) - λ·std(u(f_1..f_m))`: welfare penalised by the spread of federation
/// utilities.
pub fn fitness_of_utilities<T: Scalar>(utilities: &[T], lambda: T) -> T {
    ordered_sum(utilities) - lambda * population_std(utilities)
}

pub fn fitness<T: Scalar>(
    profile: &StrategyProfile,
    scenario: &Scenario<T>,
    oracle: &(impl QosOracle<T> + ?Sized),
    lambda: T,
) -> T {
    fitness_of_utilities(&evaluate_profile(profile, scenario, oracle).federation_utilities, lambda)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scored<T> {
    pub fitness: T,
    pub federation_utilities: Vec<T>,
}

impl<T: Scalar> Scored<T> {
    pub fn welfare(&self) -> T {
        ordered_sum(&self.federation_utilities)
    }
}

/// Memoizing fitness evaluator. Misses are evaluated in parallel; results do not
/// depend on evaluation order.
pub struct Evaluator<'a, T: Scalar, O: QosOracle<T> + ?Sized> {
    scenario: &'a Scenario<T>,
    oracle: &'a O,
    lambda: T,
    cache: HashMap<Vec<usize>, Scored<T>>,
}

impl<'a, T: Scalar, O: QosOracle<T> + ?Sized> Evaluator<'a, T, O> {
    pub fn new(scenario: &'a Scenario<T>, oracle: &'a O, lambda: T) -> Self {
        Self { scenario, oracle, lambda, cache: HashMap::new() }
    }

    pub fn scenario(&self) -> &'a Scenario<T> {
        self.scenario
    }

    pub fn oracle(&self) -> &'a O {
        self.oracle
    }

    pub fn score(&mut self, profile: &StrategyProfile) -> Scored<T> {
        self.score_many(std::slice::from_ref(profile)).pop().unwrap()
    }

    pub fn score_many(&mut self, profiles: &[StrategyProfile]) -> Vec<Scored<T>> {
        let mut missing: Vec<&StrategyProfile> = profiles
            .iter()
            .filter(|p| !self.cache.contains_key(p.assignment()))
            .collect();
        missing.sort_by(|a, b| a.assignment().cmp(b.assignment()));
        missing.dedup();
        let (scenario, oracle, lambda) = (self.scenario, self.oracle, self.lambda);
        let fresh: Vec<Scored<T>> = missing
            .par_iter()
            .map(|p| {
                let utilities = evaluate_profile(p, scenario, oracle).federation_utilities;
                Scored { fitness: fitness_of_utilities(&utilities, lambda), federation_utilities: utilities }
            })
            .collect();
        for (p, s) in missing.into_iter().zip(fresh) {
            self.cache.insert(p.assignment().to_vec(), s);
        }
        profiles.iter().map(|p| self.cache[p.assignment()].clone()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_fitness_values() {
        assert_eq!(fitness_of_utilities(&[7.0_f64], 1.0), 7.0);
        assert_eq!(fitness_of_utilities(&[10.0_f64, 10.0], 1.0), 20.0);
        let unfair = fitness_of_utilities(&[0.0_f64, 20.0], 1.0);
        assert_eq!(unfair, 10.0);
        assert!(unfair < fitness_of_utilities(&[10.0, 10.0], 1.0));
    }
}
