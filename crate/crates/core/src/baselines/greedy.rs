use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kmeans::kmeans_init;
use crate::domain::{evaluate_profile, validate_profile, QosOracle, Scenario, StrategyProfile};
use crate::error::{Error, Result};
use crate::evo::{churn, STRICTNESS_MARGIN};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GreedyConfig {
    pub max_rounds: usize,
    /// Seed of the k-means initial profile.
    pub seed: u64,
}

impl Default for GreedyConfig {
    fn default() -> Self {
        Self { max_rounds: 50, seed: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct GreedyTrace<T: Scalar> {
    /// Profile before the first round, then after every round.
    pub profiles: Vec<StrategyProfile>,
    pub federation_utilities: Vec<Vec<T>>,
    /// Servers moved in each round.
    pub churn: Vec<usize>,
}

/// Simultaneous best response: every server independently moves to the federation
/// that maximizes its provider's utility against the current profile, if that
/// strictly beats staying. Ties between targets go to the lowest federation index.
pub fn greedy_round<T: Scalar>(
    profile: &StrategyProfile,
    scenario: &Scenario<T>,
    oracle: &(impl QosOracle<T> + ?Sized),
) -> StrategyProfile {
    let m = profile.federations();
    let base = evaluate_profile(profile, scenario, oracle);
    let incumbent: Vec<T> = base.provider_utilities(profile, scenario);
    let choices: Vec<usize> = (0..profile.len())
        .into_par_iter()
        .map(|pos| {
            let pi = scenario.server_provider_position(pos);
            let from = profile.federation_at(pos);
            let mut best = (incumbent[pi] + T::of(STRICTNESS_MARGIN), from);
            for to in (1..=m).filter(|&f| f != from) {
                let moved = profile.with_move(pos, to);
                let u = evaluate_profile(&moved, scenario, oracle).provider_utility(pi, &moved, scenario);
                if u > best.0 {
                    best = (u, to);
                }
            }
            best.1
        })
        .collect();
    StrategyProfile::new(m, choices)
}

/// `max_rounds` greedy rounds from `start`.
pub fn run_greedy_from<T: Scalar>(
    scenario: &Scenario<T>,
    oracle: &(impl QosOracle<T> + ?Sized),
    start: StrategyProfile,
    max_rounds: usize,
) -> Result<GreedyTrace<T>> {
    validate_profile(&start, scenario).map_err(Error::Profile)?;
    let utilities = |p: &StrategyProfile| evaluate_profile(p, scenario, oracle).federation_utilities;
    let mut trace = GreedyTrace {
        federation_utilities: vec![utilities(&start)],
        profiles: vec![start],
        churn: Vec::new(),
    };
    for _ in 0..max_rounds {
        let current = trace.profiles.last().unwrap();
        let next = greedy_round(current, scenario, oracle);
        trace.churn.push(churn(current, &next));
        trace.federation_utilities.push(utilities(&next));
        trace.profiles.push(next);
    }
    Ok(trace)
}

/// Greedy rounds starting from the k-means profile.
pub fn run_greedy<T: Scalar>(
    scenario: &Scenario<T>,
    oracle: &(impl QosOracle<T> + ?Sized),
    config: &GreedyConfig,
) -> Result<GreedyTrace<T>> {
    let start = kmeans_init(scenario, scenario.federations(), config.seed)?;
    run_greedy_from(scenario, oracle, start, config.max_rounds)
}
