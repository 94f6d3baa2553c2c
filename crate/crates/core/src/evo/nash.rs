use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{evaluate_profile, ProviderId, QosOracle, Scenario, ServerId, StrategyProfile};
use crate::scalar::Scalar;

/// A deviation must beat the incumbent by more than this to count as improving.
pub const STRICTNESS_MARGIN: f64 = 1e-9;

/// A single-server reassignment that strictly raises its provider's utility.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub provider_id: ProviderId,
    pub server_id: ServerId,
    pub from: usize,
    pub to: usize,
    pub gain: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum DeviationCheck {
    /// No improving move among those examined; `exhaustive` is false when the move
    /// budget cut the enumeration short.
    Pass { exhaustive: bool, moves_checked: usize },
    Fail(Deviation),
}

impl DeviationCheck {
    pub fn passed(&self) -> bool {
        matches!(self, DeviationCheck::Pass { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            DeviationCheck::Pass { exhaustive: true, .. } => "pass",
            DeviationCheck::Pass { exhaustive: false, .. } => "pass-partial",
            DeviationCheck::Fail(_) => "fail",
        }
    }
}

/// Every `(server position, target federation)` move, providers in scenario order,
/// their servers in position order, targets ascending.
fn moves<T: Scalar>(profile: &StrategyProfile, scenario: &Scenario<T>) -> Vec<(usize, usize, usize)> {
    let m = profile.federations();
    let mut out = Vec::new();
    for pi in 0..scenario.providers().len() {
        for &pos in scenario.provider_server_positions(pi) {
            let from = profile.federation_at(pos);
            out.extend((1..=m).filter(|&f| f != from).map(|to| (pi, pos, to)));
        }
    }
    out
}

/// Gains of the first `budget` unilateral single-server moves.
fn move_gains<T: Scalar>(
    profile: &StrategyProfile,
    scenario: &Scenario<T>,
    oracle: &(impl QosOracle<T> + ?Sized),
    budget: usize,
) -> (Vec<(usize, usize, usize)>, Vec<f64>, usize) {
    let all = moves(profile, scenario);
    let total = all.len();
    let checked: Vec<_> = all.into_iter().take(budget).collect();
    let base = evaluate_profile(profile, scenario, oracle);
    let incumbent: Vec<T> = (0..scenario.providers().len())
        .map(|pi| base.provider_utility(pi, profile, scenario))
        .collect();
    let gains = checked
        .par_iter()
        .map(|&(pi, pos, to)| {
            let moved = profile.with_move(pos, to);
            let u = evaluate_profile(&moved, scenario, oracle).provider_utility(pi, &moved, scenario);
            (u - incumbent[pi]).as_f64()
        })
        .collect();
    (checked, gains, total)
}

fn deviation<T: Scalar>(
    scenario: &Scenario<T>,
    profile: &StrategyProfile,
    (pi, pos, to): (usize, usize, usize),
    gain: f64,
) -> Deviation {
    Deviation {
        provider_id: scenario.providers()[pi].id,
        server_id: scenario.servers()[pos].id,
        from: profile.federation_at(pos),
        to,
        gain,
    }
}

/// Checks that no provider can strictly gain by moving one of its servers to another
/// federation while everything else stays put. Reports the first improving move in
/// enumeration order.
pub fn check_strict_nash<T: Scalar>(
    profile: &StrategyProfile,
    scenario: &Scenario<T>,
    oracle: &(impl QosOracle<T> + ?Sized),
    move_budget: usize,
) -> DeviationCheck {
    let (checked, gains, total) = move_gains(profile, scenario, oracle, move_budget);
    match checked.iter().zip(&gains).find(|(_, &g)| g > STRICTNESS_MARGIN) {
        Some((&mv, &gain)) => DeviationCheck::Fail(deviation(scenario, profile, mv, gain)),
        None => DeviationCheck::Pass { exhaustive: checked.len() == total, moves_checked: checked.len() },
    }
}

/// Every strictly improving single-server move within the budget.
pub fn improving_moves<T: Scalar>(
    profile: &StrategyProfile,
    scenario: &Scenario<T>,
    oracle: &(impl QosOracle<T> + ?Sized),
    move_budget: usize,
) -> Vec<Deviation> {
    let (checked, gains, _) = move_gains(profile, scenario, oracle, move_budget);
    checked
        .into_iter()
        .zip(gains)
        .filter(|(_, g)| *g > STRICTNESS_MARGIN)
        .map(|(mv, g)| deviation(scenario, profile, mv, g))
        .collect()
}

/// Number of servers whose federation differs between two profiles.
pub fn churn(a: &StrategyProfile, b: &StrategyProfile) -> usize {
    a.assignment().iter().zip(b.assignment()).filter(|(x, y)| x != y).count()
}
