use super::oracle::QosOracle;
use super::profile::StrategyProfile;
use super::routing::{allocate_apps, route_with_allocation, RoutingPlan};
use super::scenario::{AppId, EconomicModel, ProviderId, Scenario};
use crate::scalar::Scalar;

/// Everything derived from one profile: allocation, routing, discounts and utilities.
#[derive(Clone, Debug)]
pub struct ProfileEvaluation<T: Scalar> {
    /// Home federation per application (aligned with `scenario.applications()`).
    pub allocation: Vec<usize>,
    pub plan: RoutingPlan<T>,
    /// Discount factor per application.
    pub sigmas: Vec<T>,
    /// `u(f)` for federations 1..=m, stored at index f-1.
    pub federation_utilities: Vec<T>,
}

impl<T: Scalar> ProfileEvaluation<T> {
    /// Utilitarian welfare, the sum of all federation utilities.
    pub fn welfare(&self) -> T {
        crate::scalar::ordered_sum(&self.federation_utilities)
    }

    /// Share-weighted utility of the provider at `provider_pos`: each federation's
    /// utility split by the fraction of its servers the provider contributes.
    pub fn provider_utility(
        &self,
        provider_pos: usize,
        profile: &StrategyProfile,
        scenario: &Scenario<T>,
    ) -> T {
        let m = profile.federations();
        let mut total = vec![0usize; m];
        for &f in profile.assignment() {
            total[f - 1] += 1;
        }
        let mut own = vec![0usize; m];
        for &pos in scenario.provider_server_positions(provider_pos) {
            own[profile.federation_at(pos) - 1] += 1;
        }
        let mut u = T::zero();
        for f in 0..m {
            if own[f] > 0 && total[f] > 0 {
                u += T::of_usize(own[f]) / T::of_usize(total[f]) * self.federation_utilities[f];
            }
        }
        u
    }

    pub fn provider_utilities(&self, profile: &StrategyProfile, scenario: &Scenario<T>) -> Vec<T> {
        (0..scenario.providers().len())
            .map(|pi| self.provider_utility(pi, profile, scenario))
            .collect()
    }
}

/// Allocates applications, routes all requests and computes every utility.
pub fn evaluate_profile<T: Scalar>(
    profile: &StrategyProfile,
    scenario: &Scenario<T>,
    oracle: &(impl QosOracle<T> + ?Sized),
) -> ProfileEvaluation<T> {
    let econ = scenario.econ();
    let allocation = allocate_apps(profile, scenario);
    let plan = route_with_allocation(profile, scenario, oracle, &allocation);
    let apps = scenario.applications();
    let sigmas: Vec<T> = (0..apps.len()).map(|ai| sigma_at(ai, &plan, econ)).collect();

    let m = profile.federations();
    let mut revenue = vec![T::zero(); m];
    for (ai, app) in apps.iter().enumerate() {
        revenue[allocation[ai] - 1] += sigmas[ai] * app.payment;
    }
    let mut cost = vec![T::zero(); m];
    for (pos, server) in scenario.servers().iter().enumerate() {
        let oc = econ.oc_unit * T::of(f64::from(server.capacity));
        let tc = econ.tc_unit * T::of(f64::from(plan.load[pos]));
        cost[profile.federation_at(pos) - 1] += oc + tc;
    }
    let federation_utilities = revenue.into_iter().zip(cost).map(|(r, c)| r - c).collect();
    ProfileEvaluation {
        allocation,
        plan,
        sigmas,
        federation_utilities,
    }
}

/// Discount factor of an application: the fraction of its requests that were served
/// within both SLAs, floored at `sigma_floor`. Applications without requests get 1.
pub fn sigma<T: Scalar>(app_id: AppId, plan: &RoutingPlan<T>, econ: &EconomicModel<T>) -> T {
    let (satisfied, total) = plan
        .routes
        .iter()
        .filter(|r| r.app_id == app_id)
        .fold((0usize, 0usize), |(s, t), r| (s + usize::from(meets_sla(r, econ)), t + 1));
    discount(satisfied, total, econ)
}

fn sigma_at<T: Scalar>(app_pos: usize, plan: &RoutingPlan<T>, econ: &EconomicModel<T>) -> T {
    let (satisfied, total) = plan
        .routes
        .iter()
        .filter(|r| r.app_pos == app_pos)
        .fold((0usize, 0usize), |(s, t), r| (s + usize::from(meets_sla(r, econ)), t + 1));
    discount(satisfied, total, econ)
}

fn meets_sla<T: Scalar>(r: &super::RoutedRequest<T>, econ: &EconomicModel<T>) -> bool {
    r.qos
        .is_some_and(|q| q.response_time <= econ.rt_sla && q.throughput >= econ.tp_sla)
}

fn discount<T: Scalar>(satisfied: usize, total: usize, econ: &EconomicModel<T>) -> T {
    if total == 0 {
        return T::one();
    }
    let frac = T::of_usize(satisfied) / T::of_usize(total);
    frac.max(econ.sigma_floor)
}

/// `u(f) = Rev(f) - Σ_{s∈f} (OC(s) + TC(s))` for the 1-based `federation`.
pub fn federation_utility<T: Scalar>(
    federation: usize,
    profile: &StrategyProfile,
    scenario: &Scenario<T>,
    oracle: &(impl QosOracle<T> + ?Sized),
) -> T {
    evaluate_profile(profile, scenario, oracle).federation_utilities[federation - 1]
}

pub fn provider_utility<T: Scalar>(
    provider: ProviderId,
    profile: &StrategyProfile,
    scenario: &Scenario<T>,
    oracle: &(impl QosOracle<T> + ?Sized),
) -> T {
    let Some(pi) = scenario.provider_position(provider) else {
        return T::zero();
    };
    evaluate_profile(profile, scenario, oracle).provider_utility(pi, profile, scenario)
}

pub fn welfare<T: Scalar>(
    profile: &StrategyProfile,
    scenario: &Scenario<T>,
    oracle: &(impl QosOracle<T> + ?Sized),
) -> T {
    evaluate_profile(profile, scenario, oracle).welfare()
}
