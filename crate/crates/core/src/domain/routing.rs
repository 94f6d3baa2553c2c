use super::oracle::{Qos, QosOracle};
use super::profile::StrategyProfile;
use super::scenario::{AppId, Scenario, ServerId, UserId};
use crate::scalar::Scalar;

/// Home federation of every application, aligned with `scenario.applications()`.
///
/// An application follows its contracted provider: it lands in the federation that
/// holds the plurality of that provider's servers, lowest federation index on ties.
pub fn allocate_apps<T: Scalar>(profile: &StrategyProfile, scenario: &Scenario<T>) -> Vec<usize> {
    let m = profile.federations();
    let home: Vec<usize> = (0..scenario.providers().len())
        .map(|pi| {
            let mut counts = vec![0usize; m + 1];
            for &pos in scenario.provider_server_positions(pi) {
                counts[profile.federation_at(pos)] += 1;
            }
            let mut best = 1;
            for f in 2..=m {
                if counts[f] > counts[best] {
                    best = f;
                }
            }
            best
        })
        .collect();
    (0..scenario.applications().len())
        .map(|ai| home[scenario.app_provider_position(ai)])
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoutedRequest<T: Scalar> {
    pub user_id: UserId,
    pub app_id: AppId,
    pub app_pos: usize,
    /// Home federation of the application.
    pub federation: usize,
    /// Canonical position of the serving server, `None` when unserved.
    pub server_pos: Option<usize>,
    pub server_id: Option<ServerId>,
    pub qos: Option<Qos<T>>,
}

impl<T: Scalar> RoutedRequest<T> {
    pub fn is_served(&self) -> bool {
        self.server_pos.is_some()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoutingPlan<T: Scalar> {
    pub routes: Vec<RoutedRequest<T>>,
    /// Requests routed to each server, by canonical position.
    pub load: Vec<u32>,
}

impl<T: Scalar> RoutingPlan<T> {
    pub fn served(&self) -> usize {
        self.routes.iter().filter(|r| r.is_served()).count()
    }
}

/// Routes every request, in user-id order, to the server of its application's home
/// federation with the lowest predicted response time among those with spare
/// capacity (lowest server id on ties). Requests that find no capacity are unserved.
pub fn route_requests<T: Scalar>(
    profile: &StrategyProfile,
    scenario: &Scenario<T>,
    oracle: &(impl QosOracle<T> + ?Sized),
) -> RoutingPlan<T> {
    let allocation = allocate_apps(profile, scenario);
    route_with_allocation(profile, scenario, oracle, &allocation)
}

pub(crate) fn route_with_allocation<T: Scalar>(
    profile: &StrategyProfile,
    scenario: &Scenario<T>,
    oracle: &(impl QosOracle<T> + ?Sized),
    allocation: &[usize],
) -> RoutingPlan<T> {
    let members = profile.members();
    let servers = scenario.servers();
    let users = scenario.users();
    let mut load = vec![0u32; servers.len()];
    let mut routes = Vec::with_capacity(scenario.requests().len());

    for req in scenario.requests() {
        let federation = allocation[req.app_pos];
        let user = &users[req.user_pos];
        let mut best: Option<(usize, Qos<T>)> = None;
        for &pos in &members[federation - 1] {
            if load[pos] >= servers[pos].capacity {
                continue;
            }
            let qos = oracle.predict(user, &servers[pos]);
            // members are in ascending id order, so `<` keeps the lowest id on ties
            if best.is_none_or(|(_, b)| qos.response_time < b.response_time) {
                best = Some((pos, qos));
            }
        }
        if let Some((pos, _)) = best {
            load[pos] += 1;
        }
        routes.push(RoutedRequest {
            user_id: req.user_id,
            app_id: req.app_id,
            app_pos: req.app_pos,
            federation,
            server_pos: best.map(|(p, _)| p),
            server_id: best.map(|(p, _)| servers[p].id),
            qos: best.map(|(_, q)| q),
        });
    }
    RoutingPlan { routes, load }
}
