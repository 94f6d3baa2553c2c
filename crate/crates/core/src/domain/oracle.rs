use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::scenario::{Scenario, Server, ServerId, User, UserId};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Qos<T: Scalar> {
    /// Seconds.
    pub response_time: T,
    pub throughput: T,
}

impl<T: Scalar> Qos<T> {
    pub fn new(response_time: T, throughput: T) -> Self {
        Self {
            response_time,
            throughput,
        }
    }
}

/// Predicts the QoS a user would see from a server. Implementations must be
/// deterministic and return finite, positive values.
pub trait QosOracle<T: Scalar>: Sync {
    fn predict(&self, user: &User, server: &Server) -> Qos<T>;
}

impl<T, F> QosOracle<T> for F
where
    T: Scalar,
    F: Fn(&User, &Server) -> Qos<T> + Sync,
{
    fn predict(&self, user: &User, server: &Server) -> Qos<T> {
        self(user, server)
    }
}

/// Dense user × server table of predictions. Formation engines evaluate thousands of
/// profiles, so the pipeline tabulates the trained predictor once per scenario.
#[derive(Clone, Debug)]
pub struct QosTable<T: Scalar> {
    user_pos: HashMap<UserId, usize>,
    server_pos: HashMap<ServerId, usize>,
    n_servers: usize,
    values: Vec<Qos<T>>,
}

impl<T: Scalar> QosTable<T> {
    pub fn tabulate(scenario: &Scenario<T>, oracle: &(impl QosOracle<T> + ?Sized)) -> Self {
        Self::from_fn(scenario, |u, s| oracle.predict(u, s))
    }

    pub fn from_fn(scenario: &Scenario<T>, mut f: impl FnMut(&User, &Server) -> Qos<T>) -> Self {
        let n_servers = scenario.server_count();
        let mut values = Vec::with_capacity(scenario.users().len() * n_servers);
        for u in scenario.users() {
            for s in scenario.servers() {
                values.push(f(u, s));
            }
        }
        Self {
            user_pos: scenario.users().iter().enumerate().map(|(i, u)| (u.id, i)).collect(),
            server_pos: scenario.servers().iter().enumerate().map(|(i, s)| (s.id, i)).collect(),
            n_servers,
            values,
        }
    }

    pub fn get(&self, user: UserId, server: ServerId) -> Option<Qos<T>> {
        let u = *self.user_pos.get(&user)?;
        let s = *self.server_pos.get(&server)?;
        Some(self.values[u * self.n_servers + s])
    }
}

impl<T: Scalar> QosOracle<T> for QosTable<T> {
    fn predict(&self, user: &User, server: &Server) -> Qos<T> {
        self.get(user.id, server.id)
            .unwrap_or_else(|| panic!("no tabulated QoS for user {} / server {}", user.id, server.id))
    }
}
