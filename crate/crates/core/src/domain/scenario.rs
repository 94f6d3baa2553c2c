use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type ServerId = usize;
pub type ProviderId = usize;
pub type AppId = usize;
pub type UserId = usize;

/// Geographic position in degrees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub lat: f64,
    pub lon: f64,
}

impl Location {
    pub fn new(lat: f64, lon: f64) -> Self {
        Self { lat, lon }
    }

    pub fn is_valid(&self) -> bool {
        (-90.0..=90.0).contains(&self.lat) && (-180.0..=180.0).contains(&self.lon)
    }

    /// Fixed affine map of (lat, lon) onto the unit square.
    pub fn unit_square(&self) -> [f64; 2] {
        [(self.lat + 90.0) / 180.0, (self.lon + 180.0) / 360.0]
    }

    /// Great-circle distance in kilometres.
    pub fn haversine_km(&self, other: &Location) -> f64 {
        const EARTH_RADIUS_KM: f64 = 6371.0;
        let (p1, p2) = (self.lat.to_radians(), other.lat.to_radians());
        let dp = p2 - p1;
        let dl = (other.lon - self.lon).to_radians();
        let a = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
        2.0 * EARTH_RADIUS_KM * a.sqrt().min(1.0).asin()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Server {
    pub id: ServerId,
    pub provider_id: ProviderId,
    pub location: Location,
    /// Requests the server can absorb per epoch.
    pub capacity: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provider {
    pub id: ProviderId,
    pub server_ids: Vec<ServerId>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Application<T: Scalar> {
    pub id: AppId,
    pub contracted_provider_id: ProviderId,
    /// Regular payment per epoch before the QoS discount.
    pub payment: T,
    /// Users requesting this application. Filled from the users' requests when empty.
    #[serde(default)]
    pub user_ids: Vec<UserId>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct User {
    pub id: UserId,
    pub location: Location,
    pub requested_app_ids: Vec<AppId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EconomicModel<T: Scalar> {
    /// Operational cost per unit of capacity per epoch.
    pub oc_unit: T,
    /// Traffic cost per routed request.
    pub tc_unit: T,
    /// Lower bound of the payment discount factor.
    pub sigma_floor: T,
    /// Response-time SLA in seconds (satisfied when predicted RT <= rt_sla).
    pub rt_sla: T,
    /// Throughput SLA (satisfied when predicted TP >= tp_sla).
    pub tp_sla: T,
}

impl<T: Scalar> EconomicModel<T> {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("oc_unit", self.oc_unit),
            ("tc_unit", self.tc_unit),
            ("sigma_floor", self.sigma_floor),
            ("rt_sla", self.rt_sla),
            ("tp_sla", self.tp_sla),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v < T::zero() {
                return Err(Error::Scenario(format!("{name} must be finite and >= 0")));
            }
        }
        if self.sigma_floor > T::one() {
            return Err(Error::Scenario("sigma_floor must be <= 1".into()));
        }
        Ok(())
    }
}

/// One (user, application) request. Positions index into the scenario's sorted vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Request {
    pub user_id: UserId,
    pub app_id: AppId,
    pub user_pos: usize,
    pub app_pos: usize,
}

/// Validated topology plus economics. Every entity vector is sorted by id, and the
/// server order is the canonical order used by profiles and chromosomes.
#[derive(Clone, Debug)]
pub struct Scenario<T: Scalar> {
    servers: Vec<Server>,
    providers: Vec<Provider>,
    applications: Vec<Application<T>>,
    users: Vec<User>,
    federations: usize,
    econ: EconomicModel<T>,
    server_pos: HashMap<ServerId, usize>,
    provider_pos: HashMap<ProviderId, usize>,
    app_pos: HashMap<AppId, usize>,
    provider_servers: Vec<Vec<usize>>,
    app_provider: Vec<usize>,
    requests: Vec<Request>,
}

impl<T: Scalar> Scenario<T> {
    pub fn new(
        mut servers: Vec<Server>,
        mut providers: Vec<Provider>,
        mut applications: Vec<Application<T>>,
        mut users: Vec<User>,
        federations: usize,
        econ: EconomicModel<T>,
    ) -> Result<Self> {
        if federations == 0 {
            return Err(Error::Scenario("federation count m must be >= 1".into()));
        }
        econ.validate()?;
        servers.sort_by_key(|s| s.id);
        providers.sort_by_key(|p| p.id);
        applications.sort_by_key(|a| a.id);
        users.sort_by_key(|u| u.id);

        let server_pos = index_unique(servers.iter().map(|s| s.id), "server")?;
        let provider_pos = index_unique(providers.iter().map(|p| p.id), "provider")?;
        let app_pos = index_unique(applications.iter().map(|a| a.id), "application")?;
        index_unique(users.iter().map(|u| u.id), "user")?;

        for s in &servers {
            if s.capacity == 0 {
                return Err(Error::Scenario(format!("server {} has zero capacity", s.id)));
            }
            if !s.location.is_valid() {
                return Err(Error::Scenario(format!("server {} location out of range", s.id)));
            }
            if !provider_pos.contains_key(&s.provider_id) {
                return Err(Error::Scenario(format!(
                    "server {} references unknown provider {}",
                    s.id, s.provider_id
                )));
            }
        }

        let mut provider_servers = vec![Vec::new(); providers.len()];
        for (pi, p) in providers.iter_mut().enumerate() {
            if p.server_ids.is_empty() {
                return Err(Error::Scenario(format!("provider {} owns no servers", p.id)));
            }
            p.server_ids.sort_unstable();
            if p.server_ids.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Scenario(format!("provider {} lists a server twice", p.id)));
            }
            for sid in &p.server_ids {
                let pos = *server_pos.get(sid).ok_or_else(|| {
                    Error::Scenario(format!("provider {} lists unknown server {sid}", p.id))
                })?;
                if servers[pos].provider_id != p.id {
                    return Err(Error::Scenario(format!(
                        "server {sid} is listed by provider {} but owned by {}",
                        p.id, servers[pos].provider_id
                    )));
                }
                provider_servers[pi].push(pos);
            }
        }
        for s in &servers {
            let pi = provider_pos[&s.provider_id];
            if !providers[pi].server_ids.contains(&s.id) {
                return Err(Error::Scenario(format!(
                    "server {} missing from provider {}'s server list",
                    s.id, s.provider_id
                )));
            }
        }

        let mut app_provider = Vec::with_capacity(applications.len());
        for a in &applications {
            if !a.payment.is_finite() || a.payment < T::zero() {
                return Err(Error::Scenario(format!("application {} payment must be >= 0", a.id)));
            }
            let pi = *provider_pos.get(&a.contracted_provider_id).ok_or_else(|| {
                Error::Scenario(format!(
                    "application {} contracted with unknown provider {}",
                    a.id, a.contracted_provider_id
                ))
            })?;
            app_provider.push(pi);
        }

        let mut derived_users: Vec<BTreeSet<UserId>> = vec![BTreeSet::new(); applications.len()];
        let mut requests = Vec::new();
        for (ui, u) in users.iter_mut().enumerate() {
            if !u.location.is_valid() {
                return Err(Error::Scenario(format!("user {} location out of range", u.id)));
            }
            u.requested_app_ids.sort_unstable();
            u.requested_app_ids.dedup();
            for aid in &u.requested_app_ids {
                let ai = *app_pos.get(aid).ok_or_else(|| {
                    Error::Scenario(format!("user {} requests unknown application {aid}", u.id))
                })?;
                derived_users[ai].insert(u.id);
                requests.push(Request {
                    user_id: u.id,
                    app_id: *aid,
                    user_pos: ui,
                    app_pos: ai,
                });
            }
        }
        for (a, derived) in applications.iter_mut().zip(derived_users) {
            let derived: Vec<UserId> = derived.into_iter().collect();
            if a.user_ids.is_empty() {
                a.user_ids = derived;
            } else {
                a.user_ids.sort_unstable();
                a.user_ids.dedup();
                if a.user_ids != derived {
                    return Err(Error::Scenario(format!(
                        "application {} user list disagrees with users' requests",
                        a.id
                    )));
                }
            }
        }

        Ok(Self {
            servers,
            providers,
            applications,
            users,
            federations,
            econ,
            server_pos,
            provider_pos,
            app_pos,
            provider_servers,
            app_provider,
            requests,
        })
    }

    pub fn servers(&self) -> &[Server] {
        &self.servers
    }

    pub fn providers(&self) -> &[Provider] {
        &self.providers
    }

    pub fn applications(&self) -> &[Application<T>] {
        &self.applications
    }

    pub fn users(&self) -> &[User] {
        &self.users
    }

    /// Number of federations `m`.
    pub fn federations(&self) -> usize {
        self.federations
    }

    pub fn econ(&self) -> &EconomicModel<T> {
        &self.econ
    }

    pub fn with_econ(mut self, econ: EconomicModel<T>) -> Result<Self> {
        econ.validate()?;
        self.econ = econ;
        Ok(self)
    }

    pub fn with_federations(mut self, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Scenario("federation count m must be >= 1".into()));
        }
        self.federations = m;
        Ok(self)
    }

    /// All requests, ordered by user id then application id.
    pub fn requests(&self) -> &[Request] {
        &self.requests
    }

    pub fn server_count(&self) -> usize {
        self.servers.len()
    }

    pub fn server_position(&self, id: ServerId) -> Option<usize> {
        self.server_pos.get(&id).copied()
    }

    pub fn provider_position(&self, id: ProviderId) -> Option<usize> {
        self.provider_pos.get(&id).copied()
    }

    pub fn app_position(&self, id: AppId) -> Option<usize> {
        self.app_pos.get(&id).copied()
    }

    /// Canonical positions of the servers owned by the provider at `provider_pos`.
    pub fn provider_server_positions(&self, provider_pos: usize) -> &[usize] {
        &self.provider_servers[provider_pos]
    }

    /// Provider position of the provider contracted by the application at `app_pos`.
    pub fn app_provider_position(&self, app_pos: usize) -> usize {
        self.app_provider[app_pos]
    }

    pub fn server_provider_position(&self, server_pos: usize) -> usize {
        self.provider_pos[&self.servers[server_pos].provider_id]
    }
}

fn index_unique(ids: impl Iterator<Item = usize>, what: &str) -> Result<HashMap<usize, usize>> {
    let mut map = HashMap::new();
    for (pos, id) in ids.enumerate() {
        if map.insert(id, pos).is_some() {
            return Err(Error::Scenario(format!("duplicate {what} id {id}")));
        }
    }
    Ok(map)
}
