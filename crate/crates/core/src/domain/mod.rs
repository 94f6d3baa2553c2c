//! Providers, servers, applications and users; strategy profiles over them; and the
//! federation / provider / welfare utilities computed from a profile plus a QoS oracle.

mod oracle;
mod profile;
mod routing;
mod scenario;
mod utility;

pub use oracle::{Qos, QosOracle, QosTable};
pub use profile::{validate_profile, StrategyProfile, Violation};
pub use routing::{allocate_apps, route_requests, RoutedRequest, RoutingPlan};
pub use scenario::{
    AppId, Application, EconomicModel, Location, Provider, ProviderId, Request, Scenario, Server,
    ServerId, User, UserId,
};
pub use utility::{
    evaluate_profile, federation_utility, provider_utility, sigma, welfare, ProfileEvaluation,
};
