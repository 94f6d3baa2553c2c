//! Seeded random scenarios with tabulated QoS, for tests, benchmarks and property checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{
    Application, EconomicModel, Location, Provider, Qos, QosTable, Scenario, Server, User,
};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug)]
pub struct InstanceShape {
    pub providers: usize,
    pub servers: usize,
    pub users: usize,
    pub apps: usize,
    pub federations: usize,
}

/// Builds a random but well-formed scenario and a distance-driven QoS table.
///
/// Every provider owns at least one server, so `servers >= providers` is required.
pub fn random_instance<T: Scalar>(seed: u64, shape: InstanceShape) -> (Scenario<T>, QosTable<T>) {
    assert!(shape.providers >= 1 && shape.servers >= shape.providers);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut owner: Vec<usize> = (0..shape.providers).collect();
    while owner.len() < shape.servers {
        owner.push(rng.gen_range(0..shape.providers));
    }
    owner.shuffle(&mut rng);

    let servers: Vec<Server> = owner
        .iter()
        .enumerate()
        .map(|(i, &p)| Server {
            id: i + 1,
            provider_id: p,
            location: random_location(&mut rng),
            capacity: rng.gen_range(1..=4),
        })
        .collect();
    let providers = (0..shape.providers)
        .map(|p| Provider {
            id: p,
            server_ids: servers.iter().filter(|s| s.provider_id == p).map(|s| s.id).collect(),
        })
        .collect();
    let applications: Vec<Application<T>> = (0..shape.apps)
        .map(|a| Application {
            id: a,
            contracted_provider_id: rng.gen_range(0..shape.providers),
            payment: T::of(rng.gen_range(5.0..20.0_f64).round()),
            user_ids: vec![],
        })
        .collect();
    let users: Vec<User> = (0..shape.users)
        .map(|u| {
            let mut requested = Vec::new();
            if shape.apps > 0 {
                let k = rng.gen_range(1..=2.min(shape.apps));
                while requested.len() < k {
                    let a = rng.gen_range(0..shape.apps);
                    if !requested.contains(&a) {
                        requested.push(a);
                    }
                }
            }
            User {
                id: u,
                location: random_location(&mut rng),
                requested_app_ids: requested,
            }
        })
        .collect();
    let econ = EconomicModel {
        oc_unit: T::of(0.5),
        tc_unit: T::of(0.25),
        sigma_floor: T::of(0.1),
        rt_sla: T::of(0.6),
        tp_sla: T::of(30.0),
    };
    let scenario = Scenario::new(servers, providers, applications, users, shape.federations, econ)
        .expect("generated scenario is well-formed");

    let jitter: Vec<f64> = (0..scenario.users().len() * scenario.server_count())
        .map(|_| rng.gen_range(0.9..1.1))
        .collect();
    let n_servers = scenario.server_count();
    let mut k = 0;
    let table = QosTable::from_fn(&scenario, |u, s| {
        let j = jitter[k];
        k += 1;
        distance_qos(u.location, s.location, j)
    });
    debug_assert_eq!(k, scenario.users().len() * n_servers);
    (scenario, table)
}

/// Latency grows linearly with great-circle distance; throughput falls with it.
pub fn distance_qos<T: Scalar>(user: Location, server: Location, jitter: f64) -> Qos<T> {
    let km = user.haversine_km(&server);
    let rt = (0.05 + km / 10_000.0) * jitter;
    let tp = 100.0 / (1.0 + km / 2_000.0) / jitter;
    Qos::new(T::of(rt), T::of(tp))
}

fn random_location(rng: &mut impl Rng) -> Location {
    Location::new(rng.gen_range(-60.0..70.0), rng.gen_range(-180.0..180.0))
}
