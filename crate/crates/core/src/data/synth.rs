use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{QosDataset, QosRecord};
use crate::domain::Location;

/// Dense synthetic dataset with uniformly scattered users and nodes.
pub fn synthesize(seed: u64, n_users: usize, n_nodes: usize, noise: f64) -> QosDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_10c5);
    let mut loc = || (rng.gen_range(-60.0..70.0), rng.gen_range(-180.0..180.0));
    let users: Vec<(f64, f64)> = (0..n_users).map(|_| loc()).collect();
    let nodes: Vec<(f64, f64)> = (0..n_nodes).map(|_| loc()).collect();
    synthesize_at(seed, &users, &nodes, noise)
}

/// Dense synthetic dataset at fixed coordinates.
///
/// Response time is an affine function of great-circle distance, throughput decays
/// with it. `noise` scales every random effect: log-normal per-user and per-node
/// factors and per-cell jitter. With `noise = 0` the data is a pure function of distance.
pub fn synthesize_at(seed: u64, users: &[(f64, f64)], nodes: &[(f64, f64)], noise: f64) -> QosDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lognormal = |rng: &mut ChaCha8Rng| {
        let z: f64 = rng.sample(StandardNormal);
        (noise * z).exp()
    };
    let user_factor: Vec<f64> = users.iter().map(|_| lognormal(&mut rng)).collect();
    let node_factor: Vec<f64> = nodes.iter().map(|_| lognormal(&mut rng)).collect();

    let mut records = Vec::with_capacity(users.len() * nodes.len());
    for (u, &(ulat, ulon)) in users.iter().enumerate() {
        for (n, &(nlat, nlon)) in nodes.iter().enumerate() {
            let km = Location::new(ulat, ulon).haversine_km(&Location::new(nlat, nlon));
            let f = user_factor[u] * node_factor[n];
            let rt = (0.1 + km / 5_000.0) * f * lognormal(&mut rng);
            let tp = 2_000.0 / (1.0 + km / 1_500.0) / f * lognormal(&mut rng);
            records.push(QosRecord {
                user_id: u,
                node_id: n,
                user_lat: ulat,
                user_lon: ulon,
                node_lat: nlat,
                node_lon: nlon,
                response_time: rt,
                throughput: tp,
            });
        }
    }
    QosDataset {
        records,
        n_users: users.len(),
        n_nodes: nodes.len(),
        user_locations: users.to_vec(),
        node_locations: nodes.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn km(r: &QosRecord) -> f64 {
        Location::new(r.user_lat, r.user_lon).haversine_km(&Location::new(r.node_lat, r.node_lon))
    }

    #[test]
    fn coincident_pair_has_minimal_rt_without_noise() {
        let users = [(10.0, 10.0), (-20.0, 40.0)];
        let nodes = [(50.0, -30.0), (10.0, 10.0), (0.0, 100.0)];
        let ds = synthesize_at(1, &users, &nodes, 0.0);
        let min = ds.records.iter().map(|r| r.response_time).fold(f64::INFINITY, f64::min);
        let coincident = ds.records.iter().find(|r| r.user_id == 0 && r.node_id == 1).unwrap();
        assert_eq!(coincident.response_time, min);
    }

    #[test]
    fn same_seed_same_dataset() {
        assert_eq!(synthesize(9, 5, 7, 0.1), synthesize(9, 5, 7, 0.1));
        assert_ne!(synthesize(9, 5, 7, 0.1), synthesize(10, 5, 7, 0.1));
    }

    #[test]
    fn rt_tracks_distance() {
        let ds = synthesize(4, 50, 50, 0.05);
        let xs: Vec<f64> = ds.records.iter().map(km).collect();
        let ys: Vec<f64> = ds.records.iter().map(|r| r.response_time).collect();
        let n = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
        let corr = cov / (vx * vy).sqrt();
        assert!(corr > 0.8, "corr = {corr}");
        assert!(ds.records.iter().all(|r| r.response_time > 0.0 && r.throughput > 0.0));
    }
}
