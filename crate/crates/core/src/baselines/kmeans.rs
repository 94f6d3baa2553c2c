use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{Scenario, StrategyProfile};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_ITERATIONS: usize = 100;

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

/// Lloyd's k-means on `points` with k-means++ seeding. Returns a cluster index per
/// point. Clusters that empty out are refilled with the point of the largest cluster
/// farthest from its centroid.
pub fn kmeans(points: &[[f64; 2]], k: usize, seed: u64) -> Result<Vec<usize>> {
    if k == 0 || k > points.len() {
        return Err(Error::Config(format!("k-means with k={k} on {} points", points.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = vec![points[rng.gen_range(0..points.len())]];
    while centroids.len() < k {
        let d: Vec<f64> = points
            .iter()
            .map(|&p| centroids.iter().map(|&c| dist2(p, c)).fold(f64::INFINITY, f64::min))
            .collect();
        let next = match WeightedIndex::new(&d) {
            Ok(w) => w.sample(&mut rng),
            // all remaining points coincide with a centroid
            Err(_) => rng.gen_range(0..points.len()),
        };
        centroids.push(points[next]);
    }

    let nearest = |p: [f64; 2], cs: &[[f64; 2]]| {
        (0..cs.len())
            .min_by(|&a, &b| dist2(p, cs[a]).partial_cmp(&dist2(p, cs[b])).unwrap())
            .unwrap()
    };
    let mut labels: Vec<usize> = points.iter().map(|&p| nearest(p, &centroids)).collect();
    for _ in 0..MAX_ITERATIONS {
        refill_empty(points, &mut labels, &centroids, k);
        for (c, centroid) in centroids.iter_mut().enumerate() {
            let members: Vec<[f64; 2]> = (0..points.len()).filter(|&i| labels[i] == c).map(|i| points[i]).collect();
            let n = members.len() as f64;
            *centroid = [
                members.iter().map(|p| p[0]).sum::<f64>() / n,
                members.iter().map(|p| p[1]).sum::<f64>() / n,
            ];
        }
        let next: Vec<usize> = points.iter().map(|&p| nearest(p, &centroids)).collect();
        if next == labels {
            break;
        }
        labels = next;
    }
    refill_empty(points, &mut labels, &centroids, k);
    Ok(labels)
}

fn refill_empty(points: &[[f64; 2]], labels: &mut [usize], centroids: &[[f64; 2]], k: usize) {
    loop {
        let mut sizes = vec![0usize; k];
        for &l in labels.iter() {
            sizes[l] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let largest = (0..k).max_by_key(|&c| (sizes[c], std::cmp::Reverse(c))).unwrap();
        let far = (0..points.len())
            .filter(|&i| labels[i] == largest)
            .max_by(|&a, &b| {
                dist2(points[a], centroids[largest])
                    .partial_cmp(&dist2(points[b], centroids[largest]))
                    .unwrap()
                    .then(b.cmp(&a))
            })
            .unwrap();
        labels[far] = empty;
    }
}

/// Clusters servers by location into `m` federations. Federation numbers follow the
/// order in which clusters first appear in server order.
pub fn kmeans_init<T: Scalar>(scenario: &Scenario<T>, m: usize, seed: u64) -> Result<StrategyProfile> {
    let points: Vec<[f64; 2]> = scenario.servers().iter().map(|s| s.location.unit_square()).collect();
    let labels = kmeans(&points, m, seed)?;
    let mut relabel = vec![0usize; m];
    let mut next = 1;
    let assignment = labels
        .into_iter()
        .map(|l| {
            if relabel[l] == 0 {
                relabel[l] = next;
                next += 1;
            }
            relabel[l]
        })
        .collect();
    Ok(StrategyProfile::new(m, assignment))
}
