use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::QosDataset;
use crate::domain::ProviderId;
use crate::error::{Error, Result};

/// Record indices held privately by one provider.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalShard {
    pub provider_id: ProviderId,
    pub record_indices: Vec<usize>,
}

/// Random split of `0..n` into sorted (train, test) index lists with
/// `round(test_fraction * n)` test items.
pub fn train_test_split(n: usize, test_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Data(format!("test fraction {test_fraction} must lie in (0, 1)")));
    }
    let n_test = (test_fraction * n as f64).round() as usize;
    if n_test == 0 || n_test >= n {
        return Err(Error::Data(format!("{n} records are too few to split at {test_fraction}")));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut test = perm[..n_test].to_vec();
    let mut train = perm[n_test..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    Ok((train, test))
}

/// Groups the records at `indices` by the provider owning their node. Every provider
/// in `providers` gets a shard, possibly empty.
pub fn partition_by_provider(
    dataset: &QosDataset,
    indices: &[usize],
    node_to_provider: &HashMap<usize, ProviderId>,
    providers: &[ProviderId],
) -> Result<Vec<LocalShard>> {
    let slot: HashMap<ProviderId, usize> = providers.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut shards: Vec<LocalShard> = providers
        .iter()
        .map(|&provider_id| LocalShard { provider_id, record_indices: Vec::new() })
        .collect();
    for &i in indices {
        let node = dataset.records[i].node_id;
        let provider = node_to_provider
            .get(&node)
            .ok_or_else(|| Error::Data(format!("node {node} has no provider")))?;
        let s = slot
            .get(provider)
            .ok_or_else(|| Error::Data(format!("node {node} maps to unlisted provider {provider}")))?;
        shards[*s].record_indices.push(i);
    }
    Ok(shards)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synthesize;

    #[test]
    fn exact_fraction_and_determinism() {
        let (train, test) = train_test_split(10, 0.2, 7).unwrap();
        assert_eq!((train.len(), test.len()), (8, 2));
        assert_eq!(train_test_split(10, 0.2, 7).unwrap(), (train.clone(), test.clone()));
        let mut all = [train, test].concat();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn seeds_give_distinct_permutations() {
        let distinct: std::collections::HashSet<_> =
            (0..100).map(|s| train_test_split(40, 0.25, s).unwrap().1).collect();
        assert!(distinct.len() >= 99, "{}", distinct.len());
    }

    #[test]
    fn rejects_bad_fractions_and_tiny_sets() {
        assert!(train_test_split(10, 0.0, 1).is_err());
        assert!(train_test_split(10, 1.0, 1).is_err());
        assert!(train_test_split(1, 0.5, 1).is_err());
    }

    #[test]
    fn shards_partition_records() {
        let ds = synthesize(3, 4, 6, 0.0);
        let all: Vec<usize> = (0..ds.len()).collect();

        let one: HashMap<usize, usize> = (0..6).map(|n| (n, 0)).collect();
        let shards = partition_by_provider(&ds, &all, &one, &[0]).unwrap();
        assert_eq!(shards[0].record_indices, all);

        // nodes alternate between providers: 3 columns each, 4 users
        let alt: HashMap<usize, usize> = (0..6).map(|n| (n, n % 2)).collect();
        let shards = partition_by_provider(&ds, &all, &alt, &[0, 1, 2]).unwrap();
        assert_eq!(shards.iter().map(|s| s.record_indices.len()).collect::<Vec<_>>(), vec![12, 12, 0]);

        let partial: HashMap<usize, usize> = (0..5).map(|n| (n, 0)).collect();
        assert!(partition_by_provider(&ds, &all, &partial, &[0]).is_err());
    }
}
