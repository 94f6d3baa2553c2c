use crate::error::{Error, Result};
use crate::scalar::{ordered_sum, Scalar};

/// Share-weighted mean fitness `v = Σ x_i f_i`.
pub fn average_fitness<T: Scalar>(shares: &[T], fitnesses: &[T]) -> T {
    shares.iter().zip(fitnesses).fold(T::zero(), |acc, (&x, &f)| acc + x * f)
}

/// One Euler step of `ẋ_i = x_i (f_i - v)`: `x_i + dt x_i (f_i - v)`, clamped at zero
/// and renormalized onto the simplex. Equal fitnesses leave the shares untouched.
pub fn replicator_step<T: Scalar>(shares: &[T], fitnesses: &[T], dt: T) -> Result<Vec<T>> {
    assert_eq!(shares.len(), fitnesses.len(), "one fitness per share");
    let total = ordered_sum(shares);
    if !(total > T::zero()) {
        return Err(Error::Model("replicator step on all-zero shares".into()));
    }
    if fitnesses.windows(2).all(|w| w[0] == w[1]) {
        return Ok(shares.to_vec());
    }
    let v = average_fitness(shares, fitnesses) / total;
    let next: Vec<T> = shares
        .iter()
        .zip(fitnesses)
        .map(|(&x, &f)| (x + dt * x * (f - v)).max(T::zero()))
        .collect();
    let sum = ordered_sum(&next);
    if !(sum > T::zero()) {
        return Err(Error::Model("replicator step emptied the simplex".into()));
    }
    Ok(next.into_iter().map(|x| x / sum).collect())
}

/// Maps fitnesses affinely onto `[ε, 1 + ε]` so replication is insensitive to the
/// sign and scale of utilities. Order is preserved; equal inputs stay equal.
pub fn normalize_fitness<T: Scalar>(fitnesses: &[T], epsilon: T) -> Vec<T> {
    let lo = fitnesses.iter().copied().fold(T::infinity(), T::min);
    let hi = fitnesses.iter().copied().fold(T::neg_infinity(), T::max);
    if !(hi > lo) {
        return vec![T::one(); fitnesses.len()];
    }
    fitnesses.iter().map(|&f| (f - lo) / (hi - lo) + epsilon).collect()
}

/// Shannon entropy of a share vector in nats.
pub fn share_entropy<T: Scalar>(shares: &[T]) -> T {
    shares
        .iter()
        .filter(|&&x| x > T::zero())
        .fold(T::zero(), |acc, &x| acc - x * x.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_fitness_is_stationary() {
        let x = vec![0.1, 0.2, 0.7];
        assert_eq!(replicator_step(&x, &[3.0; 3], 0.1).unwrap(), x);
    }

    #[test]
    fn extinct_stays_extinct_and_fitter_grows() {
        let x = vec![0.0, 0.5, 0.5];
        let y = replicator_step(&x, &[10.0, 2.0, 1.0], 0.1).unwrap();
        assert_eq!(y[0], 0.0);
        assert!(y[1] > 0.5 && y[2] < 0.5);
        assert!((y.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn large_steps_are_clamped() {
        let y = replicator_step(&[0.5, 0.5], &[0.0, 100.0], 1.0).unwrap();
        assert_eq!(y, vec![0.0, 1.0]);
        assert!(replicator_step(&[0.0, 0.0], &[1.0, 2.0], 0.1).is_err());
    }

    #[test]
    fn average_fitness_by_hand() {
        assert_eq!(average_fitness(&[0.5, 0.5], &[2.0, 4.0]), 3.0);
        assert_eq!(average_fitness(&[1.0, 0.0], &[2.0, 4.0]), 2.0);
        assert_eq!(average_fitness(&[1.0], &[7.0]), 7.0);
    }

    #[test]
    fn normalization_preserves_order() {
        let n = normalize_fitness(&[-5.0, 5.0, 0.0], 0.01);
        assert_eq!(n, vec![0.01, 1.01, 0.51]);
        assert_eq!(normalize_fitness(&[2.0, 2.0], 0.01), vec![1.0, 1.0]);
    }
}
