use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use super::chromosome::Chromosome;
use crate::error::{Error, Result};

/// Added to every shifted roulette weight so the least fit individual keeps a
/// nonzero chance and equal fitnesses give a uniform wheel.
pub const ROULETTE_EPSILON: f64 = 1e-6;

/// Roulette wheel over `fitness - min + ε`. Returns the chosen index.
pub fn roulette_select<R: Rng + ?Sized>(fitnesses: &[f64], rng: &mut R) -> usize {
    assert!(!fitnesses.is_empty(), "roulette over an empty population");
    let min = fitnesses.iter().copied().fold(f64::INFINITY, f64::min);
    let weights = fitnesses.iter().map(|f| f - min + ROULETTE_EPSILON);
    WeightedIndex::new(weights).expect("positive finite weights").sample(rng)
}

/// Swaps the suffixes of `a` and `b` starting at `point`.
pub fn crossover_at(a: &Chromosome, b: &Chromosome, point: usize) -> Result<(Chromosome, Chromosome)> {
    if a.len() != b.len() {
        return Err(Error::Chromosome(format!("crossover of lengths {} and {}", a.len(), b.len())));
    }
    let p = point.min(a.len());
    let mut x = a.genes[..p].to_vec();
    x.extend_from_slice(&b.genes[p..]);
    let mut y = b.genes[..p].to_vec();
    y.extend_from_slice(&a.genes[p..]);
    Ok((Chromosome::new(x), Chromosome::new(y)))
}

/// Single-point crossover at a uniform point in `1..len`. Chromosomes shorter than
/// two genes are returned unchanged.
pub fn crossover<R: Rng + ?Sized>(a: &Chromosome, b: &Chromosome, rng: &mut R) -> Result<(Chromosome, Chromosome)> {
    if a.len() != b.len() {
        return Err(Error::Chromosome(format!("crossover of lengths {} and {}", a.len(), b.len())));
    }
    if a.len() < 2 {
        return Ok((a.clone(), b.clone()));
    }
    crossover_at(a, b, rng.gen_range(1..a.len()))
}

/// Each gene is redrawn with probability `rate`, uniformly among the other
/// `federations - 1` values.
pub fn mutate<R: Rng + ?Sized>(chromosome: &mut Chromosome, rate: f64, federations: usize, rng: &mut R) {
    if federations < 2 || rate <= 0.0 {
        return;
    }
    for g in &mut chromosome.genes {
        if rng.gen_bool(rate.min(1.0)) {
            let r = rng.gen_range(1..federations);
            *g = if r >= *g { r + 1 } else { r };
        }
    }
}
