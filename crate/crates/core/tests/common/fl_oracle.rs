use fogfed::fl::*;
use fogfed::seed::derive_seed;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn act(a: Activation, z: f64) -> f64 {
    match a {
        Activation::Relu => z.max(0.0),
        Activation::Tanh => z.tanh(),
        Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
        Activation::Identity => z,
    }
}

/// Dense forward pass written straight from the documented parameter layout.
pub fn reference_forward(spec: &ModelSpec, values: &[f64], x: &[f64]) -> f64 {
    let mut a = x.to_vec();
    let mut at = 0;
    for (l, w) in spec.widths.windows(2).enumerate() {
        let (n_in, n_out) = (w[0], w[1]);
        let mut z = values[at + n_in * n_out..at + n_in * n_out + n_out].to_vec();
        for i in 0..n_in {
            for o in 0..n_out {
                z[o] += a[i] * values[at + i * n_out + o];
            }
        }
        at += n_in * n_out + n_out;
        let f = spec.activations.get(l).copied().unwrap_or(Activation::Identity);
        a = z.into_iter().map(|v| act(f, v)).collect();
    }
    a[0]
}

pub fn reference_mse(spec: &ModelSpec, values: &[f64], xs: &[Vec<f64>], ys: &[f64]) -> f64 {
    xs.iter().zip(ys).map(|(x, y)| (reference_forward(spec, values, x) - y).powi(2)).sum::<f64>() / ys.len() as f64
}

pub fn random_network(rng: &mut ChaCha8Rng) -> ModelSpec {
    let layers = rng.gen_range(1..=3);
    let mut widths = vec![rng.gen_range(1..=12)];
    for _ in 1..layers {
        widths.push(rng.gen_range(1..=50));
    }
    widths.push(1);
    let pick = [Activation::Relu, Activation::Tanh, Activation::Sigmoid, Activation::Identity];
    let activations = (0..layers - 1).map(|_| *pick.choose(rng).unwrap()).collect();
    ModelSpec::new(widths, activations).unwrap()
}

/// Worst relative gap between the analytic gradient and central differences
/// (step 1e-5) on a fresh random network and batch.
pub fn random_gradient_check(rng: &mut ChaCha8Rng) -> f64 {
    let spec = random_network(rng);
    let params = init_model::<f64>(&spec, rng.gen());
    let xs: Vec<Vec<f64>> = (0..6).map(|_| (0..spec.input_width()).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let ys: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let samples = Samples::new(xs.iter().map(|x| SparseRow::from_dense(x)).collect(), ys.clone());
    let (_, grad) = loss_and_gradient(&params, &samples);
    let h = 1e-5;
    let mut worst = 0.0f64;
    for k in 0..params.values.len() {
        let mut v = params.values.clone();
        v[k] += h;
        let up = reference_mse(&spec, &v, &xs, &ys);
        v[k] -= 2.0 * h;
        let down = reference_mse(&spec, &v, &xs, &ys);
        let fd = (up - down) / (2.0 * h);
        worst = worst.max((grad[k] - fd).abs() / grad[k].abs().max(fd.abs()).max(1e-6));
    }
    worst
}

/// Plain minibatch SGD with the documented shuffling schedule.
pub fn reference_sgd(init: &ModelParams<f64>, data: &Samples<f64>, cfg: &TrainConfig, epochs: std::ops::Range<usize>) -> ModelParams<f64> {
    let mut p = init.clone();
    for epoch in epochs {
        let mut order: Vec<usize> = (0..data.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[0, epoch as u64])));
        for chunk in order.chunks(cfg.batch_size) {
            let batch = Samples::new(
                chunk.iter().map(|&i| data.rows[i].clone()).collect(),
                chunk.iter().map(|&i| data.targets[i]).collect(),
            );
            let (_, g) = loss_and_gradient(&p, &batch);
            for (v, g) in p.values.iter_mut().zip(g) {
                *v -= cfg.learning_rate * g;
            }
        }
    }
    p
}
