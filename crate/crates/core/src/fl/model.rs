use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Tanh,
    Sigmoid,
    Identity,
}

impl Activation {
    #[inline]
    fn apply<T: Scalar>(self, z: T) -> T {
        match self {
            Activation::Relu => z.max(T::zero()),
            Activation::Tanh => z.tanh(),
            Activation::Sigmoid => T::one() / (T::one() + (-z).exp()),
            Activation::Identity => z,
        }
    }

    /// Derivative expressed through the pre-activation `z` and output `a`.
    #[inline]
    fn derivative<T: Scalar>(self, z: T, a: T) -> T {
        match self {
            Activation::Relu => {
                if z > T::zero() {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Activation::Tanh => T::one() - a * a,
            Activation::Sigmoid => a * (T::one() - a),
            Activation::Identity => T::one(),
        }
    }
}

/// Layer widths from input to the single output, plus one activation per hidden layer.
/// The output layer is always linear.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub widths: Vec<usize>,
    pub activations: Vec<Activation>,
}

impl ModelSpec {
    pub fn new(widths: Vec<usize>, activations: Vec<Activation>) -> Result<Self> {
        let spec = Self { widths, activations };
        spec.validate()?;
        Ok(spec)
    }

    /// `input -> hidden... -> 1` with the same activation on every hidden layer.
    pub fn regression(input: usize, hidden: &[usize], activation: Activation) -> Result<Self> {
        let mut widths = Vec::with_capacity(hidden.len() + 2);
        widths.push(input);
        widths.extend_from_slice(hidden);
        widths.push(1);
        Self::new(widths, vec![activation; hidden.len()])
    }

    /// The default predictor network: two ReLU layers of 64 and 32 units.
    pub fn default_for(input: usize) -> Self {
        Self::regression(input, &[64, 32], Activation::Relu).expect("valid default spec")
    }

    /// A single affine map `input -> 1`.
    pub fn linear(input: usize) -> Self {
        Self::regression(input, &[], Activation::Identity).expect("valid linear spec")
    }

    pub fn validate(&self) -> Result<()> {
        if self.widths.len() < 2 {
            return Err(Error::Model("a network needs an input and an output width".into()));
        }
        if self.widths.contains(&0) {
            return Err(Error::Model(format!("zero layer width in {:?}", self.widths)));
        }
        if *self.widths.last().unwrap() != 1 {
            return Err(Error::Model("output width must be 1".into()));
        }
        if self.activations.len() != self.widths.len() - 2 {
            return Err(Error::Model(format!(
                "{} activations for {} hidden layers",
                self.activations.len(),
                self.widths.len() - 2
            )));
        }
        Ok(())
    }

    pub fn input_width(&self) -> usize {
        self.widths[0]
    }

    pub fn layer_count(&self) -> usize {
        self.widths.len() - 1
    }

    pub fn param_count(&self) -> usize {
        self.widths.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    /// Start offsets of each layer's weight block. Biases follow the weights.
    pub(crate) fn layer_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.layer_count());
        let mut at = 0;
        for w in self.widths.windows(2) {
            offsets.push(at);
            at += w[0] * w[1] + w[1];
        }
        offsets
    }

    fn activation(&self, layer: usize) -> Activation {
        self.activations.get(layer).copied().unwrap_or(Activation::Identity)
    }
}

/// Flat parameter vector of a network.
///
/// Layer by layer: the weight matrix stored input-major (`w[i * out + o]` connects
/// input `i` to unit `o`), then the `out` biases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ModelParams<T: Scalar> {
    pub spec: ModelSpec,
    pub values: Vec<T>,
}

impl<T: Scalar> ModelParams<T> {
    pub fn new(spec: ModelSpec, values: Vec<T>) -> Result<Self> {
        spec.validate()?;
        if values.len() != spec.param_count() {
            return Err(Error::Model(format!(
                "{} values for a spec with {} parameters",
                values.len(),
                spec.param_count()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Model("non-finite parameter".into()));
        }
        Ok(Self { spec, values })
    }

    pub fn zeros(spec: ModelSpec) -> Self {
        let n = spec.param_count();
        Self { spec, values: vec![T::zero(); n] }
    }

    /// Indices of every bias entry.
    pub fn bias_indices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (l, off) in self.spec.layer_offsets().into_iter().enumerate() {
            let (n_in, n_out) = (self.spec.widths[l], self.spec.widths[l + 1]);
            out.extend(off + n_in * n_out..off + n_in * n_out + n_out);
        }
        out
    }

    pub fn predict(&self, row: &SparseRow<T>) -> T {
        Workspace::new(&self.spec).forward(self, row)
    }
}

/// Weights uniform on `±sqrt(3 / fan_in)` (variance `1 / fan_in`), biases zero.
pub fn init_model<T: Scalar>(spec: &ModelSpec, seed: u64) -> ModelParams<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = ModelParams::zeros(spec.clone());
    for (l, off) in spec.layer_offsets().into_iter().enumerate() {
        let (n_in, n_out) = (spec.widths[l], spec.widths[l + 1]);
        let bound = (3.0 / n_in as f64).sqrt();
        for v in &mut params.values[off..off + n_in * n_out] {
            *v = T::of(rng.gen_range(-bound..bound));
        }
    }
    params
}

/// Feature vector stored as `(column, value)` pairs in ascending column order.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseRow<T> {
    pub entries: Vec<(usize, T)>,
}

impl<T: Scalar> SparseRow<T> {
    pub fn new(mut entries: Vec<(usize, T)>) -> Self {
        entries.sort_by_key(|e| e.0);
        Self { entries }
    }

    pub fn from_dense(values: &[T]) -> Self {
        Self {
            entries: values.iter().copied().enumerate().filter(|e| e.1 != T::zero()).collect(),
        }
    }

    pub fn to_dense(&self, width: usize) -> Vec<T> {
        let mut out = vec![T::zero(); width];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }

    pub fn max_column(&self) -> Option<usize> {
        self.entries.last().map(|e| e.0)
    }
}

/// Feature rows with their regression targets.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Samples<T> {
    pub rows: Vec<SparseRow<T>>,
    pub targets: Vec<T>,
}

impl<T: Scalar> Samples<T> {
    pub fn new(rows: Vec<SparseRow<T>>, targets: Vec<T>) -> Self {
        assert_eq!(rows.len(), targets.len(), "one target per row");
        Self { rows, targets }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub(crate) fn check_width(&self, spec: &ModelSpec) -> Result<()> {
        let width = spec.input_width();
        match self.rows.iter().filter_map(SparseRow::max_column).max() {
            Some(c) if c >= width => Err(Error::Model(format!(
                "feature column {c} exceeds model input width {width}"
            ))),
            _ => Ok(()),
        }
    }

    /// Concatenates sample sets in order.
    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a Samples<T>>) -> Self {
        let mut out = Samples::default();
        for p in parts {
            out.rows.extend(p.rows.iter().cloned());
            out.targets.extend(p.targets.iter().copied());
        }
        out
    }
}

/// Scratch buffers for forward and backward passes.
pub(crate) struct Workspace<T> {
    offsets: Vec<usize>,
    z: Vec<Vec<T>>,
    a: Vec<Vec<T>>,
    delta: Vec<T>,
    delta_prev: Vec<T>,
}

impl<T: Scalar> Workspace<T> {
    pub(crate) fn new(spec: &ModelSpec) -> Self {
        let hidden = &spec.widths[1..];
        Self {
            offsets: spec.layer_offsets(),
            z: hidden.iter().map(|&w| vec![T::zero(); w]).collect(),
            a: hidden.iter().map(|&w| vec![T::zero(); w]).collect(),
            delta: Vec::new(),
            delta_prev: Vec::new(),
        }
    }

    pub(crate) fn forward(&mut self, params: &ModelParams<T>, row: &SparseRow<T>) -> T {
        let spec = &params.spec;
        let p = &params.values;
        for l in 0..spec.layer_count() {
            let (n_in, n_out) = (spec.widths[l], spec.widths[l + 1]);
            let off = self.offsets[l];
            let bias = &p[off + n_in * n_out..off + n_in * n_out + n_out];
            let z = &mut self.z[l];
            z.copy_from_slice(bias);
            if l == 0 {
                for &(i, x) in &row.entries {
                    let w = &p[off + i * n_out..off + (i + 1) * n_out];
                    for o in 0..n_out {
                        z[o] += w[o] * x;
                    }
                }
            } else {
                let prev = &self.a[l - 1];
                for (i, &x) in prev.iter().enumerate() {
                    let w = &p[off + i * n_out..off + (i + 1) * n_out];
                    for o in 0..n_out {
                        z[o] += w[o] * x;
                    }
                }
            }
            let act = spec.activation(l);
            for (a, &zv) in self.a[l].iter_mut().zip(self.z[l].iter()) {
                *a = act.apply(zv);
            }
        }
        self.a[spec.layer_count() - 1][0]
    }

    /// Adds `dl_dy * d(output)/d(params)` for the last forward pass into `grad` and
    /// records first-layer input columns it touched.
    pub(crate) fn backward(
        &mut self,
        params: &ModelParams<T>,
        row: &SparseRow<T>,
        dl_dy: T,
        grad: &mut [T],
    ) {
        let spec = &params.spec;
        let p = &params.values;
        let last = spec.layer_count() - 1;
        self.delta.clear();
        self.delta.push(dl_dy);
        for l in (0..=last).rev() {
            let (n_in, n_out) = (spec.widths[l], spec.widths[l + 1]);
            let off = self.offsets[l];
            let b_off = off + n_in * n_out;
            for o in 0..n_out {
                grad[b_off + o] += self.delta[o];
            }
            if l == 0 {
                for &(i, x) in &row.entries {
                    let g = &mut grad[off + i * n_out..off + (i + 1) * n_out];
                    for o in 0..n_out {
                        g[o] += x * self.delta[o];
                    }
                }
                break;
            }
            let prev_a = &self.a[l - 1];
            let prev_z = &self.z[l - 1];
            let act = spec.activation(l - 1);
            self.delta_prev.clear();
            for i in 0..n_in {
                let w = &p[off + i * n_out..off + (i + 1) * n_out];
                let g = &mut grad[off + i * n_out..off + (i + 1) * n_out];
                let mut back = T::zero();
                for o in 0..n_out {
                    g[o] += prev_a[i] * self.delta[o];
                    back += w[o] * self.delta[o];
                }
                self.delta_prev.push(back * act.derivative(prev_z[i], prev_a[i]));
            }
            std::mem::swap(&mut self.delta, &mut self.delta_prev);
        }
    }
}

/// Mean squared error `(1/n) Σ (ŷ - y)²` and its gradient over all samples.
pub fn loss_and_gradient<T: Scalar>(params: &ModelParams<T>, samples: &Samples<T>) -> (T, Vec<T>) {
    let mut ws = Workspace::new(&params.spec);
    let mut grad = vec![T::zero(); params.values.len()];
    let n = T::of_usize(samples.len().max(1));
    let mut loss = T::zero();
    for (row, &y) in samples.rows.iter().zip(&samples.targets) {
        let r = ws.forward(params, row) - y;
        loss += r * r;
        ws.backward(params, row, (r + r) / n, &mut grad);
    }
    (loss / n, grad)
}

pub fn mse_loss<T: Scalar>(params: &ModelParams<T>, samples: &Samples<T>) -> T {
    let mut ws = Workspace::new(&params.spec);
    let mut loss = T::zero();
    for (row, &y) in samples.rows.iter().zip(&samples.targets) {
        let r = ws.forward(params, row) - y;
        loss += r * r;
    }
    loss / T::of_usize(samples.len().max(1))
}
