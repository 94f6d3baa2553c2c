use serde::{Deserialize, Serialize};

use super::QosDataset;
use crate::error::{Error, Result};
use crate::fl::{Samples, SparseRow};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    #[serde(rename = "rt")]
    ResponseTime,
    #[serde(rename = "tp")]
    Throughput,
}

impl Target {
    pub fn short_name(self) -> &'static str {
        match self {
            Target::ResponseTime => "rt",
            Target::Throughput => "tp",
        }
    }
}

impl std::str::FromStr for Target {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "rt" => Ok(Target::ResponseTime),
            "tp" => Ok(Target::Throughput),
            other => Err(crate::Error::Config(format!("unknown target `{other}` (expected rt or tp)"))),
        }
    }
}

/// Min-max scaling of one regression target.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetScale {
    pub min: f64,
    pub max: f64,
}

impl TargetScale {
    pub fn fit(values: impl IntoIterator<Item = f64>) -> Result<Self> {
        let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            min = min.min(v);
            max = max.max(v);
        }
        if !(max > min) || !min.is_finite() || !max.is_finite() {
            return Err(Error::Data(format!("degenerate target range [{min}, {max}]")));
        }
        Ok(Self { min, max })
    }

    pub fn normalize<T: Scalar>(&self, y: T) -> T {
        (y - T::of(self.min)) / T::of(self.max - self.min)
    }

    pub fn denormalize<T: Scalar>(&self, v: T) -> T {
        T::of(self.min) + v * T::of(self.max - self.min)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub response_time: TargetScale,
    pub throughput: TargetScale,
}

impl Normalization {
    pub fn scale(&self, target: Target) -> TargetScale {
        match target {
            Target::ResponseTime => self.response_time,
            Target::Throughput => self.throughput,
        }
    }
}

/// One-hot user id ++ one-hot node id ++ the four coordinates mapped to [0, 1].
/// The one-hot widths are fixed per scenario so every shard encodes identically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureEncoder {
    pub n_users: usize,
    pub n_nodes: usize,
}

impl FeatureEncoder {
    pub fn width(&self) -> usize {
        self.n_users + self.n_nodes + 4
    }

    /// Ids outside the encoder's range leave their one-hot block all zero.
    pub fn encode<T: Scalar>(
        &self,
        user: Option<usize>,
        user_loc: (f64, f64),
        node: Option<usize>,
        node_loc: (f64, f64),
    ) -> SparseRow<T> {
        let mut entries = Vec::with_capacity(6);
        if let Some(u) = user.filter(|&u| u < self.n_users) {
            entries.push((u, T::one()));
        }
        if let Some(n) = node.filter(|&n| n < self.n_nodes) {
            entries.push((self.n_users + n, T::one()));
        }
        let base = self.n_users + self.n_nodes;
        entries.push((base, T::of((user_loc.0 + 90.0) / 180.0)));
        entries.push((base + 1, T::of((user_loc.1 + 180.0) / 360.0)));
        entries.push((base + 2, T::of((node_loc.0 + 90.0) / 180.0)));
        entries.push((base + 3, T::of((node_loc.1 + 180.0) / 360.0)));
        SparseRow::new(entries)
    }
}

/// Encoded features and normalized targets for every record of a dataset.
#[derive(Clone, Debug)]
pub struct FeatureTable<T: Scalar> {
    pub encoder: FeatureEncoder,
    /// Fitted on the training split only.
    pub normalization: Normalization,
    pub rows: Vec<SparseRow<T>>,
    pub response_time: Vec<T>,
    pub throughput: Vec<T>,
}

impl<T: Scalar> FeatureTable<T> {
    pub fn width(&self) -> usize {
        self.encoder.width()
    }

    pub fn targets(&self, target: Target) -> &[T] {
        match target {
            Target::ResponseTime => &self.response_time,
            Target::Throughput => &self.throughput,
        }
    }

    /// Gathers the rows at `indices` with their normalized `target` values.
    pub fn samples(&self, indices: &[usize], target: Target) -> Samples<T> {
        let ys = self.targets(target);
        Samples::new(
            indices.iter().map(|&i| self.rows[i].clone()).collect(),
            indices.iter().map(|&i| ys[i]).collect(),
        )
    }
}

/// Encodes every record and min-max normalizes both targets with extrema taken from
/// the records at `train_indices`.
pub fn preprocess<T: Scalar>(dataset: &QosDataset, train_indices: &[usize]) -> Result<FeatureTable<T>> {
    if train_indices.is_empty() {
        return Err(Error::Data("empty training split".into()));
    }
    let recs = &dataset.records;
    let normalization = Normalization {
        response_time: TargetScale::fit(train_indices.iter().map(|&i| recs[i].response_time))?,
        throughput: TargetScale::fit(train_indices.iter().map(|&i| recs[i].throughput))?,
    };
    let encoder = FeatureEncoder { n_users: dataset.n_users, n_nodes: dataset.n_nodes };
    let rows = recs
        .iter()
        .map(|r| {
            encoder.encode(
                Some(r.user_id),
                (r.user_lat, r.user_lon),
                Some(r.node_id),
                (r.node_lat, r.node_lon),
            )
        })
        .collect();
    let response_time = recs
        .iter()
        .map(|r| normalization.response_time.normalize(T::of(r.response_time)))
        .collect();
    let throughput = recs
        .iter()
        .map(|r| normalization.throughput.normalize(T::of(r.throughput)))
        .collect();
    Ok(FeatureTable { encoder, normalization, rows, response_time, throughput })
}
