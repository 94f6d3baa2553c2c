//! QoS observation data: WS-Dream ingestion, feature preprocessing, splitting,
//! per-provider sharding and synthetic generation.

mod features;
mod shard;
mod synth;
mod wsdream;

pub use features::{preprocess, FeatureEncoder, FeatureTable, Normalization, Target, TargetScale};
pub use shard::{partition_by_provider, train_test_split, LocalShard};
pub use synth::{synthesize, synthesize_at};
pub use wsdream::{load_wsdream, write_wsdream, IngestSummary, LoadOptions, MetadataFormat, WsDreamPaths};

use serde::{Deserialize, Serialize};

/// One observed (user, node) invocation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QosRecord {
    pub user_id: usize,
    pub node_id: usize,
    pub user_lat: f64,
    pub user_lon: f64,
    pub node_lat: f64,
    pub node_lon: f64,
    /// Seconds.
    pub response_time: f64,
    /// kbps.
    pub throughput: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QosDataset {
    pub records: Vec<QosRecord>,
    pub n_users: usize,
    pub n_nodes: usize,
    pub user_locations: Vec<(f64, f64)>,
    pub node_locations: Vec<(f64, f64)>,
}

impl QosDataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}
