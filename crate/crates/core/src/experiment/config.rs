use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baselines::GreedyConfig;
use crate::domain::{Application, EconomicModel, Location, Provider, ProviderId, Scenario, Server, User};
use crate::error::{Error, Result};
use crate::evo::EvoConfig;
use crate::fl::{Activation, Selection, TrainConfig};
use crate::ga::GaConfig;

pub const SCHEMA_VERSION: u32 = 1;

/// A scenario file: topology, economics, data source and engine settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    pub seed: u64,
    pub federations: usize,
    pub economics: EconomicModel<f64>,
    pub servers: Vec<ServerEntry>,
    pub applications: Vec<ApplicationEntry>,
    pub users: Vec<UserEntry>,
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub ga: GaConfig,
    #[serde(default)]
    pub evo: EvoConfig,
    #[serde(default)]
    pub greedy: GreedyConfig,
    #[serde(default)]
    pub ga_baseline: GaBaselineConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServerEntry {
    pub id: usize,
    pub provider: ProviderId,
    pub lat: f64,
    pub lon: f64,
    pub capacity: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApplicationEntry {
    pub id: usize,
    pub provider: ProviderId,
    pub payment: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserEntry {
    pub id: usize,
    pub lat: f64,
    pub lon: f64,
    pub apps: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataSource {
    Synthetic,
    Wsdream,
}

/// Contiguous range of dataset node ids owned by one provider.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeBlock {
    pub provider: ProviderId,
    pub first: usize,
    pub last: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub source: DataSource,
    /// Directory with the WS-Dream files, relative to the scenario file.
    pub wsdream_dir: Option<PathBuf>,
    pub max_users: Option<usize>,
    pub max_nodes: Option<usize>,
    /// Use synthetic data when the WS-Dream files are missing.
    pub synthesize_if_missing: bool,
    /// Noise level of synthetic data.
    pub noise: f64,
    /// Synthetic users beyond the scenario's, at random locations.
    pub extra_users: usize,
    pub test_fraction: f64,
    /// Dataset nodes that are not scenario servers, grouped into provider blocks.
    pub node_blocks: Vec<NodeBlock>,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self {
            source: DataSource::Synthetic,
            wsdream_dir: None,
            max_users: None,
            max_nodes: None,
            synthesize_if_missing: true,
            noise: 0.1,
            extra_users: 0,
            test_fraction: 0.2,
            node_blocks: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub learning_rate: f64,
    pub local_epochs: usize,
    pub batch_size: usize,
    pub rounds: usize,
    pub clients_per_round: usize,
    pub selection: Selection,
    pub hidden: Vec<usize>,
    pub activation: Activation,
}

impl Default for TrainSection {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            learning_rate: t.learning_rate,
            local_epochs: t.local_epochs,
            batch_size: t.batch_size,
            rounds: t.rounds,
            clients_per_round: t.clients_per_round,
            selection: Selection::Weighted,
            hidden: vec![64, 32],
            activation: Activation::Relu,
        }
    }
}

impl TrainSection {
    pub fn config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            learning_rate: self.learning_rate,
            local_epochs: self.local_epochs,
            batch_size: self.batch_size,
            rounds: self.rounds,
            clients_per_round: self.clients_per_round,
            seed,
        }
    }
}

/// The open-ended GA comparison engine: how many epochs it keeps running.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaBaselineConfig {
    pub epochs: usize,
}

impl Default for GaBaselineConfig {
    fn default() -> Self {
        Self { epochs: 50 }
    }
}

/// Text of the bundled 8-federation desk scenario.
pub const DESK_SCENARIO: &str = include_str!("../../scenarios/desk.toml");

impl ScenarioFile {
    /// The bundled 8-federation desk scenario.
    pub fn desk() -> Self {
        Self::parse(DESK_SCENARIO).expect("bundled desk scenario is valid")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                file.schema_version
            )));
        }
        file.scenario()?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut file = Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        if let Some(dir) = &file.data.wsdream_dir {
            if dir.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                file.data.wsdream_dir = Some(base.join(dir));
            }
        }
        Ok(file)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// The validated domain scenario.
    pub fn scenario(&self) -> Result<Scenario<f64>> {
        let servers: Vec<Server> = self
            .servers
            .iter()
            .map(|s| Server {
                id: s.id,
                provider_id: s.provider,
                location: Location::new(s.lat, s.lon),
                capacity: s.capacity,
            })
            .collect();
        let provider_ids: BTreeSet<ProviderId> = self.servers.iter().map(|s| s.provider).collect();
        let providers = provider_ids
            .into_iter()
            .map(|id| Provider {
                id,
                server_ids: self.servers.iter().filter(|s| s.provider == id).map(|s| s.id).collect(),
            })
            .collect();
        let applications = self
            .applications
            .iter()
            .map(|a| Application {
                id: a.id,
                contracted_provider_id: a.provider,
                payment: a.payment,
                user_ids: Vec::new(),
            })
            .collect();
        let users = self
            .users
            .iter()
            .map(|u| User { id: u.id, location: Location::new(u.lat, u.lon), requested_app_ids: u.apps.clone() })
            .collect();
        Scenario::new(servers, providers, applications, users, self.federations, self.economics)
    }

    /// Provider of every dataset node: scenario servers first, then declared blocks.
    pub fn node_to_provider(&self) -> Result<HashMap<usize, ProviderId>> {
        let mut map: HashMap<usize, ProviderId> = self.servers.iter().map(|s| (s.id, s.provider)).collect();
        for b in &self.data.node_blocks {
            if b.first > b.last {
                return Err(Error::Config(format!("node block {}..={} is empty", b.first, b.last)));
            }
            for n in b.first..=b.last {
                if let Some(p) = map.insert(n, b.provider) {
                    if p != b.provider {
                        return Err(Error::Config(format!("node {n} is owned by providers {p} and {}", b.provider)));
                    }
                }
            }
        }
        Ok(map)
    }
}
