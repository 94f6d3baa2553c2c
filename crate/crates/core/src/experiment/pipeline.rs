use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{DataSource, ScenarioFile};
use super::report::{build_report, RunReport};
use super::trace::{
    read_profile, write_ga_history, write_profile, write_routes, write_trace, TraceRow,
};
use crate::baselines::{centralized_train, kmeans_init, run_greedy_from};
use crate::data::{
    load_wsdream, partition_by_provider, preprocess, synthesize_at, train_test_split, write_wsdream,
    FeatureTable, LoadOptions, LocalShard, QosDataset, Target, WsDreamPaths,
};
use crate::domain::{evaluate_profile, QosOracle, QosTable, Scenario, StrategyProfile};
use crate::error::{Error, Result};
use crate::evo::{run_evolution, DeviationCheck, StabilityReport};
use crate::fl::{
    load_model, run_federated_training, save_model, write_history_csv, Client, EvalReport, ModelSpec,
    QosPredictor, Selection, TrainedModel,
};
use crate::ga::{fitness_of_utilities, run_ga, run_ga_open_ended};
use crate::seed::derive_seed;

/// Independent RNG streams of one run.
#[derive(Clone, Copy, Debug)]
enum Stream {
    Data = 1,
    Split = 2,
    TrainRt = 3,
    TrainTp = 4,
    Kmeans = 5,
    Ga = 6,
    Evo = 7,
    GaBaseline = 8,
}

fn stream_seed(seed: u64, stream: Stream, extra: u64) -> u64 {
    derive_seed(seed, &[stream as u64, extra])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Evo,
    Ga,
    Greedy,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::Evo, Engine::Ga, Engine::Greedy];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Evo => "evo",
            Engine::Ga => "ga",
            Engine::Greedy => "greedy",
        }
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Engine::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown engine `{s}`")))
    }
}

/// File layout of a run directory.
#[derive(Clone, Debug)]
pub struct RunLayout {
    pub root: PathBuf,
}

impl RunLayout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn data_dir(&self) -> PathBuf {
        self.root.join("data")
    }

    pub fn model(&self, target: Target) -> PathBuf {
        self.root.join("models").join(format!("{}.json", target.short_name()))
    }

    pub fn history(&self, target: Target, kind: &str) -> PathBuf {
        self.root.join("models").join(format!("{}_{kind}_history.csv", target.short_name()))
    }

    pub fn trace(&self, engine: Engine) -> PathBuf {
        self.root.join("formation").join(format!("{}_trace.csv", engine.name()))
    }

    pub fn profile(&self, engine: Engine) -> PathBuf {
        self.root.join("formation").join(format!("{}_profile.csv", engine.name()))
    }

    pub fn routes(&self, engine: Engine) -> PathBuf {
        self.root.join("formation").join(format!("{}_routes.csv", engine.name()))
    }

    pub fn stability(&self) -> PathBuf {
        self.root.join("formation").join("evo_stability.json")
    }

    pub fn ga_history(&self) -> PathBuf {
        self.root.join("formation").join("evo_ga_history.csv")
    }

    pub fn report_csv(&self) -> PathBuf {
        self.root.join("report.csv")
    }

    pub fn fl_metrics_csv(&self) -> PathBuf {
        self.root.join("fl_metrics.csv")
    }

    pub fn summary(&self) -> PathBuf {
        self.root.join("summary.txt")
    }

    pub(crate) fn ensure(&self, path: &Path) -> Result<()> {
        match path.parent() {
            Some(dir) => fs::create_dir_all(dir).map_err(|e| Error::io(dir, e)),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataSummary {
    pub source: DataSource,
    pub n_users: usize,
    pub n_nodes: usize,
    pub records: usize,
    pub filtered: usize,
}

/// Dataset with its split, features and per-provider shards of the training part.
#[derive(Clone, Debug)]
pub struct PreparedData {
    pub dataset: QosDataset,
    pub summary: DataSummary,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub table: FeatureTable<f64>,
    pub shards: Vec<LocalShard>,
}

/// Loads or synthesizes the scenario's QoS data, splits it and shards the training
/// records by provider.
pub fn prepare_data(file: &ScenarioFile, seed: u64) -> Result<PreparedData> {
    let scenario = file.scenario()?;
    let cfg = &file.data;
    let wsdream = match (cfg.source, &cfg.wsdream_dir) {
        (DataSource::Wsdream, Some(dir)) => Some(WsDreamPaths::in_dir(dir)),
        (DataSource::Wsdream, None) => return Err(Error::Config("data.wsdream_dir is required".into())),
        (DataSource::Synthetic, _) => None,
    };
    let available = wsdream.as_ref().is_some_and(|p| p.rt_matrix.exists());
    let (dataset, summary) = match wsdream {
        Some(paths) if available || !cfg.synthesize_if_missing => {
            let opts = LoadOptions { max_users: cfg.max_users, max_nodes: cfg.max_nodes, ..Default::default() };
            let (ds, s) = load_wsdream(&paths, &opts)?;
            let summary = DataSummary {
                source: DataSource::Wsdream,
                n_users: s.n_users,
                n_nodes: s.n_nodes,
                records: s.records,
                filtered: s.filtered,
            };
            (ds, summary)
        }
        _ => {
            let ds = synthetic_dataset(file, &scenario, stream_seed(seed, Stream::Data, 0));
            let summary = DataSummary {
                source: DataSource::Synthetic,
                n_users: ds.n_users,
                n_nodes: ds.n_nodes,
                records: ds.len(),
                filtered: 0,
            };
            (ds, summary)
        }
    };
    let (train, test) = train_test_split(dataset.len(), cfg.test_fraction, stream_seed(seed, Stream::Split, 0))?;
    let table = preprocess::<f64>(&dataset, &train)?;
    let providers: Vec<usize> = scenario.providers().iter().map(|p| p.id).collect();
    let shards = partition_by_provider(&dataset, &train, &file.node_to_provider()?, &providers)?;
    Ok(PreparedData { dataset, summary, train, test, table, shards })
}

/// Synthetic observations for every (user, node) pair. Scenario users and servers
/// keep their ids and coordinates; ids without an entity and `extra_users` get random
/// coordinates.
fn synthetic_dataset(file: &ScenarioFile, scenario: &Scenario<f64>, seed: u64) -> QosDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut random_loc = || (rng.gen_range(-60.0..70.0), rng.gen_range(-180.0..180.0));
    let n_users = scenario.users().iter().map(|u| u.id + 1).max().unwrap_or(0) + file.data.extra_users;
    let mut users: Vec<(f64, f64)> = (0..n_users).map(|_| random_loc()).collect();
    for u in scenario.users() {
        users[u.id] = (u.location.lat, u.location.lon);
    }
    let n_nodes = scenario.servers().iter().map(|s| s.id + 1).max().unwrap_or(0);
    let mut nodes: Vec<(f64, f64)> = (0..n_nodes).map(|_| random_loc()).collect();
    for s in scenario.servers() {
        nodes[s.id] = (s.location.lat, s.location.lon);
    }
    synthesize_at(seed, &users, &nodes, file.data.noise)
}

#[derive(Clone, Debug)]
pub struct TrainedTarget {
    pub model: TrainedModel<f64>,
    pub federated: EvalReport<f64>,
    /// Same schedule on pooled training data.
    pub centralized: EvalReport<f64>,
}

/// Federated training of one target on the provider shards, plus the centralized
/// reference run.
pub fn train_target(
    file: &ScenarioFile,
    prepared: &PreparedData,
    target: Target,
    selection: Selection,
    seed: u64,
) -> Result<TrainedTarget> {
    let stream = if target == Target::ResponseTime { Stream::TrainRt } else { Stream::TrainTp };
    let config = file.train.config(stream_seed(seed, stream, 0));
    let table = &prepared.table;
    let spec = ModelSpec::regression(table.width(), &file.train.hidden, file.train.activation)?;
    let clients: Vec<Client<f64>> = prepared
        .shards
        .iter()
        .enumerate()
        .map(|(i, s)| Client::new(i, table.samples(&s.record_indices, target)))
        .collect();
    let test = table.samples(&prepared.test, target);
    let (params, federated) = run_federated_training(&clients, &spec, &config, selection, &test)?;
    let pooled = table.samples(&prepared.train, target);
    let (_, centralized) = centralized_train(&pooled, &spec, &config, &test)?;
    let model = TrainedModel::new(target, params, table.encoder, table.normalization.scale(target))?;
    Ok(TrainedTarget { model, federated, centralized })
}

/// Persists a trained target: model file and both training histories.
pub fn save_trained(layout: &RunLayout, trained: &TrainedTarget) -> Result<()> {
    let target = trained.model.target;
    let model_path = layout.model(target);
    layout.ensure(&model_path)?;
    save_model(&model_path, &trained.model)?;
    write_history_csv(&layout.history(target, "fl"), &trained.federated)?;
    write_history_csv(&layout.history(target, "centralized"), &trained.centralized)
}

pub fn load_predictor(layout: &RunLayout) -> Result<QosPredictor<f64>> {
    let load = |t| {
        let path = layout.model(t);
        if !path.exists() {
            return Err(Error::Config(format!("missing model file {}", path.display())));
        }
        load_model::<f64>(&path)
    };
    QosPredictor::new(load(Target::ResponseTime)?, load(Target::Throughput)?)
}

/// Result of one formation engine.
#[derive(Clone, Debug)]
pub struct Formation {
    pub engine: Engine,
    pub profile: StrategyProfile,
    pub trace: Vec<TraceRow>,
    pub stability: Option<StabilityReport>,
}

/// Runs `engine` on the scenario. All engines start from the same k-means profile:
/// `evo` refines it with the elitist GA and then stabilizes the GA's best profile,
/// `ga` runs the open-ended GA and `greedy` iterates simultaneous best responses.
pub fn form(
    engine: Engine,
    file: &ScenarioFile,
    scenario: &Scenario<f64>,
    oracle: &(impl QosOracle<f64> + ?Sized),
    seed: u64,
    layout: Option<&RunLayout>,
) -> Result<Formation> {
    let m = scenario.federations();
    let start = kmeans_init(scenario, m, stream_seed(seed, Stream::Kmeans, 0))?;
    let lambda = file.ga.lambda_fairness;
    let row = |step: usize, entropy: Option<f64>, profile: &StrategyProfile, churn: usize, deviation: &str| {
        let u = evaluate_profile(profile, scenario, oracle).federation_utilities;
        TraceRow {
            step,
            entropy,
            fitness: fitness_of_utilities(&u, lambda),
            best_fitness: f64::NEG_INFINITY,
            welfare: u.iter().sum(),
            churn,
            deviation: deviation.to_string(),
            utilities: u,
        }
    };
    let mut formation = match engine {
        Engine::Evo => {
            let ga_cfg = crate::ga::GaConfig { seed: stream_seed(seed, Stream::Ga, file.ga.seed), ..file.ga.clone() };
            let ga = run_ga(scenario, oracle, &ga_cfg, &[start])?;
            if let Some(layout) = layout {
                layout.ensure(&layout.ga_history())?;
                write_ga_history(&layout.ga_history(), &ga.history)?;
            }
            let evo_cfg = crate::evo::EvoConfig {
                seed: stream_seed(seed, Stream::Evo, file.evo.seed),
                ..file.evo.clone()
            };
            let out = run_evolution(scenario, oracle, &evo_cfg, &ga.best)?;
            let mut trace = vec![row(0, None, &ga.best, 0, "-")];
            trace.extend(out.trace.iter().map(|g| TraceRow {
                step: g.generation,
                entropy: Some(g.entropy),
                fitness: g.dominant_fitness,
                best_fitness: f64::NEG_INFINITY,
                welfare: g.federation_utilities.iter().sum(),
                churn: g.churn,
                deviation: g.deviation.clone(),
                utilities: g.federation_utilities.clone(),
            }));
            Formation { engine, profile: out.profile, trace, stability: Some(out.report) }
        }
        Engine::Ga => {
            let cfg = crate::ga::GaConfig {
                seed: stream_seed(seed, Stream::GaBaseline, file.ga.seed),
                ..file.ga.clone()
            };
            let epochs = run_ga_open_ended(scenario, oracle, &cfg, &[start], file.ga_baseline.epochs)?;
            let mut trace = Vec::with_capacity(epochs.len());
            for (i, e) in epochs.iter().enumerate() {
                let churn = if i == 0 { 0 } else { crate::evo::churn(&epochs[i - 1].deployed, &e.deployed) };
                trace.push(row(e.epoch, None, &e.deployed, churn, "-"));
            }
            let profile = epochs.last().unwrap().deployed.clone();
            Formation { engine, profile, trace, stability: None }
        }
        Engine::Greedy => {
            let g = run_greedy_from(scenario, oracle, start, file.greedy.max_rounds)?;
            let trace = g
                .profiles
                .iter()
                .enumerate()
                .map(|(i, p)| row(i, None, p, if i == 0 { 0 } else { g.churn[i - 1] }, "-"))
                .collect();
            Formation { engine, profile: g.profiles.last().unwrap().clone(), trace, stability: None }
        }
    };
    let mut best = f64::NEG_INFINITY;
    for r in &mut formation.trace {
        best = best.max(r.fitness);
        r.best_fitness = best;
    }
    Ok(formation)
}

/// Writes a formation's trace, final profile and routing plan.
pub fn save_formation(
    layout: &RunLayout,
    formation: &Formation,
    scenario: &Scenario<f64>,
    oracle: &(impl QosOracle<f64> + ?Sized),
) -> Result<()> {
    let e = formation.engine;
    layout.ensure(&layout.trace(e))?;
    write_trace(&layout.trace(e), &formation.trace, scenario.federations())?;
    write_profile(&layout.profile(e), &formation.profile, scenario)?;
    let plan = evaluate_profile(&formation.profile, scenario, oracle).plan;
    write_routes(&layout.routes(e), &plan)?;
    if let Some(stability) = &formation.stability {
        let text = serde_json::to_string_pretty(stability)?;
        fs::write(layout.stability(), text + "\n").map_err(|err| Error::io(layout.stability(), err))?;
    }
    Ok(())
}

/// Profiles persisted in a run directory, in engine order.
pub fn saved_profiles(layout: &RunLayout, scenario: &Scenario<f64>) -> Result<Vec<(Engine, StrategyProfile)>> {
    let mut out = Vec::new();
    for e in Engine::ALL {
        let path = layout.profile(e);
        if path.exists() {
            out.push((e, read_profile(&path, scenario)?));
        }
    }
    Ok(out)
}

/// The whole mechanism with one seed: data, two federated models, all three engines
/// and the comparison report. Every artifact is written under `layout`.
pub fn simulate(file: &ScenarioFile, seed: u64, layout: &RunLayout) -> Result<RunReport> {
    let scenario = file.scenario().map_err(|e| e.in_stage("scenario"))?;
    let prepared = prepare_data(file, seed).map_err(|e| e.in_stage("ingest"))?;
    if prepared.summary.source == DataSource::Synthetic {
        write_wsdream(&prepared.dataset, layout.data_dir()).map_err(|e| e.in_stage("ingest"))?;
    }
    for target in [Target::ResponseTime, Target::Throughput] {
        let trained = train_target(file, &prepared, target, file.train.selection, seed)
            .map_err(|e| e.in_stage("train"))?;
        save_trained(layout, &trained).map_err(|e| e.in_stage("train"))?;
    }
    let predictor = load_predictor(layout).map_err(|e| e.in_stage("train"))?;
    let oracle = QosTable::tabulate(&scenario, &predictor);
    for engine in Engine::ALL {
        let f = form(engine, file, &scenario, &oracle, seed, Some(layout)).map_err(|e| e.in_stage("form"))?;
        save_formation(layout, &f, &scenario, &oracle).map_err(|e| e.in_stage("form"))?;
    }
    build_report(file, layout).map_err(|e| e.in_stage("report"))
}

/// Label of a deviation check for reports.
pub fn deviation_label(check: &DeviationCheck) -> String {
    match check {
        DeviationCheck::Fail(d) => format!(
            "fail(provider {} server {} {}->{} gain {})",
            d.provider_id, d.server_id, d.from, d.to, d.gain
        ),
        other => other.label().to_string(),
    }
}
