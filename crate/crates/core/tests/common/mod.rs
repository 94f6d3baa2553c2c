#![allow(dead_code)]

pub mod fl_oracle;

use fogfed::data::{preprocess, synthesize, train_test_split, FeatureTable, QosDataset, Target};
use fogfed::fl::{Client, Samples};

/// Synthetic dataset with its 80/20 split and features.
pub struct SyntheticTask {
    pub dataset: QosDataset,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub table: FeatureTable<f64>,
}

pub fn synthetic_task(seed: u64, users: usize, nodes: usize) -> SyntheticTask {
    let dataset = synthesize(seed, users, nodes, 0.1);
    let (train, test) = train_test_split(dataset.len(), 0.2, seed).unwrap();
    let table = preprocess::<f64>(&dataset, &train).unwrap();
    SyntheticTask { dataset, train, test, table }
}

impl SyntheticTask {
    pub fn test_samples(&self, target: Target) -> Samples<f64> {
        self.table.samples(&self.test, target)
    }

    /// Clients owning contiguous node blocks of the given sizes.
    pub fn clients_by_node_blocks(&self, blocks: &[usize], target: Target) -> Vec<Client<f64>> {
        let mut owner = vec![0; self.dataset.n_nodes];
        let mut at = 0;
        for (c, &len) in blocks.iter().enumerate() {
            owner[at..at + len].fill(c);
            at += len;
        }
        assert_eq!(at, self.dataset.n_nodes);
        let mut idx = vec![Vec::new(); blocks.len()];
        for &i in &self.train {
            idx[owner[self.dataset.records[i].node_id]].push(i);
        }
        idx.iter()
            .enumerate()
            .map(|(c, ix)| Client::new(c, self.table.samples(ix, target)))
            .collect()
    }
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

use fogfed::domain::{QosOracle, Scenario, StrategyProfile};

/// Federation utilities and provider utilities recomputed from the written rules:
/// plurality home federation (lowest index on ties), lowest-RT routing with spare
/// capacity (lowest server id on ties), satisfied-fraction discount, linear costs and
/// member-share split of federation utility.
pub fn reference_utilities(
    profile: &StrategyProfile,
    scenario: &Scenario<f64>,
    oracle: &impl QosOracle<f64>,
) -> (Vec<f64>, Vec<f64>) {
    let m = profile.federations();
    let servers = scenario.servers();
    let fed_of = |sid: usize| profile.assignment()[servers.iter().position(|s| s.id == sid).unwrap()];

    let home = |provider: usize| {
        let mut counts = vec![0; m + 1];
        for s in servers.iter().filter(|s| s.provider_id == provider) {
            counts[fed_of(s.id)] += 1;
        }
        (1..=m).fold(1, |best, f| if counts[f] > counts[best] { f } else { best })
    };

    let econ = scenario.econ();
    let mut load: std::collections::HashMap<usize, u32> = Default::default();
    let mut satisfied: std::collections::HashMap<usize, (usize, usize)> = Default::default();
    for req in scenario.requests() {
        let app = scenario.applications().iter().find(|a| a.id == req.app_id).unwrap();
        let user = scenario.users().iter().find(|u| u.id == req.user_id).unwrap();
        let f = home(app.contracted_provider_id);
        let mut best: Option<(usize, f64, f64)> = None;
        let mut members: Vec<_> = servers.iter().filter(|s| fed_of(s.id) == f).collect();
        members.sort_by_key(|s| s.id);
        for s in members {
            if *load.get(&s.id).unwrap_or(&0) >= s.capacity {
                continue;
            }
            let q = oracle.predict(user, s);
            if best.is_none_or(|(_, rt, _)| q.response_time < rt) {
                best = Some((s.id, q.response_time, q.throughput));
            }
        }
        let entry = satisfied.entry(req.app_id).or_default();
        entry.1 += 1;
        if let Some((sid, rt, tp)) = best {
            *load.entry(sid).or_default() += 1;
            if rt <= econ.rt_sla && tp >= econ.tp_sla {
                entry.0 += 1;
            }
        }
    }

    let mut u = vec![0.0; m];
    for app in scenario.applications() {
        let (ok, total) = satisfied.get(&app.id).copied().unwrap_or((0, 0));
        let sigma = if total == 0 { 1.0 } else { (ok as f64 / total as f64).max(econ.sigma_floor) };
        u[home(app.contracted_provider_id) - 1] += sigma * app.payment;
    }
    for s in servers {
        let routed = *load.get(&s.id).unwrap_or(&0) as f64;
        u[fed_of(s.id) - 1] -= econ.oc_unit * s.capacity as f64 + econ.tc_unit * routed;
    }

    let provider_utility = scenario
        .providers()
        .iter()
        .map(|p| {
            (1..=m)
                .map(|f| {
                    let total = servers.iter().filter(|s| fed_of(s.id) == f).count();
                    let own = servers.iter().filter(|s| fed_of(s.id) == f && s.provider_id == p.id).count();
                    if own == 0 { 0.0 } else { own as f64 / total as f64 * u[f - 1] }
                })
                .sum()
        })
        .collect();
    (u, provider_utility)
}

/// Every improving single-server move `(server id, to, gain)` found by brute force.
pub fn brute_force_deviations(
    profile: &StrategyProfile,
    scenario: &Scenario<f64>,
    oracle: &impl QosOracle<f64>,
) -> Vec<(usize, usize, f64)> {
    let (_, before) = reference_utilities(profile, scenario, oracle);
    let mut out = Vec::new();
    for (pos, s) in scenario.servers().iter().enumerate() {
        let pi = scenario.providers().iter().position(|p| p.id == s.provider_id).unwrap();
        for to in 1..=profile.federations() {
            if to == profile.assignment()[pos] {
                continue;
            }
            let moved = profile.with_move(pos, to);
            let (_, after) = reference_utilities(&moved, scenario, oracle);
            if after[pi] - before[pi] > 1e-9 {
                out.push((s.id, to, after[pi] - before[pi]));
            }
        }
    }
    out
}

/// The bundled desk scenario cut down so a full run takes a few seconds.
pub fn quick_desk() -> fogfed::experiment::ScenarioFile {
    let mut f = fogfed::experiment::ScenarioFile::desk();
    f.train.rounds = 6;
    f.train.hidden = vec![8];
    f.ga.population_size = 20;
    f.ga.max_generations = 20;
    f.ga.stall_generations = 10;
    f.evo.max_generations = 60;
    f.greedy.max_rounds = 5;
    f.ga_baseline.epochs = 5;
    f
}
