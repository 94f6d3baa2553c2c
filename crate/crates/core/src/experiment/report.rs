use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ScenarioFile;
use super::pipeline::{deviation_label, load_predictor, saved_profiles, Engine, RunLayout};
use super::trace::{read_routes, read_trace, RouteRow};
use crate::data::Target;
use crate::domain::{evaluate_profile, EconomicModel, QosTable};
use crate::error::{Error, Result};
use crate::evo::StabilityReport;

/// Comparison row of one formation engine.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineReport {
    pub engine: Engine,
    /// Percent of all requests served within the response-time SLA.
    pub satisfaction_rt: f64,
    /// Percent of all requests served at or above the throughput SLA.
    pub satisfaction_tp: f64,
    /// Sum of federation utilities of the final profile.
    pub total_payoff: f64,
    pub served: usize,
    pub requests: usize,
    /// Only the evolutionary engine certifies convergence.
    pub converged: Option<bool>,
    pub deviation: Option<String>,
    /// Churn per round, excluding the starting profile.
    pub churn: Vec<usize>,
}

impl EngineReport {
    /// Fraction of rounds that reassigned at least one server.
    pub fn churn_fraction(&self) -> f64 {
        if self.churn.is_empty() {
            return 0.0;
        }
        self.churn.iter().filter(|&&c| c > 0).count() as f64 / self.churn.len() as f64
    }
}

/// Final test metrics of one trained target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub target: Target,
    pub rounds: usize,
    pub fl_mse: f64,
    pub fl_mae: f64,
    pub centralized_mse: Option<f64>,
    pub centralized_mae: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub engines: Vec<EngineReport>,
    pub models: Vec<ModelReport>,
}

impl RunReport {
    pub fn engine(&self, engine: Engine) -> Option<&EngineReport> {
        self.engines.iter().find(|e| e.engine == engine)
    }

    pub fn model(&self, target: Target) -> Option<&ModelReport> {
        self.models.iter().find(|m| m.target == target)
    }

    /// Columns: `engine,satisfaction_rt,satisfaction_tp,total_payoff,served,requests,
    /// converged,deviation,churn_fraction,churn`. Churn is `;`-separated.
    pub fn engines_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "engine",
            "satisfaction_rt",
            "satisfaction_tp",
            "total_payoff",
            "served",
            "requests",
            "converged",
            "deviation",
            "churn_fraction",
            "churn",
        ])?;
        for e in &self.engines {
            let churn: Vec<String> = e.churn.iter().map(usize::to_string).collect();
            w.write_record([
                e.engine.name().to_string(),
                e.satisfaction_rt.to_string(),
                e.satisfaction_tp.to_string(),
                e.total_payoff.to_string(),
                e.served.to_string(),
                e.requests.to_string(),
                e.converged.map(|c| c.to_string()).unwrap_or_default(),
                e.deviation.clone().unwrap_or_default(),
                e.churn_fraction().to_string(),
                churn.join(";"),
            ])?;
        }
        into_string(w)
    }

    /// Columns: `target,rounds,fl_mse,fl_mae,centralized_mse,centralized_mae`.
    pub fn models_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["target", "rounds", "fl_mse", "fl_mae", "centralized_mse", "centralized_mae"])?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for m in &self.models {
            w.write_record([
                m.target.short_name().to_string(),
                m.rounds.to_string(),
                m.fl_mse.to_string(),
                m.fl_mae.to_string(),
                opt(m.centralized_mse),
                opt(m.centralized_mae),
            ])?;
        }
        into_string(w)
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        if !self.models.is_empty() {
            s.push_str("QoS models (normalized test metrics)\n");
            for m in &self.models {
                let _ = write!(s, "  {:<3} rounds {:>4}  fl mse {:.6} mae {:.6}", m.target.short_name(), m.rounds, m.fl_mse, m.fl_mae);
                if let (Some(mse), Some(mae)) = (m.centralized_mse, m.centralized_mae) {
                    let _ = write!(s, "  centralized mse {mse:.6} mae {mae:.6}");
                }
                s.push('\n');
            }
        }
        if !self.engines.is_empty() {
            s.push_str("Formation\n");
            let _ = writeln!(
                s,
                "  {:<7} {:>8} {:>8} {:>12} {:>9} {:>10} {:>7}",
                "engine", "rt_sat%", "tp_sat%", "payoff", "served", "converged", "churn%"
            );
            for e in &self.engines {
                let conv = e.converged.map_or("-", |c| if c { "yes" } else { "no" });
                let _ = writeln!(
                    s,
                    "  {:<7} {:>8.2} {:>8.2} {:>12.4} {:>9} {:>10} {:>7.1}",
                    e.engine.name(),
                    e.satisfaction_rt,
                    e.satisfaction_tp,
                    e.total_payoff,
                    format!("{}/{}", e.served, e.requests),
                    conv,
                    100.0 * e.churn_fraction()
                );
            }
            for e in &self.engines {
                if let Some(d) = &e.deviation {
                    let _ = writeln!(s, "  {} deviation check: {d}", e.engine.name());
                }
            }
        }
        s
    }
}

fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Data(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Data(e.to_string()))
}

/// Percent of requests meeting the response-time and throughput SLAs. Unserved
/// requests count as unsatisfied. No requests at all gives 100% for both.
pub fn satisfaction(routes: &[RouteRow], econ: &EconomicModel<f64>) -> (f64, f64) {
    if routes.is_empty() {
        return (100.0, 100.0);
    }
    let (mut rt, mut tp) = (0usize, 0usize);
    for (r, t) in routes.iter().filter_map(|r| r.qos) {
        rt += usize::from(r <= econ.rt_sla);
        tp += usize::from(t >= econ.tp_sla);
    }
    let n = routes.len() as f64;
    (100.0 * rt as f64 / n, 100.0 * tp as f64 / n)
}

fn final_metrics(path: &Path) -> Result<Option<(usize, f64, f64)>> {
    if !path.exists() {
        return Ok(None);
    }
    let mut r = csv::Reader::from_path(path)?;
    let mut last = None;
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = || Error::Ingest { path: path.into(), line: i + 2, message: "expected round,mse,mae".into() };
        let round = rec.get(0).and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        let mse = rec.get(1).and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        let mae = rec.get(2).and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        last = Some((round, mse, mae));
    }
    Ok(last)
}

/// Assembles the report from the artifacts in `layout` and writes `report.csv`,
/// `fl_metrics.csv` and `summary.txt`. Satisfaction comes from the persisted routes,
/// payoff from re-evaluating the persisted profile under the persisted models.
pub fn build_report(file: &ScenarioFile, layout: &RunLayout) -> Result<RunReport> {
    let scenario = file.scenario()?;
    let mut report = RunReport::default();

    for target in [Target::ResponseTime, Target::Throughput] {
        if let Some((rounds, fl_mse, fl_mae)) = final_metrics(&layout.history(target, "fl"))? {
            let central = final_metrics(&layout.history(target, "centralized"))?;
            report.models.push(ModelReport {
                target,
                rounds,
                fl_mse,
                fl_mae,
                centralized_mse: central.map(|c| c.1),
                centralized_mae: central.map(|c| c.2),
            });
        }
    }

    let profiles = saved_profiles(layout, &scenario)?;
    if !profiles.is_empty() {
        let predictor = load_predictor(layout)?;
        let oracle = QosTable::tabulate(&scenario, &predictor);
        for (engine, profile) in profiles {
            let routes = read_routes(&layout.routes(engine))?;
            let (satisfaction_rt, satisfaction_tp) = satisfaction(&routes, scenario.econ());
            let trace = read_trace(&layout.trace(engine))?;
            let churn = trace.iter().skip(1).map(|r| r.churn).collect();
            let stability = match engine {
                Engine::Evo if layout.stability().exists() => {
                    let path = layout.stability();
                    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                    Some(serde_json::from_str::<StabilityReport>(&text)?)
                }
                _ => None,
            };
            report.engines.push(EngineReport {
                engine,
                satisfaction_rt,
                satisfaction_tp,
                total_payoff: evaluate_profile(&profile, &scenario, &oracle).welfare(),
                served: routes.iter().filter(|r| r.qos.is_some()).count(),
                requests: routes.len(),
                converged: stability.as_ref().map(|s| s.converged),
                deviation: stability.as_ref().map(|s| deviation_label(&s.deviation_check)),
                churn,
            });
        }
    }

    let write = |path: std::path::PathBuf, text: String| -> Result<()> {
        layout.ensure(&path)?;
        fs::write(&path, text).map_err(|e| Error::io(&path, e))
    };
    write(layout.report_csv(), report.engines_csv()?)?;
    write(layout.fl_metrics_csv(), report.models_csv()?)?;
    write(layout.summary(), report.summary())?;
    Ok(report)
}
