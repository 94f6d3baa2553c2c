use std::path::Path;

use crate::domain::{RoutingPlan, Scenario, StrategyProfile};
use crate::error::{Error, Result};
use crate::ga::GenerationRecord;

/// One step of a formation trace, shared by every engine.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub step: usize,
    /// Share entropy of the evolving population (evo only).
    pub entropy: Option<f64>,
    pub fitness: f64,
    /// Running maximum of `fitness`.
    pub best_fitness: f64,
    pub welfare: f64,
    pub churn: usize,
    pub deviation: String,
    pub utilities: Vec<f64>,
}

fn utility_headers(m: usize) -> impl Iterator<Item = String> {
    (1..=m).map(|f| format!("u{f}"))
}

/// Columns: `step,entropy,fitness,best_fitness,welfare,churn,deviation,u1..um`.
pub fn write_trace(path: &Path, rows: &[TraceRow], federations: usize) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = ["step", "entropy", "fitness", "best_fitness", "welfare", "churn", "deviation"]
        .into_iter()
        .map(String::from)
        .collect();
    header.extend(utility_headers(federations));
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            r.step.to_string(),
            r.entropy.map(|e| e.to_string()).unwrap_or_default(),
            r.fitness.to_string(),
            r.best_fitness.to_string(),
            r.welfare.to_string(),
            r.churn.to_string(),
            r.deviation.clone(),
        ];
        rec.extend(r.utilities.iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let bad = |line: usize, msg: &str| Error::Ingest { path: path.into(), line, message: msg.into() };
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let num = |k: usize| rec.get(k).ok_or_else(|| bad(line, "short row"));
        let f = |k: usize| -> Result<f64> { num(k)?.parse().map_err(|_| bad(line, "bad number")) };
        let u = |k: usize| -> Result<usize> { num(k)?.parse().map_err(|_| bad(line, "bad integer")) };
        let entropy = match num(1)? {
            "" => None,
            _ => Some(f(1)?),
        };
        rows.push(TraceRow {
            step: u(0)?,
            entropy,
            fitness: f(2)?,
            best_fitness: f(3)?,
            welfare: f(4)?,
            churn: u(5)?,
            deviation: num(6)?.to_string(),
            utilities: (7..rec.len()).map(f).collect::<Result<_>>()?,
        });
    }
    Ok(rows)
}

/// Columns: `generation,best_fitness,mean_fitness,u1..um`.
pub fn write_ga_history(path: &Path, history: &[GenerationRecord<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let m = history.first().map_or(0, |g| g.federation_utilities.len());
    let mut header: Vec<String> = ["generation", "best_fitness", "mean_fitness"].into_iter().map(String::from).collect();
    header.extend(utility_headers(m));
    w.write_record(&header)?;
    for g in history {
        let mut rec = vec![g.generation.to_string(), g.best_fitness.to_string(), g.mean_fitness.to_string()];
        rec.extend(g.federation_utilities.iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Columns: `server_id,federation`, servers in ascending id order.
pub fn write_profile(path: &Path, profile: &StrategyProfile, scenario: &Scenario<f64>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["server_id", "federation"])?;
    for (sid, f) in profile.to_map(scenario) {
        w.write_record([sid.to_string(), f.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_profile(path: &Path, scenario: &Scenario<f64>) -> Result<StrategyProfile> {
    let mut r = csv::Reader::from_path(path)?;
    let mut pairs = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let parse = |k: usize| -> Result<usize> {
            rec.get(k).and_then(|v| v.parse().ok()).ok_or_else(|| Error::Ingest {
                path: path.into(),
                line: i + 2,
                message: "expected server_id,federation".into(),
            })
        };
        pairs.push((parse(0)?, parse(1)?));
    }
    StrategyProfile::from_pairs(scenario, &pairs).map_err(Error::Profile)
}

/// One row per request: `user_id,app_id,federation,server_id,response_time,throughput`.
/// Unserved requests leave the last three columns empty.
pub fn write_routes(path: &Path, plan: &RoutingPlan<f64>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["user_id", "app_id", "federation", "server_id", "response_time", "throughput"])?;
    for r in &plan.routes {
        let (sid, rt, tp) = match (r.server_id, r.qos) {
            (Some(s), Some(q)) => (s.to_string(), q.response_time.to_string(), q.throughput.to_string()),
            _ => Default::default(),
        };
        w.write_record([r.user_id.to_string(), r.app_id.to_string(), r.federation.to_string(), sid, rt, tp])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// A routed request as persisted: `None` QoS means unserved.
#[derive(Clone, Debug, PartialEq)]
pub struct RouteRow {
    pub user_id: usize,
    pub app_id: usize,
    pub federation: usize,
    pub server_id: Option<usize>,
    pub qos: Option<(f64, f64)>,
}

pub fn read_routes(path: &Path) -> Result<Vec<RouteRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = || Error::Ingest { path: path.into(), line: i + 2, message: "malformed route".into() };
        let field = |k: usize| rec.get(k).ok_or_else(bad);
        let int = |k: usize| -> Result<usize> { field(k)?.parse().map_err(|_| bad()) };
        let served = !field(3)?.is_empty();
        out.push(RouteRow {
            user_id: int(0)?,
            app_id: int(1)?,
            federation: int(2)?,
            server_id: if served { Some(int(3)?) } else { None },
            qos: if served {
                Some((field(4)?.parse().map_err(|_| bad())?, field(5)?.parse().map_err(|_| bad())?))
            } else {
                None
            },
        });
    }
    Ok(out)
}

impl RouteRow {
    /// The rows `write_routes` would persist for `plan`.
    pub fn from_plan(plan: &RoutingPlan<f64>) -> Vec<RouteRow> {
        plan.routes
            .iter()
            .map(|r| RouteRow {
                user_id: r.user_id,
                app_id: r.app_id,
                federation: r.federation,
                server_id: r.server_id,
                qos: r.qos.map(|q| (q.response_time, q.throughput)),
            })
            .collect()
    }
}
