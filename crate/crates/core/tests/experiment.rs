mod common;

use std::fs;

use fogfed::data::Target;
use fogfed::domain::QosTable;
use fogfed::experiment::*;

use common::{quick_desk, reference_utilities};

fn read(path: std::path::PathBuf) -> String {
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn simulate_writes_a_consistent_report() {
    let dir = tempfile::tempdir().unwrap();
    let layout = RunLayout::new(dir.path());
    let file = quick_desk();
    let report = simulate(&file, 3, &layout).unwrap();
    let scenario = file.scenario().unwrap();
    let econ = scenario.econ();
    let requests = scenario.requests().len();

    assert_eq!(report.engines.len(), 3);
    assert_eq!(report.models.len(), 2);
    for t in [Target::ResponseTime, Target::Throughput] {
        assert!(layout.model(t).exists());
        assert_eq!(report.model(t).unwrap().rounds, 6);
    }

    let predictor = load_predictor(&layout).unwrap();
    let table = QosTable::tabulate(&scenario, &predictor);
    for e in Engine::ALL {
        let er = report.engine(e).unwrap();
        // satisfaction straight from the routes file, every request in the denominator
        let text = read(layout.routes(e));
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "user_id,app_id,federation,server_id,response_time,throughput");
        let (mut n, mut rt_ok, mut tp_ok) = (0, 0, 0);
        for line in lines {
            let f: Vec<&str> = line.split(',').collect();
            n += 1;
            if !f[4].is_empty() {
                rt_ok += usize::from(f[4].parse::<f64>().unwrap() <= econ.rt_sla);
                tp_ok += usize::from(f[5].parse::<f64>().unwrap() >= econ.tp_sla);
            }
        }
        assert_eq!(n, requests);
        assert_eq!(er.requests, requests);
        assert!((er.satisfaction_rt - 100.0 * rt_ok as f64 / n as f64).abs() < 1e-9);
        assert!((er.satisfaction_tp - 100.0 * tp_ok as f64 / n as f64).abs() < 1e-9);

        let profile = read_profile(&layout.profile(e), &scenario).unwrap();
        let (u, _) = reference_utilities(&profile, &scenario, &table);
        assert!((er.total_payoff - u.iter().sum::<f64>()).abs() < 1e-6);
    }
    let evo = report.engine(Engine::Evo).unwrap();
    assert!(evo.converged.is_some() && evo.deviation.is_some());
    assert!(report.engine(Engine::Greedy).unwrap().converged.is_none());
    assert_eq!(report.engine(Engine::Greedy).unwrap().churn.len(), 5);

    // the report command rebuilds the same files from the artifacts alone
    let csv = read(layout.report_csv());
    let metrics = read(layout.fl_metrics_csv());
    let rebuilt = build_report(&file, &layout).unwrap();
    assert_eq!(rebuilt.engines, report.engines);
    assert_eq!(read(layout.report_csv()), csv);
    assert_eq!(read(layout.fl_metrics_csv()), metrics);
}

#[test]
fn simulate_is_byte_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let file = quick_desk();
    simulate(&file, 9, &RunLayout::new(a.path())).unwrap();
    simulate(&file, 9, &RunLayout::new(b.path())).unwrap();
    let (la, lb) = (RunLayout::new(a.path()), RunLayout::new(b.path()));
    assert_eq!(read(la.report_csv()), read(lb.report_csv()));
    assert_eq!(read(la.fl_metrics_csv()), read(lb.fl_metrics_csv()));
    assert_eq!(read(la.model(Target::ResponseTime)), read(lb.model(Target::ResponseTime)));
    for e in Engine::ALL {
        assert_eq!(read(la.trace(e)), read(lb.trace(e)));
    }
}

#[test]
fn forming_without_models_names_the_missing_file() {
    let dir = tempfile::tempdir().unwrap();
    let err = load_predictor(&RunLayout::new(dir.path())).unwrap_err();
    assert!(err.to_string().contains("missing model file"), "{err}");
}

#[test]
fn trace_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let rows = vec![
        TraceRow { step: 0, entropy: None, fitness: 1.5, best_fitness: 1.5, welfare: 2.0, churn: 0, deviation: "-".into(), utilities: vec![1.0, 1.0] },
        TraceRow { step: 1, entropy: Some(0.25), fitness: -0.5, best_fitness: 1.5, welfare: 0.1, churn: 3, deviation: "pass".into(), utilities: vec![0.3, -0.2] },
    ];
    let path = dir.path().join("t.csv");
    write_trace(&path, &rows, 2).unwrap();
    assert_eq!(read_trace(&path).unwrap(), rows);
}

#[test]
fn profile_files_round_trip_and_reject_unknown_servers() {
    let dir = tempfile::tempdir().unwrap();
    let file = quick_desk();
    let scenario = file.scenario().unwrap();
    let profile = fogfed::baselines::kmeans_init(&scenario, 8, 1).unwrap();
    let path = dir.path().join("p.csv");
    write_profile(&path, &profile, &scenario).unwrap();
    assert_eq!(read_profile(&path, &scenario).unwrap(), profile);
    fs::write(&path, "server_id,federation\n999,1\n").unwrap();
    assert!(read_profile(&path, &scenario).is_err());
}

#[test]
fn scenario_file_survives_toml_round_trip() {
    let file = ScenarioFile::desk();
    let again = ScenarioFile::parse(&file.to_toml().unwrap()).unwrap();
    assert_eq!(again, file);
}
