use std::collections::HashMap;
use std::fs;

use fogfed::data::*;
use proptest::prelude::*;

fn write_grid(dir: &std::path::Path, rt: &[Vec<f64>], tp: &[Vec<f64>]) -> WsDreamPaths {
    let paths = WsDreamPaths::in_dir(dir);
    let grid = |m: &[Vec<f64>]| {
        m.iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("\n")
    };
    fs::write(&paths.rt_matrix, grid(rt)).unwrap();
    fs::write(&paths.tp_matrix, grid(tp)).unwrap();
    let users: String = (0..rt.len()).map(|u| format!("{u}\ta\tb\tc\td\t{}\t{}\n", u as f64, -(u as f64))).collect();
    let nodes: String = (0..rt[0].len()).map(|n| format!("{n}\ta\tb\tc\td\te\tf\t{}\t{}\n", n as f64 / 2.0, 3.0)).collect();
    fs::write(&paths.user_meta, users).unwrap();
    fs::write(&paths.node_meta, nodes).unwrap();
    paths
}

#[test]
fn synthetic_dataset_survives_write_and_load() {
    let dir = tempfile::tempdir().unwrap();
    let ds = synthesize(4, 7, 11, 0.1);
    let paths = write_wsdream(&ds, dir.path()).unwrap();
    let (back, summary) = load_wsdream(&paths, &LoadOptions::default()).unwrap();
    assert_eq!(back, ds);
    assert_eq!(summary.cells, 77);
    assert_eq!(summary.records + summary.filtered, summary.cells);
}

#[test]
fn partial_dataset_writes_missing_cells_as_sentinels() {
    let dir = tempfile::tempdir().unwrap();
    let mut ds = synthesize(1, 3, 4, 0.0);
    ds.records.retain(|r| (r.user_id + r.node_id) % 3 != 0);
    let kept = ds.len();
    let paths = write_wsdream(&ds, dir.path()).unwrap();
    let (back, summary) = load_wsdream(&paths, &LoadOptions::default()).unwrap();
    assert_eq!(back.len(), kept);
    assert_eq!(summary.filtered, 12 - kept);
    assert_eq!(back.records, ds.records);
}

#[test]
fn limits_take_leading_rows_and_columns() {
    let dir = tempfile::tempdir().unwrap();
    let ds = synthesize(2, 6, 9, 0.1);
    let paths = write_wsdream(&ds, dir.path()).unwrap();
    let opts = LoadOptions { max_users: Some(4), max_nodes: Some(5), ..Default::default() };
    let (back, summary) = load_wsdream(&paths, &opts).unwrap();
    assert_eq!((summary.n_users, summary.n_nodes), (4, 5));
    let want: Vec<_> = ds.records.iter().filter(|r| r.user_id < 4 && r.node_id < 5).copied().collect();
    assert_eq!(back.records, want);
}

#[test]
fn missing_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = load_wsdream(&WsDreamPaths::in_dir(dir.path()), &LoadOptions::default()).unwrap_err();
    assert!(err.to_string().contains("rtMatrix.txt"), "{err}");
}

#[test]
fn alternating_node_owners_split_by_column_count() {
    // 4 users x 5 nodes, every cell present: provider 0 owns nodes 0, 2, 4
    let ds = synthesize(3, 4, 5, 0.1);
    let owners: HashMap<usize, usize> = (0..5).map(|n| (n, n % 2)).collect();
    let all: Vec<usize> = (0..ds.len()).collect();
    let shards = partition_by_provider(&ds, &all, &owners, &[0, 1, 2]).unwrap();
    assert_eq!(shards[0].record_indices.len(), 12);
    assert_eq!(shards[1].record_indices.len(), 8);
    assert!(shards[2].record_indices.is_empty());
    let missing: HashMap<usize, usize> = (0..4).map(|n| (n, 0)).collect();
    assert!(partition_by_provider(&ds, &all, &missing, &[0]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ingestion_keeps_exactly_the_positive_cells(
        rows in 1usize..5,
        cols in 1usize..6,
        cells in prop::collection::vec((prop_oneof![Just(-1.0), Just(0.0), 0.01f64..10.0], prop_oneof![Just(-1.0), 0.01f64..500.0]), 30),
    ) {
        let dir = tempfile::tempdir().unwrap();
        let rt: Vec<Vec<f64>> = (0..rows).map(|u| (0..cols).map(|n| cells[u * cols + n].0).collect()).collect();
        let tp: Vec<Vec<f64>> = (0..rows).map(|u| (0..cols).map(|n| cells[u * cols + n].1).collect()).collect();
        let paths = write_grid(dir.path(), &rt, &tp);
        let (ds, summary) = load_wsdream(&paths, &LoadOptions::default()).unwrap();
        let mut want = Vec::new();
        for u in 0..rows {
            for n in 0..cols {
                if rt[u][n] > 0.0 && tp[u][n] > 0.0 {
                    want.push((u, n, rt[u][n], tp[u][n]));
                }
            }
        }
        let got: Vec<_> = ds.records.iter().map(|r| (r.user_id, r.node_id, r.response_time, r.throughput)).collect();
        prop_assert_eq!(got, want);
        prop_assert_eq!(summary.records + summary.filtered, rows * cols);
        for r in &ds.records {
            prop_assert_eq!((r.user_lat, r.user_lon), (r.user_id as f64, -(r.user_id as f64)));
            prop_assert_eq!((r.node_lat, r.node_lon), (r.node_id as f64 / 2.0, 3.0));
        }
    }

    #[test]
    fn target_scaling_round_trips(values in prop::collection::vec(1e-3f64..1e4, 2..50), probe in -1e4f64..1e4) {
        prop_assume!(values.iter().any(|&v| v != values[0]));
        let scale = TargetScale::fit(values.iter().copied()).unwrap();
        prop_assert!((scale.denormalize(scale.normalize(probe)) - probe).abs() <= 1e-9 * probe.abs().max(1.0));
        for &v in &values {
            let n = scale.normalize(v);
            prop_assert!((0.0..=1.0).contains(&n));
        }
    }

    #[test]
    fn features_stay_in_unit_interval(seed in 0u64..1000) {
        let ds = synthesize(seed, 6, 8, 0.2);
        let (train, test) = train_test_split(ds.len(), 0.25, seed).unwrap();
        let table = preprocess::<f64>(&ds, &train).unwrap();
        prop_assert_eq!(table.width(), 6 + 8 + 4);
        let samples = table.samples(&train, Target::ResponseTime);
        for y in &samples.targets {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(y));
        }
        let again = preprocess::<f64>(&ds, &train).unwrap();
        prop_assert_eq!(table.normalization, again.normalization);
        prop_assert!(test.iter().all(|i| !train.contains(i)));
    }
}
