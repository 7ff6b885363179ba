use std::fs;

use netform::io::{read_logs, write_logs, ConfigDoc, RunManifest, LOG_FILES};
use netform::sim::{run_ensemble, SimConfig, TrajectorySample};
use netform::{Error, ModelParams, ReplicationResult};

fn config(sample: TrajectorySample) -> SimConfig {
    let params = ModelParams::new(vec![0.6, 0.4], 1.0, 0.5, 1.0, 0.2, 0.4).unwrap();
    let mut c = SimConfig::new(params, 150);
    c.seed = 17;
    c.replications = 3;
    c.warmup = 10;
    c.trajectory_sample = sample;
    c
}

fn assert_same(a: &[ReplicationResult], b: &[ReplicationResult]) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        assert_eq!(x.replication, y.replication);
        assert_eq!(x.agents, y.agents);
        assert_eq!(x.edges, y.edges);
        assert_eq!(x.meetings, y.meetings);
        assert_eq!(x.trajectories.len(), y.trajectories.len());
        for (s, t) in x.trajectories.iter().zip(&y.trajectories) {
            assert_eq!((s.agent, s.ty), (t.agent, t.ty));
            assert_eq!(s.iter().collect::<Vec<_>>(), t.iter().collect::<Vec<_>>());
        }
    }
}

#[test]
fn logs_round_trip() {
    for sample in [TrajectorySample::All, TrajectorySample::Tracked(vec![5, 40, 149])] {
        let ensemble = run_ensemble(&config(sample)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let files = write_logs(dir.path(), &ensemble.replications).unwrap();
        assert_eq!(files.len(), LOG_FILES.len());
        let back = read_logs(dir.path()).unwrap();
        assert_same(&ensemble.replications, &back);
    }
}

#[test]
fn rewriting_read_logs_is_byte_identical() {
    let ensemble = run_ensemble(&config(TrajectorySample::All)).unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    write_logs(a.path(), &ensemble.replications).unwrap();
    write_logs(b.path(), &read_logs(a.path()).unwrap()).unwrap();
    for f in LOG_FILES {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn missing_or_malformed_logs() {
    let ensemble = run_ensemble(&config(TrajectorySample::All)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_logs(dir.path(), &ensemble.replications).unwrap();
    let edges = dir.path().join("edges.csv");
    let text = fs::read_to_string(&edges).unwrap();

    fs::write(&edges, text.replacen("step_formed", "formed", 1)).unwrap();
    assert!(matches!(read_logs(dir.path()), Err(Error::Domain(m)) if m.contains("expected header")));

    fs::remove_file(&edges).unwrap();
    assert!(matches!(read_logs(dir.path()), Err(Error::MissingInput(p)) if p == edges));
}

#[test]
fn manifest_round_trip_and_hash() {
    let c = config(TrajectorySample::Tracked(vec![10, 20]));
    let ensemble = run_ensemble(&c).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = write_logs(dir.path(), &ensemble.replications).unwrap();
    let manifest = RunManifest::new(&c, ensemble.seeds.clone(), &files, 0.5);
    manifest.write(dir.path()).unwrap();
    let back = RunManifest::read(dir.path()).unwrap();
    assert_eq!(back.config_hash, c.hash());
    assert_eq!(back.config_hash, ensemble.config_hash);
    assert_eq!(back.seeds, vec![(17, 0), (17, 1), (17, 2)]);
    assert_eq!(back.sim_config().unwrap(), c);
    assert!(back.missing_files(dir.path()).is_empty());
    fs::remove_file(dir.path().join("meetings.csv")).unwrap();
    assert_eq!(back.missing_files(dir.path()), vec![dir.path().join("meetings.csv")]);
}

#[test]
fn config_document_round_trip() {
    let c = config(TrajectorySample::Tracked(vec![10, 20]));
    let doc = ConfigDoc::from_sim_config(&c);
    let text = serde_json::to_string_pretty(&doc.to_value()).unwrap();
    let parsed = ConfigDoc::parse(&text).unwrap().to_sim_config().unwrap();
    assert_eq!(parsed, c);
    assert_eq!(parsed.hash(), c.hash());
}
