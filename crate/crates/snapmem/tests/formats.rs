use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use snapmem::formats::{dual_dot, DualFile, PocSetFile, SnapshotFile};
use snapmem::harness::{navigation_run, NavigateSpec, Setting};
use snapmem_core::dba::{build_sensorium, SensorPlan};
use snapmem_core::{Cubing, Environment, Sensorium, Snapshot, SnapshotKind, StarSelection};

#[test]
fn pocset_json_round_trip() {
    let text = r#"{"sensors": ["a", "b", "c"], "relations": [["a", "b"], ["b", "c*"]]}"#;
    let file: PocSetFile = serde_json::from_str(text).unwrap();
    let p = file.to_pocset().unwrap();
    let back = PocSetFile::from_pocset(&p);
    assert_eq!(back, file);
    let again: PocSetFile = serde_json::from_str(&serde_json::to_string(&back).unwrap()).unwrap();
    assert_eq!(again.to_pocset().unwrap().relations(), p.relations());

    let bad: PocSetFile = serde_json::from_str(r#"{"sensors": ["a"], "relations": [["a", "z"]]}"#).unwrap();
    assert!(bad.to_pocset().is_err());
}

#[test]
fn snapshot_json_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let env = Environment::path(4);
    let layout = build_sensorium(&env, SensorPlan::NAVIGATION);
    let n = layout.sensorium.len();
    let mut e = Snapshot::trivial(layout.sensorium.clone(), 0.05, SnapshotKind::Empirical).unwrap();
    let mut d = Snapshot::trivial(Sensorium::anonymous(5), 0.05, SnapshotKind::Probabilistic).unwrap();
    for _ in 0..30 {
        let v: Vec<bool> = (0..n).map(|_| rng.random_bool(0.3)).collect();
        e.empirical_update(&StarSelection::from_values(&v)).unwrap();
        let v: Vec<bool> = (0..5).map(|_| rng.random_bool(0.5)).collect();
        d.discounted_update(&StarSelection::from_values(&v), 0.9).unwrap();
    }
    for s in [&e, &d] {
        let text = serde_json::to_string(&SnapshotFile::from_snapshot(s)).unwrap();
        let back = serde_json::from_str::<SnapshotFile>(&text).unwrap().to_snapshot().unwrap();
        assert_eq!(back.weights(), s.weights());
        assert_eq!(back.thresholds(), s.thresholds());
        assert_eq!(back.state(), s.state());
        assert_eq!(back.clock(), s.clock());
        assert_eq!(back.graph().sorted_edges(), s.graph().sorted_edges());
        assert_eq!(back.sensorium(), s.sensorium());
    }
}

#[test]
fn dual_exports() {
    let file: PocSetFile = serde_json::from_str(r#"{"sensors": ["a", "b"], "relations": [["a", "b"]]}"#).unwrap();
    let c = Cubing::build(&file.to_pocset().unwrap()).unwrap();
    let dual = DualFile::from_cubing(&c);
    assert_eq!(dual.vertices.len(), 3);
    assert_eq!(dual.edges.len(), 2);
    let dot = dual_dot(&c);
    assert!(dot.starts_with("graph"));
    assert_eq!(dot.matches("--").count(), 2);
}

#[test]
fn trace_lines_serialize() {
    let mut spec = NavigateSpec::new(Setting::Path);
    spec.sensors = 6;
    spec.steps = 20;
    spec.seed = Some(5);
    let (rows, lines) = navigation_run(&spec, 5, 0, 0, true).unwrap();
    assert_eq!(lines.len(), 20);
    assert_eq!(rows.first().unwrap().t, 0);
    for l in &lines {
        let v: serde_json::Value = serde_json::from_str(&serde_json::to_string(l).unwrap()).unwrap();
        assert!(v.is_object());
    }
}
