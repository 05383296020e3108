use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use snapmem::harness::{
    mean_at, run_learning, run_navigation, write_rows, AgentKind, LearnSpec, NavigateSpec, Setting,
};
use snapmem::selftest;

fn small_learn(seed: Option<u64>) -> LearnSpec {
    let mut spec = LearnSpec::new(Setting::Path, AgentKind::Empirical);
    spec.sensors = 8;
    spec.sweep = vec![1.0 / 8000.0, 0.25];
    spec.runs = 3;
    spec.steps = 300;
    spec.sample_interval = 50;
    spec.seed = seed;
    spec
}

fn csv_bytes(rows: &[snapmem::harness::Row]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows).unwrap();
    buf
}

#[test]
fn csv_header_and_shape() {
    let rows = run_learning(&small_learn(Some(1)), Some(1)).unwrap();
    assert_eq!(rows.len(), 2 * 3 * 6);
    let text = String::from_utf8(csv_bytes(&rows)).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("setting,agent,param_index,param_value,run_id,t,metric,value"));
    assert_eq!(lines.count(), rows.len());
    assert!(rows.iter().all(|r| r.metric == "err" && r.setting == "path" && r.agent == "empirical"));
}

#[test]
fn same_seed_same_bytes() {
    let a = csv_bytes(&run_learning(&small_learn(Some(7)), Some(1)).unwrap());
    let b = csv_bytes(&run_learning(&small_learn(Some(7)), Some(3)).unwrap());
    let c = csv_bytes(&run_learning(&small_learn(Some(8)), Some(1)).unwrap());
    assert_eq!(a, b);
    assert_ne!(a, c);

    let mut nav = NavigateSpec::new(Setting::Grid);
    nav.sensors = 6;
    nav.runs = 2;
    nav.steps = 100;
    nav.sample_interval = 10;
    nav.seed = Some(3);
    let x = csv_bytes(&run_navigation(&nav, Some(1)).unwrap());
    let y = csv_bytes(&run_navigation(&nav, Some(2)).unwrap());
    assert_eq!(x, y);
}

#[test]
fn seed_is_required() {
    let err = run_learning(&small_learn(None), None).unwrap_err();
    assert!(err.to_string().contains("seed"));
    let nav = NavigateSpec::new(Setting::Path);
    assert!(run_navigation(&nav, None).is_err());
}

#[test]
fn spec_validation() {
    let mut s = small_learn(Some(1));
    s.sweep.clear();
    assert!(run_learning(&s, None).is_err());
    let mut s = small_learn(Some(1));
    s.agent = AgentKind::Preloaded;
    assert!(run_learning(&s, None).is_err());
    let text = r#"{"setting": "path", "agent": "empirical", "seed": 1, "bogus": 3}"#;
    assert!(serde_json::from_str::<LearnSpec>(text).is_err());
    let text = r#"{"setting": "grid", "agent": "discounted", "seed": 1, "sweep": [0.9]}"#;
    let spec: LearnSpec = serde_json::from_str(text).unwrap();
    assert_eq!(spec.runs, 50);
}

#[test]
fn smoke_learning_and_navigation() {
    let mut spec = LearnSpec::new(Setting::Random, AgentKind::Discounted);
    spec.sweep = vec![0.99];
    spec.runs = 1;
    spec.steps = 100;
    spec.seed = Some(4);
    let rows = run_learning(&spec, Some(1)).unwrap();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r.value.is_finite() && r.value >= 0.0));

    let mut nav = NavigateSpec::new(Setting::Path);
    nav.runs = 1;
    nav.steps = 100;
    nav.seed = Some(4);
    let rows = run_navigation(&nav, Some(1)).unwrap();
    for p in 0..nav.agents.len() {
        assert!(mean_at(&rows, p, 0).is_some());
        assert!(mean_at(&rows, p, 100).is_some());
    }
    assert!(rows.iter().all(|r| r.metric == "deviation"));
}

#[test]
fn selftest_suites_pass() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for r in [
        selftest::propagation_suite(&mut rng, 60),
        selftest::acyclicity_suite(&mut rng, 100),
        selftest::median_suite(&mut rng, 40),
    ] {
        assert!(r.ok(), "{}: {:?}", r.name, r.first_failure);
    }
}
