use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_snapmem"))
}

fn scratch(name: &str) -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn learn_writes_csv() {
    let out = scratch("learn");
    let args = ["learn", "--seed", "9", "--runs", "1", "--steps", "100", "--jobs", "1"];
    let st = bin().args(args).arg("--out").arg(&out).status().unwrap();
    assert!(st.success());
    let a = std::fs::read(out.join("learn.csv")).unwrap();
    let text = String::from_utf8(a.clone()).unwrap();
    assert!(text.starts_with("setting,agent,param_index,param_value,run_id,t,metric,value\n"));
    // 10 default thresholds, 1 run, samples every 10 steps.
    assert_eq!(text.lines().count(), 1 + 10 * 10);

    let st = bin().args(args).arg("--out").arg(&out).status().unwrap();
    assert!(st.success());
    assert_eq!(std::fs::read(out.join("learn.csv")).unwrap(), a);
}

#[test]
fn seedless_runs_are_refused() {
    let out = scratch("seedless");
    let o = bin().args(["learn", "--runs", "1", "--steps", "10"]).arg("--out").arg(&out).output().unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));
    assert!(!out.join("learn.csv").exists());
}

#[test]
fn navigate_with_trace() {
    let out = scratch("navigate");
    let st = bin()
        .args(["navigate", "--seed", "2", "--runs", "1", "--steps", "50", "--trace", "--jobs", "1"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(st.success());
    assert!(out.join("navigate.csv").exists());
    let trace = std::fs::read_to_string(out.join("trace.jsonl")).unwrap();
    assert!(trace.lines().count() >= 50);
}

#[test]
fn dual_from_json() {
    let dir = scratch("dual");
    let input = dir.join("p.json");
    std::fs::write(&input, r#"{"sensors": ["a", "b"], "relations": []}"#).unwrap();
    let o = bin().arg("dual").arg(&input).args(["--format", "json"]).output().unwrap();
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["vertices"].as_array().unwrap().len(), 4);
    assert_eq!(v["edges"].as_array().unwrap().len(), 4);
}
