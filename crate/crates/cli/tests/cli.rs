use std::path::Path;
use std::process::{Command, Output};

fn rig_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rig-lab"))
        .args(args)
        .env_remove("RIG_LAB_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn generate_complete_er() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.txt");
    let o = rig_lab(&["generate", "--model", "er", "--n", "3", "--q", "1", "--out", path_str(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "3 3\n0 1\n0 2\n1 2\n");
    assert!(stdout(&o).contains("nodes 3 edges 3"));
}

#[test]
fn generate_forced_overlap() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.txt");
    let items = dir.path().join("items.txt");
    let o = rig_lab(&[
        "generate", "--model", "urig", "--n", "3", "--K", "2", "--P", "2", "--s", "1", "--out", path_str(&out),
        "--items", path_str(&items),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "3 3\n0 1\n0 2\n1 2\n");
    assert_eq!(std::fs::read_to_string(&items).unwrap(), "0: 0,1\n1: 0,1\n2: 0,1\n");
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = rig_lab(&[
            "generate", "--model", "urig-er", "--n", "200", "--K", "8", "--P", "400", "--q", "0.5", "--seed", "17",
            "--out", path_str(&out),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        std::fs::read(out).unwrap()
    };
    assert_eq!(run("a.txt"), run("b.txt"));
}

#[test]
fn seed_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: Option<&str>| {
        let out = dir.path().join(name);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_rig-lab"));
        cmd.args(["generate", "--model", "er", "--n", "50", "--q", "0.3", "--out", path_str(&out)]);
        match seed {
            Some(s) => cmd.env("RIG_LAB_SEED", s),
            None => cmd.env_remove("RIG_LAB_SEED"),
        };
        assert!(cmd.output().unwrap().status.success());
        std::fs::read(out).unwrap()
    };
    assert_eq!(run("a", Some("5")), run("b", Some("5")));
    assert_ne!(run("c", Some("5")), run("d", None));
}

#[test]
fn invalid_params_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.txt");
    let o = rig_lab(&["generate", "--model", "urig", "--n", "3", "--K", "5", "--P", "2", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(2));
    let o = rig_lab(&["generate", "--model", "er", "--n", "3", "--q", "1.5", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_examples() {
    let dir = tempfile::tempdir().unwrap();
    let c6 = write(dir.path(), "c6.txt", "6 6\n0 1\n0 5\n1 2\n2 3\n3 4\n4 5\n");
    let o = rig_lab(&["check", &c6, "--property", "kconn", "--k", "2"]);
    assert_eq!(stdout(&o).trim(), "true");
    let star = write(dir.path(), "star.txt", "4 3\n0 1\n0 2\n0 3\n");
    let o = rig_lab(&["check", &star, "--property", "matching"]);
    assert_eq!(stdout(&o).trim(), "false");
    assert_eq!(o.status.code(), Some(0));
    let petersen = write(
        dir.path(),
        "petersen.txt",
        "10 15\n0 1\n0 4\n0 5\n1 2\n1 6\n2 3\n2 7\n3 4\n3 8\n4 9\n5 7\n5 8\n6 8\n6 9\n7 9\n",
    );
    let o = rig_lab(&["check", &petersen, "--property", "hamilton"]);
    assert_eq!(stdout(&o).trim(), "false");
}

#[test]
fn check_robust_prints_witness() {
    let dir = tempfile::tempdir().unwrap();
    let p4 = write(dir.path(), "p4.txt", "4 3\n0 1\n1 2\n2 3\n");
    let o = rig_lab(&["check", &p4, "--property", "robust", "--k", "2"]);
    let out = stdout(&o);
    assert!(out.starts_with("false\nwitness "), "{out}");
    let o = rig_lab(&["check", &p4, "--property", "robust", "--k", "2", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["holds"], false);
    assert!(v["witness"].as_array().is_some_and(|w| !w.is_empty()));
}

#[test]
fn check_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "3 2\n0 1\n");
    let o = rig_lab(&["check", &bad, "--property", "kconn"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("line"));
    let mut text = String::from("30 29\n");
    for i in 0..29 {
        text.push_str(&format!("{i} {}\n", i + 1));
    }
    let path = write(dir.path(), "p30.txt", &text);
    let o = rig_lab(&["check", &path, "--property", "robust"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let o = rig_lab(&["check", path_str(&dir.path().join("missing.txt")), "--property", "kconn"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn predict_examples() {
    let o = rig_lab(&["predict", "--family", "urig", "--s", "1", "--property", "kconn", "--k", "1", "--alpha", "0"]);
    assert_eq!(stdout(&o).trim(), "0.367879", "{}", stderr(&o));
    let o = rig_lab(&["predict", "--family", "er", "--property", "kconn", "--k", "3", "--alpha", "0", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["predicted"].as_f64().unwrap() - (-0.5f64).exp()).abs() < 1e-15);
    let o = rig_lab(&["predict", "--family", "brig", "--property", "robust", "--alpha", "2"]);
    assert_eq!(stdout(&o).trim(), "unspecified");
    let o = rig_lab(&["predict", "--family", "er", "--property", "pm", "--beta", "-inf"]);
    assert_eq!(stdout(&o).trim(), "0");
}

#[test]
fn predict_from_parameters() {
    let o = rig_lab(&[
        "predict", "--family", "urig", "--property", "pm", "--n", "2000", "--K", "6", "--P", "10000", "--json",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["deviation"].as_f64().unwrap() - (7.2 - 2000f64.ln())).abs() < 1e-12);
    assert_eq!(v["side_conditions"][0]["holds"], false);
}

#[test]
fn solve_examples() {
    let o = rig_lab(&["solve", "--family", "er", "--property", "pm", "--n", "10000", "--beta", "0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().next().unwrap(), "q = 0.000921034");
    let o = rig_lab(&["solve", "--family", "urig", "--property", "pm", "--n", "2000", "--P", "10000", "--alpha", "0", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let ks: Vec<f64> = v["candidates"].as_array().unwrap().iter().map(|c| c["value"].as_f64().unwrap()).collect();
    assert_eq!(ks, vec![6.0, 7.0]);
    let o = rig_lab(&["solve", "--family", "er", "--property", "kconn", "--n", "3", "--alpha", "40"]);
    assert_eq!(o.status.code(), Some(2));
}

const CONFIG: &str = r#"{
  "schema": "rig-lab/1",
  "model": {"solve": {"family": {"kind": "uniform_rig", "s": 1}, "n": 300, "target": 0.0, "fixed": {"P": 3000}}},
  "property": {"kind": "k_connected", "k": 1},
  "trials": 40,
  "seed": 11,
  "output": {"csv": "trials.csv", "summary": "summary.json"}
}"#;

#[test]
fn experiment_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", CONFIG);
    let o = rig_lab(&["experiment", "-c", &cfg, "--workers", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv1 = std::fs::read(dir.path().join("trials.csv")).unwrap();
    let json1 = std::fs::read(dir.path().join("summary.json")).unwrap();
    let o = rig_lab(&["experiment", "-c", &cfg, "--workers", "3"]);
    assert!(o.status.success());
    assert_eq!(csv1, std::fs::read(dir.path().join("trials.csv")).unwrap());
    assert_eq!(json1, std::fs::read(dir.path().join("summary.json")).unwrap());

    let text = String::from_utf8(csv1).unwrap();
    assert!(text.starts_with("trial,seed,outcome,edges,min_degree,millis\n"));
    assert_eq!(text.lines().count(), 41);
    let v: serde_json::Value = serde_json::from_slice(&json1).unwrap();
    assert_eq!(v["schema"], "rig-lab/1");
    assert_eq!(v["trials"], 40);
    assert_eq!(v["config"]["seed"], 11);
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", CONFIG);
    let summary = dir.path().join("other.json");
    let o = rig_lab(&[
        "experiment", "-c", &cfg, "--trials", "7", "--seed", "99", "--summary", path_str(&summary), "--json",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&summary).unwrap()).unwrap();
    assert_eq!(v["trials"], 7);
    assert_eq!(v["config"]["seed"], 99);
    let printed: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(printed, v);
}

#[test]
fn config_errors_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", &CONFIG.replace("\"trials\"", "\"trails\""));
    let o = rig_lab(&["experiment", "-c", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("trails"), "{}", stderr(&o));
    let o = rig_lab(&["experiment", "-c", path_str(&dir.path().join("nope.json"))]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn experiment_budget_error_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = CONFIG.replace(r#"{"kind": "k_connected", "k": 1}"#, r#"{"kind": "k_robust", "k": 1}"#);
    let cfg = write(dir.path(), "cfg.json", &cfg);
    let o = rig_lab(&["experiment", "-c", &cfg]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn sweep_over_deviations() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", CONFIG);
    let table = dir.path().join("table.csv");
    let o = rig_lab(&["sweep", "-c", &cfg, "--deviations", "-3,0,3", "--csv", path_str(&table), "--json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["axis"], "deviation");
    assert_eq!(v["points"].as_array().unwrap().len(), 3);
    let csv = std::fs::read_to_string(table).unwrap();
    assert!(csv.starts_with("deviation,successes,trials,empirical"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn help_lists_families_and_properties() {
    let o = rig_lab(&["predict", "--help"]);
    let help = stdout(&o);
    for word in ["urig", "brig", "er", "urig-er", "urig-rgg", "kconn", "mindeg", "matching", "hamilton", "robust"] {
        assert!(help.contains(word), "missing {word} in\n{help}");
    }
    let o = rig_lab(&["generate", "--help"]);
    assert!(stdout(&o).contains("rgg"));
}
