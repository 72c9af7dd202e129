use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn netseg(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netseg"))
        .args(args)
        .current_dir(dir)
        .env_remove("NETSEG_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .flat_map(|e| {
            let path = e.unwrap().path();
            if path.is_dir() {
                read_tree(&path)
            } else {
                vec![(path.strip_prefix(dir).unwrap().display().to_string(), fs::read(&path).unwrap())]
            }
        })
        .collect();
    files.sort();
    files
}

#[test]
fn verify_is_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let runs: Vec<_> = ["a", "b"]
        .iter()
        .map(|name| {
            netseg(tmp.path(), &["verify", "jr-convergence", "--seed", "7", "--quick", "--out-dir", name]);
            read_tree(&tmp.path().join(name).join("jr-convergence"))
        })
        .collect();
    assert!(runs[0].iter().any(|(name, _)| name == "jr-trajectory.csv"));
    assert_eq!(runs[0], runs[1]);
    let trajectory =
        String::from_utf8(runs[0].iter().find(|(n, _)| n == "jr-trajectory.csv").unwrap().1.clone()).unwrap();
    assert!(trajectory.starts_with("schema_version,t,f_sim_mean,f_sim_ci,f_theory\n"));
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = netseg(tmp.path(), &["verify", "no-such-suite", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown suite"));
}

#[test]
fn stochastic_runs_need_a_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let out = netseg(tmp.path(), &["jr", "simulate", "--n-s", "2", "--n-d", "1", "--n-f", "1", "--alpha", "0.8"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("run.json"), r#"{"n_s": 3, "n_d": 1, "n_f": 4, "alpha": 0.9, "out_dir": "from-config"}"#)
        .unwrap();
    let out = netseg(tmp.path(), &["jr", "predict", "--config", "run.json", "--n-f", "0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("from-config/jr-predict.json")).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["params"]["n_s"], 3.0);
    assert_eq!(report["params"]["n_f"], 0.0);
}

#[test]
fn env_sets_default_out_dir_only() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |extra: &[&str]| {
        let mut args = vec!["fixed-node", "solve", "--s", "0.7", "--c", "0.5"];
        args.extend_from_slice(extra);
        Command::new(env!("CARGO_BIN_EXE_netseg"))
            .args(&args)
            .current_dir(tmp.path())
            .env("NETSEG_OUT_DIR", "from-env")
            .output()
            .unwrap()
    };
    assert!(run(&[]).status.success());
    assert!(tmp.path().join("from-env/fixed-node-solve.json").exists());
    assert!(run(&["--out-dir", "from-flag"]).status.success());
    assert!(tmp.path().join("from-flag/fixed-node-solve.json").exists());
}

#[test]
fn sbm_writes_report_and_sweep() {
    let tmp = tempfile::tempdir().unwrap();
    let out = netseg(
        tmp.path(),
        &[
            "sbm",
            "--group-sizes",
            "40,20",
            "--p",
            "0.3",
            "--q",
            "0.1",
            "--ratios",
            "1,3",
            "--replicates",
            "20",
            "--seed",
            "5",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(tmp.path().join("netseg-out/relative-band.csv")).unwrap();
    assert!(csv.starts_with("schema_version,gamma,p_over_q,lower,upper,sim_effect_mean,sim_effect_ci"));
    assert_eq!(csv.lines().count(), 3);
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("netseg-out/sbm.json")).unwrap()).unwrap();
    assert_eq!(report["absolute_sign"], "positive");
}
