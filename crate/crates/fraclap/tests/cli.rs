//! Black-box tests of the command-line binary: file outputs, manifests,
//! exit codes, and byte-level determinism across reruns and thread counts.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fraclap(dir: &Path, args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fraclap"));
    cmd.current_dir(dir).args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn solve(dir: &Path) -> Output {
    fraclap(
        dir,
        &[
            "solve", "--s", "0.5", "--domain", "-1,1", "--f", "const:1", "--n", "512", "--out",
            "sol.json",
        ],
        &[],
    )
}

#[test]
fn solve_writes_solution_report_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = solve(tmp.path());
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let sol: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("sol.json")).unwrap()).unwrap();
    assert_eq!(sol["grid"]["shape"], serde_json::json!([513]));
    assert_eq!(sol["values"].as_array().unwrap().len(), 513);
    assert_eq!(sol["domain"]["kind"], "interval_union");
    assert_eq!(sol["meta"]["zero_extended"], true);
    assert_eq!(sol["meta"]["s"], 0.5);

    let raw = fs::read_to_string(tmp.path().join("sol.report.json")).unwrap();
    let report: serde_json::Value = serde_json::from_str(&raw).unwrap();
    let mut keys: Vec<&str> = report.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    keys.sort_unstable();
    assert_eq!(
        keys,
        ["cond_est", "energy", "l2", "load_pairing", "stability_gap"]
    );
    let order: Vec<usize> = ["energy", "load_pairing", "stability_gap", "l2", "cond_est"]
        .iter()
        .map(|k| raw.find(&format!("\"{k}\"")).unwrap())
        .collect();
    assert!(order.windows(2).all(|w| w[0] < w[1]), "field order: {raw}");
    assert!(report["stability_gap"].as_f64().unwrap() <= 1e-10);

    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("sol.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["tool"]["name"], "fraclap");
    assert_eq!(manifest["command"], "solve");
    assert_eq!(manifest["inputs"]["n"], 512);
    assert!(manifest["seed"].is_u64());
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);
}

#[test]
fn analyze_emits_rate_and_profile_tables() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&solve(tmp.path())), 0);
    let out = fraclap(
        tmp.path(),
        &[
            "analyze", "--input", "sol.json", "--sigma", "0.1:1.9:0.1", "--out", "rates.csv",
        ],
        &[],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let rates = fs::read_to_string(tmp.path().join("rates.csv")).unwrap();
    let mut lines = rates.lines();
    assert_eq!(
        lines.next().unwrap(),
        "sigma,sigma_star,ci_low,ci_high,r2,verdict"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 19);
    assert!(rows[0].starts_with("0.1,"));
    assert!(rows.iter().all(|r| r.ends_with("bounded") || r.ends_with("growing")));

    let profile = fs::read_to_string(tmp.path().join("rates.profile.csv")).unwrap();
    assert_eq!(profile.lines().next().unwrap(), "order,h,omega,restriction");
    assert!(profile.lines().count() > 4);
    assert!(tmp.path().join("rates.manifest.json").exists());
}

#[test]
fn verify_getoor_suite_reports_all_checks() {
    let tmp = tempfile::tempdir().unwrap();
    let out = fraclap(
        tmp.path(),
        &[
            "verify", "--suite", "getoor", "--s", "0.25,0.5,0.75", "--tol", "1e-4", "--out",
            "checks.csv",
        ],
        &[],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("suite: getoor"), "stdout: {text}");
    assert!(text.contains("result: PASS (6/6 checks)"), "stdout: {text}");

    let csv = fs::read_to_string(tmp.path().join("checks.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "name,lhs,rhs,ratio");
    assert_eq!(csv.lines().count(), 7);
    assert!(tmp.path().join("checks.manifest.json").exists());
}

#[test]
fn sweep_outputs_are_deterministic_across_threads_and_reruns() {
    let base = ["sweep", "--s", "0.3,0.6", "--domain", "-1,1", "--f", "const:1", "--n", "256"];
    let run = |name: &str, threads: Option<&str>, envs: &[(&str, &str)]| -> (Vec<u8>, Vec<u8>) {
        let tmp = tempfile::tempdir().unwrap();
        let mut args: Vec<&str> = base.to_vec();
        args.extend_from_slice(&["--out", name]);
        if let Some(t) = threads {
            args.extend_from_slice(&["--threads", t]);
        }
        let out = fraclap(tmp.path(), &args, envs);
        assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
        (
            fs::read(tmp.path().join(name)).unwrap(),
            fs::read(tmp.path().join("sweep.manifest.json")).unwrap(),
        )
    };

    let (csv_serial, manifest_serial) = run("sweep.csv", Some("1"), &[]);
    let (csv_rerun, manifest_rerun) = run("sweep.csv", Some("1"), &[]);
    let (csv_par, _) = run("sweep.csv", Some("2"), &[]);
    let (csv_env, _) = run("sweep.csv", None, &[("FRACLAP_THREADS", "2")]);

    assert_eq!(csv_serial, csv_rerun, "rerun changed the table");
    assert_eq!(manifest_serial, manifest_rerun, "rerun changed the manifest");
    assert_eq!(csv_serial, csv_par, "thread count changed the table");
    assert_eq!(csv_serial, csv_env, "env thread count changed the table");

    let text = String::from_utf8(csv_serial).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "s,sigma_star,ci_low,ci_high,r2,predicted,open_endpoint,R"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("0.3,") && rows[1].starts_with("0.6,"));
}

#[test]
fn usage_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let bad_flag = fraclap(tmp.path(), &["solve", "--bogus"], &[]);
    assert_eq!(code(&bad_flag), 2);

    let bad_suite = fraclap(tmp.path(), &["verify", "--suite", "bogus"], &[]);
    assert_eq!(code(&bad_suite), 2);
    assert!(stderr(&bad_suite).contains("unknown suite"));

    let bad_domain = fraclap(
        tmp.path(),
        &[
            "solve", "--s", "0.5", "--domain", "1,-1", "--f", "const:1", "--n", "64", "--out",
            "x.json",
        ],
        &[],
    );
    assert_eq!(code(&bad_domain), 2);
    assert!(!tmp.path().join("x.json").exists());
}

#[test]
fn failing_sweep_exits_1_and_records_the_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let out = fraclap(
        tmp.path(),
        &[
            "sweep", "--s", "0.5", "--domain", "-1,1", "--f", "const:1", "--n", "16", "--out",
            "sweep.csv",
        ],
        &[],
    );
    assert_eq!(code(&out), 1, "stdout: {}", stdout(&out));
    assert!(stderr(&out).contains("sweep row failed"));

    // header-only table, but the manifest still lands with the error recorded
    let csv = fs::read_to_string(tmp.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("sweep.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["errors"].as_array().unwrap().len(), 1);
}
