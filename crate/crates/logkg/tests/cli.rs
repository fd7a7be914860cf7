//! End-to-end tests of the command-line interface: exit codes, file
//! contracts, and byte-level determinism of emitted data.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_logkg"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn logkg")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("logkg_cli_{tag}_{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn groundstate_fixture() -> &'static Path {
    use std::sync::OnceLock;
    static DIR: OnceLock<PathBuf> = OnceLock::new();
    DIR.get_or_init(|| {
        let dir = workdir("gsfix");
        let out = run(&[
            "groundstate",
            "--p",
            "3",
            "--omega",
            "0",
            "--R",
            "20",
            "--n",
            "2000",
            "--method",
            "both",
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        dir
    })
}

#[test]
fn groundstate_writes_certified_pair() {
    let dir = groundstate_fixture();
    for method in ["shooting", "nehari_min"] {
        assert!(dir.join(format!("groundstate_{method}.csv")).exists());
        let sidecar: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.join(format!("groundstate_{method}.json"))).unwrap(),
        )
        .unwrap();
        assert_eq!(sidecar["p"], 3.0);
        assert_eq!(sidecar["grid"]["n"], 2000);
        assert!(sidecar["d_omega"].as_f64().unwrap() > 0.0);
    }
    // the two methods agree on the least-action value within 1%
    let read_d = |m: &str| -> f64 {
        let v: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.join(format!("groundstate_{m}.json"))).unwrap(),
        )
        .unwrap();
        v["d_omega"].as_f64().unwrap()
    };
    let (d1, d2) = (read_d("shooting"), read_d("nehari_min"));
    assert!((d1 - d2).abs() / d1 < 0.01);
}

#[test]
fn groundstate_deterministic_output() {
    let dir = groundstate_fixture();
    let reference = std::fs::read(dir.join("groundstate_shooting.csv")).unwrap();
    let rerun = workdir("gsdet");
    let out = run(&[
        "groundstate",
        "--p",
        "3",
        "--omega",
        "0",
        "--R",
        "20",
        "--n",
        "2000",
        "--method",
        "shoot",
        "--out",
        rerun.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let again = std::fs::read(rerun.join("groundstate_shooting.csv")).unwrap();
    assert_eq!(reference, again, "identical flags must give identical bytes");
}

#[test]
fn groundstate_rejects_bad_exponent() {
    let out = run(&[
        "groundstate",
        "--p",
        "5",
        "--omega",
        "0",
        "--R",
        "20",
        "--n",
        "1000",
        "--method",
        "shoot",
        "--out",
        workdir("gsbad").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 64);
    assert!(stderr(&out).contains("2 < p < 4"), "{}", stderr(&out));
}

#[test]
fn groundstate_bracket_errors_exit_one() {
    let dir = workdir("gsbr");
    let inverted = run(&[
        "groundstate",
        "--p",
        "3",
        "--omega",
        "0",
        "--R",
        "20",
        "--n",
        "1000",
        "--method",
        "shoot",
        "--s-lo",
        "3.0",
        "--s-hi",
        "2.0",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&inverted), 1);

    let same_side = run(&[
        "groundstate",
        "--p",
        "3",
        "--omega",
        "0",
        "--R",
        "20",
        "--n",
        "1000",
        "--method",
        "shoot",
        "--s-lo",
        "0.2",
        "--s-hi",
        "1.0",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&same_side), 1);
    assert!(stderr(&same_side).contains("bracket"), "{}", stderr(&same_side));
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = run(&["groundstate", "--frobnicate"]);
    assert_eq!(code(&out), 64);
}

#[test]
fn evolve_from_groundstate_records_membership() {
    let gs_dir = groundstate_fixture();
    let out_dir = workdir("evgs");
    let out = run(&[
        "evolve",
        "--from-groundstate",
        gs_dir.to_str().unwrap(),
        "--lambda",
        "1.2",
        "--dt",
        "0.009",
        "--T",
        "0.4",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    let c = code(&out);
    assert!(c == 0 || c == 3, "exit {c}: {}", stderr(&out));
    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(out_dir.join("manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["r1_member"], true);
    assert_eq!(manifest["command"], "evolve");
    let diag = std::fs::read_to_string(out_dir.join("diagnostics.csv")).unwrap();
    assert!(diag.starts_with("t,E,J0,K0,l2,h1,sup_abs_u,strauss_ratio\n"));
    // every artifact referenced by the manifest exists
    for path in manifest["outputs"].as_array().unwrap() {
        assert!(Path::new(path.as_str().unwrap()).exists());
    }
}

#[test]
fn evolve_rejects_cfl_violation() {
    let gs_dir = groundstate_fixture();
    let out = run(&[
        "evolve",
        "--from-groundstate",
        gs_dir.to_str().unwrap(),
        "--lambda",
        "1.2",
        "--dt",
        "0.05",
        "--T",
        "1",
        "--out",
        workdir("evcfl").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 64);
    assert!(stderr(&out).contains("CFL"), "{}", stderr(&out));
}

#[test]
fn evolve_from_init_file_conserves_energy() {
    let dir = workdir("evinit");
    // small smooth pulse on a modest grid
    let mut csv = String::from("r,u\n");
    let n = 600;
    for i in 0..=n {
        let r = 12.0 * i as f64 / n as f64;
        csv.push_str(&format!("{r:.17e},{:.17e}\n", 0.5 * (-r * r / 2.0).exp()));
    }
    let init = dir.join("init.csv");
    std::fs::write(&init, csv).unwrap();
    let out_dir = dir.join("run");
    let out = run(&[
        "evolve",
        "--init",
        init.to_str().unwrap(),
        "--p",
        "3",
        "--dt",
        "0.018",
        "--T",
        "2",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let diag = std::fs::read_to_string(out_dir.join("diagnostics.csv")).unwrap();
    let rows: Vec<&str> = diag.lines().skip(1).collect();
    let energy = |row: &str| -> f64 { row.split(',').nth(1).unwrap().parse().unwrap() };
    let e0 = energy(rows[0]);
    for row in &rows {
        assert!(((energy(row) - e0) / e0).abs() < 1e-8);
    }

    // identical invocation, identical bytes
    let rerun_dir = dir.join("run2");
    let out2 = run(&[
        "evolve",
        "--init",
        init.to_str().unwrap(),
        "--p",
        "3",
        "--dt",
        "0.018",
        "--T",
        "2",
        "--out",
        rerun_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out2), 0);
    assert_eq!(
        std::fs::read(out_dir.join("diagnostics.csv")).unwrap(),
        std::fs::read(rerun_dir.join("diagnostics.csv")).unwrap()
    );
}

#[test]
fn evolve_requires_initial_data() {
    let out = run(&["evolve", "--dt", "0.01", "--T", "1", "--out", "/tmp/x"]);
    assert_eq!(code(&out), 64);
}

#[test]
fn plotdata_reshapes_and_rejects_malformed() {
    let gs_dir = groundstate_fixture();
    let dir = workdir("plot");
    let run_dir = dir.join("run");
    let out = run(&[
        "evolve",
        "--from-groundstate",
        gs_dir.to_str().unwrap(),
        "--lambda",
        "1.1",
        "--dt",
        "0.009",
        "--T",
        "0.2",
        "--out",
        run_dir.to_str().unwrap(),
    ]);
    assert!(code(&out) == 0 || code(&out) == 3);

    let long = dir.join("long.csv");
    let ok = run(&[
        "plotdata",
        "--records",
        run_dir.join("diagnostics.csv").to_str().unwrap(),
        "--out",
        long.to_str().unwrap(),
    ]);
    assert_eq!(code(&ok), 0);
    let text = std::fs::read_to_string(&long).unwrap();
    let n_samples = std::fs::read_to_string(run_dir.join("diagnostics.csv"))
        .unwrap()
        .lines()
        .count()
        - 1;
    assert_eq!(text.lines().count() - 1, n_samples * 7);

    let bad = dir.join("bad.csv");
    std::fs::write(&bad, "this,is,not\nvalid").unwrap();
    let rejected = run(&[
        "plotdata",
        "--records",
        bad.to_str().unwrap(),
        "--out",
        dir.join("o.csv").to_str().unwrap(),
    ]);
    assert_eq!(code(&rejected), 65);

    std::fs::write(&bad, "").unwrap();
    let empty = run(&[
        "plotdata",
        "--records",
        bad.to_str().unwrap(),
        "--out",
        dir.join("o.csv").to_str().unwrap(),
    ]);
    assert_eq!(code(&empty), 65);
}

#[test]
fn check_identities_passes() {
    let dir = workdir("chkid");
    let report_path = dir.join("report.json");
    let out = run(&[
        "check",
        "--suite",
        "identities",
        "--p",
        "3",
        "--omega",
        "0.3",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["all_pass"], true);
    assert!(report["checks"].as_array().unwrap().len() >= 5);
}

#[test]
fn check_theorem21_passes() {
    let out = run(&[
        "check",
        "--suite",
        "theorem21",
        "--p",
        "3",
        "--omega",
        "0",
        "--n",
        "1200",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert_eq!(report["all_pass"], true);
}

#[test]
fn check_instability_reports_outcomes() {
    let out = run(&[
        "check",
        "--suite",
        "instability",
        "--p",
        "3",
        "--n",
        "1200",
        "--t-max",
        "20",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert_eq!(report["all_pass"], true);
    let lambdas = report["lambdas"].as_array().unwrap();
    assert_eq!(lambdas.len(), 4);
    for l in lambdas {
        assert_eq!(l["r1_member"], true);
        assert_eq!(l["invariance_clean"], true);
    }
}

#[test]
fn check_rejects_invalid_params() {
    let out = run(&["check", "--suite", "identities", "--p", "4.5"]);
    assert_eq!(code(&out), 64);
    let out = run(&["check", "--suite", "bogus", "--p", "3"]);
    assert_eq!(code(&out), 64);
}
