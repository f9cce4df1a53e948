//! End-to-end tests of the command-line interface: flag parsing, report
//! shapes, exit codes, and byte-level determinism.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ffhyper"))
}

#[test]
fn gauss_table_has_trivial_row_one() {
    let out = bin()
        .args(["gauss", "--p", "7", "--format", "json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    let rows = v["values"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0]["name"], "g(phi^0)");
    // g(eps) = 1
    assert_eq!(rows[0]["value"]["coeffs"][0][0], "1");
    assert!(rows[0]["value"]["approx"].as_str().unwrap().starts_with("1.000000"));
}

#[test]
fn jacobi_trivial_pair_is_minus_five() {
    let out = bin()
        .args(["jacobi", "--p", "7", "--chars", "0,0", "--format", "json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["values"][0]["value"]["coeffs"][0][0], "-5");
    assert!(v["values"][0]["name"].as_str().unwrap().contains("product trivial"));
}

#[test]
fn hyperf_one_f_zero() {
    // F(phi_2; eps; 3) over F_7 = phi_2(-2) = -1
    let out = bin()
        .args([
            "hyperf", "--p", "7", "--alphas", "3", "--betas", "0", "--lambda", "3",
            "--format", "json",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["values"][0]["value"]["coeffs"][0][0], "-1");
}

#[test]
fn count_with_oracle_verification_passes() {
    let out = bin()
        .args([
            "count", "--p", "7", "--d", "3", "--h", "1,1,1", "--lambda", "g^1",
            "--r", "1", "--verify", "oracle", "--format", "json",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["pass"].as_bool().unwrap()));
    // config echo is verbatim
    assert_eq!(v["config"]["lambda"], "g^1");
}

#[test]
fn budget_exhaustion_exits_three() {
    let out = bin()
        .args([
            "count", "--p", "7", "--d", "3", "--h", "1,1,1", "--lambda", "3",
            "--r", "6", "--verify", "oracle",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_errors_exit_two() {
    // d does not divide q - 1
    let out = bin()
        .args(["count", "--p", "7", "--d", "4", "--h", "1,1,2", "--lambda", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    // malformed lambda
    let out = bin()
        .args(["count", "--p", "7", "--d", "3", "--h", "1,1,1", "--lambda", "x"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    // unknown verify suite
    let out = bin().args(["verify", "nonsense"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn corrupted_gauss_cache_is_caught() {
    let out = bin()
        .args(["verify", "identities", "--p", "7"])
        .env("FFHYPER_FAULT_INJECT", "gauss")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4), "fault injection must trip the suite");
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("FAIL"), "report should carry a failing witness");
}

#[test]
fn zeta_k3_has_integer_series() {
    let out = bin()
        .args([
            "zeta", "--p", "13", "--d", "4", "--h", "1,1,1,1", "--lambda", "2",
            "--format", "json",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let series = v["zeta_series"].as_array().unwrap();
    assert_eq!(series[0], "1");
    assert_eq!(series.len(), 9);
    assert_eq!(v["lseries"].as_array().unwrap().len(), 16);
}

#[test]
fn lfunction_permutation_class_is_one() {
    let out = bin()
        .args([
            "lfunction", "--p", "7", "--d", "3", "--h", "1,1,1", "--lambda", "3",
            "--classes", "0,1,2", "--format", "json",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let l = &v["lseries"][0];
    assert_eq!(l["numerator"].as_array().unwrap().len(), 1);
    assert_eq!(l["denominator"].as_array().unwrap().len(), 1);
}

#[test]
fn identity_verify_reports_are_byte_stable() {
    let run = || {
        bin()
            .args(["verify", "identities", "--p", "5", "--format", "json"])
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "reports must be byte-identical across runs");
}

#[test]
fn csv_format_renders_checks() {
    let out = bin()
        .args(["verify", "identities", "--p", "5", "--format", "csv"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("kind,name,detail,value"));
    assert!(text.contains("check,"));
    assert!(text.contains(",pass"));
}
