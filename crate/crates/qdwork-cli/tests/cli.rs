//! End-to-end runs of the qdwork binary: flag handling, exit codes, and the
//! shape of everything it writes to stdout and to files.

use std::process::{Command, Output};

use num_bigint::BigInt;
use qdwork_core::report::VerificationReport;

fn qdwork(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdwork"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

#[test]
fn verify_q_side_emits_one_json_line_per_engine() {
    let out = qdwork(&["verify", "--statement", "Q-H2A", "--n", "5", "--engine", "both"]);
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<VerificationReport> = stdout_of(&out)
        .lines()
        .map(|l| serde_json::from_str(l).expect("json line"))
        .collect();
    assert_eq!(lines.len(), 2);
    assert!(lines.iter().all(|r| r.id == "Q-H2A" && r.pass));
    assert_eq!(lines[0].engine, "local");
    assert_eq!(lines[1].engine, "dense");
    assert_eq!(lines[0].factors, lines[1].factors);
}

#[test]
fn verify_p_side_writes_the_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rv.jsonl");
    let out = qdwork(&[
        "verify",
        "--statement",
        "P-RV",
        "--p",
        "7",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let file = std::fs::read_to_string(&path).unwrap();
    assert_eq!(file, stdout_of(&out));
    let rep: VerificationReport = serde_json::from_str(file.trim()).unwrap();
    assert_eq!(rep.params.p, Some(7));
    assert!(rep.pass);
}

#[test]
fn verify_usage_errors_exit_two() {
    for args in [
        &["verify", "--statement", "Q-NOPE", "--n", "5"][..],
        &["verify", "--statement", "Q-MAIN1"][..],           // missing --n
        &["verify", "--statement", "Q-MAIN1", "--n", "6"][..], // residue violation
        &["verify", "--statement", "P-T12"][..],             // missing --p
        &["verify", "--statement", "P-T12", "--p", "6"][..], // not prime
        &["verify", "--statement", "P-T12", "--p", "7"][..], // 3 mod 4
    ] {
        let out = qdwork(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn conjectured_statements_never_gate_the_exit_code() {
    // C-65 is catalogued as a conjecture; whatever the verdict, exit 0.
    let out = qdwork(&["verify", "--statement", "C-65", "--n", "5", "--m", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let rep: VerificationReport = serde_json::from_str(stdout_of(&out).trim()).unwrap();
    assert_eq!(rep.status, "CONJECTURE");
}

#[test]
fn sweep_writes_json_and_csv_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tiny.sweep");
    std::fs::write(&cfg, "statements = Q-GPZ, P-RV\nq.n = 3,5\np.p = 5\n").unwrap();
    let json = dir.path().join("nested/out.json");
    let csv = dir.path().join("nested/out.csv");
    let out = qdwork(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
        "--jobs",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let reports: Vec<VerificationReport> =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(reports.len(), 3); // Q-GPZ at n=3,5 and P-RV at p=5
    assert!(reports.iter().all(|r| r.pass));
    let csv = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.lines().next().unwrap().starts_with("id,"));
    assert!(stdout_of(&out).contains("3 instances: 3 passed"));
}

#[test]
fn sweep_config_problems_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.sweep");
    std::fs::write(&bad, "warp = 9\n").unwrap();
    let empty = dir.path().join("empty-grid.sweep");
    // n = 3 fails Q-MAIN1's residue constraint, so the grid is empty
    std::fs::write(&empty, "statements = Q-MAIN1\nq.n = 3\n").unwrap();
    for path in ["/nonexistent/x.sweep", bad.to_str().unwrap(), empty.to_str().unwrap()] {
        let out = qdwork(&["sweep", "--config", path]);
        assert_eq!(out.status.code(), Some(2), "{path}");
    }
}

#[test]
fn catalog_prints_every_statement_and_the_count() {
    let out = qdwork(&["catalog"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    for id in ["Q-MAIN1", "Q-REASON", "C-MAIN1-STRONG", "P-H2LIU", "P-T12"] {
        assert!(text.contains(id), "{id}");
    }
    assert!(text.contains("46 statements (32 q-side, 14 p-side)"));
    assert!(text.contains("Phi_{n^r}^2"));
}

#[test]
fn gamma_values_are_frozen() {
    let out = qdwork(&["gamma", "--p", "5", "--x", "1/4", "--precision", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout_of(&out).trim()).unwrap();
    assert_eq!(v["residue"], "21");
    // 21^4 = 194481 = 6 (mod 25), the known quartic value
    let fourth = BigInt::from(21).pow(4) % 25;
    assert_eq!(fourth, BigInt::from(6));

    let out = qdwork(&["gamma", "--p", "5", "--x", "3", "--precision", "3"]);
    let v: serde_json::Value = serde_json::from_str(stdout_of(&out).trim()).unwrap();
    assert_eq!(v["residue"], "123"); // -(1*2) mod 125

    for args in [
        &["gamma", "--p", "4", "--x", "1/4", "--precision", "2"][..], // not prime
        &["gamma", "--p", "2", "--x", "1/3", "--precision", "2"][..], // p = 2 unsupported
        &["gamma", "--p", "5", "--x", "1/5", "--precision", "2"][..], // not a 5-adic integer
        &["gamma", "--p", "5", "--x", "q", "--precision", "2"][..],
    ] {
        assert_eq!(qdwork(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn dwork_checks_pass_and_reject_bad_input() {
    let out = qdwork(&["dwork", "--family", "H", "--p", "3", "--r", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let rep: VerificationReport = serde_json::from_str(stdout_of(&out).trim()).unwrap();
    assert_eq!(rep.id, "DWORK-H");
    assert!(rep.pass);

    // family ids are case-insensitive
    let out = qdwork(&["dwork", "--family", "rv2", "--p", "5", "--r", "1"]);
    assert_eq!(out.status.code(), Some(0));

    for args in [
        &["dwork", "--family", "XX", "--p", "3", "--r", "1"][..],
        &["dwork", "--family", "H", "--p", "4", "--r", "1"][..],
        &["dwork", "--family", "H", "--p", "2", "--r", "1"][..], // p = 2 rejected
    ] {
        assert_eq!(qdwork(args).status.code(), Some(2), "{args:?}");
    }
}
