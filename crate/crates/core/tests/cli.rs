use std::path::Path;
use std::process::{Command, Output};

use sepkit::experiments::ExperimentTable;

fn sepkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sepkit")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn bounds_ball_json() {
    let out = sepkit(&["bounds", "ball", "--n", "100", "--m", "1000", "--r", "inv-sqrt2"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let lc = v["single"]["log_complement"].as_f64().unwrap();
    let direct = (2f64.powi(-50) * (1.0 + 0.5 * 999.0)).ln();
    assert!((lc - direct).abs() < 1e-12);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("# config: "));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["bounds", "cube", "--n", "100", "--m", "10", "--delta", "0.9", "--sigma0sq", "0.05"][..],
        &["bounds", "ball", "--n", "10", "--m", "5", "--r", "1.0"],
        &["bounds", "ball", "--n", "0", "--m", "5", "--r", "0.5"],
        &["sample", "--n", "3"],
        &["no-such-command"],
        &["experiment", "fig2", "--dims", "5000", "--m", "2000000", "--probes", "10", "--trials", "1", "--budget", "1000"],
    ] {
        let out = sepkit(args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn remark1_experiment() {
    let out = sepkit(&["experiment", "remark1"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["pass"], true);
    assert!(v["max_m"]["floor"].as_u64().unwrap() < 2_740_000);
    assert!(v["bound_at_m_checked"]["probability_lower_bound"].as_f64().unwrap() >= 0.99);
}

#[test]
fn cascade_experiment() {
    let out = sepkit(&["experiment", "cascade"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["pass"], true);
}

#[test]
fn unwritable_output_exits_1() {
    let out = sepkit(&["bounds", "ball", "--n", "10", "--m", "5", "--r", "0.5", "--out", "/nonexistent/dir/x.json"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn sample_formats_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let bin = dir.path().join("s.bin");
    let csv_s = csv.to_str().unwrap();
    let bin_s = bin.to_str().unwrap();
    let base = ["sample", "--dist", "cube", "--n", "5", "--m", "40", "--seed", "3"];
    assert_eq!(code(&sepkit(&[&base[..], &["--out", csv_s]].concat())), 0);
    assert_eq!(code(&sepkit(&[&base[..], &["--format", "binary", "--out", bin_s]].concat())), 0);
    let before = std::fs::read(&csv).unwrap();

    let check = |input: &str| {
        let out = sepkit(&["check", "point", "--input", input, "--kind", "whitened"]);
        assert_eq!(code(&out), 0);
        stdout_json(&out)
    };
    let a = check(csv_s);
    let b = check(bin_s);
    assert_eq!(a["per_point"], b["per_point"]);
    assert_eq!(a["M"], 40);
    // inputs are never modified
    assert_eq!(std::fs::read(&csv).unwrap(), before);

    let out = sepkit(&["check", "point", "--input", csv_s, "--format", "csv", "--probe", "3,1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,separable,margin,violator_count"));
    assert!(lines.next().unwrap().starts_with("3,"));
}

#[test]
fn header_only_input_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    std::fs::write(&path, "x1,x2\n").unwrap();
    let out = sepkit(&["check", "point", "--input", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn probe_out_of_range() {
    let out = sepkit(&["check", "point", "--n", "3", "--m", "4", "--probe", "9"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn oracle_and_pairs_commands() {
    let out = sepkit(&["check", "oracle", "--n", "3", "--m", "30", "--seed", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["check_kind"], "oracle");
    let out = sepkit(&["check", "pairs", "--n", "50", "--m", "100", "--r", "inv-sqrt2", "--angle"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["check_kind"], "angle-r");
    let out = sepkit(&["check", "cascade", "--n", "20", "--m", "300", "--r", "0.7", "--probe", "0"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn correct_build_then_audit() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("c.json");
    let out = sepkit(&[
        "correct", "build", "--dist", "cube", "--n", "4", "--m", "500", "--seed", "1", "--error-point", "2,2,2,2", "--label",
        "fixed", "--out", c.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(&c).unwrap()).unwrap();
    assert_eq!(doc["corrected_label"], "fixed");
    assert_eq!(doc["n"], 4);
    let out = sepkit(&[
        "correct", "audit", "--corrector", c.to_str().unwrap(), "--dist", "cube", "--n", "4", "--m", "2000", "--seed", "2",
    ]);
    assert_eq!(code(&out), 0);
    let audit = stdout_json(&out);
    assert_eq!(audit["true_positive"], true);
    assert!(audit["false_positive_rate"].as_f64().unwrap() < 0.01);

    let out = sepkit(&["correct", "build", "--dist", "cube", "--n", "4", "--m", "500", "--error-point", "0.5,0.5,0.5,0.5", "--label", "x"]);
    assert_ne!(code(&out), 0);
}

#[test]
fn fig2_csv_schema_contract() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig2.csv");
    let out = sepkit(&[
        "experiment", "fig2", "--dims", "20,10", "--m", "200", "--probes", "20", "--trials", "3", "--seed", "11", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next(), Some("n,trials,M,N,mean_freq,min_freq,max_freq,bound_eq12,seed"));
    let table = ExperimentTable::read_csv(std::fs::File::open(&path).unwrap()).unwrap();
    let dims: Vec<usize> = table.rows.iter().map(|r| r.n).collect();
    assert_eq!(dims, vec![10, 20]);
    for row in &table.rows {
        assert_eq!((row.trials, row.m, row.n_probe, row.seed), (3, 200, 20, 11));
        assert!(row.min_freq <= row.mean_freq && row.mean_freq <= row.max_freq);
        // frequencies are multiples of 1/N
        assert!(((row.min_freq * 20.0) - (row.min_freq * 20.0).round()).abs() < 1e-9);
        assert!((0.0..=1.0).contains(&row.bound));
    }
    // same seed, same bytes
    let again = sepkit(&["experiment", "fig2", "--dims", "10,20", "--m", "200", "--probes", "20", "--trials", "3", "--seed", "11"]);
    assert_eq!(again.stdout, text.as_bytes());
}

#[test]
fn fig2_table_reader_is_strict() {
    let header = "n,trials,M,N,mean_freq,min_freq,max_freq,bound_eq12,seed\n";
    assert!(ExperimentTable::read_csv(header.as_bytes()).unwrap().rows.is_empty());
    assert!(ExperimentTable::read_csv("n,trials\n1,2\n".as_bytes()).is_err());
    let bad = format!("{header}10,2,200,20,0.5,0.6,0.7,0.0,1\n");
    assert!(ExperimentTable::read_csv(bad.as_bytes()).is_err());
    assert!(Path::new(env!("CARGO_BIN_EXE_sepkit")).exists());
}
