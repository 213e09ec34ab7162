use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gaussnm_cli::{read_scan_csv, summarize, CliError, SCAN_HEADER};

fn gaussnm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaussnm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scan(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["scan", "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    gaussnm(&args)
}

#[test]
fn scan_writes_sorted_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let flags = ["--channel", "qbm_rwa", "--channel", "qbm_exact", "--x", "0.5", "--x", "0.3", "--tau-max", "5"];
    assert!(scan(&a, &flags).status.success());
    assert!(scan(&b, &flags).status.success());
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().next().unwrap(), SCAN_HEADER.join(","));
    assert_eq!(text.lines().next().unwrap(), "channel,x,tau,gamma,Delta,Pi,lambda_plus,lambda_minus,N_p");
    let rows = read_scan_csv(&a).unwrap();
    let keys: Vec<(String, f64, f64)> = rows.iter().map(|r| (r.channel.clone(), r.x, r.tau)).collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(rows[0].channel, "qbm_exact");
    assert_eq!(rows[0].x, 0.3);
    assert_eq!(rows.last().unwrap().channel, "qbm_rwa");
}

#[test]
fn configuration_errors_exit_with_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.csv");
    let no_x = scan(&out, &["--channel", "qbm_exact"]);
    assert_eq!(no_x.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&no_x.stderr).contains("--x"));
    assert_eq!(scan(&out, &["--channel", "qbm", "--x", "0.3"]).status.code(), Some(1));
    assert_eq!(scan(&out, &["--channel", "pd", "--x", "0.01"]).status.code(), Some(1));
    assert_eq!(scan(&out, &["--channel", "pd", "--x", "0.3", "--grid", "10"]).status.code(), Some(1));
    assert_eq!(gaussnm(&["scan", "--x", "0.3"]).status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn unwritable_output_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing").join("o.csv");
    assert_eq!(scan(&out, &["--channel", "pd", "--x", "0.3", "--tau-max", "1"]).status.code(), Some(3));
}

#[test]
fn summarize_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let flags = ["--channel", "qbm_exact", "--channel", "pd", "--x", "0.1", "--x", "0.3", "--x", "0.5"];
    assert!(scan(&out, &flags).status.success());
    let rows = summarize(&out, 100.0).unwrap();
    assert_eq!(rows.len(), 6);
    for r in &rows {
        match r.channel.as_str() {
            "qbm_exact" => {
                assert_eq!(r.fraction_positive, 1.0);
                let asym = r.np_asymptotic.unwrap();
                assert!((r.last_quartile_mean - asym).abs() / asym < 0.05);
            }
            "pd" if r.x == 0.1 => assert_eq!(r.last_quartile_mean, 0.0),
            _ => {}
        }
    }
    let printed = gaussnm(&["summarize", out.to_str().unwrap()]);
    assert!(printed.status.success());
    let stdout = String::from_utf8(printed.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 7);
    assert!(stdout.starts_with("channel"));
}

#[test]
fn summarize_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    assert!(matches!(summarize(&empty, 100.0), Err(CliError::Parse { line: 1, .. })));
    let run = gaussnm(&["summarize", empty.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(3));

    let bad = dir.path().join("bad.csv");
    let mut text = SCAN_HEADER.join(",");
    text.push_str("\nqbm_exact,0.1,0,0,0,0,0,0,0\nqbm_exact,0.1,0.5,1,2,3,4,5,oops\n");
    fs::write(&bad, text).unwrap();
    match summarize(&bad, 100.0) {
        Err(CliError::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected parse error, got {other:?}"),
    }

    let header_only = dir.path().join("h.csv");
    fs::write(&header_only, SCAN_HEADER.join(",") + "\n").unwrap();
    assert!(summarize(&header_only, 100.0).is_err());
    assert_eq!(gaussnm(&["summarize", "/nonexistent/file.csv"]).status.code(), Some(3));
}

#[test]
fn witness_and_table_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.csv");
    let run = scan(&out, &["--channel", "qbm_exact", "--x", "0.3", "--tau-max", "3", "--witness-pairs", "standard"]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let w = fs::read_to_string(dir.path().join("w.witness.csv")).unwrap();
    assert_eq!(w.lines().next(), Some("x,tau,min_derivative,witness"));
    assert!(w.lines().count() > 10);

    let table = dir.path().join("t.csv");
    let run = gaussnm(&["table", "--x", "0.3", "--tau-max", "2", "--out", table.to_str().unwrap()]);
    assert!(run.status.success());
    let t = fs::read_to_string(&table).unwrap();
    assert_eq!(t.lines().next(), Some("tau,gamma,Delta,Pi,Gamma"));
    assert_eq!(t.lines().nth(1), Some("0,0,0,0,0"));
}
