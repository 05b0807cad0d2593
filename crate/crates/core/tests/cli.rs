use std::process::{Command, Output};

use ellipsoid_lattice::cli::{read_records, write_records, Format, RunRecord, CSV_HEADER};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ellipsoid-lattice")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn count_examples() {
    for (a, x, n) in [("1", "1", 7), ("4", "1", 13), ("1/4", "1", 9)] {
        let o = run(&["count", "--a", a, "--x", x]);
        assert_eq!(o.status.code(), Some(0));
        let recs: Vec<RunRecord> = read_records(&o.stdout, Format::Csv).unwrap();
        assert_eq!(recs[0].n_count, Some(n), "a={a} x={x}");
        assert_eq!(recs[0].holds, None);
    }
}

#[test]
fn rejects_bad_input_with_code_2() {
    for args in [
        &["count", "--a", "0", "--x", "1"][..],
        &["count", "--a", "1.5", "--x", "1"],
        &["count", "--a", "1", "--x", "-3"],
        &["count", "--a", "1/0", "--x", "1"],
        &["verify", "lemma3"],
        &["sweep", "--a", "1"],
        &["--precision", "14", "count", "--a", "1", "--x", "1"],
        &["--threads", "0", "count", "--a", "1", "--x", "1"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty() || !stdout(&o).contains(CSV_HEADER));
    }
}

#[test]
fn budget_exceeded_is_code_3_for_count_and_in_row_for_sweep() {
    let o = run(&["--budget", "1000", "count", "--a", "1", "--x", "1000000"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["--budget", "1000", "sweep", "--a", "1", "--x", "10,1000000"]);
    assert_eq!(o.status.code(), Some(0));
    let recs: Vec<RunRecord> = read_records(&o.stdout, Format::Csv).unwrap();
    assert_eq!(recs[0].n_count, Some(147));
    assert_eq!(recs[1].n_count, None);
    assert_eq!(recs[1].holds, None);
    assert!(recs[1].rhs_total.is_some());
}

#[test]
fn bound_breakdown_and_invalid_cell() {
    let o = run(&["bound", "--a", "1", "--x", "15000", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Vec<RunRecord> = read_records(&o.stdout, Format::Json).unwrap();
    assert_eq!(r[0].precond_27, Some(true));
    assert!([&r[0].t1, &r[0].t2, &r[0].t3, &r[0].t4, &r[0].t5, &r[0].t6].iter().all(|t| t.is_some()));
    let o = run(&["bound", "--a", "1", "--x", "1"]);
    let r: Vec<RunRecord> = read_records(&o.stdout, Format::Csv).unwrap();
    assert_eq!(r[0].precond_27, Some(false));
}

#[test]
fn sweep_rows_ordering_and_empty_holds() {
    let o = run(&["sweep", "--a", "2,1/2,1", "--x", "15000,1,100", "--precision", "20"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some(CSV_HEADER));
    let recs: Vec<RunRecord> = read_records(text.as_bytes(), Format::Csv).unwrap();
    let keys: Vec<(String, String)> = recs.iter().map(|r| (r.a.clone(), r.x.clone())).collect();
    let mut want = Vec::new();
    for a in ["2", "1/2", "1"] {
        for x in ["15000", "1", "100"] {
            want.push((a.to_string(), x.to_string()));
        }
    }
    assert_eq!(keys, want);
    for r in &recs {
        assert_eq!(r.holds.is_some(), r.precond_27 == Some(true), "{r:?}");
        assert!(r.wall_time_ms.is_none());
    }
    // the x = 1 row has an empty holds cell between precond_28 and margin
    let row = text.lines().find(|l| l.starts_with("2,1,")).unwrap();
    assert!(row.ends_with(",false,false,,,"), "{row}");
}

#[test]
fn single_cell_sweep_holds() {
    let o = run(&["sweep", "--a", "1", "--x", "15000"]);
    let recs: Vec<RunRecord> = read_records(&o.stdout, Format::Csv).unwrap();
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0].holds, Some(true));
    assert_eq!(recs[0].n_count, Some(7695309));
}

#[test]
fn round_trips_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for (format, ext) in [(Format::Csv, "csv"), (Format::Json, "json")] {
        let path = dir.path().join(format!("grid.{ext}"));
        let o = run(&[
            "sweep", "--a", "1/3,2", "--x", "1,20000", "--format", ext, "--out", path.to_str().unwrap(), "--timing",
        ]);
        assert_eq!(o.status.code(), Some(0));
        let bytes = std::fs::read(&path).unwrap();
        let recs: Vec<RunRecord> = read_records(&bytes, format).unwrap();
        assert!(recs.iter().all(|r| r.wall_time_ms.is_some()));
        let mut again = Vec::new();
        write_records(&mut again, &recs, format).unwrap();
        assert_eq!(again, bytes, "{ext}");
    }
}

#[test]
fn verify_reports_witnesses() {
    let o = run(&["verify", "lemma2", "--limit", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("R3*=14 brute=14"), "{text}");
    let o = run(&["verify", "lemma1", "--limit", "2000"]);
    assert!(stdout(&o).contains("witness n=1 ratio=4/1"));
    let o = run(&["verify", "series", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 8);
}

#[test]
fn estimate_brackets_the_exact_discrepancy() {
    let o = run(&["estimate", "--a", "1", "--x", "100", "--u", "5", "--z", "20", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let (lo, hi) = (v[0]["lower"].as_f64().unwrap(), v[0]["upper"].as_f64().unwrap());
    // N(100) = 4169 for a = 1
    let p = 4169.0 - 4.0 / 3.0 * std::f64::consts::PI * 1000.0;
    assert!(lo <= p && p <= hi, "{lo} {p} {hi}");
}

#[test]
fn output_independent_of_thread_count() {
    let args = |t: &'static str| ["--threads", t, "sweep", "--a", "1/4,3", "--x", "50000,7", "--format", "json"];
    assert_eq!(run(&args("1")).stdout, run(&args("3")).stdout);
}
