use std::process::{Command, Output};

use nrspinor::scattering::{closed_form, BarrierProblem};
use nrspinor::spinors::Spin;
use nrspinor::waveop::PhysicalConstants;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nrspinor"))
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Parses CSV output into (headers, numeric-or-NaN rows).
fn parse(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (headers, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn column(headers: &[String], name: &str) -> usize {
    headers.iter().position(|h| h == name).unwrap()
}

#[test]
fn barrier_sweep_above_top_both_methods() {
    let o = run(&[
        "barrier", "--v0", "10", "--length", "10", "--emin", "1.01", "--emax", "3", "--steps",
        "200", "--method", "both",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (h, rows) = parse(&stdout(&o));
    assert_eq!(
        h,
        [
            "e_over_v0",
            "T1",
            "T2",
            "R1",
            "R2",
            "T_qm",
            "R_qm",
            "sum",
            "delta_numeric_closed"
        ]
    );
    assert_eq!(rows.len(), 200);
    for r in &rows {
        assert!(num(&r[8]) <= 1e-10);
        assert!((num(&r[7]) - 1.0).abs() <= 1e-10);
        assert!(num(&r[2]) <= 1e-10);
    }
    assert_eq!(num(&rows[0][0]), 1.01);
    assert_eq!(num(&rows[199][0]), 3.0);
}

#[test]
fn barrier_tunnelling_and_spin_flip_sweeps() {
    for args in [
        &[
            "barrier", "--v0", "1", "--length", "10", "--emin", "0.05", "--emax", "0.99",
            "--steps", "200",
        ][..],
        &[
            "barrier", "--v0", "1e6", "--length", "10", "--emin", "0.05", "--emax", "0.99",
        ][..],
    ] {
        let o = run(args);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let (h, rows) = parse(&stdout(&o));
        assert_eq!(h.len(), 8);
        assert_eq!(rows.len(), 200);
        for r in &rows {
            assert!((num(&r[7]) - 1.0).abs() <= 1e-10);
        }
    }
}

#[test]
fn flagged_points_exit_2() {
    // E = V0 − mc² makes the normalization singular.
    let o = run(&[
        "barrier", "--v0", "1e6", "--length", "1", "--emin", "0.5", "--emax", "0.5", "--steps", "1",
    ]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("flagged"));
    let (_, rows) = parse(&stdout(&o));
    assert_eq!(rows[0][1], "nan");
}

#[test]
fn spin_down_is_labelled_extrapolation() {
    let o = run(&[
        "barrier", "--v0", "10", "--length", "10", "--emin", "1.5", "--emax", "2", "--steps", "2",
        "--spin", "down",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("extrapolation"));
    let (_, rows) = parse(&stdout(&o));
    assert!(num(&rows[0][1]) <= 1e-10);
    assert!(num(&rows[0][2]) > 0.9);
}

#[test]
fn point_reports_both_methods_at_requested_precision() {
    let o = run(&[
        "point",
        "--v0",
        "10",
        "--length",
        "10",
        "--e-over-v0",
        "1.5",
    ]);
    assert_eq!(code(&o), 0);
    let (h, rows) = parse(&stdout(&o));
    assert_eq!(
        h,
        [
            "method",
            "e_over_v0",
            "T1",
            "T2",
            "R1",
            "R2",
            "T_qm",
            "R_qm",
            "sum"
        ]
    );
    assert_eq!(rows[0][0], "numeric");
    assert_eq!(rows[1][0], "closed");
    assert_eq!(rows[0][5], rows[1][5]);
    let p = BarrierProblem::new(15.0, 10.0, 10.0, Spin::Up, PhysicalConstants::default()).unwrap();
    let r2 = closed_form(&p).r2;
    // 12 significant digits.
    let printed = &rows[1][5];
    let digits = printed.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(digits.trim_start_matches('0').len(), 12);
    assert!(((num(printed) - r2) / r2).abs() < 1e-11);
}

#[test]
fn point_in_critical_band_uses_series() {
    let o = run(&[
        "point",
        "--v0",
        "10",
        "--length",
        "10",
        "--e-over-v0",
        "1.000000000001",
    ]);
    assert_eq!(code(&o), 0);
    let (_, rows) = parse(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "series");
    let t1 = num(&rows[0][2]);
    assert!(t1.is_finite() && t1 > 0.0);
}

#[test]
fn csv_round_trips_at_full_precision() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let o = run(&[
        "barrier",
        "--v0",
        "10",
        "--length",
        "10",
        "--emin",
        "1.2",
        "--emax",
        "2",
        "--steps",
        "9",
        "--method",
        "closed",
        "--precision",
        "17",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let (h, rows) = parse(&std::fs::read_to_string(&path).unwrap());
    let r1 = column(&h, "R1");
    for r in &rows {
        let ratio = num(&r[0]);
        let p = BarrierProblem::new(
            ratio * 10.0,
            10.0,
            10.0,
            Spin::Up,
            PhysicalConstants::default(),
        )
        .unwrap();
        assert_eq!(num(&r[r1]), closed_form(&p).r1);
    }
}

#[test]
fn json_mirrors_csv() {
    let args = ["well", "--length", "5", "--nmax", "4", "--numeric"];
    let csv_out = run(&args);
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let json_out = run(&json_args);
    assert_eq!(code(&json_out), 0);
    let (h, rows) = parse(&stdout(&csv_out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&json_out)).unwrap();
    let records = v.as_array().unwrap();
    assert_eq!(records.len(), rows.len());
    for (rec, row) in records.iter().zip(&rows) {
        let keys: Vec<&String> = rec.as_object().unwrap().keys().collect();
        assert_eq!(keys, h.iter().collect::<Vec<_>>());
        for (k, cell) in h.iter().zip(row) {
            assert_eq!(rec[k].as_f64().unwrap(), num(cell));
        }
    }
}

#[test]
fn well_levels_scale_as_n_squared() {
    let o = run(&["well", "--length", "10", "--nmax", "5"]);
    assert_eq!(code(&o), 0);
    let (h, rows) = parse(&stdout(&o));
    assert_eq!(h, ["n", "E_n_eV", "residual"]);
    assert_eq!(rows.len(), 5);
    let e1 = num(&rows[0][1]);
    for (i, r) in rows.iter().enumerate() {
        let n = (i + 1) as f64;
        assert!((num(&r[1]) / (n * n * e1) - 1.0).abs() < 1e-11);
    }
}

#[test]
fn well_numeric_deviation() {
    let o = run(&["well", "--length", "10", "--nmax", "50", "--numeric"]);
    assert_eq!(code(&o), 0);
    let (h, rows) = parse(&stdout(&o));
    let dev = column(&h, "rel_deviation");
    assert_eq!(rows.len(), 50);
    assert!(rows.iter().all(|r| num(&r[dev]) <= 1e-10));
}

#[test]
fn step_total_reflection_below_height() {
    let o = run(&[
        "step", "--v0", "10", "--emin", "0.1", "--emax", "0.9", "--steps", "5",
    ]);
    assert_eq!(code(&o), 0);
    let (h, rows) = parse(&stdout(&o));
    assert_eq!(h, ["e_over_v0", "T1", "T2", "R1", "R2", "sum"]);
    for r in &rows {
        assert_eq!(num(&r[1]), 0.0);
        assert_eq!(num(&r[2]), 0.0);
        assert!((num(&r[3]) + num(&r[4]) - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn pauli_table() {
    let o = run(&["pauli", "--extents", "32,64"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (h, rows) = parse(&stdout(&o));
    assert_eq!(
        h,
        [
            "h_nm",
            "identity_residual",
            "gauge_residual",
            "commutator_residual"
        ]
    );
    assert_eq!(rows.len(), 2);
    assert_eq!(num(&rows[0][0]), 0.25);
    assert!(num(&rows[1][1]) < num(&rows[0][1]));
}

#[test]
fn check_passes_and_is_deterministic() {
    let a = run(&["check", "--samples", "500", "--seed", "7"]);
    let b = run(&["check", "--samples", "500", "--seed", "7"]);
    assert_eq!(code(&a), 0, "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("checks passed"));
}

#[test]
fn check_default_run() {
    let o = run(&["check"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn injected_fault_names_nilpotency() {
    let o = run(&["check", "--samples", "50", "--fault", "eta-sign"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("first failure: eta nilpotency"));
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("constants.txt");
    std::fs::write(
        &cfg,
        "# constants\nhbar_c = 197.3269804\nmass_c2 = 510998.95\n",
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    let base = run(&["well", "--length", "1", "--nmax", "1"]);
    let custom = run(&["well", "--length", "1", "--nmax", "1", "--config", c]);
    let overridden = run(&[
        "well", "--length", "1", "--nmax", "1", "--config", c, "--mass", "0.5e6",
    ]);
    let e = |o: &Output| num(&parse(&stdout(o)).1[0][1]);
    let expected = (std::f64::consts::PI * 197.3269804).powi(2) / (2.0 * 510998.95);
    assert!((e(&custom) / expected - 1.0).abs() < 1e-11);
    assert!((e(&overridden) / e(&base) - (197.3269804f64 / 197.0).powi(2)).abs() < 1e-11);

    std::fs::write(&cfg, "speed_of_light = 3\n").unwrap();
    assert_eq!(code(&run(&["well", "--length", "1", "--config", c])), 64);
    let missing = dir.path().join("missing.txt");
    assert_eq!(
        code(&run(&[
            "well",
            "--length",
            "1",
            "--config",
            missing.to_str().unwrap()
        ])),
        64
    );
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        &["well", "--length", "10", "--nmax", "0"][..],
        &["barrier", "--v0=-1", "--length", "10"][..],
        &["barrier", "--v0", "10"][..],
        &[
            "barrier", "--v0", "10", "--length", "10", "--emin", "2", "--emax", "1",
        ][..],
        &[
            "barrier", "--v0", "10", "--length", "10", "--method", "fast",
        ][..],
        &[
            "point",
            "--v0",
            "10",
            "--length",
            "10",
            "--e-over-v0",
            "1.5",
            "--precision",
            "5",
        ][..],
        &[
            "point",
            "--v0",
            "10",
            "--length",
            "10",
            "--e-over-v0",
            "1.5",
            "--format",
            "xml",
        ][..],
        &["frobnicate"][..],
        &[][..],
    ] {
        assert_eq!(code(&run(args)), 64, "{args:?}");
    }
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
}
