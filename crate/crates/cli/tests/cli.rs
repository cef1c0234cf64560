use std::fs;
use std::process::{Command, Output};

fn repeater(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_repeater"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn column<'a>(csv: &'a str, row_key: &str, col: &str) -> &'a str {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|&h| h == col).unwrap();
    let row = lines.find(|l| l.starts_with(row_key)).unwrap();
    row.split(',').nth(i).unwrap()
}

#[test]
fn table1_defaults() {
    let o = repeater(&["table1", "--stdout"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert_eq!(column(&csv, "hamming-7,", "qubits_per_station"), "42");
    let golay: f64 = column(&csv, "golay-23,", "distance_km").parse().unwrap();
    assert!((golay / 3.7e5 - 1.0).abs() < 0.05);

    let o = repeater(&["table1", "--stdout", "--f-star", "0.999"]);
    let l: f64 = column(&stdout(&o), "golay-23,", "L_star").parse().unwrap();
    assert!((l / 730.0 - 1.0).abs() < 0.05, "{l}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(repeater(&[]).status.code(), Some(1));
    assert_eq!(repeater(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(repeater(&["table1", "--q", "abc"]).status.code(), Some(1));
    assert_eq!(
        repeater(&["lstar", "--stdout", "--codes", ""])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        repeater(&["simulate", "--stdout", "--code", "bch-127"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        repeater(&["table1", "--stdout", "--out", "x.csv"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(repeater(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "q=0.01\nf_star=0.9\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let from_file = stdout(&repeater(&["table1", "--stdout", "--config", cfg]));
    let direct = stdout(&repeater(&[
        "table1", "--stdout", "--q", "0.01", "--f-star", "0.9",
    ]));
    assert_eq!(from_file, direct);

    let flag_wins = stdout(&repeater(&[
        "table1", "--stdout", "--config", cfg, "--q", "0.003", "--f-star", "0.95",
    ]));
    assert_eq!(flag_wins, stdout(&repeater(&["table1", "--stdout"])));

    fs::write(dir.path().join("bad.cfg"), "qq=1\n").unwrap();
    let bad = dir.path().join("bad.cfg");
    assert_eq!(
        repeater(&["table1", "--stdout", "--config", bad.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn out_paths() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pf.csv");
    let o = repeater(&[
        "pfail",
        "--n",
        "7",
        "--n-min",
        "7",
        "--n-max",
        "8",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let sweep = fs::read_to_string(&out).unwrap();
    let targets = fs::read_to_string(dir.path().join("pf_targets.csv")).unwrap();
    assert!(sweep.starts_with("n,N0,P_fail\n"));
    assert!(targets.starts_with("n,target,N0,N0_per_n\n"));
    assert_eq!(column(&targets, "7,1.00000e-5", "N0"), "106");
}

#[test]
fn pfail_deterministic_halving() {
    // With certain success, exactly 8n raw pairs are needed.
    let o = repeater(&[
        "pfail",
        "--stdout",
        "--n",
        "7",
        "--n0-ratio-max",
        "9",
        "--f0",
        "1",
        "--beta",
        "0",
        "--delta",
        "0",
        "--n-min",
        "7",
        "--n-max",
        "7",
    ]);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert_eq!(column(&csv, "7,55,", "P_fail"), "1.00000e0");
    assert_eq!(column(&csv, "7,56,", "P_fail"), "0.00000e0");
    assert_eq!(column(&csv, "7,63,", "P_fail"), "0.00000e0");
}

#[test]
fn lstar_sweep_shape() {
    let csv = stdout(&repeater(&[
        "lstar",
        "--stdout",
        "--codes",
        "hamming-7,golay-23",
    ]));
    assert_eq!(csv.lines().count(), 1 + 2 * 60);
    let l = column(&csv, "hamming-7,1,3.", "L_star");
    let _: f64 = l.parse().unwrap();
    assert!(csv.contains(",false\n") && csv.contains(",true\n"));
}

#[test]
fn simulate_noiseless_and_repeatable() {
    let args = [
        "simulate",
        "--stdout",
        "--code",
        "hamming-7",
        "--q-b",
        "0",
        "--q-p",
        "0",
        "--trials",
        "2000",
    ];
    let a = repeater(&args);
    assert!(a.status.success());
    assert_eq!(
        column(
            &stdout(&a),
            "hamming-7,5,0.00000e0,0.00000e0,2000,42,error_free",
            "empirical"
        ),
        "1.00000e0"
    );
    assert_eq!(stdout(&a), stdout(&repeater(&args)));
}

#[test]
fn simulate_gate_exits_two() {
    // A single logical error in 100 trials is a 10-sigma excess at Q = 1e-4.
    let o = repeater(&[
        "simulate",
        "--stdout",
        "--code",
        "none",
        "--stations",
        "3",
        "--q-b",
        "1e-4",
        "--q-p",
        "1e-4",
        "--trials",
        "100",
        "--seed",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("regression gate"));
    let o = repeater(&["simulate", "--stdout", "--trials", "100000"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn rate_quadruples_with_half_eta() {
    let base = stdout(&repeater(&["rate", "--stdout"]));
    let half = stdout(&repeater(&["rate", "--stdout", "--eta", "0.15"]));
    let tau: f64 = column(&base, "hamming-7,", "tau_c_s").parse().unwrap();
    let tau_half: f64 = column(&half, "hamming-7,", "tau_c_s").parse().unwrap();
    assert!((tau_half / tau - 4.0).abs() < 1e-4);
    assert!((tau - 7e-3).abs() < 0.7e-3);
}
