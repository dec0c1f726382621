use std::path::Path;
use std::process::{Command, Output};

use nlbox_cli::config::{Command as Sub, ExperimentConfig, Format};
use nlbox_cli::records::{read_records, DecayRecord, SweepRecord};

fn nlbox(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlbox")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn verify_passes_and_names_key_checks() {
    let out = nlbox(&["verify", "--trials", "5000"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    for line in [
        "PASS tsirelson [boxes]: 0.853553 ≈ (2+√2)/4",
        "PASS classical-max [boxes]: 0.750000 ≈ 3/4",
        "PASS threshold [analysis]: 0.833333 ≈ q_of_p((3+√6)/6)=5/6",
    ] {
        assert!(text.contains(line), "missing `{line}` in\n{text}");
    }
    for module in ["bits", "function", "boxes", "protocols", "analysis", "circuits", "engines"] {
        assert!(text.contains(&format!("[{module}]")), "no check for {module}");
    }
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(nlbox(&["sweep", "--step", "0"]).status.code(), Some(2));
    assert_eq!(nlbox(&["sweep", "--model", "noisy:1.5"]).status.code(), Some(2));
    assert_eq!(nlbox(&["sweep", "--function", "ip:99"]).status.code(), Some(2));
    assert_eq!(nlbox(&["ip-decay", "--n-max", "21"]).status.code(), Some(2));
    assert_eq!(nlbox(&["sweep", "--bogus"]).status.code(), Some(2));
}

#[test]
fn ip_decay_perfect_and_half() {
    let out = nlbox(&["ip-decay", "--model", "perfect", "--n-max", "5", "--trials", "2000"]);
    assert!(out.status.success());
    let rows: Vec<DecayRecord> = read_records(&stdout(&out), Format::Csv).unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.success == 1.0));

    let out = nlbox(&["ip-decay", "--model", "noisy:0.5", "--n-max", "3", "--format", "json"]);
    let rows: Vec<DecayRecord> = read_records(&stdout(&out), Format::Json).unwrap();
    assert!(rows.iter().all(|r| (r.success - 0.5).abs() < 1e-12 && r.method == "exact"));
}

#[test]
fn ip_decay_tsirelson_follows_law() {
    let out = nlbox(&["ip-decay", "--n-max", "6", "--trials", "50000", "--seed", "3"]);
    let rows: Vec<DecayRecord> = read_records(&stdout(&out), Format::Csv).unwrap();
    for r in rows {
        let law = 0.5 + 0.5f64.powi(r.n as i32 + 1);
        assert!((r.analytic.unwrap() - law).abs() < 1e-12);
        match r.trials {
            None => assert!((r.success - law).abs() < 1e-12),
            Some(t) => assert!((r.success - law).abs() < 5.0 * (law * (1.0 - law) / t as f64).sqrt()),
        }
    }
}

#[test]
fn sweep_columns_and_threshold_verdicts() {
    let out = nlbox(&[
        "sweep", "--p-min", "0.5", "--p-max", "0.95", "--step", "0.45", "--depth", "1,3", "--trials", "3000",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().nth(1), Some("p,depth,analytic,sampled,ci_low,ci_high,above_threshold"));
    let rows: Vec<SweepRecord> = read_records(&text, Format::Csv).unwrap();
    assert_eq!(rows.len(), 4);
    let half = &rows[0];
    assert_eq!((half.p, half.depth, half.above_threshold), (0.5, 1, false));
    assert!(half.ci_low <= 0.5 && 0.5 <= half.ci_high);
    let high = &rows[3];
    assert_eq!((high.depth, high.above_threshold), (3, true));
    assert!(high.analytic > rows[2].analytic);
}

#[test]
fn sweep_is_deterministic_and_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("a.csv");
    let json = dir.path().join("a.json");
    let args = ["sweep", "--p-min", "0.9", "--p-max", "0.95", "--step", "0.05", "--depth", "2", "--trials", "2000"];
    let run = |out: &Path, format: &str, workers: &str| {
        let mut a = args.to_vec();
        a.extend(["--out", out.to_str().unwrap(), "--format", format, "--workers", workers]);
        assert!(nlbox(&a).status.success());
    };
    run(&csv, "csv", "1");
    run(&json, "json", "8");
    let from_csv: Vec<SweepRecord> = read_records(&std::fs::read_to_string(&csv).unwrap(), Format::Csv).unwrap();
    let from_json: Vec<SweepRecord> = read_records(&std::fs::read_to_string(&json).unwrap(), Format::Json).unwrap();
    assert_eq!(from_csv, from_json);

    let out = nlbox(&args);
    let from_stdout: Vec<SweepRecord> = read_records(&stdout(&out), Format::Csv).unwrap();
    assert_eq!(from_stdout, from_csv);
}

#[test]
fn emitted_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let first = nlbox(&[
        "ip-decay", "--n-max", "5", "--trials", "3000", "--seed", "11", "--emit-config", cfg.to_str().unwrap(),
    ]);
    assert!(first.status.success());
    let config = ExperimentConfig::load(&cfg).unwrap();
    assert_eq!(config.command, Sub::IpDecay);
    assert_eq!((config.n_max, config.trials, config.master_seed), (5, 3000, 11));
    let second = nlbox(&["ip-decay", "--config", cfg.to_str().unwrap()]);
    assert_eq!(stdout(&first), stdout(&second));
    // A config for one subcommand is rejected by another.
    assert_eq!(nlbox(&["sweep", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn table_functions_load_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("and.txt");
    std::fs::write(&table, "# and\n1 1\n0 0\n0 1\n").unwrap();
    let spec = format!("table:{}", table.display());
    let out = nlbox(&[
        "sweep", "--function", &spec, "--p-min", "1", "--p-max", "1", "--step", "0.1", "--depth", "1", "--trials", "2000",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: Vec<SweepRecord> = read_records(&stdout(&out), Format::Csv).unwrap();
    assert!((rows[0].analytic - 0.84375).abs() < 1e-12);
}
