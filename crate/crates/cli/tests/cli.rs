use std::process::Command;

fn pushpull(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_pushpull")).args(args).output().expect("binary runs")
}

#[test]
fn same_seed_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = pushpull(&[
            "figure", "fig7", "--engine", "both", "--trials", "50", "--seed", "7", "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 27);
}

#[test]
fn infeasible_pull_capacity_is_a_config_error() {
    let o = pushpull(&["sweep", "--lambda", "10", "--q", "9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("P would be -5"));
}

#[test]
fn empty_sweep_is_a_config_error() {
    assert_eq!(pushpull(&["sweep"]).status.code(), Some(2));
    assert_eq!(pushpull(&["sweep", "--q", "3"]).status.code(), Some(2));
}

#[test]
fn unknown_exhibit_and_engine_are_rejected() {
    assert_eq!(pushpull(&["figure", "fig11"]).status.code(), Some(2));
    assert_eq!(pushpull(&["figure", "fig5", "--engine", "exact"]).status.code(), Some(2));
}

#[test]
fn config_file_feeds_the_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "T_O = 5\nlambda_a = 12.0\nlambda_q = 8.0\nQ = 3\n").unwrap();
    let o = pushpull(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().unwrap().clone();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 1);
    let col = |name: &str| &rows[0][header.iter().position(|h| h == name).unwrap()];
    assert_eq!(col("T_O"), "5");
    assert_eq!(col("Q"), "3");
    assert_eq!(col("P"), "25");
    assert_eq!(col("lambda_a"), "12");
    assert_eq!(col("k_s"), "");

    std::fs::write(&cfg, "k_t = 2\n").unwrap();
    assert_eq!(pushpull(&["sweep", "--config", cfg.to_str().unwrap(), "--lambda", "5", "--q", "1"]).status.code(), Some(2));
}

#[test]
fn validate_small_grid_passes() {
    let o = pushpull(&["validate", "--lambda", "20", "--q", "2,6", "--trials", "2000"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("scenario_id,metric,analytic,sim_mean,se,z"));
    assert_eq!(text.lines().count(), 1 + 2 * 3);
}

#[test]
fn main_radio_sweep_reports_schedule_length() {
    let o = pushpull(&["sweep", "--lambda", "15", "--p", "20", "--k-s", "1,4"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("sweep-mr1-") && lines[0].contains(",19,20,1,"));
    assert!(lines[1].starts_with("sweep-mr4-") && lines[1].contains(",16,20,4,"));
}
