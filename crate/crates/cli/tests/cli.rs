use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schurbench")).args(args).output().expect("spawn schurbench")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn witt_dimensions() {
    let o = run(&["witt", "-p", "3", "-n", "2", "-i", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("dims (2,1,4)"), "{s}");
    assert!(s.contains("order 2187"));
    assert!(s.contains("|G-| 729"));
}

#[test]
fn measure_schur_one_generator() {
    let o = run(&["measure", "mu-inf-schn", "-p", "3", "-n", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "3/4·C_inf ≈ 0.420094");
}

#[test]
fn exhaustive_classification_passes() {
    let o = run(&["--format", "json", "classify", "-p", "3", "-n", "1", "-i", "4", "--exhaustive"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let mut counts: Vec<u64> =
        v["classes"].as_array().unwrap().iter().map(|c| c["observed"].as_u64().unwrap()).collect();
    counts.sort_unstable();
    assert_eq!(counts, vec![1, 2, 6]);
    assert_eq!(v["verdict"]["passed"], true);
}

#[test]
fn sampled_classification_records_seed() {
    let o = run(&["--format", "json", "classify", "-n", "1", "-i", "3", "--samples", "500", "--seed", "11"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["spec"]["master_seed"], 11);
    let again = run(&["--format", "json", "classify", "-n", "1", "-i", "3", "--samples", "500", "--seed", "11"]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn classgroup_three_part() {
    let o = run(&["classgroup", "-D", "-3299"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("h = 27") && s.contains("3-part (2,1)"), "{s}");
}

#[test]
fn survey_csv_and_filters() {
    let dir = std::env::temp_dir().join(format!("schurbench-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("records.csv");
    let o = run(&[
        "--format",
        "json",
        "survey",
        "--bound",
        "500",
        "--exclude-p-divisible",
        "--csv",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let csv = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "discriminant,h,partition");
    assert_eq!(rows.len() as u64 - 1, v["discriminants"].as_u64().unwrap());
    for row in &rows[1..] {
        let d: i64 = row.split(',').next().unwrap().parse().unwrap();
        assert_ne!(d % 3, 0);
    }
    assert_eq!(run(&["survey", "--congruence", "4"]).status.code(), Some(2));
}

#[test]
fn character_rows_match() {
    let o = run(&["character", "-p", "5", "-n", "3", "-r", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("mismatch"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = std::env::temp_dir().join(format!("schurbench-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "# defaults\np = 5\nformat = json\n").unwrap();
    let c = cfg.to_str().unwrap();
    let o = run(&["--config", c, "witt", "-n", "1", "-i", "3"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["p"], 5);
    let o = run(&["--config", c, "--format", "text", "witt", "-p", "7", "-n", "1", "-i", "2"]);
    assert!(stdout(&o).contains("order 7"));
    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(run(&["--config", c, "witt", "-n", "1", "-i", "2"]).status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["witt", "-p", "4", "-n", "1", "-i", "2"]).status.code(), Some(2));
    assert_eq!(run(&["witt", "-p", "2", "-n", "1", "-i", "2"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["group", "-n", "2", "-i", "6", "--size-cap", "1000"]).status.code(), Some(3));
    assert_eq!(run(&["quotient", "-i", "3", "-n", "2", "--relations", "1 2 -1 -2"]).status.code(), Some(2));
    assert_eq!(run(&["verify-all", "--only", "99"]).status.code(), Some(2));
}

#[test]
fn failed_check_exits_one() {
    // a tolerance of zero cannot hold for a sampled run with several classes
    let o = run(&["classify", "-n", "1", "-i", "4", "--samples", "300", "--seed", "1", "--tolerance", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("check failed"));
}

#[test]
fn verify_selected_criteria() {
    let o = run(&["verify-all", "--only", "1,9"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(s.lines().filter(|l| l.contains(" PASS ")).count(), 2, "{s}");
}
