//! Black-box tests of the binary: exit codes, file outputs, determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fogsplit"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn validate_prints_efficiency_table() {
    let out = run(&["validate", "--config", config("minimal.cfg").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("configuration ok"));
    // IoT network efficiency 0.22 / 0.054 = 4.0741 W/Gbps
    assert!(text.contains("4.0741"), "{text}");
    // EdgeFog processing 251 / 10800 = 0.0232 W/MIPS
    assert!(text.contains("0.0232"), "{text}");
}

#[test]
fn solve_writes_csv_to_stdout() {
    let out = run(&["solve", "--config", config("minimal.cfg").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("scenario,demand_mips"));
    let row = lines.next().unwrap();
    assert!(row.starts_with("minimal,2000,0.002,2,exact,"));
    assert!(row.ends_with(",true,0"), "{row}");
}

#[test]
fn solve_out_writes_csv_manifest_and_gnuplot() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("rows.csv");
    let out = run(&[
        "solve",
        "--config",
        config("minimal.cfg").to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(csv.lines().count(), 2);
    let manifest = std::fs::read_to_string(out_path.with_extension("manifest")).unwrap();
    assert!(manifest.contains("catalog_version: table1-v1"));
    assert!(manifest.contains("solver: exact"));
    let dat = std::fs::read_to_string(out_path.with_extension("dat")).unwrap();
    assert!(dat.starts_with("# K total_w"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let cfg = config("minimal.cfg");
    let args = ["solve", "--config", cfg.to_str().unwrap(), "--k", "1..3"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn flag_overrides_change_the_grid() {
    let out = run(&[
        "solve",
        "--config",
        config("minimal.cfg").to_str().unwrap(),
        "--k",
        "1..3",
        "--traffic",
        "1,3",
        "--solver",
        "greedy",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1 + 6); // 2 traffic x 3 K
    assert!(text.contains(",greedy,"));
}

#[test]
fn usage_errors_exit_1() {
    let out = run(&["solve"]); // missing --config
    assert_eq!(out.status.code(), Some(1));
    let out = run(&[
        "solve",
        "--config",
        config("minimal.cfg").to_str().unwrap(),
        "--solver",
        "simplex",
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    let out = run(&["solve", "--config", config("minimal.cfg").to_str().unwrap(), "--k", "0..x"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_errors_exit_2() {
    let out = run(&["solve", "--config", "/nonexistent/file.cfg"]);
    assert_eq!(out.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "[solver]\nkind = simplex\n").unwrap();
    let out = run(&["solve", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("line 2"));

    // profile violation: idle above max
    let bad = dir.path().join("profile.cfg");
    std::fs::write(&bad, "[profiles]\niot.net.idle_w = 99\n").unwrap();
    let out = run(&["validate", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("IotDevice.net"), "{}", stderr(&out));
}

#[test]
fn oracle_size_cap_exits_3() {
    let out = run(&[
        "solve",
        "--config",
        config("scenario1.cfg").to_str().unwrap(),
        "--solver",
        "oracle",
        "--k",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("size cap"), "{}", stderr(&out));
}

#[test]
fn dump_placement_lists_allocations() {
    let out = run(&[
        "solve",
        "--config",
        config("minimal.cfg").to_str().unwrap(),
        "--dump-placement",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("placement for traffic 2 Mbps, K = 2"), "{text}");
    assert!(text.contains("demand 0"));
    assert!(text.contains("= 2000 MIPS"));
}

#[test]
fn validate_flag_matches_subcommand() {
    let via_flag = run(&[
        "solve",
        "--config",
        config("minimal.cfg").to_str().unwrap(),
        "--validate",
    ]);
    let via_cmd = run(&["validate", "--config", config("minimal.cfg").to_str().unwrap()]);
    assert_eq!(via_flag.status.code(), Some(0));
    assert_eq!(stdout(&via_flag), stdout(&via_cmd));
}

#[test]
fn out_of_range_traffic_warns_but_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("wide.cfg");
    std::fs::write(
        &cfg,
        "[sweep]\nactive_iot = 1\ntraffic_mbps = 20\nk = 1\n",
    )
    .unwrap();
    let out = run(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stderr(&out).contains("warning"), "{}", stderr(&out));
}
