//! End-to-end checks of the `fatpoints` binary: flag handling, output
//! formats, exit codes, the config file, and the on-disk cache.

use std::path::PathBuf;
use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_fatpoints"))
        .args(args)
        .output()
        .expect("binary spawns");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("utf8 stdout"),
        String::from_utf8(out.stderr).expect("utf8 stderr"),
    )
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    std::fs::create_dir_all(&dir).expect("tmpdir exists");
    dir.join(name)
}

fn json(stdout: &str) -> serde_json::Value {
    serde_json::from_str(stdout).expect("valid json on stdout")
}

#[test]
fn cohomology_grid_csv() {
    let (code, stdout, _) = run(&[
        "cohomology",
        "--weights",
        "1,2,3",
        "--point",
        "1,1,1",
        "--m",
        "0..2",
        "--n",
        "0..12",
    ]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "a,b,c,u,n,m,h0,h1,h2,chi");
    assert_eq!(lines.len(), 1 + 39, "header plus 3 x 13 data rows");
    // m = 0 row reproduces dim_S; the simple point removes one section in
    // degree 6.
    assert_eq!(lines[1], "1,2,3,1,0,0,1,0,0,1");
    assert!(lines.contains(&"1,2,3,1,6,1,6,0,0,6"));
    // Rows are sorted by (m, n): the first data row of the m=1 block.
    assert_eq!(lines[14], "1,2,3,1,0,1,0,0,0,0");
}

#[test]
fn cohomology_negative_degrees_and_rational_field() {
    let (code, stdout, _) = run(&[
        "cohomology",
        "--weights",
        "1,1,1",
        "--point",
        "1,1,1",
        "--field",
        "q",
        "--m",
        "1..1",
        "--n",
        "-4..-4",
    ]);
    assert_eq!(code, 0);
    // n = -4 on the straight plane: h1 = L = 1, h2 = dim_S(1) = 3.
    assert_eq!(stdout.lines().nth(1).unwrap(), "1,1,1,1,-4,1,0,1,3,2");
}

#[test]
fn missing_points_file_is_exit_two() {
    let (code, _, stderr) = run(&[
        "cohomology",
        "--weights",
        "1,2,3",
        "--points-file",
        "/nonexistent/points.txt",
        "--m",
        "0..1",
        "--n",
        "0..2",
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("points file"), "diagnostic names the file: {stderr}");
}

#[test]
fn bad_weights_and_bad_flags_are_exit_two() {
    let (code, _, stderr) = run(&[
        "reg",
        "--weights",
        "2,4,6",
        "--point",
        "1,1,1",
        "--m-max",
        "2",
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("error"));
    // Unknown flag: clap's own usage error also exits 2.
    let (code, _, _) = run(&["reg", "--no-such-flag"]);
    assert_eq!(code, 2);
}

#[test]
fn reg_table_matches_known_values() {
    let (code, stdout, _) = run(&[
        "reg",
        "--weights",
        "1,2,3",
        "--point",
        "1,1,1",
        "--m-max",
        "4",
    ]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "m,a2,reg\n1,-1,1\n2,2,4\n3,5,7\n4,8,10\n");
}

#[test]
fn sigma_series_and_period_summary() {
    let (code, stdout, stderr) = run(&[
        "sigma",
        "--weights",
        "1,2,3",
        "--point",
        "1,1,1",
        "--s",
        "3",
        "--m-max",
        "8",
    ]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "m,reg,floor_sm,sigma");
    assert_eq!(lines[1], "1,1,3,-2");
    assert_eq!(lines[2], "2,4,6,-2");
    assert!(lines[3..].iter().all(|l| l.ends_with(",-2")));
    assert!(stderr.contains("max|sigma| = 2"));
    assert!(stderr.contains("period on m >= 4: 1"));
}

#[test]
fn sigma_with_sqrt_marker_and_random_point() {
    // One random simple point in the ordinary plane: reg(m) = m and
    // floor(sqrt(1)*m) = m, so sigma vanishes identically.
    let (code, stdout, stderr) = run(&[
        "sigma",
        "--weights",
        "1,1,1",
        "--points",
        "random:1",
        "--seed",
        "5",
        "--s",
        "sqrt",
        "--m-max",
        "6",
    ]);
    assert_eq!(code, 0);
    for line in stdout.lines().skip(1) {
        assert!(line.ends_with(",0"), "nonzero sigma in {line}");
    }
    assert!(stderr.contains("s = sqrt(1)"));
}

#[test]
fn negcurve_certificate_json() {
    let (code, stdout, _) = run(&[
        "negcurve",
        "--weights",
        "1,2,3",
        "--point",
        "1,1,1",
    ]);
    assert_eq!(code, 0);
    let v = json(&stdout);
    assert_eq!(v["abcu"], 6);
    assert_eq!(v["certificate"]["d"], 2);
    assert_eq!(v["certificate"]["m0"], 1);
    assert_eq!(v["certificate"]["s_candidate"], "3");
    assert_eq!(v["certificate"]["self_intersection"], "-1/3");

    // No negative curve on the straight plane with one simple point.
    let (code, stdout, _) = run(&["negcurve", "--weights", "1,1,1", "--point", "1,1,1"]);
    assert_eq!(code, 0);
    assert!(json(&stdout)["certificate"].is_null());
}

#[test]
fn sinv_report_json() {
    let (code, stdout, _) = run(&["sinv", "--weights", "2,3,5", "--point", "1,1,1"]);
    assert_eq!(code, 0);
    let v = json(&stdout);
    assert_eq!(v["abcu"], 30);
    assert_eq!(v["s_lower_bound_sq"], 30);
    assert_eq!(v["certificate"]["s_candidate"], "6");
    assert_eq!(v["s_used"], "6");
    assert_eq!(v["reg_over_m"].as_array().unwrap().len(), 8);
    assert!(v["verdict"].as_str().unwrap().starts_with("consistent"));
    // sigma = reg - floor(s*m) holds on every row of the report.
    for row in v["reg_over_m"].as_array().unwrap() {
        assert_eq!(
            row["sigma"].as_i64().unwrap(),
            row["reg"].as_i64().unwrap() - row["floor_sm"].as_i64().unwrap()
        );
    }
}

#[test]
fn nagata_probe_modes() {
    // Nine points, m = 1: the cubic through them violates the bound at
    // d = 3 in every attempt.
    let (code, stdout, _) = run(&["nagata", "--n", "9", "--m", "1", "--seed", "3"]);
    assert_eq!(code, 0);
    let v = json(&stdout);
    assert_eq!(v["mode"], "probe");
    assert_eq!(v["passed"], false);
    for attempt in v["attempts"].as_array().unwrap() {
        assert_eq!(attempt["rows"][0]["violation"]["d"], 3);
    }

    // Sixteen points pass for m = 1, 2.
    let (code, stdout, _) = run(&["nagata", "--n", "16", "--m", "1,2", "--seed", "3"]);
    assert_eq!(code, 0);
    let v = json(&stdout);
    assert_eq!(v["passed"], true);
    let rows = v["attempts"][0]["rows"].as_array().unwrap();
    assert_eq!(rows[0]["d_limit"], 4);
    assert_eq!(rows[1]["d_limit"], 8);
}

#[test]
fn nagata_covering_mode() {
    let (code, stdout, _) = run(&[
        "nagata",
        "--factor",
        "1,2,3",
        "--r",
        "1",
        "--m-max",
        "3",
        "--seed",
        "42",
    ]);
    assert_eq!(code, 0);
    let v = json(&stdout);
    assert_eq!(v["mode"], "covering");
    assert_eq!(v["n_points"], 6);
    assert_eq!(v["u"], 1);
    // Any single (A2)-valid point on P(1,2,3) carries the degree-2 curve.
    assert_eq!(v["per_m"][0]["d_min"], 2);
    assert_eq!(v["per_m"][0]["negative"], true);
    assert_eq!(v["certificate"]["d"], 2);

    // Mode flags are mutually exclusive.
    let (code, _, _) = run(&["nagata", "--n", "9", "--factor", "1,2,3", "--r", "1"]);
    assert_eq!(code, 2);
}

#[test]
fn split_demo_and_basechange() {
    let (code, stdout, _) = run(&[
        "split-demo",
        "--weights",
        "1,2,3",
        "--point",
        "1,1,1",
        "--prime",
        "7",
    ]);
    assert_eq!(code, 0);
    let v = json(&stdout);
    assert_eq!(v["orbit_size"], 6);
    assert_eq!(v["orbit"][3][1], "6");

    // A prime that does not split the covering is an input error.
    let (code, _, stderr) = run(&[
        "split-demo",
        "--weights",
        "1,2,3",
        "--point",
        "1,1,1",
        "--prime",
        "11",
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("divide"), "diagnostic explains the split: {stderr}");

    let (code, stdout, _) = run(&[
        "basechange-check",
        "--weights",
        "1,2,3",
        "--point",
        "1,1,1",
        "--prime",
        "7",
        "--m-max",
        "2",
    ]);
    assert_eq!(code, 0);
    let v = json(&stdout);
    assert_eq!(v["shift"], 3);
    assert_eq!(v["all_hold"], true);
    assert_eq!(v["rows"][0]["downstream_reg"], 1);
    assert_eq!(v["rows"][0]["upstream_reg"], 4);
    assert_eq!(v["rows"][1]["downstream_reg"], 4);
    assert_eq!(v["rows"][1]["upstream_reg"], 7);
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let cfg = scratch("run.cfg");
    std::fs::write(
        &cfg,
        "# demo config\nweights=1,2,3\npoint=1,1,1\nn=0..3\nm=1..1\n",
    )
    .unwrap();
    let cfg_s = cfg.to_str().unwrap();
    let (code, stdout, _) = run(&["cohomology", "--config", cfg_s]);
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().count(), 1 + 4);

    // A flag on the command line beats the file.
    let (code, stdout, _) = run(&["cohomology", "--config", cfg_s, "--n", "0..5"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().count(), 1 + 6);

    let (code, _, stderr) = run(&["cohomology", "--config", "/missing.cfg"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("config"));
}

#[test]
fn points_file_source() {
    let pts = scratch("points.txt");
    std::fs::write(&pts, "# two points\n1,1,1\n2, 1, 1\n").unwrap();
    let (code, stdout, _) = run(&[
        "reg",
        "--weights",
        "1,2,3",
        "--points-file",
        pts.to_str().unwrap(),
        "--m-max",
        "1",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("m,a2,reg\n"));
}

#[test]
fn cache_reuse_and_corruption_tolerance() {
    let cache = scratch("ranks.cache");
    std::fs::remove_file(&cache).ok();
    let args = [
        "cohomology",
        "--weights",
        "1,2,3",
        "--point",
        "1,1,1",
        "--m",
        "0..2",
        "--n",
        "0..8",
        "--cache",
        cache.to_str().unwrap(),
    ];
    let (code, first, stderr1) = run(&args);
    assert_eq!(code, 0);
    assert!(stderr1.contains("new entries"));
    let (code, second, stderr2) = run(&args);
    assert_eq!(code, 0);
    assert_eq!(first, second, "cache on/off must not change the table");
    assert!(stderr2.contains("hits"));
    // The second run computed nothing new.
    assert!(stderr2.contains(" 0 new entries"));

    // Corruption: garbage lines are skipped, the run still succeeds.
    let mut text = std::fs::read_to_string(&cache).unwrap();
    text.insert_str(0, "garbage line here\n");
    std::fs::write(&cache, text).unwrap();
    let (code, third, stderr3) = run(&args);
    assert_eq!(code, 0);
    assert_eq!(first, third);
    assert!(stderr3.contains("unreadable entry skipped"));

    // And the cache-free run agrees.
    let (code, free, _) = run(&args[..args.len() - 2]);
    assert_eq!(code, 0);
    assert_eq!(first, free);
}

#[test]
fn out_flag_writes_file_and_keeps_stdout_empty() {
    let out = scratch("table.csv");
    let (code, stdout, _) = run(&[
        "cohomology",
        "--weights",
        "1,1,1",
        "--point",
        "1,1,1",
        "--m",
        "0..1",
        "--n",
        "0..2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("a,b,c,u,n,m,h0,h1,h2,chi\n"));
    assert_eq!(text.lines().count(), 1 + 6);
}

#[test]
fn worker_count_does_not_change_bytes() {
    let base = [
        "sigma",
        "--weights",
        "1,2,3",
        "--point",
        "1,1,1",
        "--s",
        "3",
        "--m-max",
        "6",
    ];
    let mut one = base.to_vec();
    one.extend(["--workers", "1"]);
    let mut four = base.to_vec();
    four.extend(["--workers", "4"]);
    let (c1, out1, _) = run(&one);
    let (c4, out4, _) = run(&four);
    assert_eq!((c1, c4), (0, 0));
    assert_eq!(out1, out4);
}
