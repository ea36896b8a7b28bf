use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const EXAMPLE_B: &str = "1+1.7320508075688772i";
const SLICE: &str = "1:1.2,0:0,0:0,4:4,-0.7:-0.4,0:0";

fn bicusp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bicusp")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json_file(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn search_writes_report_with_echoed_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    // a small budget keeps this quick; the run is allowed to stop short
    let run = bicusp(&[
        "search",
        "--area-max",
        "6",
        "--max-d",
        "4",
        "--max-exp",
        "2",
        "--max-depth",
        "12",
        "--word-budget",
        "50",
        "--max-boxes",
        "300",
        "--out",
        p(&out),
    ]);
    assert!([0, 2].contains(&code(&run)), "{}", stderr(&run));
    let r = json_file(&out);
    let cfg = &r["config"];
    assert_eq!(cfg["area_bound"], 6.0);
    assert_eq!(cfg["max_d"], 4);
    assert_eq!(cfg["max_exp"], 2);
    assert_eq!(cfg["max_depth"], 12);
    assert_eq!(r["tool"]["name"], "bicusp");
    assert!(r["leaves"].as_array().is_some_and(|l| !l.is_empty()));
}

#[test]
fn slice_demo_exits_zero_with_every_leaf_killed() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("slice.json");
    let run =
        bicusp(&["search", "--region", SLICE, "--max-d", "2", "--max-exp", "1", "--max-depth", "10", "--out", p(&out)]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let r = json_file(&out);
    for leaf in r["leaves"].as_array().unwrap() {
        assert_eq!(leaf["status"], "eliminated_killer");
        // on this slice p(z x z) = a + c, which lies in [0.3, 0.8]
        assert_eq!(leaf["word"], "z x z");
    }
    assert_eq!(r["global_volume_bound"], "-inf");

    let check = bicusp(&["verify", "--report", p(&out), "--samples", "25"]);
    assert_eq!(code(&check), 0, "{}", stderr(&check));
    assert!(String::from_utf8_lossy(&check.stdout).starts_with("ok:"));
}

#[test]
fn report_bytes_do_not_depend_on_workers() {
    let dir = tempfile::tempdir().unwrap();
    let outs: Vec<_> = ["1", "4"]
        .iter()
        .map(|w| {
            let out = dir.path().join(format!("w{w}.json"));
            let run = bicusp(&[
                "search",
                "--region",
                "0.6:1.3,0:0,0:0,3.5:4,-0.5:-0.1,0:0",
                "--max-d",
                "2",
                "--max-exp",
                "1",
                "--max-depth",
                "7",
                "--workers",
                w,
                "--out",
                p(&out),
            ]);
            assert!([0, 2].contains(&code(&run)), "{}", stderr(&run));
            fs::read(&out).unwrap()
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn partial_search_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("partial.json");
    let run = bicusp(&["search", "--max-boxes", "5", "--word-budget", "5", "--out", p(&out)]);
    assert_eq!(code(&run), 2, "{}", stderr(&run));
    let r = json_file(&out);
    assert_eq!(r["truncated"], true);
    assert_eq!(r["global_volume_bound"], "unbounded");
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        &["search", "--area-max", "0"][..],
        &["search", "--max-d", "0"],
        &["search", "--region", "1:2,0:0"],
        &["search", "--bogus"],
        &["cusp", "--a", "4"],
        &["cusp", "--a", "4", "--b", "1+i"],
        &["horoball", "--a", "4", "--b", EXAMPLE_B, "--c", "2", "--cutoff", "2"],
        &["horoball", "--a", "4", "--b", EXAMPLE_B, "--c", "2", "--cutoff", "0"],
        &["frobnicate"],
        &[],
    ] {
        let run = bicusp(args);
        assert_eq!(code(&run), 64, "{args:?}: {}", stderr(&run));
    }
    assert_eq!(code(&bicusp(&["--help"])), 0);
    assert_eq!(code(&bicusp(&["--version"])), 0);
}

#[test]
fn cusp_audit_of_the_example_lattice() {
    let run = bicusp(&["cusp", "--a", "4", "--b", EXAMPLE_B]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let r: Value = serde_json::from_slice(&run.stdout).unwrap();
    let audit = &r["audit"];
    assert!((audit["volume"].as_f64().unwrap() - 2.0 * 3f64.sqrt()).abs() < 1e-9);
    assert!((audit["delta_bound"].as_f64().unwrap() - 36.0 / (4.0 * 3f64.sqrt())).abs() < 1e-9);
    assert!((audit["delta_bound"].as_f64().unwrap() - 5.196).abs() < 1e-3);
    assert_eq!(audit["delta_max"], 5);
    assert!(audit["max_exceptional_count"].as_u64().unwrap() <= 8);
    assert_eq!(r["config"]["b"], EXAMPLE_B);
    assert_eq!(r["config"]["slope_length"], 6.0);
}

#[test]
fn degenerate_lattice_exits_65() {
    let run = bicusp(&["cusp", "--a", "1", "--b", "1"]);
    assert_eq!(code(&run), 65);
    assert!(stderr(&run).contains("degenerate"));
    let run = bicusp(&["horoball", "--a", "2", "--b", "-4", "--c", "1"]);
    assert_eq!(code(&run), 65);
}

#[test]
fn square_lattice_slopes_match_brute_force() {
    let run = bicusp(&["cusp", "--a", "1", "--b", "1i", "--slope-length", "6"]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let r: Value = serde_json::from_slice(&run.stdout).unwrap();
    let got: BTreeSet<(i64, i64)> = r["audit"]["short_slopes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| (s["p"].as_i64().unwrap(), s["q"].as_i64().unwrap()))
        .collect();

    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    // translation p + q i has length sqrt(p² + q²); keep one of each ± pair
    let mut want = BTreeSet::new();
    for p in -10i64..=10 {
        for q in 0i64..=10 {
            if gcd(p, q) == 1 && p * p + q * q <= 36 && (q > 0 || p > 0) {
                want.insert((p, q));
            }
        }
    }
    assert_eq!(got, want);
    for s in r["audit"]["short_slopes"].as_array().unwrap() {
        let (p, q) = (s["p"].as_f64().unwrap(), s["q"].as_f64().unwrap());
        assert!((s["length"].as_f64().unwrap() - p.hypot(q)).abs() < 1e-12);
    }
}

#[test]
fn horoball_svg_shows_the_tangent_unit_balls() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("out.svg");
    let csv = dir.path().join("out.csv");
    let args =
        ["horoball", "--a", "4", "--b", EXAMPLE_B, "--c", "2", "--cutoff", "0.05", "--svg", p(&svg), "--csv", p(&csv)];
    let run = bicusp(&args);
    assert_eq!(code(&run), 0, "{}", stderr(&run));

    // γ = [[2, -1], [1, 0]] sends ∞ to 2 and γ⁻¹ sends it to 0, both with |c| = 1
    let table = fs::read_to_string(&csv).unwrap();
    let rows: Vec<Vec<f64>> =
        table.lines().skip(1).map(|l| l.split(',').take(3).map(|x| x.parse().unwrap()).collect()).collect();
    assert!(rows.iter().all(|r| r[2] <= 1.0 + 1e-9 && r[2] >= 0.05));
    let unit: Vec<_> = rows.iter().filter(|r| (r[2] - 1.0).abs() < 1e-9).collect();
    for (x, y) in [(0.0, 0.0), (2.0, 0.0)] {
        assert!(unit.iter().any(|r| (r[0] - x).abs() < 1e-9 && (r[1] - y).abs() < 1e-9), "no unit ball at {x}");
    }

    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.contains(r#"version="1.1""#));
    // diameter 1 at 40 px per unit
    assert_eq!(text.matches(r#" r="20.0000""#).count(), unit.len());
    assert_eq!(text.matches("<circle").count(), rows.len());
    assert!(text.contains(r#""cutoff":0.05"#));

    let first = fs::read(&svg).unwrap();
    assert_eq!(code(&bicusp(&args)), 0);
    assert_eq!(fs::read(&svg).unwrap(), first);
}

#[test]
fn horoball_without_outputs_prints_svg() {
    let run = bicusp(&["horoball", "--a", "4", "--b", EXAMPLE_B, "--c", "2", "--depth", "3"]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("<?xml"));
}

#[test]
fn embedded_configs_reproduce_their_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let d = |name: &str| dir.path().join(name);

    let run = bicusp(&["search", "--region", SLICE, "--max-d", "2", "--max-exp", "1", "--out", p(&d("s1.json"))]);
    assert_eq!(code(&run), 0);
    assert_eq!(code(&bicusp(&["search", "--config", p(&d("s1.json")), "--out", p(&d("s2.json"))])), 0);
    assert_eq!(fs::read(d("s1.json")).unwrap(), fs::read(d("s2.json")).unwrap());

    assert_eq!(
        code(&bicusp(&["cusp", "--a", "4", "--b", "1-2.5i", "--slope-length", "7", "--out", p(&d("c1.json"))])),
        0
    );
    assert_eq!(code(&bicusp(&["cusp", "--config", p(&d("c1.json")), "--out", p(&d("c2.json"))])), 0);
    assert_eq!(fs::read(d("c1.json")).unwrap(), fs::read(d("c2.json")).unwrap());

    let args =
        ["horoball", "--a", "4", "--b", EXAMPLE_B, "--c", "2", "--cutoff", "0.2", "--depth", "5", "--scale", "25"];
    assert_eq!(code(&bicusp(&[&args[..], &["--svg", p(&d("h1.svg"))]].concat())), 0);
    assert_eq!(code(&bicusp(&["horoball", "--config", p(&d("h1.svg")), "--svg", p(&d("h2.svg"))])), 0);
    assert_eq!(fs::read(d("h1.svg")).unwrap(), fs::read(d("h2.svg")).unwrap());
}

#[test]
fn flags_override_config_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"a":"4","b":"1+1.7320508075688772i","slope_length":3}"#).unwrap();
    let run = bicusp(&["cusp", "--config", p(&cfg), "--slope-length", "5"]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let r: Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(r["config"]["slope_length"], 5.0);
    assert_eq!(r["config"]["a"], "4");
}

#[test]
fn verify_rejects_a_corrupted_report() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    let bad = dir.path().join("bad.json");
    let run = bicusp(&["search", "--region", SLICE, "--max-d", "2", "--max-exp", "1", "--out", p(&good)]);
    assert_eq!(code(&run), 0);
    // z y z has p = b + c, of modulus above 4 everywhere on the slice
    fs::write(&bad, fs::read_to_string(&good).unwrap().replace("z x z", "z y z")).unwrap();
    let run = bicusp(&["verify", "--report", p(&bad)]);
    assert_eq!(code(&run), 1);
    assert!(stderr(&run).contains("z y z"), "{}", stderr(&run));
}
