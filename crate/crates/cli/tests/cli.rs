use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn haa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_haa"))
        .args(args)
        .env_remove("HAA_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = haa(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    haa(args).status.code().expect("exit code")
}

/// Data rows of a CSV output (header comments and column line removed).
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn hamming_7_4_weight_enumerator() {
    let out = stdout(&["code-we", "--outer", "hamming:3"]);
    let counts: Vec<String> = rows(&out).iter().map(|r| r[1].clone()).collect();
    assert_eq!(counts, ["1", "0", "0", "7", "7", "0", "0", "1"]);
    assert!(out.starts_with("# haa "));
    assert!(out.contains("# seed: none"));
}

#[test]
fn scalar_outputs() {
    let gv = json(&stdout(&["gvb", "--rate", "26/31"]));
    let d = gv["rows"][0]["delta_gv"].as_f64().unwrap();
    assert!((d - 0.0236).abs() < 5e-4);

    let dm = json(&stdout(&[
        "delta-min",
        "--outer",
        "hamming:5",
        "--no-sensitivity",
    ]));
    let d = dm["rows"][0]["delta_min"].as_f64().unwrap();
    assert!((d - 0.0140).abs() < 5e-4);
    assert!(dm["diagnostics"]["bracket"].is_array());

    let cap = json(&stdout(&["capacity", "--rate", "0.5"]));
    let db = cap["rows"][0]["ebn0_db"].as_f64().unwrap();
    assert!((db - 0.18706).abs() < 1e-4);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["code-we", "--outer", "hamming:3", "--bogus"]), 2);
    assert_eq!(code(&["code-we"]), 2);
    assert_eq!(code(&["code-we", "--outer", "hamming:9"]), 2);
    assert_eq!(code(&["code-we", "--outer", "golay"]), 2);
    assert_eq!(code(&["gvb", "--rate", "3/2"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["ensemble-we", "--outer", "hamming:3"]), 2);
    assert_eq!(
        code(&[
            "dmin-bound",
            "--outer",
            "hamming:3",
            "--block-lengths",
            "20"
        ]),
        2
    );
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["ber", "--help"]), 0);
    assert_eq!(
        code(&[
            "dmin-bound",
            "--outer",
            "hamming:3",
            "--block-lengths",
            "21",
            "--target",
            "1.5"
        ]),
        1
    );
    let missing = Path::new("/nonexistent-dir/out.csv");
    assert_eq!(
        code(&["-o", missing.to_str().unwrap(), "gvb", "--rate", "0.5"]),
        1
    );
    // The tunnel is still closed at the top of this window.
    assert_eq!(
        code(&[
            "threshold",
            "--outer",
            "hamming:3",
            "--length",
            "20",
            "--window",
            "-2,-1",
            "--frames-per-point",
            "1",
            "--no-sensitivity",
        ]),
        1
    );
}

#[test]
fn negative_decibel_lists() {
    let out = stdout(&[
        "ber",
        "--uncoded",
        "--frame-bits",
        "100",
        "--ebn0",
        "-1,0",
        "--max-frames",
        "2",
    ]);
    let r = rows(&out);
    assert_eq!(r[0][0], "-1");
    assert_eq!(r[1][0], "0");
}

#[test]
fn empty_sweep_writes_header_only() {
    let out = stdout(&["spectral-shape", "--outer", "hamming:3", "--points", "0"]);
    assert!(rows(&out).is_empty());
    assert!(out.lines().any(|l| l.starts_with("delta,r,")));
}

#[test]
fn one_row_per_block_length() {
    let out = stdout(&[
        "dmin-bound",
        "--outer",
        "hamming:3",
        "--block-lengths",
        "70,140,280",
    ]);
    let r = rows(&out);
    assert_eq!(r.len(), 3);
    assert_eq!(r[0][0], "70");
    assert_eq!(r[2][0], "280");
    let d: Vec<usize> = r.iter().map(|row| row[1].parse().unwrap()).collect();
    assert!(d[0] <= d[1] && d[1] <= d[2]);
}

#[test]
fn monte_carlo_output_is_reproducible() {
    let ber = |workers: &str| {
        stdout(&[
            "ber",
            "--outer",
            "hamming:3",
            "--length",
            "30",
            "--ebn0",
            "1,3",
            "--min-frame-errors",
            "5",
            "--max-frames",
            "50",
            "--seed",
            "4",
            "--workers",
            workers,
        ])
    };
    let a = ber("1");
    assert_eq!(a, ber("1"));
    assert_eq!(a, ber("3"));
    let exit = |workers: &str| {
        stdout(&[
            "exit",
            "--outer",
            "hamming:3",
            "--length",
            "40",
            "--ebn0",
            "2",
            "--frames-per-point",
            "2",
            "--workers",
            workers,
        ])
    };
    assert_eq!(exit("1"), exit("2"));
}

#[test]
fn replay_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["csv", "json"] {
        let file = dir.path().join(format!("ber.{format}"));
        let first = stdout(&[
            "-o",
            file.to_str().unwrap(),
            "ber",
            "--uncoded",
            "--frame-bits",
            "500",
            "--ebn0",
            "0,2",
            "--min-frame-errors",
            "3",
            "--max-frames",
            "20",
            "--format",
            format,
        ]);
        assert!(first.is_empty());
        let original = std::fs::read_to_string(&file).unwrap();
        let replayed = stdout(&["replay", file.to_str().unwrap()]);
        assert_eq!(original, replayed, "{format}");
    }
    let garbage = dir.path().join("garbage.csv");
    std::fs::write(&garbage, "not an output file\n").unwrap();
    assert_eq!(code(&["replay", garbage.to_str().unwrap()]), 2);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_haa"))
        .args(["-o", "gv.json", "gvb", "--rate", "0.5"])
        .env("HAA_OUTPUT_DIR", dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let v = json(&std::fs::read_to_string(dir.path().join("gv.json")).unwrap());
    assert_eq!(v["meta"]["tool"], "haa");
    assert_eq!(v["meta"]["config"]["command"], "gvb");
}

#[test]
fn encode_traces_and_permutations() {
    let dir = tempfile::tempdir().unwrap();
    let perm = dir.path().join("perm.json");
    let out = stdout(&[
        "encode",
        "--outer",
        "hamming:3",
        "--length",
        "2",
        "--message",
        "10110001",
        "--seed",
        "9",
        "--dump-perm",
        perm.to_str().unwrap(),
    ]);
    let r = rows(&out);
    assert_eq!(r[0], ["message", "10110001"]);
    assert_eq!(r[3][1].len(), 14);
    let p = json(&std::fs::read_to_string(&perm).unwrap());
    assert_eq!(p["pi1"].as_array().unwrap().len(), 14);
    assert_eq!(p["pi2"].as_array().unwrap().len(), 14);

    assert_eq!(
        code(&["encode", "--outer", "hamming:3", "--message", "101"]),
        2
    );
    assert_eq!(
        code(&["encode", "--outer", "hamming:3", "--message", "10x1"]),
        2
    );
}

#[test]
fn ensemble_enumerator_rows() {
    let out = stdout(&[
        "ensemble-we",
        "--outer",
        "hamming:3",
        "--length",
        "3",
        "--max-h",
        "5",
    ]);
    let r = rows(&out);
    assert_eq!(r.len(), 6);
    assert_eq!(r[0][0], "0");
    assert_eq!(r[0][2], "1");
}
